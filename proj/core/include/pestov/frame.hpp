#pragma once

#include <string>
#include <vector>

#include "pestov/models.hpp"

namespace pestov {

/// A point of the orthonormal frame bundle in the local trivialization
/// w = E(x) * a, where E(x) is the reference frame (Gram-Schmidt of the
/// coordinate basis) and a is a rotation.
struct FramePoint {
  ChartPoint x;
  MatD a;
};

/// Element of Lambda^2 R^n identified with a skew matrix via
/// xi theta := iota_theta xi, i.e. (e_i ^ e_j) theta = <theta,e_i> e_j -
/// <theta,e_j> e_i. The basis (e_i ^ e_j)_{i<j} is orthonormal; in matrix
/// terms the component along e_i ^ e_j is entries(j, i).
struct SkewForm {
  int n = 0;
  MatD entries;

  static SkewForm zero(int n);
  static SkewForm wedge(int i, int j, int n);  // e_i ^ e_j
  static SkewForm from_matrix(const MatD& m);  // skew-symmetrizes exactly
  static SkewForm from_components(int n, const SVec<double, kMaxL2>& comp);

  SVec<double, kMaxL2> components() const;
  double norm() const;
  VecD apply(const VecD& theta) const;  // matrix * vector

  friend SkewForm bracket(const SkewForm& a, const SkewForm& b);  // [a,b]
};

struct Direction {
  VecD theta;
};

struct FrameTangent {
  FramePoint base;
  VecD dx;
  MatD da;
};

/// Frame-bundle point with jet-valued coordinates (used by the derivative
/// engine; the chart never changes during a jet computation).
struct FrameJet {
  VecJ x;
  MatJ a;
  int chart_id = 0;
};

FrameJet lift(const FramePoint& w);
FramePoint values(const FrameJet& w);

// ---- SO(n) utilities --------------------------------------------------------

/// exp of a skew matrix: closed form for n = 2, Rodrigues for n = 3,
/// scaling-and-squaring otherwise.
MatD so_expm(const MatD& xi);
/// Nearest rotation (polar factor, det corrected to +1).
MatD polar_project(const MatD& a);
double so_defect(const MatD& a);  // ||a^T a - I||_inf

/// Throws PreconditionError if w violates the FramePoint invariants.
void validate_frame_point(const MetricModel& m, const FramePoint& w,
                          double tol = 1e-8);

// ---- frame bundle operations ------------------------------------------------

MatD reference_frame(const MetricModel& m, const ChartPoint& x);

/// Connection form of the reference frame: omega(Z)_{ij} = g(nabla_Z E_j, E_i).
SkewForm connection_form(const MetricModel& m, const ChartPoint& x,
                         const VecD& Z);
MatJ connection_form_jet(const MetricModel& m, int chart_id, const VecJ& x,
                         const VecJ& Z);

/// Fundamental (vertical) field Y_xi at w: dx = 0, da = a xi.
FrameTangent vertical_field(const FramePoint& w, const SkewForm& xi);

/// Standard (horizontal) field B_theta at w: dx = chart components of
/// w(theta), da = -omega(w(theta)) a.
FrameTangent standard_field(const MetricModel& m, const FramePoint& w,
                            const Direction& theta);

/// Jet-level velocity of B_theta; this is the single evaluation the exact
/// derivative engine and the RK4 integrator both consume.
struct FrameVelocityJ {
  VecJ dx;
  MatJ da;
};
FrameVelocityJ standard_velocity_jet(const MetricModel& m, const FrameJet& s,
                                     const VecJ& theta);

// ---- flows -------------------------------------------------------------------

struct FlowStep {
  double t = 0.0;
  FramePoint w;
};

struct FlowResult {
  FramePoint end;
  std::vector<FlowStep> steps;  // populated when record_every > 0
  bool exited = false;          // left the model domain before time t
  double exit_time = 0.0;
  std::string diagnostic;
};

/// RK4 integration of the flow of B_theta with per-step polar
/// re-orthonormalization and automatic sphere re-charting. Throws
/// DomainError via frame_flow/b_theta_flow; the _result variants report a
/// domain exit in-band together with the partial trajectory.
FlowResult b_theta_flow_result(const MetricModel& m, const FramePoint& w,
                               const Direction& theta, double t, double dt,
                               int record_every = 0);

FramePoint frame_flow(const MetricModel& m, const FramePoint& w, double t,
                      double dt);
FramePoint b_theta_flow(const MetricModel& m, const FramePoint& w,
                        const Direction& theta, double t, double dt);

/// Pure RK4 flow of the field (no re-orthonormalization); used by the
/// finite-difference derivative path where the map itself is differentiated.
FramePoint b_theta_flow_raw(const MetricModel& m, const FramePoint& w,
                            const VecD& theta, double t, double dt);

/// Exact flow of the fundamental field Y_xi: (x, a) -> (x, a exp(t xi)).
FramePoint vertical_flow(const FramePoint& w, const SkewForm& xi, double t);

/// Re-expresses a frame point in the other sphere chart.
FramePoint rechart(const MetricModel& m, const FramePoint& w, int to_chart);

/// Chart-independent trivialization of the sphere frame bundle: the
/// (n+1) x (n+1) matrix whose first n columns are the embedded frame vectors
/// and whose last column is the embedded base point over the radius.
SMat<Jet> sphere_group_matrix(const MetricModel& m, const FrameJet& w);

// ---- connection map on SM ----------------------------------------------------

struct SMPoint {
  ChartPoint x;
  VecD v;  // unit tangent, chart components
};
struct SMTangent {
  VecD dx;
  VecD dv;
};

/// K(zeta) = dv + Gamma(dx, v): kills horizontal lifts, identifies vertical
/// vectors with v^perp. Throws PreconditionError if zeta is not tangent to SM.
VecD connection_map(const MetricModel& m, const SMPoint& z,
                    const SMTangent& zeta);

}  // namespace pestov
