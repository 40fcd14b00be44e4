#pragma once

#include <string>
#include <vector>

#include "pestov/errors.hpp"
#include "pestov/jet.hpp"
#include "pestov/linalg.hpp"

namespace pestov {

inline constexpr int kMaxManifoldDim = 4;

// Domain constants (documented in the README):
//  - hyperbolic ball evaluations require |x| <= kBallDomainRadius,
//  - random sweeps over the ball stay within |x| <= kBallSampleRadius,
//  - sphere charts are evaluated for |x| <= kSphereChartFactor * radius and
//    flows re-chart once |x| > radius (the equator in either chart).
inline constexpr double kBallDomainRadius = 0.98;
inline constexpr double kBallSampleRadius = 0.9;
inline constexpr double kSphereChartFactor = 2.0;

enum class ModelKind { FlatTorus, RoundSphere, HyperbolicBall, PerturbedHyperbolic };

struct ModelParams {
  std::vector<double> torus_periods;  // FlatTorus only
  double sphere_radius = 1.0;         // RoundSphere only
  double perturb_eps = 0.0;           // PerturbedHyperbolic only, |eps| <= 0.1
  double perturb_freq = 1.0;          // PerturbedHyperbolic only
};

/// A chart-based model metric with analytic derivatives of every order
/// (evaluators are written over the jet algebra).
struct MetricModel {
  ModelKind kind = ModelKind::FlatTorus;
  int dim = 2;
  ModelParams params;

  static MetricModel flat_torus(int n, std::vector<double> periods = {});
  static MetricModel round_sphere(int n, double radius = 1.0);
  static MetricModel hyperbolic_ball(int n);
  static MetricModel perturbed_hyperbolic(int n, double eps, double freq = 1.0);

  std::string name() const;
  int chart_count() const { return kind == ModelKind::RoundSphere ? 2 : 1; }
  /// Constant metric in chart coordinates (all Christoffel symbols vanish).
  bool flat() const { return kind == ModelKind::FlatTorus; }
  /// Compact model whose Liouville measure we can sample.
  bool closed() const {
    return kind == ModelKind::FlatTorus || kind == ModelKind::RoundSphere;
  }
};

struct ChartPoint {
  VecD coords;
  int chart_id = 0;
};

// ---- lifting helpers ------------------------------------------------------

VecJ lift(const VecD& x);
MatJ lift(const MatD& a);
VecD values(const VecJ& x);
MatD values(const MatJ& a);

// ---- jet-level geometry (exact derivatives to any nesting depth) ----------

/// Throws DomainError if the (value part of the) point is outside the chart
/// domain of the model.
void check_domain(const MetricModel& m, int chart_id, const VecD& x);

Jet conformal_factor_jet(const MetricModel& m, int chart_id, const VecJ& x);
MatJ metric_jet(const MetricModel& m, int chart_id, const VecJ& x);

struct ChristoffelJ {
  int n = 0;
  std::array<Jet, kMaxManifoldDim * kMaxManifoldDim * kMaxManifoldDim> c{};
  Jet& at(int k, int i, int j) { return c[(k * n + i) * n + j]; }
  const Jet& at(int k, int i, int j) const { return c[(k * n + i) * n + j]; }
};
ChristoffelJ christoffel_jet(const MetricModel& m, int chart_id, const VecJ& x);

/// Component l of R(d_i, d_j) d_k in chart coordinates.
struct CurvatureTensorJ {
  int n = 0;
  std::array<Jet, kMaxManifoldDim * kMaxManifoldDim * kMaxManifoldDim *
                      kMaxManifoldDim>
      c{};
  Jet& at(int i, int j, int k, int l) {
    return c[((i * n + j) * n + k) * n + l];
  }
  const Jet& at(int i, int j, int k, int l) const {
    return c[((i * n + j) * n + k) * n + l];
  }
};
CurvatureTensorJ riemann_tensor_jet(const MetricModel& m, int chart_id,
                                    const VecJ& x);

/// g(R(u, v) z, t) for chart-component vectors.
Jet riemann_lowered(const MetricModel& m, int chart_id, const VecJ& x,
                    const CurvatureTensorJ& R, const VecJ& u, const VecJ& v,
                    const VecJ& z, const VecJ& t);

/// Gram-Schmidt frame of the coordinate basis, fixed ordering: column j holds
/// the chart components of the j-th frame vector. E(x)^T g(x) E(x) = Id.
MatJ reference_frame_jet(const MetricModel& m, int chart_id, const VecJ& x);

// ---- sphere chart atlas ----------------------------------------------------

/// Embedding of a chart point into R^{n+1} (RoundSphere only).
SVec<Jet> sphere_embed(const MetricModel& m, int chart_id, const VecJ& x);
/// Chart coordinates of an embedded point p with |p| = radius.
VecJ sphere_chart_coords(const MetricModel& m, int chart_id,
                         const SVec<Jet>& p);
/// Chart whose coordinate ball |x| <= radius covers p (0 iff last coord <= 0).
int sphere_preferred_chart(const MetricModel& m, const SVec<double>& p);
/// Analytic transition map between the two stereographic charts
/// (an involution, orientation preserving).
VecJ sphere_transition(const MetricModel& m, const VecJ& x);

// ---- public double-level operations (the `manifold` surface) ---------------

MatD metric_at(const MetricModel& m, const ChartPoint& x);
/// Exact first and second metric derivatives from the same evaluator.
MatD metric_d1_at(const MetricModel& m, const ChartPoint& x, int k);
MatD metric_d2_at(const MetricModel& m, const ChartPoint& x, int k, int l);

struct ChristoffelD {
  int n = 0;
  std::array<double, kMaxManifoldDim * kMaxManifoldDim * kMaxManifoldDim> c{};
  double& at(int k, int i, int j) { return c[(k * n + i) * n + j]; }
  const double& at(int k, int i, int j) const {
    return c[(k * n + i) * n + j];
  }
};
ChristoffelD christoffel_at(const MetricModel& m, const ChartPoint& x);

struct CurvatureTensor {
  int n = 0;
  std::vector<double> c;
  double& at(int i, int j, int k, int l) {
    return c[((i * n + j) * n + k) * n + l];
  }
  double at(int i, int j, int k, int l) const {
    return c[((i * n + j) * n + k) * n + l];
  }
};

/// Symmetric bilinear form <R(E_i ^ E_j), E_k ^ E_l> on Lambda^2 T_xM in the
/// orthonormal 2-form basis built from the reference frame.
struct CurvatureEndomorphism {
  int n = 0;
  SMat<double, kMaxL2> form;
};

struct RiemannResult {
  CurvatureTensor tensor;
  CurvatureEndomorphism endo;
};
RiemannResult riemann_at(const MetricModel& m, const ChartPoint& x);

/// Sectional curvature of the plane span(u, v): g(R(u,v)v, u) / |u ^ v|^2.
/// Throws PreconditionError for a degenerate plane.
double sectional_curvature(const MetricModel& m, const ChartPoint& x,
                           const VecD& u, const VecD& v);

/// Canonicalizes torus coordinates into [0, L_i).
VecD wrap_torus(const MetricModel& m, const VecD& x);

}  // namespace pestov
