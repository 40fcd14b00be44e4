#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pestov/frame.hpp"

namespace pestov {

/// Smooth scalar evaluator on the frame bundle. Evaluating on jet-valued
/// coordinates yields exact nested derivatives; evaluating on constant jets
/// is plain evaluation.
using ScalarField = std::function<Jet(const MetricModel&, const FrameJet&)>;

/// Names one generating flow: the vertical flow of Y_xi or the horizontal
/// flow of B_theta.
struct FieldSpec {
  enum class Kind { Vertical, Standard };
  Kind kind = Kind::Vertical;
  SkewForm xi;
  VecD theta;

  static FieldSpec vertical(SkewForm s) {
    FieldSpec f;
    f.kind = Kind::Vertical;
    f.xi = std::move(s);
    return f;
  }
  static FieldSpec standard(VecD th) {
    FieldSpec f;
    f.kind = Kind::Standard;
    f.theta = std::move(th);
    return f;
  }
  static FieldSpec standard_axis(int j, int n) {
    VecD th(n);
    th[j] = 1.0;
    return standard(std::move(th));
  }
};

/// Lambda^2-valued field given by one scalar component per basis 2-form.
struct TwoFormField {
  int n = 0;
  std::vector<ScalarField> comps;  // l2_dim(n) entries, lexicographic
};

enum class DeriveMethod { Jet, FD };

struct DeriveOptions {
  double fd_step = 1e-2;  // base step h
  int fd_richardson = 2;  // extrapolation levels on top of the centered stencil
  double fd_flow_dt = 1e-3;  // RK4 step cap; effective dt = min(dt, h/10)
};

inline constexpr int kMaxChain = 4;

double eval(const MetricModel& m, const ScalarField& f, const FramePoint& w);

/// (V_1 V_2 ... V_k f)(w), leftmost field applied last. The Jet method
/// composes the exact flows at first order in nilpotent parameters and is
/// exact up to rounding; the FD method nests centered stencils with
/// Richardson extrapolation and exists as an independent cross-check.
double derive(const MetricModel& m, const ScalarField& f, const FramePoint& w,
              std::span<const FieldSpec> chain,
              DeriveMethod method = DeriveMethod::Jet,
              const DeriveOptions& opts = {});

/// Jet-in/jet-out core: the chain derivative of f at a jet-valued point,
/// retaining the point's outer jet variables. This is what makes operator
/// compositions (a derivative of a field that is itself a derivative)
/// possible without any truncation.
Jet derive_at(const MetricModel& m, const ScalarField& f, const FrameJet& w,
              std::span<const FieldSpec> chain);

/// (A B f - B A f)(w).
double commutator_apply(const MetricModel& m, const ScalarField& f,
                        const FramePoint& w, const FieldSpec& A,
                        const FieldSpec& B,
                        DeriveMethod method = DeriveMethod::Jet,
                        const DeriveOptions& opts = {});

}  // namespace pestov
