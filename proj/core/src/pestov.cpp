#include "pestov/pestov.hpp"

#include <cmath>

namespace pestov {

namespace {

FieldSpec vert(int i, int j, int n) {
  return FieldSpec::vertical(SkewForm::wedge(i, j, n));
}

}  // namespace

PointwiseDetail pointwise_pestov_detail(const MetricModel& m,
                                        const ScalarField& f,
                                        const FramePoint& w) {
  const int n = m.dim;
  const int d2 = l2_dim(n);
  const FieldSpec X = FieldSpec::standard_axis(0, n);

  // A = sum_a (X Y_a Y_a X f), B = sum_a (Y_a X X Y_a f)
  double A = 0.0, B = 0.0;
  for (int a = 0; a < d2; ++a) {
    auto [i, j] = l2_pair(a, n);
    const FieldSpec Y = vert(i, j, n);
    const FieldSpec xyyx[4] = {X, Y, Y, X};
    const FieldSpec yxxy[4] = {Y, X, X, Y};
    A += derive(m, f, w, xyyx);
    B += derive(m, f, w, yxxy);
  }

  const FieldSpec xx[2] = {X, X};
  const double C = -(n - 1) * derive(m, f, w, xx);

  // D = sum_a Y_a [(R_FM grad_V f)_a]
  double D = 0.0;
  if (!m.flat()) {
    for (int a = 0; a < d2; ++a) {
      auto [i, j] = l2_pair(a, n);
      const FieldSpec chain[1] = {vert(i, j, n)};
      D += derive(m, rfm_grad_v_component(f, a), w, chain);
    }
  }

  PointwiseDetail out;
  out.lhs = A - B;
  out.rhs = C + D;
  out.scale = std::max({std::abs(A), std::abs(B), std::abs(C), std::abs(D)});
  out.relative =
      std::abs(out.lhs - out.rhs) / std::max(out.scale, kResidualFloor);
  return out;
}

double pointwise_pestov_residual(const MetricModel& m, const ScalarField& f,
                                 const FramePoint& w) {
  return pointwise_pestov_detail(m, f, w).relative;
}

namespace {

/// Per-sample terms of the global identity:
/// out = { |dV X u|^2, |X dV u|^2, (n-1)(X u)^2, <R_FM dV u, dV u>, q }
/// with q = out0 - out1 - out2 + out3.
class GlobalTerms {
 public:
  GlobalTerms(const MetricModel& m, const ScalarField& u) : m_(m), u_(u) {}

  void operator()(const FramePoint& w, std::span<double> out) const {
    const int n = m_.dim;
    const int d2 = l2_dim(n);
    const FieldSpec X = FieldSpec::standard_axis(0, n);
    FrameJet wj = lift(w);

    double t0 = 0.0, t1 = 0.0;
    SVec<double, kMaxL2> gv(d2);
    for (int a = 0; a < d2; ++a) {
      auto [i, j] = l2_pair(a, n);
      const FieldSpec Y = vert(i, j, n);
      const FieldSpec yx[2] = {Y, X};
      const FieldSpec xy[2] = {X, Y};
      const double dvxu = derive_at(m_, u_, wj, yx).value();
      const double xdvu = derive_at(m_, u_, wj, xy).value();
      t0 += dvxu * dvxu;
      t1 += xdvu * xdvu;
      const FieldSpec y1[1] = {Y};
      gv[a] = derive_at(m_, u_, wj, y1).value();
    }
    const FieldSpec x1[1] = {X};
    const double xu = derive_at(m_, u_, wj, x1).value();
    const double t2 = (n - 1) * xu * xu;

    double t3 = 0.0;
    if (!m_.flat()) {
      SMat<Jet, kMaxL2> M = r_fm_matrix_jet(m_, wj);
      for (int a = 0; a < d2; ++a)
        for (int b = 0; b < d2; ++b) {
          const double mv = M(a, b).value();
          if (mv != 0.0) t3 += gv[a] * mv * gv[b];
        }
    }
    out[0] = t0;
    out[1] = t1;
    out[2] = t2;
    out[3] = t3;
    out[4] = t0 - t1 - t2 + t3;
  }

 private:
  const MetricModel& m_;
  const ScalarField& u_;
};

}  // namespace

IdentityCheck global_pestov_residual(const MetricModel& m,
                                     const ScalarField& u, std::uint64_t seed,
                                     std::int64_t count, int workers,
                                     double tolerance) {
  if (!m.closed()) {
    throw UnsupportedModelError(
        "global identity checks require a closed model, got " + m.name());
  }
  GlobalTerms terms(m, u);
  auto est = mc_multi(
      m,
      [&terms](const FramePoint& w, std::span<double> out) { terms(w, out); },
      5, seed, count, workers);

  IdentityCheck chk;
  chk.name = "pestov_global";
  chk.model = m;
  chk.lhs = est[0].value - est[1].value;
  chk.rhs = est[2].value - est[3].value;
  chk.residual = std::abs(est[4].value);
  chk.stderr_ = est[4].stderr_;
  chk.tolerance = tolerance;
  chk.pass = check_passes(chk.residual, chk.tolerance, chk.stderr_);
  return chk;
}

MatD invariance_group_element(int n, InvarianceGroup cls, Philox& rng) {
  const int fixed = cls == InvarianceGroup::SOn1 ? 1 : 2;
  MatD a = MatD::identity(n);
  const int k = n - fixed;
  if (k >= 2) {
    MatD r = haar_rotation(k, rng);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(fixed + i, fixed + j) = r(i, j);
  }
  return a;
}

namespace {

double field_scale(const MetricModel& m, const ScalarField& f,
                   std::span<const FramePoint> pts) {
  double s = 1.0;
  for (const FramePoint& w : pts) {
    s = std::max(s, std::abs(f(m, lift(w)).value()));
  }
  return s;
}

}  // namespace

IdentityCheck associated_pestov_residual(const MetricModel& m,
                                         InvarianceGroup cls,
                                         const ScalarField& u,
                                         std::uint64_t seed,
                                         std::int64_t count, int workers,
                                         double tolerance) {
  if (!m.closed()) {
    throw UnsupportedModelError(
        "associated identity checks require a closed model, got " + m.name());
  }
  const int n = m.dim;
  const int fixed = cls == InvarianceGroup::SOn1 ? 1 : 2;
  if (fixed >= n) {
    throw PreconditionError("invariance class undefined for dim " +
                            std::to_string(n));
  }

  // Invariance precondition: f(w a) = f(w) for a in G, to 1e-8 relative.
  constexpr int kProbe = 16;
  Philox grng(mix_seed(seed, 0x1aa7));
  std::vector<FramePoint> probes;
  for (int i = 0; i < kProbe; ++i) {
    probes.push_back(liouville_sample(m, mix_seed(seed, 0x9242), i));
  }
  const double scale =
      field_scale(m, u, std::span<const FramePoint>(probes));
  for (const FramePoint& w : probes) {
    MatD a = invariance_group_element(n, cls, grng);
    FramePoint wa{w.x, matmul(w.a, a)};
    const double lhs = u(m, lift(w)).value();
    const double rhs = u(m, lift(wa)).value();
    if (std::abs(lhs - rhs) > 1e-8 * scale) {
      throw PreconditionError(
          "associated identity: test function is not G-invariant (|df| = " +
          std::to_string(std::abs(lhs - rhs)) + ")");
    }
  }

  // Equivariance of the vertical gradient of the invariant lift:
  // S(w a) = a^{-1} S(w) a for the skew matrix S of grad_V u, a in G.
  for (int i = 0; i < 4; ++i) {
    const FramePoint& w = probes[static_cast<size_t>(i)];
    MatD a = invariance_group_element(n, cls, grng);
    FramePoint wa{w.x, matmul(w.a, a)};
    SkewForm Sw =
        SkewForm::from_components(n, grad_V(m, u, w));
    SkewForm Swa =
        SkewForm::from_components(n, grad_V(m, u, wa));
    MatD conj = matmul(matmul(a.transposed(), Sw.entries), a);
    double dev = 0.0, mag = 1.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        dev = std::max(dev, std::abs(Swa.entries(r, c) - conj(r, c)));
        mag = std::max(mag, std::abs(Sw.entries(r, c)));
      }
    if (dev > 1e-8 * mag) {
      throw PreconditionError(
          "associated identity: vertical gradient is not G-equivariant");
    }
  }

  IdentityCheck chk = global_pestov_residual(m, u, seed, count, workers,
                                             tolerance);
  chk.name = cls == InvarianceGroup::SOn1 ? "pestov_associated_sm"
                                          : "pestov_associated_st2";
  return chk;
}

double r_sm_crosscheck(const MetricModel& m, const FramePoint& w,
                       const VecD& theta, const VecD& theta_p) {
  const int n = m.dim;
  if (theta[0] != 0.0 || theta_p[0] != 0.0) {
    throw PreconditionError(
        "r_sm_crosscheck: theta must have vanishing first component");
  }

  // xi = e_1 ^ theta as a skew matrix
  auto wedge_e1 = [n](const VecD& th) {
    SkewForm s = SkewForm::zero(n);
    for (int j = 1; j < n; ++j) {
      s.entries(j, 0) = th[j];
      s.entries(0, j) = -th[j];
    }
    return s;
  };
  SkewForm xi = wedge_e1(theta);
  SkewForm xip = wedge_e1(theta_p);

  // Path 1: frame-bundle curvature form.
  SMat<double, kMaxL2> M = r_fm_matrix(m, w);
  auto cxi = xi.components();
  auto cxip = xip.components();
  double path1 = 0.0;
  for (int b = 0; b < l2_dim(n); ++b)
    for (int a = 0; a < l2_dim(n); ++a) path1 += cxip[b] * M(b, a) * cxi[a];

  // Path 2: connection map + Riemann tensor on the unit tangent bundle.
  FrameJet wj = lift(w);
  MatJ E = reference_frame_jet(m, w.x.chart_id, wj.x);
  MatJ W = matmul(E, wj.a);
  VecD v(n);
  for (int i = 0; i < n; ++i) v[i] = W(i, 0).value();

  auto k_of = [&](const VecD& th) {
    VecD dv(n);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 1; j < n; ++j) acc += W(i, j).value() * th[j];
      dv[i] = acc;  // chart components of w(theta)
    }
    SMTangent zeta{VecD(n), dv};
    return connection_map(m, SMPoint{w.x, v}, zeta);
  };
  VecD K = k_of(theta);
  VecD Kp = k_of(theta_p);

  CurvatureTensorJ R = riemann_tensor_jet(m, w.x.chart_id, wj.x);
  const double path2 =
      riemann_lowered(m, w.x.chart_id, wj.x, R, lift(K), lift(v), lift(v),
                      lift(Kp))
          .value();
  return std::abs(path1 - path2);
}

IdentityCheck hyperbolic_rfm_check(int dim, std::uint64_t seed,
                                   int count_points, double tolerance) {
  MetricModel m = MetricModel::hyperbolic_ball(dim);
  const int n = dim;
  const int d2 = l2_dim(n);
  Philox rng(mix_seed(seed, 0x4F31));
  double worst = 0.0, worst_lhs = 0.0, worst_rhs = 0.0;
  for (int it = 0; it < count_points; ++it) {
    FramePoint w = sweep_point(m, seed, it);
    // random unit-norm 2-forms
    auto rand_skew = [&]() {
      SVec<double, kMaxL2> c(d2);
      double nrm2 = 0.0;
      for (int i = 0; i < d2; ++i) {
        c[i] = rng.uniform(-1.0, 1.0);
        nrm2 += c[i] * c[i];
      }
      const double s = 1.0 / std::sqrt(std::max(nrm2, 1e-12));
      for (int i = 0; i < d2; ++i) c[i] *= s;
      return SkewForm::from_components(n, c);
    };
    SkewForm xi = rand_skew();
    SkewForm xip = rand_skew();

    SMat<double, kMaxL2> M = r_fm_matrix(m, w);
    auto cxi = xi.components();
    auto cxip = xip.components();
    double lhs = 0.0;
    for (int b = 0; b < d2; ++b)
      for (int a = 0; a < d2; ++a) lhs += cxip[b] * M(b, a) * cxi[a];

    VecD e1(n);
    e1[0] = 1.0;
    VecD xie1 = xi.apply(e1);
    VecD xipe1 = xip.apply(e1);
    double rhs = -dot(xie1, xipe1);

    const double dev = std::abs(lhs - rhs);
    if (dev > worst) {
      worst = dev;
      worst_lhs = lhs;
      worst_rhs = rhs;
    }
  }
  IdentityCheck chk;
  chk.name = "hyperbolic_rfm";
  chk.model = m;
  chk.lhs = worst_lhs;
  chk.rhs = worst_rhs;
  chk.residual = worst;
  chk.stderr_ = 0.0;
  chk.tolerance = tolerance;
  chk.pass = check_passes(chk.residual, chk.tolerance, chk.stderr_);
  return chk;
}

}  // namespace pestov
