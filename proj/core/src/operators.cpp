#include "pestov/operators.hpp"

#include <cmath>

namespace pestov {

namespace {

FieldSpec vert(int i, int j, int n) {
  return FieldSpec::vertical(SkewForm::wedge(i, j, n));
}

double derive1(const MetricModel& m, const ScalarField& f, const FramePoint& w,
               const FieldSpec& a) {
  const FieldSpec chain[1] = {a};
  return derive(m, f, w, chain);
}

double derive2(const MetricModel& m, const ScalarField& f, const FramePoint& w,
               const FieldSpec& a, const FieldSpec& b) {
  const FieldSpec chain[2] = {a, b};
  return derive(m, f, w, chain);
}

}  // namespace

double X_apply(const MetricModel& m, const ScalarField& f,
               const FramePoint& w) {
  return derive1(m, f, w, FieldSpec::standard_axis(0, m.dim));
}

SVec<double, kMaxL2> grad_V(const MetricModel& m, const ScalarField& f,
                            const FramePoint& w) {
  const int n = m.dim;
  SVec<double, kMaxL2> g(l2_dim(n));
  for (int a = 0; a < g.n; ++a) {
    auto [i, j] = l2_pair(a, n);
    g[a] = derive1(m, f, w, vert(i, j, n));
  }
  return g;
}

SVec<double, kMaxL2> grad_H(const MetricModel& m, const ScalarField& f,
                            const FramePoint& w) {
  const int n = m.dim;
  SVec<double, kMaxL2> g(l2_dim(n));
  for (int j = 1; j < n; ++j) {
    g[l2_index(0, j, n)] = derive1(m, f, w, FieldSpec::standard_axis(j, n));
  }
  return g;
}

double div_V(const MetricModel& m, const TwoFormField& F,
             const FramePoint& w) {
  const int n = m.dim;
  double acc = 0.0;
  for (int a = 0; a < l2_dim(n); ++a) {
    auto [i, j] = l2_pair(a, n);
    acc -= derive1(m, F.comps[a], w, vert(i, j, n));
  }
  return acc;
}

double div_H(const MetricModel& m, const TwoFormField& F,
             const FramePoint& w) {
  const int n = m.dim;
  double acc = 0.0;
  for (int j = 1; j < n; ++j) {
    acc -= derive1(m, F.comps[l2_index(0, j, n)], w,
                   FieldSpec::standard_axis(j, n));
  }
  return acc;
}

SMat<Jet, kMaxL2> r_fm_matrix_jet(const MetricModel& m, const FrameJet& w) {
  const int n = m.dim;
  const int d2 = l2_dim(n);
  SMat<Jet, kMaxL2> M(d2, d2);
  if (m.flat()) return M;

  CurvatureTensorJ R = riemann_tensor_jet(m, w.chart_id, w.x);
  MatJ E = reference_frame_jet(m, w.chart_id, w.x);
  MatJ W = matmul(E, w.a);  // chart components of the frame vectors
  MatJ g = metric_jet(m, w.chart_id, w.x);
  MatJ GW = matmul(g, W);

  constexpr int D = kMaxManifoldDim;
  // Frame-lowered tensor with the second slot pinned to v = w(e_1):
  // L(p, r, t) = g(R(w_p, v) w_r, w_t), built by one contraction per slot.
  std::array<Jet, D * D * D * D> t1{};  // [p][j][k][l]
  for (int p = 0; p < n; ++p)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Jet acc;
          for (int i = 0; i < n; ++i) acc += W(i, p) * R.at(i, j, k, l);
          t1[((p * n + j) * n + k) * n + l] = acc;
        }
  std::array<Jet, D * D * D> t2{};  // [p][k][l], slot 2 contracted with v
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        Jet acc;
        for (int j = 0; j < n; ++j)
          acc += W(j, 0) * t1[((p * n + j) * n + k) * n + l];
        t2[(p * n + k) * n + l] = acc;
      }
  std::array<Jet, D * D * D> t3{};  // [p][r][l]
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r)
      for (int l = 0; l < n; ++l) {
        Jet acc;
        for (int k = 0; k < n; ++k) acc += W(k, r) * t2[(p * n + k) * n + l];
        t3[(p * n + r) * n + l] = acc;
      }
  std::array<Jet, D * D * D> t4{};  // [p][r][t] = L(p, r, t)
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r)
      for (int t = 0; t < n; ++t) {
        Jet acc;
        for (int l = 0; l < n; ++l) acc += t3[(p * n + r) * n + l] * GW(l, t);
        t4[(p * n + r) * n + t] = acc;
      }

  // <R_FM xi, xi'> = sum_{a<b, k>=1} xi^{ab} xi'^{1k} L(k, a, b).
  for (int k = 1; k < n; ++k) {
    const int row = l2_index(0, k, n);
    for (int col = 0; col < d2; ++col) {
      auto [a, b] = l2_pair(col, n);
      M(row, col) = t4[(k * n + a) * n + b];
    }
  }
  return M;
}

SMat<double, kMaxL2> r_fm_matrix(const MetricModel& m, const FramePoint& w) {
  SMat<Jet, kMaxL2> Mj = r_fm_matrix_jet(m, lift(w));
  SMat<double, kMaxL2> M(Mj.rows, Mj.cols);
  for (int i = 0; i < Mj.rows; ++i)
    for (int j = 0; j < Mj.cols; ++j) M(i, j) = Mj(i, j).value();
  return M;
}

SkewForm R_FM_apply(const MetricModel& m, const FramePoint& w,
                    const SkewForm& xi) {
  const int n = m.dim;
  SMat<double, kMaxL2> M = r_fm_matrix(m, w);
  SVec<double, kMaxL2> c = xi.components();
  SVec<double, kMaxL2> out(l2_dim(n));
  for (int row = 0; row < out.n; ++row) {
    double acc = 0.0;
    for (int col = 0; col < c.n; ++col) acc += M(row, col) * c[col];
    out[row] = acc;
  }
  return SkewForm::from_components(n, out);
}

ScalarField rfm_grad_v_component(const ScalarField& f, int alpha) {
  return [f, alpha](const MetricModel& m, const FrameJet& w) -> Jet {
    const int n = m.dim;
    SMat<Jet, kMaxL2> M = r_fm_matrix_jet(m, w);
    Jet acc;
    for (int beta = 0; beta < l2_dim(n); ++beta) {
      if (detail::is_exact_zero(M(alpha, beta))) continue;
      auto [i, j] = l2_pair(beta, n);
      const FieldSpec chain[1] = {
          FieldSpec::vertical(SkewForm::wedge(i, j, n))};
      acc += M(alpha, beta) * derive_at(m, f, w, chain);
    }
    return acc;
  };
}

TwoFormField grad_v_field(const ScalarField& f, int n) {
  TwoFormField F;
  F.n = n;
  for (int a = 0; a < l2_dim(n); ++a) {
    auto [i, j] = l2_pair(a, n);
    F.comps.push_back([f, i, j](const MetricModel& m, const FrameJet& w) {
      const FieldSpec chain[1] = {
          FieldSpec::vertical(SkewForm::wedge(i, j, m.dim))};
      return derive_at(m, f, w, chain);
    });
  }
  return F;
}

TwoFormField grad_h_field(const ScalarField& f, int n) {
  TwoFormField F;
  F.n = n;
  for (int a = 0; a < l2_dim(n); ++a) {
    auto [i, j] = l2_pair(a, n);
    if (i == 0) {
      F.comps.push_back([f, j](const MetricModel& m, const FrameJet& w) {
        const FieldSpec chain[1] = {FieldSpec::standard_axis(j, m.dim)};
        return derive_at(m, f, w, chain);
      });
    } else {
      F.comps.push_back(
          [](const MetricModel&, const FrameJet&) { return Jet(0.0); });
    }
  }
  return F;
}

std::string to_string(StructuralKind k) {
  switch (k) {
    case StructuralKind::VV:
      return "VV";
    case StructuralKind::VB:
      return "VB";
    case StructuralKind::BB:
      return "BB";
    case StructuralKind::XV:
      return "XV";
    case StructuralKind::XH:
      return "XH";
    case StructuralKind::L25:
      return "L25";
  }
  return "?";
}

namespace {

struct Accum {
  double residual = 0.0;
  double scale = 0.0;
  double lhs = 0.0, rhs = 0.0;

  void add(double lhs_v, double rhs_v, std::initializer_list<double> terms) {
    for (double t : terms) scale = std::max(scale, std::abs(t));
    const double r = std::abs(lhs_v - rhs_v);
    if (r >= residual) {
      residual = r;
      lhs = lhs_v;
      rhs = rhs_v;
    }
  }
};

}  // namespace

ResidualDetail structural_residual_detail(const MetricModel& m,
                                          const ScalarField& f,
                                          const FramePoint& w,
                                          StructuralKind kind) {
  const int n = m.dim;
  const int d2 = l2_dim(n);
  Accum acc;

  switch (kind) {
    case StructuralKind::VV: {
      for (int a = 0; a < d2; ++a)
        for (int b = a + 1; b < d2; ++b) {
          auto [i, j] = l2_pair(a, n);
          auto [k, l] = l2_pair(b, n);
          SkewForm xi = SkewForm::wedge(i, j, n);
          SkewForm xi2 = SkewForm::wedge(k, l, n);
          const double ab = derive2(m, f, w, FieldSpec::vertical(xi),
                                    FieldSpec::vertical(xi2));
          const double ba = derive2(m, f, w, FieldSpec::vertical(xi2),
                                    FieldSpec::vertical(xi));
          const double rhs =
              derive1(m, f, w, FieldSpec::vertical(bracket(xi, xi2)));
          acc.add(ab - ba, rhs, {ab, ba, rhs});
        }
      break;
    }
    case StructuralKind::VB: {
      for (int a = 0; a < d2; ++a)
        for (int j = 0; j < n; ++j) {
          auto [p, q] = l2_pair(a, n);
          SkewForm xi = SkewForm::wedge(p, q, n);
          FieldSpec Y = FieldSpec::vertical(xi);
          FieldSpec B = FieldSpec::standard_axis(j, n);
          const double ab = derive2(m, f, w, Y, B);
          const double ba = derive2(m, f, w, B, Y);
          VecD th(n);
          th[j] = 1.0;
          const double rhs =
              derive1(m, f, w, FieldSpec::standard(xi.apply(th)));
          acc.add(ab - ba, rhs, {ab, ba, rhs});
        }
      break;
    }
    case StructuralKind::BB: {
      // eta = w^{-1} R(w theta ^ w theta') has Lambda^2 components
      // <R(w_i ^ w_j), w_a ^ w_b> for theta = e_i, theta' = e_j.
      FrameJet wj = lift(w);
      CurvatureTensorJ R = riemann_tensor_jet(m, w.x.chart_id, wj.x);
      MatJ E = reference_frame_jet(m, w.x.chart_id, wj.x);
      MatJ W = matmul(E, wj.a);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          FieldSpec Bi = FieldSpec::standard_axis(i, n);
          FieldSpec Bj = FieldSpec::standard_axis(j, n);
          const double ab = derive2(m, f, w, Bi, Bj);
          const double ba = derive2(m, f, w, Bj, Bi);
          SVec<double, kMaxL2> eta(d2);
          for (int c = 0; c < d2; ++c) {
            auto [a, b] = l2_pair(c, n);
            VecJ wi(n), wjv(n), wa(n), wb(n);
            for (int t = 0; t < n; ++t) {
              wi[t] = W(t, i);
              wjv[t] = W(t, j);
              wa[t] = W(t, a);
              wb[t] = W(t, b);
            }
            eta[c] =
                riemann_lowered(m, w.x.chart_id, wj.x, R, wi, wjv, wa, wb)
                    .value();
          }
          const double rhs = -derive1(
              m, f, w, FieldSpec::vertical(SkewForm::from_components(n, eta)));
          acc.add(ab - ba, rhs, {ab, ba, rhs});
        }
      break;
    }
    case StructuralKind::XV: {
      FieldSpec X = FieldSpec::standard_axis(0, n);
      for (int a = 0; a < d2; ++a) {
        auto [i, j] = l2_pair(a, n);
        FieldSpec Y = FieldSpec::vertical(SkewForm::wedge(i, j, n));
        const double grad_h_comp =
            i == 0 ? derive1(m, f, w, FieldSpec::standard_axis(j, n)) : 0.0;
        const double xy = derive2(m, f, w, X, Y);
        const double yx = derive2(m, f, w, Y, X);
        acc.add(grad_h_comp, -(xy - yx), {grad_h_comp, xy, yx});
      }
      break;
    }
    case StructuralKind::XH: {
      FieldSpec X = FieldSpec::standard_axis(0, n);
      SMat<double, kMaxL2> M = r_fm_matrix(m, w);
      SVec<double, kMaxL2> gv = grad_V(m, f, w);
      for (int j = 1; j < n; ++j) {
        FieldSpec Bj = FieldSpec::standard_axis(j, n);
        const double xb = derive2(m, f, w, X, Bj);
        const double bx = derive2(m, f, w, Bj, X);
        const int row = l2_index(0, j, n);
        double rhs = 0.0;
        for (int col = 0; col < d2; ++col) rhs += M(row, col) * gv[col];
        acc.add(xb - bx, rhs, {xb, bx, rhs});
      }
      break;
    }
    case StructuralKind::L25: {
      // div_H grad_V f - div_V grad_H f = -(n-1) X f
      double lhs = 0.0;
      double scale = 0.0;
      for (int j = 1; j < n; ++j) {
        FieldSpec Bj = FieldSpec::standard_axis(j, n);
        FieldSpec Y1j = vert(0, j, n);
        const double by = derive2(m, f, w, Bj, Y1j);
        const double yb = derive2(m, f, w, Y1j, Bj);
        lhs += -by + yb;
        scale = std::max({scale, std::abs(by), std::abs(yb)});
      }
      const double rhs = -(n - 1) * X_apply(m, f, w);
      acc.add(lhs, rhs, {scale, rhs});
      break;
    }
  }

  ResidualDetail out;
  out.residual = acc.residual;
  out.scale = acc.scale;
  out.relative = acc.residual / std::max(acc.scale, kResidualFloor);
  out.lhs = acc.lhs;
  out.rhs = acc.rhs;
  return out;
}

double structural_residual(const MetricModel& m, const ScalarField& f,
                           const FramePoint& w, StructuralKind kind) {
  return structural_residual_detail(m, f, w, kind).relative;
}

}  // namespace pestov
