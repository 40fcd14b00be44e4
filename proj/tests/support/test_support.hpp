#pragma once

// Shared test oracles. Everything here is deliberately independent of the
// jet-based evaluation paths it cross-checks: finite differences of the
// public double-level evaluators, closed-form geodesics, and embedding
// geometry.

#include <cmath>
#include <functional>
#include <vector>

#include "pestov/frame.hpp"
#include "pestov/measure.hpp"
#include "pestov/models.hpp"

namespace pestov::testing {

// Centered second-order finite difference of the metric.
inline MatD fd_metric_d1(const MetricModel& m, const ChartPoint& x, int k,
                         double h) {
  ChartPoint xp = x, xm = x;
  xp.coords[k] += h;
  xm.coords[k] -= h;
  MatD gp = metric_at(m, xp);
  MatD gm = metric_at(m, xm);
  MatD d(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) d(i, j) = (gp(i, j) - gm(i, j)) / (2 * h);
  return d;
}

// Christoffel symbols assembled from finite differences of metric_at only.
inline ChristoffelD fd_christoffel(const MetricModel& m, const ChartPoint& x,
                                   double h) {
  const int n = m.dim;
  MatD g = metric_at(m, x);
  MatD ginv = inverse(g);
  std::vector<MatD> dg;
  for (int k = 0; k < n; ++k) dg.push_back(fd_metric_d1(m, x, k, h));
  ChristoffelD c;
  c.n = n;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        c.at(k, i, j) = 0.5 * acc;
      }
  return c;
}

// (1,3) curvature from centered finite differences of christoffel_at.
inline CurvatureTensor fd_riemann(const MetricModel& m, const ChartPoint& x,
                                  double h) {
  const int n = m.dim;
  ChristoffelD g0 = christoffel_at(m, x);
  std::vector<ChristoffelD> dg;
  for (int k = 0; k < n; ++k) {
    ChartPoint xp = x, xm = x;
    xp.coords[k] += h;
    xm.coords[k] -= h;
    ChristoffelD gp = christoffel_at(m, xp);
    ChristoffelD gm = christoffel_at(m, xm);
    ChristoffelD d;
    d.n = n;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          d.at(a, b, c) = (gp.at(a, b, c) - gm.at(a, b, c)) / (2 * h);
    dg.push_back(d);
  }
  CurvatureTensor R;
  R.n = n;
  R.c.assign(static_cast<size_t>(n) * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = dg[i].at(l, j, k) - dg[j].at(l, i, k);
          for (int mm = 0; mm < n; ++mm)
            acc += g0.at(mm, j, k) * g0.at(l, i, mm) -
                   g0.at(mm, i, k) * g0.at(l, j, mm);
          R.at(i, j, k, l) = acc;
        }
  return R;
}

// Embedded representation of a sphere frame point: base point p in R^{n+1}
// and the embedded frame vectors as columns.
struct EmbeddedFrame {
  SVec<double> p;          // n+1 entries
  SMat<double> U;          // (n+1) x n
};

inline EmbeddedFrame embed_frame(const MetricModel& m, const FramePoint& w) {
  SMat<Jet> Q = sphere_group_matrix(m, lift(w));
  const int n = m.dim;
  EmbeddedFrame e;
  e.p = SVec<double>(n + 1);
  e.U = SMat<double>(n + 1, n);
  for (int i = 0; i <= n; ++i) {
    e.p[i] = m.params.sphere_radius * Q(i, n).value();
    for (int j = 0; j < n; ++j) e.U(i, j) = Q(i, j).value();
  }
  return e;
}

// Closed-form frame flow on the round sphere: the base point rotates in the
// oriented plane (p/r, u_1) with angle t/r; u_1 rotates with it; the other
// frame vectors are unchanged (parallel transport along a great circle).
inline EmbeddedFrame sphere_flow_closed_form(const EmbeddedFrame& e0, double t,
                                             double r) {
  const int n1 = e0.p.n;  // n + 1
  const double phi = t / r;
  SVec<double> phat(n1);
  for (int i = 0; i < n1; ++i) phat[i] = e0.p[i] / r;
  SVec<double> u1(n1);
  for (int i = 0; i < n1; ++i) u1[i] = e0.U(i, 0);

  auto rotate = [&](const SVec<double>& q) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n1; ++i) {
      a += q[i] * phat[i];
      b += q[i] * u1[i];
    }
    SVec<double> out(n1);
    const double ar = a * std::cos(phi) - b * std::sin(phi);
    const double br = a * std::sin(phi) + b * std::cos(phi);
    for (int i = 0; i < n1; ++i)
      out[i] = q[i] + (ar - a) * phat[i] + (br - b) * u1[i];
    return out;
  };

  EmbeddedFrame e;
  e.p = rotate(phat);
  for (int i = 0; i < n1; ++i) e.p[i] *= r;
  e.U = SMat<double>(n1, n1 - 1);
  for (int j = 0; j < n1 - 1; ++j) {
    SVec<double> col(n1);
    for (int i = 0; i < n1; ++i) col[i] = e0.U(i, j);
    SVec<double> rc = rotate(col);
    for (int i = 0; i < n1; ++i) e.U(i, j) = rc[i];
  }
  return e;
}

// Gauss curvature of the embedded sphere chart (n = 2 only):
// K = det(II) / det(I), first/second fundamental forms from the embedding.
inline double gauss_curvature_embedded(const MetricModel& m, int chart,
                                       const VecD& x) {
  VarScope aux(2);
  VecJ xs = lift(x);
  xs[0] += Jet::variable(0.0, aux.var(0));
  xs[1] += Jet::variable(0.0, aux.var(1));
  SVec<Jet> p = sphere_embed(m, chart, xs);
  const std::uint32_t b0 = 1u << aux.var(0);
  const std::uint32_t b1 = 1u << aux.var(1);

  double J[3][2], H[3][3], P[3];
  for (int i = 0; i < 3; ++i) {
    P[i] = p[i].value();
    J[i][0] = p[i].coeff(b0);
    J[i][1] = p[i].coeff(b1);
    H[i][0] = 0.0;  // d00 needs a repeated direction; see below
    H[i][1] = p[i].coeff(b0 | b1);
    H[i][2] = 0.0;
  }
  // second derivatives in repeated directions via (eps0 + eps1) tricks
  for (int dir = 0; dir < 2; ++dir) {
    VecJ xr = lift(x);
    xr[dir] += Jet::variable(0.0, aux.var(0));
    xr[dir] += Jet::variable(0.0, aux.var(1));
    SVec<Jet> pr = sphere_embed(m, chart, xr);
    for (int i = 0; i < 3; ++i) H[i][dir == 0 ? 0 : 2] = pr[i].coeff(b0 | b1);
  }
  const double r = m.params.sphere_radius;
  double nrm[3];
  for (int i = 0; i < 3; ++i) nrm[i] = P[i] / r;  // inward/outward unit normal
  double I11 = 0, I12 = 0, I22 = 0, II11 = 0, II12 = 0, II22 = 0;
  for (int i = 0; i < 3; ++i) {
    I11 += J[i][0] * J[i][0];
    I12 += J[i][0] * J[i][1];
    I22 += J[i][1] * J[i][1];
    II11 += nrm[i] * H[i][0];
    II12 += nrm[i] * H[i][1];
    II22 += nrm[i] * H[i][2];
  }
  return (II11 * II22 - II12 * II12) / (I11 * I22 - I12 * I12);
}

// Numerical parallel transport of v along the reversed path s -> x(t - s),
// integrating du/ds = Gamma(x) (dx/ds) u with RK4 (signs: the reversed path
// has velocity -x'(t - s); transport solves u' = -Gamma(dx) u).
inline VecD parallel_transport_back(
    const MetricModel& m, const std::function<VecD(double)>& path, double t,
    const VecD& v_end, int steps = 200) {
  const int n = m.dim;
  auto gamma_apply = [&](double s, const VecD& u) {
    // velocity of the reversed path at parameter s is -x'(t - s)
    const double h = 1e-6;
    ChartPoint cp{path(t - s), 0};
    VecD xp = path(t - s + h);
    VecD xm = path(t - s - h);
    VecD vel(n);
    for (int i = 0; i < n; ++i) vel[i] = -(xp[i] - xm[i]) / (2 * h);
    ChristoffelD G = christoffel_at(m, cp);
    VecD du(n);
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc -= G.at(k, i, j) * vel[i] * u[j];
      du[k] = acc;
    }
    return du;
  };
  VecD u = v_end;
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = k * h;
    VecD k1 = gamma_apply(s, u);
    VecD u2 = u;
    for (int i = 0; i < n; ++i) u2[i] += 0.5 * h * k1[i];
    VecD k2 = gamma_apply(s + 0.5 * h, u2);
    VecD u3 = u;
    for (int i = 0; i < n; ++i) u3[i] += 0.5 * h * k2[i];
    VecD k3 = gamma_apply(s + 0.5 * h, u3);
    VecD u4 = u;
    for (int i = 0; i < n; ++i) u4[i] += h * k3[i];
    VecD k4 = gamma_apply(s + h, u4);
    for (int i = 0; i < n; ++i)
      u[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return u;
}

// Least-squares slope of log|y| against log x.
inline double fit_loglog_slope(const std::vector<double>& xs,
                               const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(xs[static_cast<size_t>(i)]);
    const double ly = std::log(std::abs(ys[static_cast<size_t>(i)]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double frame_distance(const FramePoint& a, const FramePoint& b) {
  double d = 0.0;
  for (int i = 0; i < a.x.coords.n; ++i)
    d = std::max(d, std::abs(a.x.coords[i] - b.x.coords[i]));
  for (int i = 0; i < a.a.rows; ++i)
    for (int j = 0; j < a.a.cols; ++j)
      d = std::max(d, std::abs(a.a(i, j) - b.a(i, j)));
  return d;
}

inline VecD axis(int i, int n) {
  VecD v(n);
  v[i] = 1.0;
  return v;
}

}  // namespace pestov::testing
