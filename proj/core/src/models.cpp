#include "pestov/models.hpp"

#include <cmath>

namespace pestov {

namespace {

void require_dim(int n) {
  if (n < 2 || n > kMaxManifoldDim) {
    throw ConfigError("model dimension must satisfy 2 <= n <= " +
                      std::to_string(kMaxManifoldDim));
  }
}

double norm2_value(const VecD& x) {
  double s = 0.0;
  for (int i = 0; i < x.n; ++i) s += x[i] * x[i];
  return s;
}

Jet norm2_jet(const VecJ& x) {
  Jet s;
  for (int i = 0; i < x.n; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace

MetricModel MetricModel::flat_torus(int n, std::vector<double> periods) {
  require_dim(n);
  MetricModel m;
  m.kind = ModelKind::FlatTorus;
  m.dim = n;
  if (periods.empty()) periods.assign(n, 2.0 * M_PI);
  if (static_cast<int>(periods.size()) != n) {
    throw ConfigError("flat_torus: periods length must equal dim");
  }
  for (double L : periods) {
    if (!(L > 0.0)) throw ConfigError("flat_torus: periods must be positive");
  }
  m.params.torus_periods = std::move(periods);
  return m;
}

MetricModel MetricModel::round_sphere(int n, double radius) {
  require_dim(n);
  if (!(radius > 0.0)) throw ConfigError("round_sphere: radius must be > 0");
  MetricModel m;
  m.kind = ModelKind::RoundSphere;
  m.dim = n;
  m.params.sphere_radius = radius;
  return m;
}

MetricModel MetricModel::hyperbolic_ball(int n) {
  require_dim(n);
  MetricModel m;
  m.kind = ModelKind::HyperbolicBall;
  m.dim = n;
  return m;
}

MetricModel MetricModel::perturbed_hyperbolic(int n, double eps, double freq) {
  require_dim(n);
  if (std::abs(eps) > 0.1) {
    throw ConfigError("perturbed_hyperbolic: |eps| must be <= 0.1");
  }
  MetricModel m;
  m.kind = ModelKind::PerturbedHyperbolic;
  m.dim = n;
  m.params.perturb_eps = eps;
  m.params.perturb_freq = freq;
  return m;
}

std::string MetricModel::name() const {
  switch (kind) {
    case ModelKind::FlatTorus:
      return "flat_torus";
    case ModelKind::RoundSphere:
      return "round_sphere";
    case ModelKind::HyperbolicBall:
      return "hyperbolic_ball";
    case ModelKind::PerturbedHyperbolic:
      return "perturbed_hyperbolic";
  }
  return "unknown";
}

VecJ lift(const VecD& x) {
  VecJ y(x.n);
  for (int i = 0; i < x.n; ++i) y[i] = Jet(x[i]);
  return y;
}

MatJ lift(const MatD& a) {
  MatJ b(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) b(i, j) = Jet(a(i, j));
  return b;
}

VecD values(const VecJ& x) {
  VecD y(x.n);
  for (int i = 0; i < x.n; ++i) y[i] = x[i].value();
  return y;
}

MatD values(const MatJ& a) {
  MatD b(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) b(i, j) = a(i, j).value();
  return b;
}

void check_domain(const MetricModel& m, int chart_id, const VecD& x) {
  if (x.n != m.dim) throw DomainError("chart point has wrong dimension");
  if (chart_id < 0 || chart_id >= m.chart_count()) {
    throw DomainError("invalid chart id " + std::to_string(chart_id) +
                      " for model " + m.name());
  }
  switch (m.kind) {
    case ModelKind::FlatTorus:
      return;  // global periodic chart
    case ModelKind::RoundSphere: {
      const double r = m.params.sphere_radius;
      if (norm2_value(x) >
          kSphereChartFactor * kSphereChartFactor * r * r * (1 + 1e-12)) {
        throw DomainError("sphere chart point beyond chart radius");
      }
      return;
    }
    case ModelKind::HyperbolicBall:
    case ModelKind::PerturbedHyperbolic: {
      if (norm2_value(x) > kBallDomainRadius * kBallDomainRadius) {
        throw DomainError("hyperbolic chart point outside |x| <= " +
                          std::to_string(kBallDomainRadius));
      }
      return;
    }
  }
}

Jet conformal_factor_jet(const MetricModel& m, int chart_id, const VecJ& x) {
  (void)chart_id;
  switch (m.kind) {
    case ModelKind::FlatTorus:
      return Jet(1.0);
    case ModelKind::RoundSphere: {
      const double r2 = m.params.sphere_radius * m.params.sphere_radius;
      Jet t = norm2_jet(x) + r2;
      return (4.0 * r2 * r2) * inv(t * t);
    }
    case ModelKind::HyperbolicBall: {
      Jet t = 1.0 - norm2_jet(x);
      return 4.0 * inv(t * t);
    }
    case ModelKind::PerturbedHyperbolic: {
      Jet s = norm2_jet(x);
      Jet t = 1.0 - s;
      Jet phase;
      for (int i = 0; i < x.n; ++i) {
        phase += (m.params.perturb_freq * (i + 1)) * x[i];
      }
      Jet bump = 1.0 + m.params.perturb_eps * cos(phase) * t;
      return bump * (4.0 * inv(t * t));
    }
  }
  return Jet(1.0);
}

MatJ metric_jet(const MetricModel& m, int chart_id, const VecJ& x) {
  const int n = m.dim;
  MatJ g(n, n);
  Jet c = conformal_factor_jet(m, chart_id, x);
  for (int i = 0; i < n; ++i) g(i, i) = c;
  return g;
}

ChristoffelJ christoffel_jet(const MetricModel& m, int chart_id,
                             const VecJ& x) {
  const int n = m.dim;
  ChristoffelJ gamma;
  gamma.n = n;
  if (m.flat()) return gamma;

  // dg[k](i,j) = d_k g_ij, exact via one auxiliary jet variable.
  std::array<MatJ, kMaxManifoldDim> dg;
  {
    VarScope aux(1);
    const int v = aux.var();
    for (int k = 0; k < n; ++k) {
      VecJ xs = x;
      xs[k] += Jet::variable(0.0, v);
      MatJ gk = metric_jet(m, chart_id, xs);
      dg[k] = MatJ(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dg[k](i, j) = gk(i, j).extract(v);
    }
  }
  MatJ ginv = inverse(metric_jet(m, chart_id, x));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet acc;
        for (int l = 0; l < n; ++l) {
          acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        acc *= 0.5;
        gamma.at(k, i, j) = acc;
        gamma.at(k, j, i) = acc;
      }
  return gamma;
}

CurvatureTensorJ riemann_tensor_jet(const MetricModel& m, int chart_id,
                                    const VecJ& x) {
  const int n = m.dim;
  CurvatureTensorJ R;
  R.n = n;
  if (m.flat()) return R;

  ChristoffelJ gamma = christoffel_jet(m, chart_id, x);
  std::array<ChristoffelJ, kMaxManifoldDim> dgamma;
  {
    VarScope aux(1);
    const int v = aux.var();
    for (int i = 0; i < n; ++i) {
      VecJ xs = x;
      xs[i] += Jet::variable(0.0, v);
      ChristoffelJ gs = christoffel_jet(m, chart_id, xs);
      dgamma[i].n = n;
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            dgamma[i].at(k, a, b) = gs.at(k, a, b).extract(v);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Jet acc = dgamma[i].at(l, j, k) - dgamma[j].at(l, i, k);
          for (int mm = 0; mm < n; ++mm) {
            acc += gamma.at(mm, j, k) * gamma.at(l, i, mm) -
                   gamma.at(mm, i, k) * gamma.at(l, j, mm);
          }
          R.at(i, j, k, l) = acc;
        }
    }
  return R;
}

Jet riemann_lowered(const MetricModel& m, int chart_id, const VecJ& x,
                    const CurvatureTensorJ& R, const VecJ& u, const VecJ& v,
                    const VecJ& z, const VecJ& t) {
  const int n = m.dim;
  MatJ g = metric_jet(m, chart_id, x);
  VecJ gt = matvec(g, t);
  Jet acc;
  for (int i = 0; i < n; ++i) {
    if (detail::is_exact_zero(u[i])) continue;
    for (int j = 0; j < n; ++j) {
      if (detail::is_exact_zero(v[j])) continue;
      Jet uv = u[i] * v[j];
      for (int k = 0; k < n; ++k) {
        Jet uvz = uv * z[k];
        for (int l = 0; l < n; ++l) {
          acc += uvz * R.at(i, j, k, l) * gt[l];
        }
      }
    }
  }
  return acc;
}

MatJ reference_frame_jet(const MetricModel& m, int chart_id, const VecJ& x) {
  const int n = m.dim;
  if (m.flat()) return MatJ::identity(n);
  MatJ g = metric_jet(m, chart_id, x);
  MatJ E(n, n);
  for (int j = 0; j < n; ++j) {
    VecJ u(n);
    u[j] = Jet(1.0);
    for (int k = 0; k < j; ++k) {
      // g(u, E_k)
      Jet coef;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) coef += u[i] * g(i, l) * E(l, k);
      for (int i = 0; i < n; ++i) u[i] -= coef * E(i, k);
    }
    Jet nrm2;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) nrm2 += u[i] * g(i, l) * u[l];
    Jet s = inv(sqrt(nrm2));
    for (int i = 0; i < n; ++i) E(i, j) = u[i] * s;
  }
  return E;
}

// ---- sphere atlas -----------------------------------------------------------
//
// Chart 0 projects from the north pole (0, ..., 0, r), chart 1 from the south
// pole with the last chart coordinate negated so that the transition map
// y = r^2 (x_0, ..., x_{n-2}, -x_{n-1}) / |x|^2 preserves orientation. Both
// charts carry the conformal factor 4 r^4 / (r^2 + |x|^2)^2.

SVec<Jet> sphere_embed(const MetricModel& m, int chart_id, const VecJ& x) {
  if (m.kind != ModelKind::RoundSphere) {
    throw PreconditionError("sphere_embed: model is not a sphere");
  }
  const int n = m.dim;
  const double r = m.params.sphere_radius;
  const double r2 = r * r;
  SVec<Jet> p(n + 1);
  Jet denom = inv(norm2_jet(x) + r2);
  if (chart_id == 0) {
    for (int i = 0; i < n; ++i) p[i] = (2.0 * r2) * x[i] * denom;
    p[n] = r * (norm2_jet(x) - r2) * denom;
  } else {
    for (int i = 0; i < n - 1; ++i) p[i] = (2.0 * r2) * x[i] * denom;
    p[n - 1] = (-2.0 * r2) * x[n - 1] * denom;
    p[n] = r * (r2 - norm2_jet(x)) * denom;
  }
  return p;
}

VecJ sphere_chart_coords(const MetricModel& m, int chart_id,
                         const SVec<Jet>& p) {
  const int n = m.dim;
  const double r = m.params.sphere_radius;
  VecJ x(n);
  if (chart_id == 0) {
    Jet denom = inv(r - p[n]);
    for (int i = 0; i < n; ++i) x[i] = r * p[i] * denom;
  } else {
    Jet denom = inv(r + p[n]);
    for (int i = 0; i < n - 1; ++i) x[i] = r * p[i] * denom;
    x[n - 1] = -r * p[n - 1] * denom;
  }
  return x;
}

int sphere_preferred_chart(const MetricModel& m, const SVec<double>& p) {
  return p[m.dim] <= 0.0 ? 0 : 1;
}

VecJ sphere_transition(const MetricModel& m, const VecJ& x) {
  const int n = m.dim;
  const double r2 = m.params.sphere_radius * m.params.sphere_radius;
  Jet f = r2 * inv(norm2_jet(x));
  VecJ y(n);
  for (int i = 0; i < n - 1; ++i) y[i] = f * x[i];
  y[n - 1] = -f * x[n - 1];
  return y;
}

// ---- double-level surface ---------------------------------------------------

MatD metric_at(const MetricModel& m, const ChartPoint& x) {
  check_domain(m, x.chart_id, x.coords);
  return values(metric_jet(m, x.chart_id, lift(x.coords)));
}

MatD metric_d1_at(const MetricModel& m, const ChartPoint& x, int k) {
  check_domain(m, x.chart_id, x.coords);
  VarScope aux(1);
  VecJ xs = lift(x.coords);
  xs[k] += Jet::variable(0.0, aux.var());
  MatJ g = metric_jet(m, x.chart_id, xs);
  MatD d(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) d(i, j) = g(i, j).coeff(1u << aux.var());
  return d;
}

MatD metric_d2_at(const MetricModel& m, const ChartPoint& x, int k, int l) {
  check_domain(m, x.chart_id, x.coords);
  VarScope aux(2);
  VecJ xs = lift(x.coords);
  xs[k] += Jet::variable(0.0, aux.var(0));
  xs[l] += Jet::variable(0.0, aux.var(1));
  MatJ g = metric_jet(m, x.chart_id, xs);
  const std::uint32_t mask = (1u << aux.var(0)) | (1u << aux.var(1));
  MatD d(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) d(i, j) = g(i, j).coeff(mask);
  return d;
}

ChristoffelD christoffel_at(const MetricModel& m, const ChartPoint& x) {
  check_domain(m, x.chart_id, x.coords);
  ChristoffelJ gj = christoffel_jet(m, x.chart_id, lift(x.coords));
  ChristoffelD g;
  g.n = m.dim;
  for (int k = 0; k < m.dim; ++k)
    for (int i = 0; i < m.dim; ++i)
      for (int j = 0; j < m.dim; ++j) g.at(k, i, j) = gj.at(k, i, j).value();
  return g;
}

RiemannResult riemann_at(const MetricModel& m, const ChartPoint& x) {
  check_domain(m, x.chart_id, x.coords);
  const int n = m.dim;
  VecJ xj = lift(x.coords);
  CurvatureTensorJ Rj = riemann_tensor_jet(m, x.chart_id, xj);

  RiemannResult out;
  out.tensor.n = n;
  out.tensor.c.assign(static_cast<size_t>(n) * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.tensor.at(i, j, k, l) = Rj.at(i, j, k, l).value();

  MatJ E = reference_frame_jet(m, x.chart_id, xj);
  const int d2 = l2_dim(n);
  out.endo.n = n;
  out.endo.form = SMat<double, kMaxL2>(d2, d2);
  for (int a = 0; a < d2; ++a) {
    auto [i, j] = l2_pair(a, n);
    VecJ Ei(n), Ej(n);
    for (int t = 0; t < n; ++t) {
      Ei[t] = E(t, i);
      Ej[t] = E(t, j);
    }
    for (int b = 0; b < d2; ++b) {
      auto [k, l] = l2_pair(b, n);
      VecJ Ek(n), El(n);
      for (int t = 0; t < n; ++t) {
        Ek[t] = E(t, k);
        El[t] = E(t, l);
      }
      out.endo.form(a, b) =
          riemann_lowered(m, x.chart_id, xj, Rj, Ei, Ej, Ek, El).value();
    }
  }
  return out;
}

double sectional_curvature(const MetricModel& m, const ChartPoint& x,
                           const VecD& u, const VecD& v) {
  check_domain(m, x.chart_id, x.coords);
  VecJ xj = lift(x.coords);
  MatJ gj = metric_jet(m, x.chart_id, xj);
  MatD g = values(gj);
  auto inner = [&](const VecD& a, const VecD& b) {
    double s = 0.0;
    for (int i = 0; i < m.dim; ++i)
      for (int j = 0; j < m.dim; ++j) s += a[i] * g(i, j) * b[j];
    return s;
  };
  const double uu = inner(u, u), vv = inner(v, v), uv = inner(u, v);
  const double area2 = uu * vv - uv * uv;
  if (area2 < 1e-12 * uu * vv) {
    throw PreconditionError("sectional_curvature: degenerate plane");
  }
  CurvatureTensorJ R = riemann_tensor_jet(m, x.chart_id, xj);
  Jet num =
      riemann_lowered(m, x.chart_id, xj, R, lift(u), lift(v), lift(v), lift(u));
  return num.value() / area2;
}

VecD wrap_torus(const MetricModel& m, const VecD& x) {
  VecD y = x;
  for (int i = 0; i < m.dim; ++i) {
    const double L = m.params.torus_periods[i];
    y[i] = std::fmod(y[i], L);
    if (y[i] < 0.0) y[i] += L;
  }
  return y;
}

}  // namespace pestov
