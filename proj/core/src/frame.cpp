#include "pestov/frame.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace pestov {

namespace {

Eigen::MatrixXd to_eigen(const MatD& a) {
  Eigen::MatrixXd e(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) e(i, j) = a(i, j);
  return e;
}

MatD from_eigen(const Eigen::MatrixXd& e) {
  MatD a(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) a(i, j) = e(i, j);
  return a;
}

double norm2(const VecD& x) {
  double s = 0.0;
  for (int i = 0; i < x.n; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace

// ---- SkewForm ---------------------------------------------------------------

SkewForm SkewForm::zero(int n) {
  SkewForm s;
  s.n = n;
  s.entries = MatD(n, n);
  return s;
}

SkewForm SkewForm::wedge(int i, int j, int n) {
  SkewForm s = zero(n);
  s.entries(j, i) = 1.0;
  s.entries(i, j) = -1.0;
  return s;
}

SkewForm SkewForm::from_matrix(const MatD& m) {
  SkewForm s = zero(m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.rows; ++j) {
      const double v = 0.5 * (m(i, j) - m(j, i));
      s.entries(i, j) = v;
      s.entries(j, i) = -v;
    }
  return s;
}

SkewForm SkewForm::from_components(int n, const SVec<double, kMaxL2>& comp) {
  SkewForm s = zero(n);
  for (int idx = 0; idx < l2_dim(n); ++idx) {
    auto [i, j] = l2_pair(idx, n);
    s.entries(j, i) = comp[idx];
    s.entries(i, j) = -comp[idx];
  }
  return s;
}

SVec<double, kMaxL2> SkewForm::components() const {
  SVec<double, kMaxL2> c(l2_dim(n));
  for (int idx = 0; idx < c.n; ++idx) {
    auto [i, j] = l2_pair(idx, n);
    c[idx] = entries(j, i);
  }
  return c;
}

double SkewForm::norm() const {
  auto c = components();
  double s = 0.0;
  for (int i = 0; i < c.n; ++i) s += c[i] * c[i];
  return std::sqrt(s);
}

VecD SkewForm::apply(const VecD& theta) const { return matvec(entries, theta); }

SkewForm bracket(const SkewForm& a, const SkewForm& b) {
  MatD ab = matmul(a.entries, b.entries);
  MatD ba = matmul(b.entries, a.entries);
  return SkewForm::from_matrix(ab - ba);
}

// ---- lifting ------------------------------------------------------------------

FrameJet lift(const FramePoint& w) {
  return FrameJet{lift(w.x.coords), lift(w.a), w.x.chart_id};
}

FramePoint values(const FrameJet& w) {
  return FramePoint{{values(w.x), w.chart_id}, values(w.a)};
}

// ---- SO(n) utilities ------------------------------------------------------------

MatD so_expm(const MatD& xi) {
  const int n = xi.rows;
  if (n == 2) {
    const double t = xi(1, 0);
    MatD r(2, 2);
    r(0, 0) = std::cos(t);
    r(1, 1) = std::cos(t);
    r(1, 0) = std::sin(t);
    r(0, 1) = -std::sin(t);
    return r;
  }
  if (n == 3) {
    // Rodrigues with angle = sqrt(tr(xi^T xi) / 2)
    const double th2 = xi(1, 0) * xi(1, 0) + xi(2, 0) * xi(2, 0) +
                       xi(2, 1) * xi(2, 1);
    const double th = std::sqrt(th2);
    MatD r = MatD::identity(3);
    if (th < 1e-14) return r;
    const double s = std::sin(th) / th;
    const double c = (1.0 - std::cos(th)) / th2;
    MatD xi2 = matmul(xi, xi);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) += s * xi(i, j) + c * xi2(i, j);
    return r;
  }
  // scaling and squaring with a Taylor series on the scaled matrix
  double mx = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mx = std::max(mx, std::abs(xi(i, j)));
  int s = 0;
  while (mx > 0.25) {
    mx *= 0.5;
    ++s;
  }
  MatD z = xi;
  z *= std::pow(0.5, s);
  MatD term = MatD::identity(n);
  MatD sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = matmul(term, z);
    term *= 1.0 / k;
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = matmul(sum, sum);
  return sum;
}

MatD polar_project(const MatD& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      to_eigen(a), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0.0) {
    // flip the direction attached to the smallest singular value
    Eigen::MatrixXd u = svd.matrixU();
    u.col(a.cols - 1) *= -1.0;
    q = u * svd.matrixV().transpose();
  }
  return from_eigen(q);
}

double so_defect(const MatD& a) {
  MatD g = matmul(a.transposed(), a);
  double mx = 0.0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j)
      mx = std::max(mx, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return mx;
}

void validate_frame_point(const MetricModel& m, const FramePoint& w,
                          double tol) {
  check_domain(m, w.x.chart_id, w.x.coords);
  if (w.a.rows != m.dim || w.a.cols != m.dim) {
    throw PreconditionError("frame point: rotation has wrong shape");
  }
  if (so_defect(w.a) > tol) {
    throw PreconditionError("frame point: a is not orthogonal");
  }
  if (to_eigen(w.a).determinant() < 0.0) {
    throw PreconditionError("frame point: det a != +1");
  }
}

// ---- frame bundle operations -----------------------------------------------------

MatD reference_frame(const MetricModel& m, const ChartPoint& x) {
  check_domain(m, x.chart_id, x.coords);
  return values(reference_frame_jet(m, x.chart_id, lift(x.coords)));
}

namespace {

/// omega(Z)_{ij} = g(nabla_Z E_j, E_i), with E, Gamma, g supplied.
MatJ omega_given(const MetricModel& m, int chart_id, const VecJ& x,
                 const VecJ& Z, const MatJ& E, const ChristoffelJ& gamma,
                 const MatJ& g) {
  const int n = m.dim;
  MatJ dE(n, n);
  {
    VarScope aux(1);
    const int v = aux.var();
    VecJ xs = x;
    const Jet eps = Jet::variable(0.0, v);
    for (int i = 0; i < n; ++i) xs[i] += eps * Z[i];
    MatJ Es = reference_frame_jet(m, chart_id, xs);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dE(i, j) = Es(i, j).extract(v);
  }
  // (nabla_Z E_j)^k = dE(k, j) + sum_{m,l} Z^m Gamma^k_{ml} E(l, j)
  MatJ cov(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Jet acc = dE(k, j);
      for (int mm = 0; mm < n; ++mm) {
        if (detail::is_exact_zero(Z[mm])) continue;
        for (int l = 0; l < n; ++l)
          acc += Z[mm] * gamma.at(k, mm, l) * E(l, j);
      }
      cov(k, j) = acc;
    }
  MatJ om(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Jet acc;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) acc += g(k, l) * cov(k, j) * E(l, i);
      Jet acc2;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) acc2 += g(k, l) * cov(k, i) * E(l, j);
      // exact skew-symmetrization
      Jet half = 0.5 * (acc - acc2);
      om(i, j) = half;
      om(j, i) = -half;
    }
  return om;
}

}  // namespace

MatJ connection_form_jet(const MetricModel& m, int chart_id, const VecJ& x,
                         const VecJ& Z) {
  const int n = m.dim;
  if (m.flat()) return MatJ(n, n);
  MatJ E = reference_frame_jet(m, chart_id, x);
  ChristoffelJ gamma = christoffel_jet(m, chart_id, x);
  MatJ g = metric_jet(m, chart_id, x);
  return omega_given(m, chart_id, x, Z, E, gamma, g);
}

SkewForm connection_form(const MetricModel& m, const ChartPoint& x,
                         const VecD& Z) {
  check_domain(m, x.chart_id, x.coords);
  MatJ om = connection_form_jet(m, x.chart_id, lift(x.coords), lift(Z));
  return SkewForm::from_matrix(values(om));
}

FrameTangent vertical_field(const FramePoint& w, const SkewForm& xi) {
  FrameTangent t;
  t.base = w;
  t.dx = VecD(w.x.coords.n);
  t.da = matmul(w.a, xi.entries);
  return t;
}

FrameVelocityJ standard_velocity_jet(const MetricModel& m, const FrameJet& s,
                                     const VecJ& theta) {
  const int n = m.dim;
  FrameVelocityJ vel;
  if (m.flat()) {
    vel.dx = matvec(s.a, theta);
    vel.da = MatJ(n, n);
    return vel;
  }
  MatJ E = reference_frame_jet(m, s.chart_id, s.x);
  VecJ u = matvec(E, matvec(s.a, theta));
  ChristoffelJ gamma = christoffel_jet(m, s.chart_id, s.x);
  MatJ g = metric_jet(m, s.chart_id, s.x);
  MatJ om = omega_given(m, s.chart_id, s.x, u, E, gamma, g);
  vel.dx = u;
  vel.da = matmul(om, s.a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vel.da(i, j) = -vel.da(i, j);
  return vel;
}

FrameTangent standard_field(const MetricModel& m, const FramePoint& w,
                            const Direction& theta) {
  FrameVelocityJ v = standard_velocity_jet(m, lift(w), lift(theta.theta));
  FrameTangent t;
  t.base = w;
  t.dx = values(v.dx);
  t.da = values(v.da);
  return t;
}

// ---- re-charting -----------------------------------------------------------------

FramePoint rechart(const MetricModel& m, const FramePoint& w, int to_chart) {
  if (m.kind != ModelKind::RoundSphere) {
    throw PreconditionError("rechart: only the sphere has multiple charts");
  }
  if (to_chart == w.x.chart_id) return w;
  const int n = m.dim;
  VecJ xj = lift(w.x.coords);
  SVec<Jet> p = sphere_embed(m, w.x.chart_id, xj);
  MatJ E = reference_frame_jet(m, w.x.chart_id, xj);
  MatJ W = matmul(E, lift(w.a));  // chart components of frame vectors

  // embedded frame vectors: U_i = dp(x) . W_col_i
  VarScope aux(1);
  const int v = aux.var();
  const Jet eps = Jet::variable(0.0, v);
  SMat<Jet> U(n + 1, n);
  for (int col = 0; col < n; ++col) {
    VecJ xs = xj;
    for (int i = 0; i < n; ++i) xs[i] += eps * W(i, col);
    SVec<Jet> ps = sphere_embed(m, w.x.chart_id, xs);
    for (int i = 0; i <= n; ++i) U(i, col) = ps[i].extract(v);
  }

  VecJ y = sphere_chart_coords(m, to_chart, p);
  // chart'-components of frame vectors via the chart differential
  MatJ V(n, n);
  for (int col = 0; col < n; ++col) {
    SVec<Jet> pshift(n + 1);
    for (int i = 0; i <= n; ++i) pshift[i] = p[i] + eps * U(i, col);
    VecJ ys = sphere_chart_coords(m, to_chart, pshift);
    for (int i = 0; i < n; ++i) V(i, col) = ys[i].extract(v);
  }
  VecD ynew = values(y);
  MatJ Enew = reference_frame_jet(m, to_chart, lift(ynew));
  MatD anew = values(matmul(inverse(Enew), V));
  anew = polar_project(anew);
  return FramePoint{{ynew, to_chart}, anew};
}

// ---- flows ------------------------------------------------------------------------

namespace {

struct RkState {
  VecD x;
  MatD a;
  int chart = 0;
};

struct RkDeriv {
  VecD dx;
  MatD da;
};

RkDeriv eval_field(const MetricModel& m, const RkState& s, const VecD& theta) {
  FrameJet js{lift(s.x), lift(s.a), s.chart};
  FrameVelocityJ v = standard_velocity_jet(m, js, lift(theta));
  return RkDeriv{values(v.dx), values(v.da)};
}

RkState advance(const RkState& s, const RkDeriv& d, double h) {
  RkState r = s;
  for (int i = 0; i < r.x.n; ++i) r.x[i] += h * d.dx[i];
  for (int i = 0; i < r.a.rows; ++i)
    for (int j = 0; j < r.a.cols; ++j) r.a(i, j) += h * d.da(i, j);
  return r;
}

RkState rk4_step(const MetricModel& m, const RkState& s, const VecD& theta,
                 double dt) {
  RkDeriv k1 = eval_field(m, s, theta);
  RkDeriv k2 = eval_field(m, advance(s, k1, dt / 2), theta);
  RkDeriv k3 = eval_field(m, advance(s, k2, dt / 2), theta);
  RkDeriv k4 = eval_field(m, advance(s, k3, dt), theta);
  RkState r = s;
  for (int i = 0; i < r.x.n; ++i)
    r.x[i] += dt / 6.0 * (k1.dx[i] + 2 * k2.dx[i] + 2 * k3.dx[i] + k4.dx[i]);
  for (int i = 0; i < r.a.rows; ++i)
    for (int j = 0; j < r.a.cols; ++j)
      r.a(i, j) +=
          dt / 6.0 * (k1.da(i, j) + 2 * k2.da(i, j) + 2 * k3.da(i, j) +
                      k4.da(i, j));
  return r;
}

bool ball_exited(const MetricModel& m, const VecD& x) {
  if (m.kind != ModelKind::HyperbolicBall &&
      m.kind != ModelKind::PerturbedHyperbolic)
    return false;
  return norm2(x) > kBallDomainRadius * kBallDomainRadius;
}

void maybe_rechart(const MetricModel& m, RkState& s) {
  if (m.kind != ModelKind::RoundSphere) return;
  const double r = m.params.sphere_radius;
  if (norm2(s.x) > r * r) {
    FramePoint w = rechart(m, FramePoint{{s.x, s.chart}, s.a},
                           1 - s.chart);
    s.x = w.x.coords;
    s.a = w.a;
    s.chart = w.x.chart_id;
  }
}

}  // namespace

FlowResult b_theta_flow_result(const MetricModel& m, const FramePoint& w,
                               const Direction& theta, double t, double dt,
                               int record_every) {
  if (!(dt > 0.0)) throw PreconditionError("flow: dt must be > 0");
  check_domain(m, w.x.chart_id, w.x.coords);

  VecD th = theta.theta;
  double remaining = t;
  if (remaining < 0.0) {
    remaining = -remaining;
    for (int i = 0; i < th.n; ++i) th[i] = -th[i];
  }
  const int steps = std::max(1, static_cast<int>(std::llround(remaining / dt)));
  const double h = remaining / steps;

  FlowResult out;
  RkState s{w.x.coords, w.a, w.x.chart_id};
  if (record_every > 0) out.steps.push_back({0.0, w});

  double th_norm2 = norm2(th);
  if (th_norm2 == 0.0 || t == 0.0) {
    out.end = w;
    if (record_every > 0 && t != 0.0)
      out.steps.push_back({t, w});
    return out;
  }

  for (int k = 1; k <= steps; ++k) {
    RkState next = rk4_step(m, s, th, h);
    next.a = polar_project(next.a);
    if (ball_exited(m, next.x)) {
      out.exited = true;
      out.exit_time = k * h;
      out.diagnostic = "trajectory left the hyperbolic chart domain at t = " +
                       std::to_string(k * h);
      break;
    }
    maybe_rechart(m, next);
    s = next;
    if (record_every > 0 && (k % record_every == 0 || k == steps)) {
      out.steps.push_back({k * h, FramePoint{{s.x, s.chart}, s.a}});
    }
  }
  out.end = FramePoint{{s.x, s.chart}, s.a};
  return out;
}

FramePoint b_theta_flow(const MetricModel& m, const FramePoint& w,
                        const Direction& theta, double t, double dt) {
  FlowResult r = b_theta_flow_result(m, w, theta, t, dt);
  if (r.exited) throw DomainError(r.diagnostic);
  return r.end;
}

FramePoint frame_flow(const MetricModel& m, const FramePoint& w, double t,
                      double dt) {
  Direction e1;
  e1.theta = VecD(m.dim);
  e1.theta[0] = 1.0;
  return b_theta_flow(m, w, e1, t, dt);
}

FramePoint b_theta_flow_raw(const MetricModel& m, const FramePoint& w,
                            const VecD& theta, double t, double dt) {
  VecD th = theta;
  double remaining = t;
  if (remaining < 0.0) {
    remaining = -remaining;
    for (int i = 0; i < th.n; ++i) th[i] = -th[i];
  }
  if (remaining == 0.0 || norm2(th) == 0.0) return w;
  const int steps = std::max(1, static_cast<int>(std::llround(remaining / dt)));
  const double h = remaining / steps;
  RkState s{w.x.coords, w.a, w.x.chart_id};
  for (int k = 0; k < steps; ++k) {
    s = rk4_step(m, s, th, h);
    if (m.kind == ModelKind::HyperbolicBall ||
        m.kind == ModelKind::PerturbedHyperbolic) {
      if (norm2(s.x) > 0.995 * 0.995) {
        throw DomainError("finite-difference flow left the chart domain");
      }
    }
    maybe_rechart(m, s);
  }
  return FramePoint{{s.x, s.chart}, s.a};
}

FramePoint vertical_flow(const FramePoint& w, const SkewForm& xi, double t) {
  MatD e = xi.entries;
  e *= t;
  return FramePoint{w.x, matmul(w.a, so_expm(e))};
}

SMat<Jet> sphere_group_matrix(const MetricModel& m, const FrameJet& w) {
  if (m.kind != ModelKind::RoundSphere) {
    throw PreconditionError("sphere_group_matrix: model is not a sphere");
  }
  const int n = m.dim;
  const double r = m.params.sphere_radius;
  SVec<Jet> p = sphere_embed(m, w.chart_id, w.x);
  MatJ E = reference_frame_jet(m, w.chart_id, w.x);
  MatJ W = matmul(E, w.a);

  SMat<Jet> Q(n + 1, n + 1);
  {
    VarScope aux(1);
    const int v = aux.var();
    const Jet eps = Jet::variable(0.0, v);
    for (int col = 0; col < n; ++col) {
      VecJ xs = w.x;
      for (int i = 0; i < n; ++i) xs[i] += eps * W(i, col);
      SVec<Jet> ps = sphere_embed(m, w.chart_id, xs);
      for (int i = 0; i <= n; ++i) Q(i, col) = ps[i].extract(v);
    }
  }
  for (int i = 0; i <= n; ++i) Q(i, n) = p[i] * (1.0 / r);
  return Q;
}

// ---- connection map ----------------------------------------------------------------

VecD connection_map(const MetricModel& m, const SMPoint& z,
                    const SMTangent& zeta) {
  check_domain(m, z.x.chart_id, z.x.coords);
  const int n = m.dim;
  ChristoffelD gamma = christoffel_at(m, z.x);
  VecD K(n);
  for (int k = 0; k < n; ++k) {
    double acc = zeta.dv[k];
    for (int mm = 0; mm < n; ++mm)
      for (int l = 0; l < n; ++l)
        acc += gamma.at(k, mm, l) * zeta.dx[mm] * z.v[l];
    K[k] = acc;
  }
  // tangency to SM: d/dt g(v, v) = 2 g(K, v) must vanish
  MatD g = metric_at(m, z.x);
  double gKv = 0.0, gvv = 0.0, gKK = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      gKv += K[i] * g(i, j) * z.v[j];
      gvv += z.v[i] * g(i, j) * z.v[j];
      gKK += K[i] * g(i, j) * K[j];
    }
  if (std::abs(gKv) > 1e-6 * std::sqrt(gvv) * (std::sqrt(gKK) + 1.0)) {
    throw PreconditionError("connection_map: zeta is not tangent to SM");
  }
  return K;
}

}  // namespace pestov
