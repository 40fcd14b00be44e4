#include "pestov/derive.hpp"

#include <cmath>

namespace pestov {

double eval(const MetricModel& m, const ScalarField& f, const FramePoint& w) {
  return f(m, lift(w)).value();
}

Jet derive_at(const MetricModel& m, const ScalarField& f, const FrameJet& w0,
              std::span<const FieldSpec> chain) {
  const int k = static_cast<int>(chain.size());
  if (k < 1 || k > kMaxChain) {
    throw PreconditionError("derive: chain length must be between 1 and 4");
  }
  VarScope scope(k);
  FrameJet s = w0;
  // The flow of the leftmost operator is applied to the point first; each
  // flow enters at first order in its own nilpotent parameter, where the
  // one-term Taylor step equals the exact flow.
  for (int i = 0; i < k; ++i) {
    const FieldSpec& fs = chain[i];
    const Jet eps = Jet::variable(0.0, scope.var(i));
    if (fs.kind == FieldSpec::Kind::Vertical) {
      // a <- a (I + eps xi) = a + eps (a xi)
      MatJ axi = matmul(s.a, lift(fs.xi.entries));
      for (int r = 0; r < s.a.rows; ++r)
        for (int c = 0; c < s.a.cols; ++c) s.a(r, c) += eps * axi(r, c);
    } else {
      FrameVelocityJ v = standard_velocity_jet(m, s, lift(fs.theta));
      for (int r = 0; r < s.x.n; ++r) s.x[r] += eps * v.dx[r];
      for (int r = 0; r < s.a.rows; ++r)
        for (int c = 0; c < s.a.cols; ++c) s.a(r, c) += eps * v.da(r, c);
    }
  }
  Jet val = f(m, s);
  for (int i = k - 1; i >= 0; --i) val = val.extract(scope.var(i));
  return val;
}

namespace {

FramePoint fd_flow(const MetricModel& m, const FramePoint& w,
                   const FieldSpec& fs, double t, double dt) {
  if (fs.kind == FieldSpec::Kind::Vertical) return vertical_flow(w, fs.xi, t);
  return b_theta_flow_raw(m, w, fs.theta, t, dt);
}

double fd_derive(const MetricModel& m, const ScalarField& f,
                 const FramePoint& w, std::span<const FieldSpec> chain,
                 const DeriveOptions& opts) {
  if (chain.empty()) return f(m, lift(w)).value();
  const FieldSpec& head = chain.front();
  auto rest = chain.subspan(1);
  const double h = opts.fd_step;
  const double dt = std::min(opts.fd_flow_dt, h / 10.0);

  auto phi = [&](double t) {
    return fd_derive(m, f, fd_flow(m, w, head, t, dt), rest, opts);
  };
  // Richardson table over the centered first-derivative stencil.
  const int L = opts.fd_richardson;
  std::vector<double> row(L + 1);
  for (int j = 0; j <= L; ++j) {
    const double hj = h / std::pow(2.0, j);
    row[j] = (phi(hj) - phi(-hj)) / (2.0 * hj);
  }
  for (int lev = 1; lev <= L; ++lev) {
    const double p = std::pow(4.0, lev);
    for (int j = 0; j + lev <= L; ++j) {
      row[j] = (p * row[j + 1] - row[j]) / (p - 1.0);
    }
  }
  return row[0];
}

}  // namespace

double derive(const MetricModel& m, const ScalarField& f, const FramePoint& w,
              std::span<const FieldSpec> chain, DeriveMethod method,
              const DeriveOptions& opts) {
  const int k = static_cast<int>(chain.size());
  if (k < 1 || k > kMaxChain) {
    throw PreconditionError("derive: chain length must be between 1 and 4");
  }
  check_domain(m, w.x.chart_id, w.x.coords);
  if (method == DeriveMethod::Jet) {
    return derive_at(m, f, lift(w), chain).value();
  }
  return fd_derive(m, f, w, chain, opts);
}

double commutator_apply(const MetricModel& m, const ScalarField& f,
                        const FramePoint& w, const FieldSpec& A,
                        const FieldSpec& B, DeriveMethod method,
                        const DeriveOptions& opts) {
  const FieldSpec ab[2] = {A, B};
  const FieldSpec ba[2] = {B, A};
  return derive(m, f, w, ab, method, opts) - derive(m, f, w, ba, method, opts);
}

}  // namespace pestov
