#include "pestov/jet.hpp"

#include <cmath>
#include <stdexcept>

namespace pestov {

Jet Jet::compose(const Jet& u, const double* d, int terms) {
  Jet h = u;
  h.c_[0] = 0.0;  // nilpotent part
  Jet r(d[0]);
  Jet p(1.0);
  for (int k = 1; k < terms; ++k) {
    p *= h;
    bool zero = true;
    for (std::uint32_t s = p.vars_;; s = (s - 1) & p.vars_) {
      if (p.c_[s] != 0.0) {
        zero = false;
        break;
      }
      if (s == 0) break;
    }
    if (zero) break;
    r += d[k] * p;
  }
  return r;
}

namespace {
int series_len(const Jet& u) { return popcount6(u.vars()) + 1; }
}  // namespace

Jet inv(const Jet& u) {
  const double x = u.value();
  double d[Jet::kMaxVars + 1];
  double t = 1.0 / x;
  for (int k = 0; k <= Jet::kMaxVars; ++k) {
    d[k] = t;            // (-1)^k / x^{k+1}
    t = -t / x;
  }
  return Jet::compose(u, d, series_len(u));
}

Jet sqrt(const Jet& u) {
  const double x = u.value();
  double d[Jet::kMaxVars + 1];
  d[0] = std::sqrt(x);
  // d[k] = binom(1/2, k) * x^{1/2 - k}
  double coef = 1.0;
  for (int k = 1; k <= Jet::kMaxVars; ++k) {
    coef *= (0.5 - (k - 1)) / k;
    d[k] = coef * d[0] / std::pow(x, k);
  }
  return Jet::compose(u, d, series_len(u));
}

Jet exp(const Jet& u) {
  const double e = std::exp(u.value());
  double d[Jet::kMaxVars + 1];
  double f = 1.0;
  for (int k = 0; k <= Jet::kMaxVars; ++k) {
    d[k] = e * f;
    f /= (k + 1);
  }
  return Jet::compose(u, d, series_len(u));
}

Jet log(const Jet& u) {
  const double x = u.value();
  double d[Jet::kMaxVars + 1];
  d[0] = std::log(x);
  double t = 1.0 / x;
  for (int k = 1; k <= Jet::kMaxVars; ++k) {
    d[k] = t / k;        // (-1)^{k+1} / (k x^k)
    t = -t / x;
  }
  return Jet::compose(u, d, series_len(u));
}

Jet sin(const Jet& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  const double cycle[4] = {s, c, -s, -c};
  double d[Jet::kMaxVars + 1];
  double f = 1.0;
  for (int k = 0; k <= Jet::kMaxVars; ++k) {
    d[k] = cycle[k % 4] * f;
    f /= (k + 1);
  }
  return Jet::compose(u, d, series_len(u));
}

Jet cos(const Jet& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  const double cycle[4] = {c, -s, -c, s};
  double d[Jet::kMaxVars + 1];
  double f = 1.0;
  for (int k = 0; k <= Jet::kMaxVars; ++k) {
    d[k] = cycle[k % 4] * f;
    f /= (k + 1);
  }
  return Jet::compose(u, d, series_len(u));
}

Jet pow(const Jet& u, double p) {
  const double x = u.value();
  double d[Jet::kMaxVars + 1];
  d[0] = std::pow(x, p);
  double coef = 1.0;
  for (int k = 1; k <= Jet::kMaxVars; ++k) {
    coef *= (p - (k - 1)) / k;
    d[k] = coef * std::pow(x, p - k);
  }
  return Jet::compose(u, d, series_len(u));
}

namespace {
thread_local int g_live_vars = 0;
}

VarScope::VarScope(int count) : base_(g_live_vars), count_(count) {
  if (g_live_vars + count > Jet::kMaxVars) {
    throw std::logic_error("jet variable budget exceeded (nested depth > 6)");
  }
  g_live_vars += count;
}

VarScope::~VarScope() { g_live_vars = base_; }

int VarScope::live_count() { return g_live_vars; }

}  // namespace pestov
