#pragma once

#include <array>
#include <cassert>
#include <cstdint>

namespace pestov {

/// Truncated multivariate Taylor scalar ("jet") over up to kMaxVars
/// independent first-order parameters eps_i with eps_i^2 = 0.
///
/// A Jet stores the coefficients of prod_{i in S} eps_i for every subset S of
/// its active variables; c(S) is indexed by the bitmask of S. Mixed first
/// partials of a smooth expression are read off directly: the coefficient of
/// eps_{i1}...eps_{ik} is exactly d^k/dt_{i1}...dt_{ik} at 0. All arithmetic
/// below is exact in this quotient algebra, so derivative chains computed
/// through it carry no truncation error, only rounding.
class Jet {
 public:
  static constexpr int kMaxVars = 6;
  static constexpr int kSlots = 1 << kMaxVars;

  Jet() = default;
  Jet(double v) { c_[0] = v; }  // NOLINT: implicit lift of constants

  static Jet variable(double value, int var) {
    assert(var >= 0 && var < kMaxVars);
    Jet j;
    j.vars_ = 1u << var;
    j.c_[0] = value;
    j.c_[j.vars_] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  double coeff(std::uint32_t mask) const { return c_[mask]; }
  std::uint32_t vars() const { return vars_; }

  /// Coefficient of eps_var as a Jet in the remaining variables:
  /// if u = A + eps_var * B with A, B free of eps_var, returns B.
  Jet extract(int var) const {
    const std::uint32_t bit = 1u << var;
    Jet r;
    r.vars_ = vars_ & ~bit;
    for (std::uint32_t s = r.vars_;; s = (s - 1) & r.vars_) {
      r.c_[s] = c_[s | bit];
      if (s == 0) break;
    }
    return r;
  }

  /// The part of u free of eps_var (A in u = A + eps_var * B).
  Jet without(int var) const {
    const std::uint32_t bit = 1u << var;
    Jet r;
    r.vars_ = vars_ & ~bit;
    for (std::uint32_t s = r.vars_;; s = (s - 1) & r.vars_) {
      r.c_[s] = c_[s];
      if (s == 0) break;
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    vars_ |= o.vars_;
    for (std::uint32_t s = o.vars_;; s = (s - 1) & o.vars_) {
      c_[s] += o.c_[s];
      if (s == 0) break;
    }
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    vars_ |= o.vars_;
    for (std::uint32_t s = o.vars_;; s = (s - 1) & o.vars_) {
      c_[s] -= o.c_[s];
      if (s == 0) break;
    }
    return *this;
  }
  Jet& operator+=(double v) {
    c_[0] += v;
    return *this;
  }
  Jet& operator-=(double v) {
    c_[0] -= v;
    return *this;
  }
  Jet& operator*=(double v) {
    for (std::uint32_t s = vars_;; s = (s - 1) & vars_) {
      c_[s] *= v;
      if (s == 0) break;
    }
    return *this;
  }
  Jet& operator/=(double v) { return (*this) *= (1.0 / v); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b) { return Jet(a) -= b; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(Jet a, double b) { return a /= b; }

  Jet operator-() const {
    Jet r = *this;
    for (std::uint32_t s = vars_;; s = (s - 1) & vars_) {
      r.c_[s] = -r.c_[s];
      if (s == 0) break;
    }
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if ((a.vars_ | b.vars_) == 0) return Jet(a.c_[0] * b.c_[0]);
    Jet r;
    r.vars_ = a.vars_ | b.vars_;
    for (std::uint32_t sa = a.vars_;; sa = (sa - 1) & a.vars_) {
      const double x = a.c_[sa];
      if (x != 0.0) {
        const std::uint32_t vb = b.vars_ & ~sa;  // eps_i^2 = 0
        for (std::uint32_t sb = vb;; sb = (sb - 1) & vb) {
          r.c_[sa | sb] += x * b.c_[sb];
          if (sb == 0) break;
        }
      }
      if (sa == 0) break;
    }
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = (*this) * o; }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * inv(b); }
  friend Jet operator/(double a, const Jet& b) { return inv(b) * a; }
  Jet& operator/=(const Jet& o) { return *this = (*this) / o; }

  friend Jet inv(const Jet& u);
  friend Jet sqrt(const Jet& u);
  friend Jet exp(const Jet& u);
  friend Jet log(const Jet& u);
  friend Jet sin(const Jet& u);
  friend Jet cos(const Jet& u);
  friend Jet pow(const Jet& u, double p);

  /// Composes the univariate series sum_k d[k] * (u - u.value())^k,
  /// where d[k] must be f^{(k)}(u.value()) / k!.
  static Jet compose(const Jet& u, const double* d, int terms);

 private:
  std::uint32_t vars_ = 0;
  // Invariant: c_[s] == 0 for every s not a submask of vars_.
  std::array<double, kSlots> c_{};
};

inline int popcount6(std::uint32_t m) {
  int k = 0;
  while (m) {
    m &= m - 1;
    ++k;
  }
  return k;
}

/// Stack-disciplined allocator of jet variable slots for the current thread.
/// Nested derivative evaluations lease fresh slots on construction and
/// release them on destruction; the total live depth may not exceed
/// Jet::kMaxVars.
class VarScope {
 public:
  explicit VarScope(int count);
  ~VarScope();
  VarScope(const VarScope&) = delete;
  VarScope& operator=(const VarScope&) = delete;

  int var(int i = 0) const {
    assert(i >= 0 && i < count_);
    return base_ + i;
  }
  int count() const { return count_; }

  static int live_count();

 private:
  int base_;
  int count_;
};

}  // namespace pestov
