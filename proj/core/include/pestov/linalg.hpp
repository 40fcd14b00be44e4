#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <utility>

#include "pestov/jet.hpp"

namespace pestov {

inline constexpr int kMaxDim = 5;   // manifold dim <= 4, sphere embedding <= 5
inline constexpr int kMaxL2 = 6;    // dim of Lambda^2 R^n for n <= 4

namespace detail {
inline double scalar_value(double x) { return x; }
inline double scalar_value(const Jet& x) { return x.value(); }
inline bool is_exact_zero(double x) { return x == 0.0; }
inline bool is_exact_zero(const Jet& x) {
  return x.vars() == 0 && x.value() == 0.0;
}
}  // namespace detail

/// Fixed-capacity dense vector; T is double or Jet.
template <class T, int Cap = kMaxDim>
struct SVec {
  int n = 0;
  std::array<T, Cap> v{};

  SVec() = default;
  explicit SVec(int size) : n(size) { assert(size <= Cap); }

  T& operator[](int i) { return v[i]; }
  const T& operator[](int i) const { return v[i]; }

  SVec& operator+=(const SVec& o) {
    for (int i = 0; i < n; ++i) v[i] += o.v[i];
    return *this;
  }
  SVec& operator-=(const SVec& o) {
    for (int i = 0; i < n; ++i) v[i] -= o.v[i];
    return *this;
  }
  template <class S>
  SVec& operator*=(const S& s) {
    for (int i = 0; i < n; ++i) v[i] *= s;
    return *this;
  }
  friend SVec operator+(SVec a, const SVec& b) { return a += b; }
  friend SVec operator-(SVec a, const SVec& b) { return a -= b; }
};

/// Fixed-capacity dense matrix, row-major; T is double or Jet.
template <class T, int Cap = kMaxDim>
struct SMat {
  int rows = 0, cols = 0;
  std::array<T, Cap * Cap> m{};

  SMat() = default;
  SMat(int r, int c) : rows(r), cols(c) { assert(r <= Cap && c <= Cap); }

  static SMat identity(int n) {
    SMat a(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = T(1.0);
    return a;
  }

  T& operator()(int i, int j) { return m[i * Cap + j]; }
  const T& operator()(int i, int j) const { return m[i * Cap + j]; }

  SMat transposed() const {
    SMat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  SMat& operator+=(const SMat& o) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) (*this)(i, j) += o(i, j);
    return *this;
  }
  SMat& operator-=(const SMat& o) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) (*this)(i, j) -= o(i, j);
    return *this;
  }
  template <class S>
  SMat& operator*=(const S& s) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) (*this)(i, j) *= s;
    return *this;
  }
  friend SMat operator+(SMat a, const SMat& b) { return a += b; }
  friend SMat operator-(SMat a, const SMat& b) { return a -= b; }
};

template <class T, int Cap>
SVec<T, Cap> matvec(const SMat<T, Cap>& a, const SVec<T, Cap>& x) {
  assert(a.cols == x.n);
  SVec<T, Cap> y(a.rows);
  for (int i = 0; i < a.rows; ++i) {
    T acc{};
    for (int j = 0; j < a.cols; ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

template <class T, int Cap>
SMat<T, Cap> matmul(const SMat<T, Cap>& a, const SMat<T, Cap>& b) {
  assert(a.cols == b.rows);
  SMat<T, Cap> c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const T& aik = a(i, k);
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T, int Cap>
T dot(const SVec<T, Cap>& a, const SVec<T, Cap>& b) {
  assert(a.n == b.n);
  T acc{};
  for (int i = 0; i < a.n; ++i) acc += a[i] * b[i];
  return acc;
}

/// Inverse by Gauss-Jordan with partial pivoting on leading values.
/// Valid for Jet entries because pivots of the shipped metrics are bounded
/// away from zero.
template <class T, int Cap>
SMat<T, Cap> inverse(const SMat<T, Cap>& a) {
  assert(a.rows == a.cols);
  const int n = a.rows;
  SMat<T, Cap> w = a;
  SMat<T, Cap> inv = SMat<T, Cap>::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(detail::scalar_value(w(col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double cand = std::abs(detail::scalar_value(w(r, col)));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(w(col, j), w(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    T d = T(1.0) / w(col, col);
    for (int j = 0; j < n; ++j) {
      w(col, j) *= d;
      inv(col, j) *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      T f = w(r, col);
      if (detail::is_exact_zero(f)) continue;
      for (int j = 0; j < n; ++j) {
        w(r, j) -= f * w(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// ---- Lambda^2 R^n bookkeeping ------------------------------------------
// Basis (e_i ^ e_j), i < j, in lexicographic order; this basis is
// orthonormal for the 2-form metric, which equals one half of the
// Frobenius pairing on the associated skew matrices.

inline int l2_dim(int n) { return n * (n - 1) / 2; }

inline int l2_index(int i, int j, int n) {
  assert(i < j && j < n);
  // pairs (0,1),(0,2),...,(0,n-1),(1,2),...
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline std::pair<int, int> l2_pair(int idx, int n) {
  for (int i = 0; i < n; ++i) {
    const int row = n - 1 - i;
    if (idx < row) return {i, i + 1 + idx};
    idx -= row;
  }
  assert(false);
  return {-1, -1};
}

using VecD = SVec<double>;
using MatD = SMat<double>;
using VecJ = SVec<Jet>;
using MatJ = SMat<Jet>;

}  // namespace pestov
