#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relosc/complex.hpp"

namespace relosc {

/// Dense 4x4 complex matrix, row-major.
template <class Real>
struct Mat4 {
  using value_type = Complex<Real>;
  std::array<value_type, 16> a{};

  value_type& operator()(int i, int k) { return a[static_cast<size_t>(4 * i + k)]; }
  const value_type& operator()(int i, int k) const { return a[static_cast<size_t>(4 * i + k)]; }

  static Mat4 identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = value_type(Real(1));
    return m;
  }

  Mat4& operator+=(const Mat4& o) {
    for (size_t i = 0; i < 16; ++i) a[i] += o.a[i];
    return *this;
  }
  Mat4& operator-=(const Mat4& o) {
    for (size_t i = 0; i < 16; ++i) a[i] -= o.a[i];
    return *this;
  }
  Mat4& operator*=(const value_type& s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  Mat4& operator*=(const Real& s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  Mat4& operator/=(const Real& s) {
    for (auto& x : a) x /= s;
    return *this;
  }
  friend Mat4 operator+(Mat4 x, const Mat4& y) { return x += y; }
  friend Mat4 operator-(Mat4 x, const Mat4& y) { return x -= y; }
  friend Mat4 operator*(Mat4 x, const value_type& s) { return x *= s; }
  friend Mat4 operator*(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 4; ++k) {
        value_type acc = x(i, 0) * y(0, k);
        for (int j = 1; j < 4; ++j) acc += x(i, j) * y(j, k);
        r(i, k) = std::move(acc);
      }
    }
    return r;
  }

  Mat4 transpose() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) r(i, k) = (*this)(k, i);
    return r;
  }

  Real max_abs() const {
    Real m(0);
    for (const auto& x : a) {
      Real v = abs(x);
      if (v > m) m = std::move(v);
    }
    return m;
  }
};

/// LU factorization with partial pivoting of a 4x4 complex matrix.
template <class Real>
class Lu4 {
 public:
  explicit Lu4(const Mat4<Real>& m) : lu_(m) {
    for (int i = 0; i < 4; ++i) perm_[static_cast<size_t>(i)] = i;
    for (int c = 0; c < 4; ++c) {
      int p = c;
      Real best = abs(lu_(c, c));
      for (int r = c + 1; r < 4; ++r) {
        Real v = abs(lu_(r, c));
        if (v > best) {
          best = std::move(v);
          p = r;
        }
      }
      if (best == 0) {
        singular_ = true;
        continue;
      }
      if (p != c) {
        for (int k = 0; k < 4; ++k) std::swap(lu_(p, k), lu_(c, k));
        std::swap(perm_[static_cast<size_t>(p)], perm_[static_cast<size_t>(c)]);
        odd_ = !odd_;
      }
      const auto pivot_inv = Complex<Real>(Real(1)) / lu_(c, c);
      for (int r = c + 1; r < 4; ++r) {
        lu_(r, c) *= pivot_inv;
        for (int k = c + 1; k < 4; ++k) lu_(r, k) -= lu_(r, c) * lu_(c, k);
      }
    }
  }

  bool singular() const { return singular_; }

  Complex<Real> det() const {
    Complex<Real> d = lu_(0, 0);
    for (int i = 1; i < 4; ++i) d *= lu_(i, i);
    return odd_ ? -d : d;
  }

  /// X = M^{-1} R.
  Mat4<Real> solve(const Mat4<Real>& rhs) const {
    if (singular_) throw std::domain_error("solve with singular 4x4 matrix");
    Mat4<Real> x;
    for (int col = 0; col < 4; ++col) {
      std::array<Complex<Real>, 4> y;
      for (int i = 0; i < 4; ++i) {
        y[static_cast<size_t>(i)] = rhs(perm_[static_cast<size_t>(i)], col);
        for (int j = 0; j < i; ++j) y[static_cast<size_t>(i)] -= lu_(i, j) * y[static_cast<size_t>(j)];
      }
      for (int i = 3; i >= 0; --i) {
        for (int j = i + 1; j < 4; ++j) y[static_cast<size_t>(i)] -= lu_(i, j) * y[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] /= lu_(i, i);
      }
      for (int i = 0; i < 4; ++i) x(i, col) = y[static_cast<size_t>(i)];
    }
    return x;
  }

  Mat4<Real> inverse() const { return solve(Mat4<Real>::identity()); }

 private:
  Mat4<Real> lu_;
  std::array<int, 4> perm_{};
  bool odd_ = false;
  bool singular_ = false;
};

template <class Real>
Complex<Real> det(const Mat4<Real>& m) {
  return Lu4<Real>(m).det();
}

/// Dense square complex matrix used by oracles and small solves.
template <class Real>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * static_cast<size_t>(n)) {}
  int size() const { return n_; }
  Complex<Real>& operator()(int i, int k) { return a_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(k)]; }
  const Complex<Real>& operator()(int i, int k) const {
    return a_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(k)];
  }

 private:
  int n_ = 0;
  std::vector<Complex<Real>> a_;
};

}  // namespace relosc
