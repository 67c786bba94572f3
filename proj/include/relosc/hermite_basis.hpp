#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "relosc/complex.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

// Orthonormal eigenbasis of H0 = p^2 + sigma^2 x^2,
//   psi_k(x) = (sigma/pi)^(1/4) (2^k k!)^(-1/2) H_k(sqrt(sigma) x) exp(-sigma x^2 / 2),
// with H0 psi_k = sigma (2k+1) psi_k. In ladder form
//   x    = (a + a^+) / sqrt(2 sigma)
//   d/dx = sqrt(sigma/2) (a - a^+)
// so (d/dx) psi_k = sqrt(sigma/2) (sqrt(k) psi_{k-1} - sqrt(k+1) psi_{k+1}).

template <class Real>
struct BasisSpec {
  Real sigma;
  int size = 0;

  void validate() const {
    if (!(sigma > 0)) throw std::invalid_argument("basis sigma must be positive");
    if (size < 8 || size % 4 != 0) {
      throw std::invalid_argument("basis size must be >= 8 and a multiple of 4, got " +
                                  std::to_string(size));
    }
  }
};

/// Expansion coefficients over consecutive basis functions:
/// coeffs[j] multiplies psi_{first + j}.
template <class Real>
struct LadderColumn {
  int first = 0;
  std::vector<Real> coeffs;

  Real at(int index) const {
    const int j = index - first;
    if (j < 0 || j >= static_cast<int>(coeffs.size())) return Real(0);
    return coeffs[static_cast<size_t>(j)];
  }
};

namespace detail {

inline void check_index(int k, int size) {
  if (k < 0 || k >= size) {
    throw std::out_of_range("basis index " + std::to_string(k) + " outside [0, " +
                            std::to_string(size) + ")");
  }
}

// x applied to a coefficient column in the untruncated basis.
template <class Real>
LadderColumn<Real> apply_x(const LadderColumn<Real>& v, const Real& sigma) {
  using std::sqrt;
  const Real two_sigma = 2 * promote(sigma);
  LadderColumn<Real> out;
  out.first = std::max(0, v.first - 1);
  const int last = v.first + static_cast<int>(v.coeffs.size());  // highest index + 1 after shift
  out.coeffs.assign(static_cast<size_t>(last + 1 - out.first), Real(0));
  for (size_t j = 0; j < v.coeffs.size(); ++j) {
    const int k = v.first + static_cast<int>(j);
    if (v.coeffs[j] == 0) continue;
    if (k > 0) out.coeffs[static_cast<size_t>(k - 1 - out.first)] += v.coeffs[j] * sqrt(Real(k) / two_sigma);
    out.coeffs[static_cast<size_t>(k + 1 - out.first)] += v.coeffs[j] * sqrt(Real(k + 1) / two_sigma);
  }
  return out;
}

}  // namespace detail

/// Coefficients of x^p psi_k over psi_{k-p} .. psi_{k+p}, obtained by
/// iterating the single-step ladder action p times. Indices below zero are
/// dropped, so `first` is max(0, k-p).
template <class Real>
LadderColumn<Real> position_power_column(int k, int p, const BasisSpec<Real>& basis) {
  detail::check_index(k, basis.size);
  if (p < 0 || p > 4) throw std::invalid_argument("position power must lie in [0, 4]");
  LadderColumn<Real> v{k, {Real(1)}};
  for (int i = 0; i < p; ++i) v = detail::apply_x(v, basis.sigma);
  return v;
}

/// <psi_i| -d^2/dx^2 |psi_k>; nonzero only for |i-k| in {0, 2}.
template <class Real>
Real kinetic_matrix_element(int i, int k, const BasisSpec<Real>& basis) {
  using std::sqrt;
  const Real s = promote(basis.sigma);
  if (i == k) return s * (Real(k) + Real(1) / 2);
  const int lo = std::min(i, k);
  if (std::abs(i - k) == 2 && lo >= 0) return -s / 2 * (sqrt(Real(lo + 1)) * sqrt(Real(lo + 2)));
  return Real(0);
}

/// Coefficients of (d/dx) psi_k over psi_{k-1}, psi_k, psi_{k+1}.
template <class Real>
LadderColumn<Real> derivative_column(int k, const BasisSpec<Real>& basis) {
  using std::sqrt;
  detail::check_index(k, basis.size);
  const Real h = sqrt(promote(basis.sigma) / 2);
  if (k == 0) return {0, {Real(0), Real(-h)}};
  return {k - 1, {h * sqrt(Real(k)), Real(0), -h * sqrt(Real(k + 1))}};
}

/// Square matrix stored by diagonals, |i-k| <= bandwidth. Reads outside the
/// band return zero; writes outside the band throw.
template <class T>
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int size, int bandwidth)
      : size_(size), bandwidth_(bandwidth), data_(static_cast<size_t>(size) * (2 * bandwidth + 1), T(0)) {}

  int size() const { return size_; }
  int bandwidth() const { return bandwidth_; }
  bool in_band(int i, int k) const {
    return i >= 0 && k >= 0 && i < size_ && k < size_ && std::abs(i - k) <= bandwidth_;
  }

  T at(int i, int k) const {
    if (!in_band(i, k)) return T(0);
    return data_[index(i, k)];
  }
  T& ref(int i, int k) {
    if (!in_band(i, k)) throw std::out_of_range("banded write outside band");
    return data_[index(i, k)];
  }

 private:
  size_t index(int i, int k) const {
    return static_cast<size_t>(i) * (2 * bandwidth_ + 1) + static_cast<size_t>(k - i + bandwidth_);
  }
  int size_ = 0;
  int bandwidth_ = 0;
  std::vector<T> data_;
};

/// Truncated matrices of -d^2/dx^2, x, x^2, x^3, x^4 over the first `size`
/// basis functions (matrix elements of the untruncated operators).
template <class Real>
struct BasisMatrices {
  BasisSpec<Real> basis;
  BandedMatrix<Real> kinetic;
  std::array<BandedMatrix<Real>, 5> position;  // position[p] = x^p

  /// `size` may exceed basis.size: the entries are exact matrix elements, so
  /// coupling blocks one step past the truncation can be formed.
  explicit BasisMatrices(const BasisSpec<Real>& spec, int size = -1) : basis(spec) {
    basis.validate();
    const int n = size < 0 ? basis.size : size;
    if (n < 1) throw std::invalid_argument("matrix size must be positive");
    kinetic = BandedMatrix<Real>(n, 2);
    for (int k = 0; k < n; ++k) {
      for (int i = std::max(0, k - 2); i <= std::min(n - 1, k + 2); ++i) {
        kinetic.ref(i, k) = kinetic_matrix_element(i, k, basis);
      }
    }
    // ladder in units of 1/sqrt(2 sigma), scaled once per power; the lower
    // triangle is mirrored so every x^p is exactly symmetric
    using std::sqrt;
    const Real unit = Real(1) / 2;
    const Real f1 = Real(1) / sqrt(2 * promote(basis.sigma));
    const Real f2 = Real(1) / (2 * promote(basis.sigma));
    const std::array<Real, 5> scale{Real(1), f1, f2, f1 * f2, f2 * f2};
    for (int p = 0; p <= 4; ++p) position[static_cast<size_t>(p)] = BandedMatrix<Real>(n, p);
    for (int k = 0; k < n; ++k) {
      LadderColumn<Real> v{k, {Real(1)}};
      for (int p = 0; p <= 4; ++p) {
        if (p > 0) v = detail::apply_x(v, unit);
        auto& m = position[static_cast<size_t>(p)];
        for (size_t j = 0; j < v.coeffs.size(); ++j) {
          const int i = v.first + static_cast<int>(j);
          if (i >= k && i < n && i - k <= p) {
            m.ref(i, k) = v.coeffs[j] * scale[static_cast<size_t>(p)];
            if (i != k) m.ref(k, i) = m.at(i, k);
          }
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature oracle (weight exp(-t^2)), used to cross-check the
// ladder algebra through an independent route.

template <class Real>
struct GaussHermiteRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

namespace detail {

// Orthonormal Hermite polynomials (weight exp(-t^2)) up to degree n at t.
template <class Real>
void orthonormal_hermite(const Real& t, int n, std::vector<Real>& out) {
  using std::sqrt;
  out.assign(static_cast<size_t>(n + 1), Real(0));
  out[0] = Real(1) / sqrt(sqrt(pi<Real>()));
  if (n >= 1) out[1] = sqrt(Real(2)) * t * out[0];
  for (int j = 2; j <= n; ++j) {
    out[static_cast<size_t>(j)] = t * sqrt(Real(2) / j) * out[static_cast<size_t>(j - 1)] -
                                  sqrt(Real(j - 1) / j) * out[static_cast<size_t>(j - 2)];
  }
}

// Double-precision root guesses by Sturm-count bisection on the Jacobi
// matrix (zero diagonal, off-diagonal sqrt(j/2)), refined later at full
// precision. Ordered descending.
inline std::vector<double> hermite_root_guesses(int m) {
  auto count_below = [m](double x) {
    int count = 0;
    double q = -x;
    if (q < 0) ++count;
    for (int j = 1; j < m; ++j) {
      if (q == 0) q = 1e-300;
      q = -x - (j / 2.0) / q;
      if (q < 0) ++count;
    }
    return count;
  };
  std::vector<double> x(static_cast<size_t>(m));
  const double bound = std::sqrt(2.0 * m) + 1;
  for (int r = 0; r < m; ++r) {
    // r-th root from the top: exactly m - 1 - r roots lie below it
    double lo = -bound, hi = bound;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > m - 1 - r) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    x[static_cast<size_t>(r)] = 0.5 * (lo + hi);
  }
  return x;
}

}  // namespace detail

/// m-point Gauss-Hermite rule at the current working precision.
template <class Real>
GaussHermiteRule<Real> gauss_hermite_rule(int m) {
  using std::abs;
  using std::sqrt;
  if (m < 1) throw std::invalid_argument("quadrature order must be positive");
  const auto guesses = detail::hermite_root_guesses(m);
  const Real eps = epsilon<Real>();
  GaussHermiteRule<Real> rule;
  rule.nodes.resize(static_cast<size_t>(m));
  rule.weights.resize(static_cast<size_t>(m));
  std::vector<Real> p;
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Real z(guesses[static_cast<size_t>(i)]);
    Real deriv;
    for (int it = 0; it < 60; ++it) {
      detail::orthonormal_hermite(z, m, p);
      deriv = sqrt(Real(2 * m)) * p[static_cast<size_t>(m - 1)];
      const Real dz = p[static_cast<size_t>(m)] / deriv;
      z -= dz;
      if (abs(dz) <= 4 * eps * (1 + abs(z))) break;
    }
    detail::orthonormal_hermite(z, m, p);
    deriv = sqrt(Real(2 * m)) * p[static_cast<size_t>(m - 1)];
    const Real w = Real(2) / (deriv * deriv);
    rule.nodes[static_cast<size_t>(i)] = z;
    rule.weights[static_cast<size_t>(i)] = w;
    rule.nodes[static_cast<size_t>(m - 1 - i)] = -z;
    rule.weights[static_cast<size_t>(m - 1 - i)] = w;
  }
  if (m % 2 == 1) rule.nodes[static_cast<size_t>(m / 2)] = Real(0);
  return rule;
}

/// <psi_i| op |psi_k> by quadrature, op = kinetic (-d^2/dx^2) + sum_j c_j x^j.
/// Uses -psi_k'' = sigma (2k+1 - t^2) psi_k with t = sqrt(sigma) x, so
/// nothing from the ladder algebra enters.
template <class Real, class Coeffs>
Complex<Real> quadrature_overlap(int i, int k, const Complex<Real>& kinetic, const Coeffs& c,
                                 const BasisSpec<Real>& basis, const GaussHermiteRule<Real>& rule,
                                 Real* magnitude = nullptr) {
  using std::abs;
  using std::sqrt;
  const int n = std::max(i, k);
  const Real sigma = promote(basis.sigma);
  const Complex<Real> kin = promote(kinetic);
  const Real inv_sqrt_sigma = Real(1) / sqrt(sigma);
  std::vector<Real> phi;
  Complex<Real> acc;
  Real mag(0);
  for (size_t m = 0; m < rule.nodes.size(); ++m) {
    const Real& t = rule.nodes[m];
    detail::orthonormal_hermite(t, n, phi);
    const Real base = rule.weights[m] * phi[static_cast<size_t>(i)] * phi[static_cast<size_t>(k)];
    Complex<Real> f = kin * (sigma * (Real(2 * k + 1) - t * t));
    const Real x = t * inv_sqrt_sigma;
    Real xp(1);
    for (size_t j = 0; j < c.size(); ++j) {
      f += promote(c[j]) * xp;
      xp *= x;
    }
    acc += f * base;
    mag += abs(f) * abs(base);
  }
  if (magnitude) *magnitude = mag;
  return acc;
}

/// Quadrature oracle for a quartic operator (anything exposing `kinetic`
/// and coefficient array `c`). The result at `order` is compared against
/// twice the order; disagreement beyond `tol` means the rule is too short.
template <class Real, class Op>
Complex<Real> quadrature_overlap_oracle(int i, int k, const Op& op, const BasisSpec<Real>& basis,
                                        int order = 0, const Real& tol = Real(0)) {
  detail::check_index(i, basis.size);
  detail::check_index(k, basis.size);
  const int min_order = 4 * (std::max(i, k) + 5);
  if (order == 0) order = min_order;
  if (order < min_order) {
    throw std::invalid_argument("quadrature order too low: " + std::to_string(order) + " < " +
                                std::to_string(min_order));
  }
  Real mag(0);
  const auto v1 = quadrature_overlap(i, k, op.kinetic, op.c, basis, gauss_hermite_rule<Real>(order));
  const auto v2 = quadrature_overlap(i, k, op.kinetic, op.c, basis, gauss_hermite_rule<Real>(2 * order), &mag);
  const Real allowed = tol > 0 ? tol : Real(1000) * epsilon<Real>() * (1 + mag);
  if (abs(v1 - v2) > allowed) throw std::runtime_error("quadrature order too low (doubling check failed)");
  return v2;
}

}  // namespace relosc
