#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "relosc/block_matrix.hpp"
#include "relosc/complex.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

namespace detail {

// Householder reduction to upper Hessenberg form, in place.
template <class Real>
void to_hessenberg(DenseMatrix<Real>& a) {
  using std::sqrt;
  const int n = a.size();
  std::vector<Complex<Real>> v;
  for (int k = 0; k + 2 < n; ++k) {
    Real xnorm2(0);
    for (int i = k + 1; i < n; ++i) xnorm2 += norm(a(i, k));
    if (xnorm2 == 0) continue;
    const Real xnorm = sqrt(xnorm2);
    const Real a0 = abs(a(k + 1, k));
    const Complex<Real> phase = a0 == 0 ? Complex<Real>(Real(1)) : a(k + 1, k) / a0;
    v.assign(static_cast<size_t>(n - k - 1), Complex<Real>());
    for (int i = k + 1; i < n; ++i) v[static_cast<size_t>(i - k - 1)] = a(i, k);
    v[0] += phase * xnorm;
    Real vnorm2(0);
    for (const auto& x : v) vnorm2 += norm(x);
    if (vnorm2 == 0) continue;
    const Real scale = Real(2) / vnorm2;
    // A <- (I - scale v v^*) A
    for (int j = 0; j < n; ++j) {
      Complex<Real> s;
      for (int i = k + 1; i < n; ++i) s += conj(v[static_cast<size_t>(i - k - 1)]) * a(i, j);
      s *= scale;
      for (int i = k + 1; i < n; ++i) a(i, j) -= v[static_cast<size_t>(i - k - 1)] * s;
    }
    // A <- A (I - scale v v^*)
    for (int i = 0; i < n; ++i) {
      Complex<Real> s;
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[static_cast<size_t>(j - k - 1)];
      s *= scale;
      for (int j = k + 1; j < n; ++j) a(i, j) -= s * conj(v[static_cast<size_t>(j - k - 1)]);
    }
    for (int i = k + 2; i < n; ++i) a(i, k) = Complex<Real>();
  }
}

}  // namespace detail

/// All eigenvalues of a general complex matrix: Householder Hessenberg
/// reduction followed by single-shift QR with Wilkinson shifts. Results are
/// sorted by real part, then imaginary part.
template <class Real>
std::vector<Complex<Real>> dense_eigenvalues(DenseMatrix<Real> h) {
  using std::abs;
  using std::sqrt;
  const int n = h.size();
  detail::to_hessenberg(h);
  const Real eps = epsilon<Real>();
  std::vector<Complex<Real>> out;
  out.reserve(static_cast<size_t>(n));
  std::vector<Real> cs(static_cast<size_t>(n));
  std::vector<Complex<Real>> sn(static_cast<size_t>(n));
  int hi = n - 1;
  int iter = 0;
  const int max_iter = 60 * std::max(n, 1);
  int total = 0;
  while (hi >= 0) {
    if (hi == 0) {
      out.push_back(h(0, 0));
      break;
    }
    int lo = hi;
    while (lo > 0) {
      const Real s = abs(h(lo, lo)) + abs(h(lo - 1, lo - 1));
      if (abs(h(lo, lo - 1)) <= eps * (s == 0 ? Real(1) : s)) {
        h(lo, lo - 1) = Complex<Real>();
        break;
      }
      --lo;
    }
    if (lo == hi) {
      out.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++total > max_iter) throw std::runtime_error("dense eigensolver did not converge");
    ++iter;
    Complex<Real> mu;
    if (iter % 11 == 0) {
      // exceptional shift
      mu = h(hi, hi) + Complex<Real>(abs(h(hi, hi - 1)) * Real(3) / 4);
    } else {
      const auto& a = h(hi - 1, hi - 1);
      const auto& b = h(hi - 1, hi);
      const auto& c = h(hi, hi - 1);
      const auto& d = h(hi, hi);
      const Complex<Real> half_diff = (a - d) / Real(2);
      const Complex<Real> disc = sqrt(half_diff * half_diff + b * c);
      const Complex<Real> mid = (a + d) / Real(2);
      const Complex<Real> l1 = mid + disc;
      const Complex<Real> l2 = mid - disc;
      mu = abs(l1 - d) <= abs(l2 - d) ? l1 : l2;
    }
    for (int i = lo; i <= hi; ++i) h(i, i) -= mu;
    for (int k = lo; k < hi; ++k) {
      const Complex<Real> x = h(k, k);
      const Complex<Real> y = h(k + 1, k);
      const Real ax = abs(x);
      const Real r = sqrt(norm(x) + norm(y));
      Real c;
      Complex<Real> s;
      if (r == 0) {
        c = 1;
      } else if (ax == 0) {
        c = 0;
        s = conj(y) / abs(y);
      } else {
        c = ax / r;
        s = (x / ax) * conj(y) / r;
      }
      cs[static_cast<size_t>(k)] = c;
      sn[static_cast<size_t>(k)] = s;
      for (int j = k; j <= hi; ++j) {
        const Complex<Real> u = h(k, j);
        const Complex<Real> w = h(k + 1, j);
        h(k, j) = u * c + s * w;
        h(k + 1, j) = w * c - conj(s) * u;
      }
    }
    for (int k = lo; k < hi; ++k) {
      const Real& c = cs[static_cast<size_t>(k)];
      const Complex<Real>& s = sn[static_cast<size_t>(k)];
      for (int i = lo; i <= std::min(k + 2, hi); ++i) {
        const Complex<Real> u = h(i, k);
        const Complex<Real> w = h(i, k + 1);
        h(i, k) = u * c + w * conj(s);
        h(i, k + 1) = w * c - u * s;
      }
    }
    for (int i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  std::sort(out.begin(), out.end(), [](const Complex<Real>& x, const Complex<Real>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

}  // namespace relosc
