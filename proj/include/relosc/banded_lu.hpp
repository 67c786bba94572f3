#pragma once

#include <stdexcept>
#include <vector>

#include "relosc/complex.hpp"
#include "relosc/hermite_basis.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

/// LU factorization with partial pivoting of (M - shift I) for a banded M.
/// Row i keeps columns [i - kl, i + 2 kl] after fill-in.
template <class Real>
class BandedLu {
 public:
  BandedLu(const BandedMatrix<Complex<Real>>& m, const Complex<Real>& shift)
      : n_(m.size()), kl_(m.bandwidth()), width_(3 * m.bandwidth() + 1) {
    rows_.assign(static_cast<size_t>(n_) * static_cast<size_t>(width_), Complex<Real>());
    for (int i = 0; i < n_; ++i) {
      for (int k = std::max(0, i - kl_); k <= std::min(n_ - 1, i + kl_); ++k) at(i, k) = m.at(i, k);
      at(i, i) -= shift;
    }
    piv_.resize(static_cast<size_t>(n_));
    mult_.assign(static_cast<size_t>(n_) * static_cast<size_t>(kl_), Complex<Real>());
    for (int k = 0; k < n_; ++k) {
      const int last = std::min(n_ - 1, k + kl_);
      int p = k;
      Real best = abs(at(k, k));
      for (int i = k + 1; i <= last; ++i) {
        Real v = abs(at(i, k));
        if (v > best) {
          best = std::move(v);
          p = i;
        }
      }
      piv_[static_cast<size_t>(k)] = p;
      const int cmax = std::min(n_ - 1, k + 2 * kl_);
      if (p != k) {
        for (int c = k; c <= cmax; ++c) std::swap(at(k, c), at(p, c));
      }
      if (best == 0) {
        singular_ = true;
        continue;
      }
      const Complex<Real> inv = Complex<Real>(Real(1)) / at(k, k);
      for (int i = k + 1; i <= last; ++i) {
        const Complex<Real> l = at(i, k) * inv;
        mult_[static_cast<size_t>(k) * static_cast<size_t>(kl_) + static_cast<size_t>(i - k - 1)] = l;
        at(i, k) = Complex<Real>();
        if (l == Complex<Real>()) continue;
        for (int c = k + 1; c <= cmax; ++c) at(i, c) -= l * at(k, c);
      }
    }
  }

  bool singular() const { return singular_; }
  int size() const { return n_; }

  std::vector<Complex<Real>> solve(std::vector<Complex<Real>> b) const {
    if (singular_) throw std::domain_error("solve with singular banded matrix");
    if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("banded solve: size mismatch");
    for (int k = 0; k < n_; ++k) {
      const int p = piv_[static_cast<size_t>(k)];
      if (p != k) std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(p)]);
      for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
        b[static_cast<size_t>(i)] -=
            mult_[static_cast<size_t>(k) * static_cast<size_t>(kl_) + static_cast<size_t>(i - k - 1)] *
            b[static_cast<size_t>(k)];
      }
    }
    for (int k = n_ - 1; k >= 0; --k) {
      Complex<Real> s = b[static_cast<size_t>(k)];
      for (int c = k + 1; c <= std::min(n_ - 1, k + 2 * kl_); ++c) s -= at(k, c) * b[static_cast<size_t>(c)];
      b[static_cast<size_t>(k)] = s / at(k, k);
    }
    return b;
  }

 private:
  Complex<Real>& at(int i, int k) {
    return rows_[static_cast<size_t>(i) * static_cast<size_t>(width_) + static_cast<size_t>(k - i + kl_)];
  }
  const Complex<Real>& at(int i, int k) const {
    return rows_[static_cast<size_t>(i) * static_cast<size_t>(width_) + static_cast<size_t>(k - i + kl_)];
  }

  int n_, kl_, width_;
  std::vector<Complex<Real>> rows_;
  std::vector<Complex<Real>> mult_;
  std::vector<int> piv_;
  bool singular_ = false;
};

}  // namespace relosc
