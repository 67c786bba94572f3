#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relosc/banded_lu.hpp"
#include "relosc/complex.hpp"
#include "relosc/hermite_basis.hpp"
#include "relosc/level_solver.hpp"
#include "relosc/moment_solver.hpp"
#include "relosc/operator.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

template <class Real>
struct LambdaGap {
  Real Lambda;      // -ln(E_t0 - Re E_d0)
  Real width_log;   // -2 ln Im E_d0
  Real ratio;       // Lambda / width_log
};

template <class Real>
LambdaGap<Real> lambda_gap(const Real& e_t0, const Complex<Real>& e_d0) {
  using std::abs;
  using std::log;
  const Real gap = e_t0 - e_d0.real();
  if (!(gap > 0)) {
    throw SolverError(SolverErrorKind::nonpositive_gap,
                      "E_t0 - Re E_d0 = " + to_decimal_string(gap, 6) +
                          " is not positive; raise digits or blocks");
  }
  LambdaGap<Real> out;
  out.Lambda = -log(gap);
  out.width_log = e_d0.imag() == 0 ? Real(0) : Real(-2 * log(abs(e_d0.imag())));
  out.ratio = out.width_log == 0 ? Real(0) : Real(out.Lambda / out.width_log);
  return out;
}

namespace detail {

template <class Real>
const LevelResult<Real>& level_with_index(const std::vector<LevelResult<Real>>& levels, int n, const char* what) {
  for (const auto& l : levels) {
    if (l.n == n) return l;
  }
  throw SolverError(SolverErrorKind::missing_levels, std::string(what) + " level " + std::to_string(n) + " missing");
}

}  // namespace detail

/// kappa = (E_t0 - E_r0) / Omega and
/// delta = ((E_t1 - E_t0) - (E_r1 - E_r0)) / Omega.
template <class Real>
std::pair<Real, Real> kappa_delta(const std::vector<LevelResult<Real>>& levels_t,
                                  const std::vector<LevelResult<Real>>& levels_r, const Real& omega_rel) {
  const Real t0 = detail::level_with_index(levels_t, 0, "translated").energy.real();
  const Real t1 = detail::level_with_index(levels_t, 1, "translated").energy.real();
  const Real r0 = detail::level_with_index(levels_r, 0, "real").energy.real();
  const Real r1 = detail::level_with_index(levels_r, 1, "real").energy.real();
  return {(t0 - r0) / omega_rel, ((t1 - t0) - (r1 - r0)) / omega_rel};
}

template <class Real>
struct LinearFit {
  Real intercept;
  Real slope;
};

/// Unweighted least-squares line through (x, y).
template <class Real>
LinearFit<Real> least_squares_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs at least two points");
  const Real n(static_cast<int>(x.size()));
  Real sx(0), sy(0);
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const Real mx = sx / n;
  const Real my = sy / n;
  Real sxx(0), sxy(0);
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least squares with coincident abscissae");
  const Real slope = sxy / sxx;
  return {Real(my - slope * mx), slope};
}

/// Value at x0 of the interpolating polynomial through (x, y); five points
/// give the quartic Lagrange form.
template <class Real>
Real lagrange_extrapolate(const std::vector<Real>& x, const std::vector<Real>& y, const Real& x0) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("lagrange: size mismatch");
  Real acc(0);
  for (size_t i = 0; i < x.size(); ++i) {
    Real w(1);
    for (size_t j = 0; j < x.size(); ++j) {
      if (j == i) continue;
      if (x[i] == x[j]) throw std::invalid_argument("lagrange: repeated abscissa");
      w *= (x0 - x[j]) / (x[i] - x[j]);
    }
    acc += w * y[i];
  }
  return acc;
}

template <class Real>
struct Eigenvector {
  std::vector<Complex<Real>> coeffs;  // unit norm
  Real residual;                      // |(H - lambda) v|
};

/// Null vector of the 4n x 4n truncation at a converged eigenvalue, by
/// inverse iteration.
template <class Real>
Eigenvector<Real> eigenvector(const QuarticOperator<Real>& op, const BasisSpec<Real>& basis, int n_blocks,
                              const Complex<Real>& lambda, const PrecisionContext& ctx, int steps = 2) {
  using std::sqrt;
  WorkingPrecision<Real> wp(ctx);
  const int size = 4 * n_blocks;
  const BasisMatrices<Real> m(basis, size);
  const auto h = assemble_banded(op, m, size);
  Complex<Real> shift = promote(lambda);
  std::optional<BandedLu<Real>> lu;
  lu.emplace(h, shift);
  if (lu->singular()) {
    shift += Complex<Real>(epsilon<Real>() * (1 + abs(lambda)));
    lu.emplace(h, shift);
  }
  std::vector<Complex<Real>> v(static_cast<size_t>(size));
  for (int i = 0; i < size; ++i) v[static_cast<size_t>(i)] = Complex<Real>(Real(1) / Real(i + 1));
  for (int s = 0; s < steps; ++s) {
    v = lu->solve(std::move(v));
    Real nrm(0);
    for (const auto& x : v) nrm += norm(x);
    nrm = sqrt(nrm);
    for (auto& x : v) x /= nrm;
  }
  // fix the phase so the largest component is real positive
  size_t big = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (norm(v[i]) > norm(v[big])) big = i;
  }
  const Complex<Real> phase = conj(v[big]) / abs(v[big]);
  for (auto& x : v) x *= phase;
  Real res2(0);
  for (int i = 0; i < size; ++i) {
    Complex<Real> acc = -lambda * v[static_cast<size_t>(i)];
    for (int k = std::max(0, i - 4); k <= std::min(size - 1, i + 4); ++k) acc += h.at(i, k) * v[static_cast<size_t>(k)];
    res2 += norm(acc);
  }
  return {std::move(v), sqrt(res2)};
}

template <class Real>
struct SpinorReconstruction {
  std::vector<Complex<Real>> psi_plus;
  std::vector<Complex<Real>> psi_minus;
  Real X1_norm;
  Real X2_norm;
  Real pt_pair_residual;  // |psi_+ - i conj(psi_-)|
};

/// psi_- = -2 sqrt(Omega) psi_+' + i (2 Omega (E - x^2) + 1) psi_+ in
/// coefficient space, X1 = (psi_+ + i psi_-)/sqrt2, X2 = (psi_+ - i psi_-)/(i sqrt2).
/// psi_+ is normalized and its global phase chosen so that psi_- is
/// proportional to i conj(psi_+) with a positive factor.
template <class Real>
SpinorReconstruction<Real> reconstruct_spinor(std::vector<Complex<Real>> psi_plus, const ModelParams<Real>& params,
                                              const BasisSpec<Real>& basis, const PrecisionContext& ctx) {
  using std::sqrt;
  WorkingPrecision<Real> wp(ctx);
  const int n = static_cast<int>(psi_plus.size());
  if (n == 0) throw std::invalid_argument("empty coefficient vector");
  const int out_n = n + 2;
  const BasisMatrices<Real> m(basis, out_n);
  const Real om = promote(params.omega_rel);
  const Complex<Real> e = promote(params.energy);
  const Real root_om = sqrt(om);

  auto minus_of = [&](const std::vector<Complex<Real>>& p) {
    std::vector<Complex<Real>> q(static_cast<size_t>(out_n));
    for (int k = 0; k < n; ++k) {
      const auto& pk = p[static_cast<size_t>(k)];
      if (pk == Complex<Real>()) continue;
      const auto d = derivative_column(k, basis);
      for (int i = 0; i < static_cast<int>(d.coeffs.size()); ++i) {
        q[static_cast<size_t>(d.first + i)] -= pk * (2 * root_om * d.coeffs[static_cast<size_t>(i)]);
      }
      for (int i = std::max(0, k - 2); i <= k + 2; ++i) {
        Complex<Real> mult = Complex<Real>(Real(0), Real(-2 * om)) * m.position[2].at(i, k);
        if (i == k) mult += Complex<Real>(Real(0), Real(1)) * (e * (2 * om) + Real(1));
        q[static_cast<size_t>(i)] += mult * pk;
      }
    }
    return q;
  };

  Real nrm(0);
  for (const auto& x : psi_plus) nrm += norm(x);
  nrm = sqrt(nrm);
  for (auto& x : psi_plus) x /= nrm;
  auto psi_minus = minus_of(psi_plus);

  // psi_- = alpha conj(psi_+); choose the phase of psi_+ so that alpha = i |alpha|
  Complex<Real> alpha;
  for (int i = 0; i < n; ++i) alpha += psi_plus[static_cast<size_t>(i)] * psi_minus[static_cast<size_t>(i)];
  if (alpha != Complex<Real>()) {
    // psi_+ -> u psi_+ maps alpha -> u^2 alpha; want u^2 alpha / |alpha| = i
    const Complex<Real> target = Complex<Real>(Real(0), Real(1)) * abs(alpha) / alpha;
    const Complex<Real> u = sqrt(target);
    for (auto& x : psi_plus) x *= u;
    for (auto& x : psi_minus) x *= u;
  }

  SpinorReconstruction<Real> out;
  const Real inv_root2 = Real(1) / sqrt(Real(2));
  const Complex<Real> i_unit(Real(0), Real(1));
  Real x1(0), x2(0), pt(0);
  for (int i = 0; i < out_n; ++i) {
    const Complex<Real> p = i < n ? psi_plus[static_cast<size_t>(i)] : Complex<Real>();
    const Complex<Real>& q = psi_minus[static_cast<size_t>(i)];
    x1 += norm((p + i_unit * q) * inv_root2);
    x2 += norm((p - i_unit * q) * inv_root2 / i_unit);
    pt += norm(p - i_unit * conj(q));
  }
  out.X1_norm = sqrt(x1);
  out.X2_norm = sqrt(x2);
  out.pt_pair_residual = sqrt(pt);
  out.psi_plus = std::move(psi_plus);
  out.psi_minus = std::move(psi_minus);
  return out;
}

/// Sector index j with -pi/6 < phi - j pi/3 < pi/6, or nullopt on a sector
/// edge. phi is first reduced to (-5 pi/6, 7 pi/6].
inline std::optional<int> sector_of(double phi) {
  const double pi = std::acos(-1.0);
  const double lo = -5 * pi / 6;
  phi = std::fmod(phi - lo, 2 * pi);
  if (phi <= 0) phi += 2 * pi;
  phi += lo;
  const double t = (phi + pi / 6) / (pi / 3);
  const double nearest = std::round(t);
  if (std::abs(t - nearest) <= 1e-12 * std::max(1.0, std::abs(t))) return std::nullopt;
  const int j = static_cast<int>(std::floor(t));
  return std::clamp(j, -2, 3);
}

template <class Real>
struct ActionValue {
  Real integral;
  Real asymptotic;  // sqrt(Omega) x^3 / 3 - (1 + 2 E Omega) x / (2 sqrt(Omega))
};

/// S(x) = int_{x_t}^{x} sqrt(Omega y^4 - (1 + 2 E Omega) y^2) dy from the
/// turning point x_t = sqrt((1 + 2 E Omega) / Omega); odd in x.
template <class Real>
ActionValue<Real> action_S(const Real& x, const Real& omega_rel, const Real& energy) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  if (!(omega_rel > 0)) throw std::invalid_argument("omega_rel must be positive");
  const Real a = 1 + 2 * energy * omega_rel;
  const Real inner = omega_rel * x * x - a;
  if (!(inner >= 0)) {
    throw std::domain_error("x lies inside the classically allowed region |x| < " +
                            to_decimal_string(Real(sqrt(a / omega_rel)), 8));
  }
  const Real sign = x < 0 ? Real(-1) : Real(1);
  ActionValue<Real> out;
  out.integral = sign * inner * sqrt(inner) / (3 * omega_rel);
  const Real r = sqrt(omega_rel);
  out.asymptotic = r * x * x * x / 3 - a * x / (2 * r);
  return out;
}

}  // namespace relosc
