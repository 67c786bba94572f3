#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "relosc/complex.hpp"
#include "relosc/hermite_basis.hpp"
#include "relosc/moment_solver.hpp"
#include "relosc/operator.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

template <class Real>
struct SolverConfig {
  PrecisionContext ctx = make_context(kMinDigits);
  Real sigma = Real(1);
  int n_blocks = 100;
  Variant variant = Variant::dirac_titchmarsh;
  Branch branch = Branch::plus;
  NewtonOptions newton{};
  int max_outer = 200;
  // real frame only: ascending basis sizes for the plateau scan
  std::vector<int> stabilization_sizes;
  double plateau_threshold = 1e-8;
  // dilated frame only: second angle offset for the plateau check, 0 to skip
  double theta_shift = 0.05;
};

template <class Real>
struct TraceEntry {
  Complex<Real> energy;
  Complex<Real> lambda;
  Real residual;  // |lambda - E - Omega E^2|
};

template <class Real>
struct LevelResult {
  int n = 0;
  Real omega_rel;
  Complex<Real> energy;
  Complex<Real> lambda;
  Frame<Real> frame;
  Variant variant = Variant::dirac_titchmarsh;
  Branch branch = Branch::plus;
  std::vector<TraceEntry<Real>> trace;
  int basis_blocks = 0;
  Real sigma;
  Real y_or_theta;
  std::optional<Complex<Real>> theta_check;  // level at the shifted angle
};

/// Leading term sqrt(1 + 2 E Omega) (2n + 1).
template <class Real>
Real asymptotic_lambda(const Real& omega_rel, const Real& energy, int n) {
  using std::sqrt;
  return sqrt(1 + 2 * energy * omega_rel) * (2 * n + 1);
}

/// Default plateau ladder for the real frame: block counts spread over
/// [n_blocks / 2, n_blocks].
inline std::vector<int> default_stabilization_sizes(int n_blocks) {
  std::vector<int> out;
  const int lo = std::max(2, n_blocks / 2);
  const int step = std::max(1, (n_blocks - lo) / 8);
  for (int b = lo; b <= n_blocks; b += step) out.push_back(4 * b);
  if (out.back() != 4 * n_blocks) out.push_back(4 * n_blocks);
  return out;
}

/// n-th eigenvalue of the frame-resolved operator at fixed energy, found by
/// Newton from `seed` (default: the harmonic asymptotic value).
template <class Real>
EigenvalueEstimate<Real> lambda_estimate(const ModelParams<Real>& params, int n, const SolverConfig<Real>& cfg,
                                         const BasisMatrices<Real>& basis,
                                         std::optional<Complex<Real>> seed = std::nullopt) {
  using std::sqrt;
  WorkingPrecision<Real> wp(cfg.ctx);
  const auto op = make_operator(params);
  if (!seed) seed = sqrt(Complex<Real>(Real(1)) + params.energy * (2 * params.omega_rel)) * Real(2 * n + 1);
  if (std::holds_alternative<RealFrame<Real>>(params.frame)) {
    const auto sizes =
        cfg.stabilization_sizes.empty() ? default_stabilization_sizes(cfg.n_blocks) : cfg.stabilization_sizes;
    StabilizationOptions so;
    so.threshold = cfg.plateau_threshold;
    so.newton = cfg.newton;
    const auto st = stabilization_scan(op, cfg.sigma, sizes, n, cfg.ctx, so);
    EigenvalueEstimate<Real> est;
    est.lambda = Complex<Real>(st.value);
    est.residual = st.flatness;
    est.bound = Bound::none;
    est.n_blocks = st.n_blocks;
    return est;
  }
  const auto blocks = assemble_blocks(op, basis, cfg.n_blocks);
  const MomentRecurrence<Real> rec(blocks, cfg.ctx);
  return find_eigenvalue(rec, *seed, cfg.n_blocks, cfg.newton);
}

template <class Real>
Complex<Real> lambda_of(const ModelParams<Real>& params, int n, const SolverConfig<Real>& cfg,
                        std::optional<Complex<Real>> seed = std::nullopt) {
  WorkingPrecision<Real> wp(cfg.ctx);
  const BasisSpec<Real> spec{cfg.sigma, 4 * cfg.n_blocks};
  const auto basis = basis_matrices_for_blocks(spec, cfg.n_blocks);
  return lambda_estimate(params, n, cfg, basis, seed).lambda;
}

namespace detail {

/// Root of E + Omega E^2 = lambda with positive-real-part square root.
template <class Real>
Complex<Real> energy_from_lambda(const Complex<Real>& lambda, const Real& omega_rel, bool real_levels) {
  const Complex<Real> disc = Complex<Real>(Real(1)) + lambda * (4 * omega_rel);
  if (real_levels && !(disc.real() > 0)) {
    throw SolverError(SolverErrorKind::negative_discriminant,
                      "1 + 4 lambda Omega = " + to_decimal_string(disc.real(), 12) + " is not positive");
  }
  return (sqrt(disc) - Real(1)) / (2 * omega_rel);
}

/// Secant-accelerated fixed point on g(E) = lambda_n(E) - E - Omega E^2.
template <class Real>
LevelResult<Real> solve_self_consistent(ModelParams<Real> params, int n, const SolverConfig<Real>& cfg,
                                        bool real_levels) {
  using std::abs;
  WorkingPrecision<Real> wp(cfg.ctx);
  if (!(params.omega_rel > 0)) throw std::invalid_argument("omega_rel must be positive");
  params.omega_rel = promote(params.omega_rel);
  if (n < 0) throw std::invalid_argument("level index must be non-negative");
  const BasisSpec<Real> spec{cfg.sigma, 4 * cfg.n_blocks};
  const auto basis = basis_matrices_for_blocks(spec, cfg.n_blocks);
  const Real tol = cfg.ctx.template newton_tol_as<Real>();
  const Real& om = params.omega_rel;

  LevelResult<Real> res;
  res.n = n;
  res.omega_rel = om;
  res.frame = params.frame;
  res.variant = params.variant;
  res.branch = params.branch;
  res.sigma = cfg.sigma;
  res.y_or_theta = frame_parameter(params.frame);

  auto eval = [&](const Complex<Real>& e, std::optional<Complex<Real>> seed) {
    params.energy = e;
    auto est = lambda_estimate(params, n, cfg, basis, seed);
    if (real_levels) est.lambda = Complex<Real>(est.lambda.real());
    res.basis_blocks = est.n_blocks;
    return est.lambda;
  };
  auto g_of = [&](const Complex<Real>& e, const Complex<Real>& l) { return l - e - e * e * om; };

  Complex<Real> e_prev(Real(2 * n + 1));
  Complex<Real> l_prev = eval(e_prev, std::nullopt);
  Complex<Real> g_prev = g_of(e_prev, l_prev);
  res.trace.push_back({e_prev, l_prev, abs(g_prev)});
  Complex<Real> e = energy_from_lambda(l_prev, om, real_levels);
  for (int it = 0; it < cfg.max_outer; ++it) {
    const Complex<Real> l = eval(e, l_prev);
    const Complex<Real> g = g_of(e, l);
    res.trace.push_back({e, l, abs(g)});
    if (abs(g) < tol * (1 + abs(l))) {
      res.energy = e;
      res.lambda = l;
      return res;
    }
    Complex<Real> next;
    const Complex<Real> dg = g - g_prev;
    if (dg != Complex<Real>()) {
      next = e - g * (e - e_prev) / dg;
    } else {
      next = energy_from_lambda(l, om, real_levels);
    }
    if (real_levels) next = Complex<Real>(next.real());
    e_prev = e;
    g_prev = g;
    l_prev = l;
    e = next;
  }
  throw SolverError(SolverErrorKind::no_convergence,
                    "level equation not solved in " + std::to_string(cfg.max_outer) + " outer iterations");
}

}  // namespace detail

/// Self-consistent real level E_n(Omega) in the real or translated frame.
template <class Real>
LevelResult<Real> solve_level(const Real& omega_rel, int n, const Frame<Real>& frame, const SolverConfig<Real>& cfg) {
  if (std::holds_alternative<DilatedFrame<Real>>(frame)) {
    throw std::invalid_argument("solve_level takes the real or translated frame; use solve_resonance");
  }
  WorkingPrecision<Real> wp(cfg.ctx);
  ModelParams<Real> params{omega_rel, Complex<Real>(), cfg.variant, cfg.branch, frame};
  return detail::solve_self_consistent(params, n, cfg, true);
}

/// Complex resonance E_n(Omega) in the dilated frame, with a re-solve at a
/// shifted angle to confirm theta independence.
template <class Real>
LevelResult<Real> solve_resonance(const Real& omega_rel, int n, const Real& theta, const SolverConfig<Real>& cfg) {
  using std::abs;
  WorkingPrecision<Real> wp(cfg.ctx);
  ModelParams<Real> params{omega_rel, Complex<Real>(), cfg.variant, cfg.branch, DilatedFrame<Real>{theta}};
  auto res = detail::solve_self_consistent(params, n, cfg, false);
  if (cfg.theta_shift != 0) {
    Real shifted = theta + Real(cfg.theta_shift);
    if (!(abs(shifted) < pi<Real>() / 6)) shifted = theta - Real(cfg.theta_shift);
    params.frame = DilatedFrame<Real>{shifted};
    const auto other = detail::solve_self_consistent(params, n, cfg, false);
    res.theta_check = other.energy;
    const Real expected = std::max(abs(res.energy.imag()), cfg.ctx.template newton_tol_as<Real>() * (1 + abs(res.energy)));
    if (abs(other.energy - res.energy) > 10 * expected) {
      throw SolverError(SolverErrorKind::theta_plateau_fail,
                        "levels at theta=" + to_decimal_string(theta, 4) + " and " + to_decimal_string(shifted, 4) +
                            " differ by " + to_decimal_string(abs(other.energy - res.energy), 6));
    }
  }
  return res;
}

}  // namespace relosc
