#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "relosc/dense_eigen.hpp"
#include "relosc/diagnostics.hpp"
#include "relosc/level_solver.hpp"
#include "relosc/moment_solver.hpp"
#include "relosc/operator.hpp"
#include "relosc/results.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string detail;
  double seconds = 0;
};

enum class VerifyLevel { quick, full };

inline std::optional<VerifyLevel> parse_verify_level(std::string_view s) {
  if (s == "quick") return VerifyLevel::quick;
  if (s == "full") return VerifyLevel::full;
  return std::nullopt;
}

namespace verify_detail {

struct ReferenceLevel {
  const char* omega;
  const char* re;
  const char* im;
};

// lowest dilated-frame level E_d0
inline constexpr ReferenceLevel kReference[] = {
    {"0.0020", "1.0005017620", "1.17374083059e-144"}, {"0.0025", "1.0006277579", "9.42079110945e-116"},
    {"0.0030", "1.0007539782", "1.72376665081e-96"},  {"0.0035", "1.0008804241", "9.77543924661e-83"},
    {"0.0040", "1.0010070969", "2.00211928567e-72"},  {"0.0045", "1.0011339978", "2.08165603853e-64"},
    {"0.0050", "1.0012611278", "5.36447802132e-58"},
};

using C = hp_complex;

inline std::string sci(const hp_real& x, int d = 4) { return to_decimal_string(x, d, true); }
inline std::string fixed(const hp_real& x, int d = 8) { return to_decimal_string(x, d); }

inline void grow(hp_real& acc, const hp_real& v) {
  if (v > acc) acc = v;
}

inline hp_real ten_to(int k) { return pow(hp_real(10), k); }

inline Frame<hp_real> translated(const char* y) { return TranslatedFrame<hp_real>{hp_real(y)}; }

/// Config at `digits`; the caller opens the WorkingPrecision.
inline SolverConfig<hp_real> config(int digits, int blocks) {
  SolverConfig<hp_real> cfg;
  cfg.ctx = make_context(digits);
  cfg.n_blocks = blocks;
  return cfg;
}

inline bool self_consistent(const LevelResult<hp_real>& r, const PrecisionContext& ctx) {
  const hp_real g = abs(r.lambda - r.energy - r.energy * r.energy * r.omega_rel);
  return g < ctx.newton_tol_as<hp_real>() * (1 + abs(r.lambda));
}

// --- oracle instances -----------------------------------------------------

/// Block system with diagonal 8k + 2i + 2 and couplings small enough that the
/// Gershgorin disks are disjoint; C_k = B_k^T.
inline BlockTridiagonal<hp_real> random_instance(std::mt19937_64& rng, int n, bool complex_entries) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s = complex_entries ? 1.0 / std::sqrt(2.0) : 1.0;
  auto entry = [&](double scale) {
    const double re = scale * s * u(rng);
    const double im = complex_entries ? scale * s * u(rng) : 0.0;
    return C(hp_real(re), hp_real(im));
  };
  BlockTridiagonal<hp_real> b;
  b.A.resize(static_cast<size_t>(n));
  b.B.resize(static_cast<size_t>(n));
  b.C.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto& a = b.A[static_cast<size_t>(k)];
    for (int i = 0; i < 4; ++i) {
      a(i, i) = C(hp_real(8 * k + 2 * i + 2));
      for (int j = i + 1; j < 4; ++j) a(j, i) = a(i, j) = entry(0.05);
    }
    auto& bk = b.B[static_cast<size_t>(k)];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) bk(i, j) = entry(0.1);
    }
    b.C[static_cast<size_t>(k)] = bk.transpose();
  }
  return b;
}

/// Last diagonal 4x4 block of X^{-1} by Gauss-Jordan with partial pivoting.
inline Mat4<hp_real> inverse_corner(DenseMatrix<hp_real> x) {
  const int n = x.size();
  DenseMatrix<hp_real> rhs(n);
  for (int i = 0; i < n; ++i) rhs(i, i) = C(hp_real(1));
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r) {
      if (abs(x(r, c)) > abs(x(p, c))) p = r;
    }
    for (int k = 0; k < n; ++k) {
      std::swap(x(c, k), x(p, k));
      std::swap(rhs(c, k), rhs(p, k));
    }
    const C inv = C(hp_real(1)) / x(c, c);
    for (int k = 0; k < n; ++k) {
      x(c, k) *= inv;
      rhs(c, k) *= inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || x(r, c) == C()) continue;
      const C f = x(r, c);
      for (int k = 0; k < n; ++k) {
        x(r, k) -= f * x(c, k);
        rhs(r, k) -= f * rhs(c, k);
      }
    }
  }
  Mat4<hp_real> out;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) out(i, k) = rhs(n - 4 + i, n - 4 + k);
  }
  return out;
}

/// H_n with its last diagonal block replaced by B^T X^{-1} B, X = H_{n-1}.
inline DenseMatrix<hp_real> lower_matrix(const BlockTridiagonal<hp_real>& b, int n) {
  auto h = unpack(b, n);
  const auto& bl = b.B[static_cast<size_t>(n - 2)];
  const Mat4<hp_real> m = bl.transpose() * inverse_corner(unpack(b, n - 1)) * bl;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) h(4 * (n - 1) + i, 4 * (n - 1) + k) = m(i, k);
  }
  return h;
}

inline std::vector<hp_real> sorted_real_parts(const std::vector<C>& v) {
  std::vector<hp_real> out;
  for (const auto& z : v) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

// --- criteria ---------------------------------------------------------------

inline CriterionResult harmonic_limit() {
  CriterionResult r;
  r.id = 1;
  r.name = "harmonic_limit";
  const int digits = 40;
  auto cfg = config(digits, 50);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  const auto blocks = assemble_blocks(harmonic_operator<hp_real>(), BasisSpec<hp_real>{hp_real(1), 12}, 3);
  const auto diag = diagonal_levels(blocks, 3);
  hp_real worst_diag(0);
  for (int n = 0; n < 10; ++n) {
    grow(worst_diag, abs(diag[static_cast<size_t>(n)] - C(hp_real(2 * n + 1))));
  }
  // E_n - (2n+1) = Omega (1 - 3/4 (2n^2 + 2n + 1)) + O(Omega^2 n^4), which
  // exceeds 1e-4 from n = 8 on
  hp_real worst_low(0), worst_pert(0), shift9(0);
  bool consistent = true;
  const hp_real om("1e-6");
  for (int n = 0; n < 10; ++n) {
    const auto lev = solve_level(om, n, translated("3"), cfg);
    const hp_real shift = lev.energy.real() - (2 * n + 1);
    if (n < 4) grow(worst_low, abs(shift));
    const hp_real first_order = om * (1 - hp_real(3 * (2 * n * n + 2 * n + 1)) / 4);
    grow(worst_pert, abs(shift - first_order));
    if (n == 9) shift9 = shift;
    consistent = consistent && self_consistent(lev, cfg.ctx);
  }
  r.passed = worst_diag <= ten_to(-(digits - 10)) && worst_low < hp_real("1e-4") && worst_pert < hp_real("1e-7") &&
             consistent;
  r.measured = "diagonal " + sci(worst_diag) + ", Omega=1e-6 n<=3 " + sci(worst_low) + ", vs first order " +
               sci(worst_pert);
  r.detail = "max |E_n - (2n+1)|; diagonal n = 0..9, pipeline n = 0..3 (E_9 - 19 = " + sci(shift9) +
             "), first-order shift n = 0..9";
  return r;
}

inline CriterionResult oracle_equivalence() {
  CriterionResult r;
  r.id = 2;
  r.name = "oracle_equivalence";
  const int digits = 40;
  const auto ctx = make_context(digits);
  WorkingPrecision<hp_real> wp(ctx);
  const hp_real tol = ten_to(-(digits - 12));
  const C kick(hp_real("1e-3"));
  std::mt19937_64 rng(20240611);
  int instances = 0;
  int sandwich_cases = 0;
  int ordering_violations = 0;
  hp_real worst_upper(0), worst_lower(0);
  for (int rep = 0; rep < 4; ++rep) {
    for (int n = 2; n <= 8; ++n) {
      for (bool cplx : {false, true}) {
        const auto b = random_instance(rng, n, cplx);
        const MomentRecurrence<hp_real> rec(b, ctx, n);
        const auto dense = dense_eigensolve_oracle(b, n, ctx);
        std::vector<C> upper;
        for (const auto& v : dense) {
          const auto est = find_eigenvalue(rec, v + kick, n);
          grow(worst_upper, abs(est.lambda - v));
          upper.push_back(est.lambda);
        }
        ++instances;
        if (cplx) continue;
        ++sandwich_cases;
        const auto dense_low = dense_eigenvalues(lower_matrix(b, n));
        std::vector<C> lower;
        for (const auto& v : dense_low) {
          if (abs(v) < hp_real("1e-10")) {
            lower.push_back(v);
            continue;
          }
          const auto est = lower_bound_eigenvalue(rec, v + kick, n);
          grow(worst_lower, abs(est.lambda - v));
          lower.push_back(est.lambda);
        }
        const auto lo = sorted_real_parts(lower);
        const auto up = sorted_real_parts(upper);
        for (size_t k = 0; k < lo.size(); ++k) {
          if (lo[k] > up[k] + tol) ++ordering_violations;
        }
      }
    }
  }
  r.passed = instances >= 50 && worst_upper <= tol && worst_lower <= tol && ordering_violations == 0;
  r.measured = "upper " + sci(worst_upper) + ", lower " + sci(worst_lower) + ", ordering violations " +
               std::to_string(ordering_violations);
  r.detail = std::to_string(instances) + " instances (" + std::to_string(sandwich_cases) +
             " real symmetric), tolerance " + sci(tol, 2);
  return r;
}

struct ReferenceSolve {
  hp_real omega;
  LevelResult<hp_real> t;
  std::optional<LevelResult<hp_real>> d;
};

inline std::vector<ReferenceSolve> reference_solves(const SolverConfig<hp_real>& cfg, bool with_dilated) {
  std::vector<ReferenceSolve> out;
  for (const auto& row : kReference) {
    ReferenceSolve s{hp_real(row.omega), solve_level(hp_real(row.omega), 0, translated("3"), cfg), std::nullopt};
    if (with_dilated) s.d = solve_resonance(s.omega, 0, hp_real("0.3"), cfg);
    out.push_back(std::move(s));
  }
  return out;
}

inline CriterionResult table_real_parts() {
  CriterionResult r;
  r.id = 3;
  r.name = "table_real_parts";
  auto cfg = config(40, 100);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  const auto solves = reference_solves(cfg, true);
  hp_real worst_t(0), worst_d(0);
  for (size_t i = 0; i < solves.size(); ++i) {
    const hp_real ref(kReference[i].re);
    grow(worst_t, abs(solves[i].t.energy.real() - ref));
    grow(worst_d, abs(solves[i].d->energy.real() - ref));
  }
  r.passed = worst_t < hp_real("1e-9") && worst_d < hp_real("1e-9");
  r.measured = "max |E_t0 - ref| " + sci(worst_t) + ", max |Re E_d0 - ref| " + sci(worst_d);
  r.detail = "7 values of Omega, digits 40, blocks 100, y 3, theta 0.3";
  return r;
}

inline CriterionResult perturbation_slope() {
  CriterionResult r;
  r.id = 4;
  r.name = "perturbation_slope";
  auto cfg = config(40, 100);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  std::vector<hp_real> x, y;
  for (const auto& s : reference_solves(cfg, false)) {
    x.push_back(s.omega);
    y.push_back(s.t.energy.real() - 1);
  }
  const auto fit = least_squares_line(x, y);
  r.passed = abs(fit.slope - hp_real("0.25")) <= hp_real("0.005");
  r.measured = "slope " + fixed(fit.slope, 6);
  r.detail = "least squares of E_t0 - 1 against Omega, target 0.250 +- 0.005";
  return r;
}

inline CriterionResult kappa_fit() {
  CriterionResult r;
  r.id = 5;
  r.name = "kappa_fit";
  auto cfg_t = config(40, 100);
  WorkingPrecision<hp_real> wp(cfg_t.ctx);
  auto cfg_r = cfg_t;
  cfg_r.variant = Variant::klein_gordon;
  std::vector<hp_real> x, kappa, delta;
  for (const auto& row : kReference) {
    const hp_real om(row.omega);
    std::vector<LevelResult<hp_real>> lt, lr;
    for (int n : {0, 1}) {
      lt.push_back(solve_level(om, n, translated("3"), cfg_t));
      lr.push_back(solve_level(om, n, Frame<hp_real>{RealFrame<hp_real>{}}, cfg_r));
    }
    const auto [k, d] = kappa_delta(lt, lr, om);
    x.push_back(om);
    kappa.push_back(k);
    delta.push_back(d);
  }
  const auto fit = least_squares_line(x, kappa);
  r.passed = abs(fit.intercept - 1) <= hp_real("5e-4") && abs(fit.slope - hp_real("0.0285")) <= hp_real("0.005");
  r.measured = "kappa = " + fixed(fit.intercept, 10) + " + " + fixed(fit.slope, 10) + " Omega";
  r.detail = "delta at Omega=0.002 " + sci(delta.front()) + ", at 0.005 " + sci(delta.back());
  return r;
}

inline CriterionResult lambda_saturation() {
  CriterionResult r;
  r.id = 6;
  r.name = "lambda_saturation";
  auto cfg = config(130, 120);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  cfg.theta_shift = 0;
  const hp_real om("0.005");
  const hp_real ref_im(kReference[6].im);
  const auto d = solve_resonance(om, 0, hp_real("0.3"), cfg);
  std::string curve;
  std::optional<hp_real> last, prev;
  for (int nb : {50, 100, 150, 200, 250, 300}) {
    cfg.n_blocks = nb;
    const auto t = solve_level(om, 0, translated("3"), cfg);
    std::optional<hp_real> lam;
    try {
      lam = lambda_gap(t.energy.real(), d.energy).Lambda;
    } catch (const SolverError&) {
    }
    curve += (curve.empty() ? "" : " ") + std::to_string(nb) + ":" + (lam ? fixed(*lam, 6) : std::string("-"));
    prev = last;
    last = lam;
  }
  const hp_real target = -2 * log(ref_im);
  const hp_real im_ratio = d.energy.imag() / ref_im;
  const bool saturated = last && prev && abs(*last - *prev) <= *last / 100;
  r.passed = saturated && abs(*last - target) <= target / 100 && im_ratio > hp_real(1) / 3 && im_ratio < 3;
  r.measured = "Lambda " + (last ? fixed(*last, 6) : std::string("-")) + " vs " + fixed(target, 6) + ", Im E_d0 " +
               sci(d.energy.imag(), 12);
  r.detail = "Lambda(n) " + curve + "; digits 130, y 3, theta 0.3";
  return r;
}

inline CriterionResult lambda_ratio_limit() {
  CriterionResult r;
  r.id = 7;
  r.name = "lambda_ratio_limit";
  auto cfg = config(230, 150);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  cfg.theta_shift = 0;
  std::vector<hp_real> x, ratio;
  std::string points;
  for (const char* om_text : {"0.0030", "0.0035", "0.0040", "0.0045", "0.0050"}) {
    const hp_real om(om_text);
    cfg.n_blocks = 150;
    const auto t = solve_level(om, 0, translated("5"), cfg);
    cfg.n_blocks = 120;
    const auto d = solve_resonance(om, 0, hp_real("0.3"), cfg);
    const auto g = lambda_gap(t.energy.real(), d.energy);
    x.push_back(om);
    ratio.push_back(g.ratio);
    points += (points.empty() ? "" : " ") + std::string(om_text) + ":" + fixed(g.ratio, 8);
  }
  const hp_real limit = lagrange_extrapolate(x, ratio, hp_real(0));
  r.passed = abs(limit - hp_real("0.9999")) <= hp_real("0.002");
  r.measured = "limit " + fixed(limit, 10);
  r.detail = "ratio " + points + "; digits 230, y 5, theta 0.3";
  return r;
}

inline CriterionResult isospectrality() {
  CriterionResult r;
  r.id = 8;
  r.name = "isospectrality";
  const int digits = 40;
  auto cfg = config(digits, 100);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  const hp_real om("0.005");
  const hp_real tol = ten_to(-(digits - 15));

  std::vector<hp_real> ey;
  for (const char* y : {"1", "2", "3", "5"}) ey.push_back(solve_level(om, 0, translated(y), cfg).energy.real());
  const auto [ymin, ymax] = std::minmax_element(ey.begin(), ey.end());
  const hp_real y_spread = *ymax - *ymin;

  hp_real branch_diff(0);
  for (int n = 0; n < 3; ++n) {
    auto plus = cfg;
    auto minus = cfg;
    minus.branch = Branch::minus;
    const auto ep = solve_level(om, n, translated("3"), plus);
    const auto em = solve_level(om, n, translated("3"), minus);
    grow(branch_diff, abs(ep.energy - em.energy));
  }

  auto cfg_d = config(90, 100);
  WorkingPrecision<hp_real> wp_d(cfg_d.ctx);
  cfg_d.theta_shift = 0;
  std::vector<C> ed;
  for (const char* th : {"0.25", "0.30", "0.35"}) ed.push_back(solve_resonance(hp_real(om), 0, hp_real(th), cfg_d).energy);
  hp_real theta_spread(0), im_max(0);
  for (const auto& a : ed) {
    grow(im_max, abs(a.imag()));
    for (const auto& b : ed) grow(theta_spread, abs(a.real() - b.real()));
  }

  r.passed = y_spread <= tol && branch_diff <= tol && theta_spread <= 10 * im_max;
  r.measured = "y spread " + sci(y_spread) + ", branch diff " + sci(branch_diff) + ", theta spread " +
               sci(theta_spread) + " vs Im " + sci(im_max);
  r.detail = "Omega=0.005; y in {1,2,3,5} and branches at digits 40, theta in {0.25,0.30,0.35} at digits 90";
  return r;
}

inline CriterionResult self_consistency() {
  CriterionResult r;
  r.id = 9;
  r.name = "self_consistency";
  auto cfg = config(40, 80);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  int checked = 0;
  int bad = 0;
  for (const char* om_text : {"0.002", "0.0035", "0.005"}) {
    const hp_real om(om_text);
    for (int n = 0; n < 4; ++n) {
      const auto lev = solve_level(om, n, translated("3"), cfg);
      ++checked;
      if (!self_consistent(lev, cfg.ctx)) ++bad;
    }
    const auto d = solve_resonance(om, 0, hp_real("0.3"), cfg);
    ++checked;
    if (!self_consistent(d, cfg.ctx)) ++bad;
  }
  const hp_real om("0.002");
  const hp_real e(100);
  const ModelParams<hp_real> p{om, C(e), cfg.variant, cfg.branch, translated("3")};
  const C lam = lambda_of(p, 0, cfg);
  const hp_real ratio = lam.real() / asymptotic_lambda(om, e, 0);
  r.passed = bad == 0 && abs(ratio - 1) < hp_real("0.01");
  r.measured = std::to_string(checked - bad) + "/" + std::to_string(checked) + " self-consistent, lambda ratio at E=100 " +
               fixed(ratio, 8);
  r.detail = "|lambda - E - Omega E^2| < tol (1 + |lambda|); ratio lambda / (sqrt(1 + 2 E Omega)(2n+1)) at Omega=0.002";
  return r;
}

inline CriterionResult spinor_structure() {
  CriterionResult r;
  r.id = 10;
  r.name = "spinor_structure";
  const int digits = 40;
  auto cfg = config(digits, 60);
  WorkingPrecision<hp_real> wp(cfg.ctx);
  const hp_real om("0.002");
  const auto lev = solve_level(om, 0, Frame<hp_real>{RealFrame<hp_real>{}}, cfg);
  const ModelParams<hp_real> p{om, lev.energy, Variant::dirac_titchmarsh, Branch::plus, RealFrame<hp_real>{}};
  const BasisSpec<hp_real> basis{cfg.sigma, 4 * cfg.n_blocks};
  const auto ev = eigenvector(make_operator(p), basis, cfg.n_blocks, lev.lambda, cfg.ctx);
  const auto s = reconstruct_spinor(ev.coeffs, p, basis, cfg.ctx);
  const hp_real ratio = s.X1_norm / s.X2_norm;
  r.passed = ratio < hp_real("0.1") && s.pt_pair_residual < ten_to(-(digits - 15));
  r.measured = "|X1|/|X2| " + fixed(ratio, 6) + ", PT residual " + sci(s.pt_pair_residual);
  r.detail = "Omega=0.002, n=0, real frame, blocks 60, eigenvector residual " + sci(ev.residual);
  return r;
}

struct CriterionEntry {
  int id;
  CriterionResult (*run)();
};

inline constexpr CriterionEntry kCriteria[] = {
    {1, harmonic_limit},     {2, oracle_equivalence}, {3, table_real_parts}, {4, perturbation_slope},
    {5, kappa_fit},          {6, lambda_saturation},  {7, lambda_ratio_limit}, {8, isospectrality},
    {9, self_consistency},   {10, spinor_structure},
};

}  // namespace verify_detail

inline std::vector<int> criteria_for(VerifyLevel level) {
  if (level == VerifyLevel::quick) return {1, 2};
  std::vector<int> out;
  for (const auto& c : verify_detail::kCriteria) out.push_back(c.id);
  return out;
}

/// Runs one criterion; solver exceptions become a failed result.
inline CriterionResult run_criterion(int id) {
  for (const auto& c : verify_detail::kCriteria) {
    if (c.id != id) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.id = id;
      r.passed = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw std::invalid_argument("no criterion " + std::to_string(id));
}

inline Table verify_table(const std::vector<CriterionResult>& results, bool timing = true) {
  Table t;
  t.add_column("id", true);
  t.add_column("name");
  t.add_column("passed");
  t.add_column("measured");
  t.add_column("detail");
  if (timing) t.add_column("wall_time_s");
  for (const auto& r : results) {
    std::vector<std::string> row{std::to_string(r.id), r.name, r.passed ? "true" : "false", r.measured, r.detail};
    if (timing) row.push_back(format_seconds(r.seconds));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace relosc
