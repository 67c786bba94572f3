#include <gtest/gtest.h>

#include "relosc/diagnostics.hpp"

using namespace relosc;

namespace {

using C = hp_complex;

LevelResult<hp_real> level(int n, const char* e) {
  LevelResult<hp_real> r;
  r.n = n;
  r.energy = C(hp_real(e));
  return r;
}

}  // namespace

TEST(Diagnostics, LambdaGap) {
  PrecisionScope s(make_context(40));
  const hp_real t("1.0005017620");
  const C d(t - hp_real("1e-10"), hp_real("5.36447802132e-58"));
  const auto g = lambda_gap(t, d);
  EXPECT_NEAR(static_cast<double>(g.Lambda), 23.0259, 1e-4);
  EXPECT_NEAR(static_cast<double>(g.width_log), 263.7403, 1e-4);
  EXPECT_LT(abs(g.ratio - g.Lambda / g.width_log), hp_real("1e-38"));
  try {
    lambda_gap(t, C(t + hp_real("1e-12")));
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverErrorKind::nonpositive_gap);
  }
  EXPECT_EQ(lambda_gap(t, C(hp_real(1))).width_log, 0);
}

TEST(Diagnostics, KappaDelta) {
  PrecisionScope s(make_context(30));
  const std::vector<LevelResult<hp_real>> t{level(0, "1.0005"), level(1, "3.004")};
  const auto same = kappa_delta(t, t, hp_real("0.002"));
  EXPECT_EQ(same.first, 0);
  EXPECT_EQ(same.second, 0);
  const std::vector<LevelResult<hp_real>> r{level(1, "3.001"), level(0, "0.9985")};
  const auto kd = kappa_delta(t, r, hp_real("0.002"));
  EXPECT_LT(abs(kd.first - 1), hp_real("1e-25"));
  EXPECT_LT(abs(kd.second - hp_real("0.5")), hp_real("1e-25"));
  try {
    kappa_delta(t, std::vector<LevelResult<hp_real>>{level(0, "1")}, hp_real("0.002"));
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverErrorKind::missing_levels);
  }
}

TEST(Diagnostics, LeastSquares) {
  PrecisionScope s(make_context(30));
  const std::vector<hp_real> x{hp_real("0.002"), hp_real("0.003"), hp_real("0.004")};
  std::vector<hp_real> y;
  for (const auto& v : x) y.push_back(hp_real("0.5") - 3 * v);
  const auto fit = least_squares_line(x, y);
  EXPECT_LT(abs(fit.intercept - hp_real("0.5")), hp_real("1e-25"));
  EXPECT_LT(abs(fit.slope + 3), hp_real("1e-25"));
  y[1] += hp_real("0.001");
  const auto noisy = least_squares_line(x, y);
  EXPECT_LT(abs(noisy.slope + 3), hp_real("1e-20"));
  EXPECT_LT(abs(noisy.intercept - hp_real("0.5") - hp_real("0.001") / 3), hp_real("1e-25"));
  EXPECT_THROW(least_squares_line(std::vector<hp_real>{hp_real(1)}, std::vector<hp_real>{hp_real(1)}),
               std::invalid_argument);
}

TEST(Diagnostics, Lagrange) {
  PrecisionScope s(make_context(30));
  std::vector<hp_real> x, y;
  for (int k = 1; k <= 5; ++k) {
    const hp_real v = hp_real(k) / 1000;
    x.push_back(v);
    y.push_back(1 - 2 * v + 5 * v * v * v * v);
  }
  EXPECT_LT(abs(lagrange_extrapolate(x, y, hp_real(0)) - 1), hp_real("1e-25"));
  x[1] = x[0];
  EXPECT_THROW(lagrange_extrapolate(x, y, hp_real(0)), std::invalid_argument);
}

TEST(Diagnostics, Sectors) {
  const double pi = std::acos(-1.0);
  EXPECT_EQ(sector_of(0.0), 0);
  EXPECT_EQ(sector_of(pi / 3), 1);
  EXPECT_EQ(sector_of(pi), 3);
  EXPECT_EQ(sector_of(-pi / 3), -1);
  EXPECT_EQ(sector_of(pi / 3 + 2 * pi), 1);
  EXPECT_FALSE(sector_of(pi / 6).has_value());
  EXPECT_FALSE(sector_of(-pi / 6).has_value());
}

TEST(Diagnostics, ActionClosedForm) {
  PrecisionScope s(make_context(30));
  const auto a = action_S(sqrt(hp_real(10)), hp_real(1), hp_real(0));
  EXPECT_LT(abs(a.integral - 9), hp_real("1e-28"));
  EXPECT_LT(abs(action_S(-sqrt(hp_real(10)), hp_real(1), hp_real(0)).integral + 9), hp_real("1e-28"));
  EXPECT_THROW(action_S(hp_real(1), hp_real("0.002"), hp_real(1)), std::domain_error);
  EXPECT_THROW(action_S(hp_real(1), hp_real(0), hp_real(1)), std::invalid_argument);
}

TEST(Diagnostics, ActionQuadrature) {
  PrecisionScope s(make_context(30));
  const double om = 0.002, e = 1.0;
  const double a = 1 + 2 * e * om;
  const double xt = std::sqrt(a / om);
  const double x = 40.0;
  // substitute y^2 = xt^2 + u^2 to remove the square-root endpoint
  const double umax = std::sqrt(x * x - xt * xt);
  const int n = 2000;
  const double h = umax / n;
  double acc = 0;
  for (int k = 0; k <= n; ++k) {
    const double u = k * h;
    const double f = std::sqrt(om) * u * u;  // y sqrt(om y^2 - a) dy = sqrt(om) u^2 du
    acc += f * (k == 0 || k == n ? 1 : k % 2 ? 4 : 2);
  }
  acc *= h / 3;
  const auto v = action_S(hp_real(x), hp_real(om), hp_real(e));
  EXPECT_NEAR(static_cast<double>(v.integral), acc, 1e-9 * acc);
}

TEST(Diagnostics, ActionAsymptotic) {
  PrecisionScope s(make_context(40));
  const hp_real om("0.002"), e(1);
  const hp_real a = 1 + 2 * e * om;
  const hp_real lead = a * a / (8 * om * sqrt(om));
  // (S - asymptotic) x -> lead with an O(x^-2) remainder
  std::vector<hp_real> errs;
  for (int x : {100, 200, 400}) {
    const auto v = action_S(hp_real(x), om, e);
    errs.push_back(abs((v.integral - v.asymptotic) * x - lead));
  }
  EXPECT_LT(errs[0], lead / 50);
  EXPECT_NEAR(static_cast<double>(errs[0] / errs[1]), 4.0, 0.2);
  EXPECT_NEAR(static_cast<double>(errs[1] / errs[2]), 4.0, 0.1);
}

TEST(Diagnostics, ActionEnergyDerivative) {
  PrecisionScope s(make_context(40));
  const hp_real om("0.002"), e(1), h("1e-15");
  for (const hp_real& x : {hp_real(30), hp_real(-30)}) {
    const hp_real fd = (action_S(x, om, e + h).integral - action_S(x, om, e - h).integral) / (2 * h);
    const hp_real sign = x < 0 ? hp_real(-1) : hp_real(1);
    const hp_real expect = -sign * sqrt(om * x * x - (1 + 2 * e * om));
    EXPECT_LT(abs(fd - expect), hp_real("1e-20"));
  }
}

TEST(Diagnostics, EigenvectorAndSpinor) {
  SolverConfig<hp_real> cfg;
  cfg.ctx = make_context(40);
  cfg.n_blocks = 60;
  PrecisionScope s(cfg.ctx);
  const hp_real om("0.002");
  const auto lev = solve_level(om, 0, Frame<hp_real>{TranslatedFrame<hp_real>{hp_real(3)}}, cfg);
  const ModelParams<hp_real> p{om, lev.energy, Variant::dirac_titchmarsh, Branch::plus,
                               TranslatedFrame<hp_real>{hp_real(3)}};
  const BasisSpec<hp_real> basis{cfg.sigma, 4 * cfg.n_blocks};
  const auto ev = eigenvector(make_operator(p), basis, cfg.n_blocks, lev.lambda, cfg.ctx);
  EXPECT_LT(ev.residual, hp_real("1e-25"));
  hp_real nrm(0);
  for (const auto& c : ev.coeffs) nrm += norm(c);
  EXPECT_LT(abs(nrm - 1), hp_real("1e-35"));

  const auto sp = reconstruct_spinor(ev.coeffs, p, basis, cfg.ctx);
  hp_real minus2(0);
  for (const auto& c : sp.psi_minus) minus2 += norm(c);
  EXPECT_LT(abs(sp.X1_norm * sp.X1_norm + sp.X2_norm * sp.X2_norm - 1 - minus2), hp_real("1e-30"));
  EXPECT_EQ(sp.psi_minus.size(), ev.coeffs.size() + 2);
  EXPECT_THROW(reconstruct_spinor(std::vector<C>{}, p, basis, cfg.ctx), std::invalid_argument);
}

TEST(Diagnostics, SpinorHarmonicLimit) {
  PrecisionScope s(make_context(40));
  // Omega -> 0: psi_- = i psi_+, so X1 vanishes and |X2| = sqrt 2
  const ModelParams<hp_real> p{hp_real("1e-30"), C(hp_real(1)), Variant::dirac_titchmarsh, Branch::plus,
                               RealFrame<hp_real>{}};
  std::vector<C> ground(8);
  ground[0] = C(hp_real(1));
  const auto sp = reconstruct_spinor(ground, p, BasisSpec<hp_real>{hp_real(1), 12}, make_context(40));
  EXPECT_LT(sp.X1_norm, hp_real("1e-14"));
  EXPECT_LT(abs(sp.X2_norm - sqrt(hp_real(2))), hp_real("1e-14"));
  EXPECT_LT(sp.pt_pair_residual, hp_real("1e-14"));
}
