#include <gtest/gtest.h>

#include <random>

#include "relosc/scalar.hpp"

using namespace relosc;

TEST(Scalar, ContextTolerance) {
  const auto c60 = make_context(60);
  PrecisionScope scope(c60);
  EXPECT_EQ(c60.newton_tol, pow(hp_real(10), -50));
  EXPECT_EQ(c60.working_digits(), 70);
  const auto c30 = make_context(30);
  EXPECT_EQ(to_decimal_string(c30.newton_tol, 5), "1.0000e-20");
  EXPECT_EQ(to_decimal_string(c30.det_rescale_threshold, 3), "1.00e100");
}

TEST(Scalar, ContextRejectsLowDigits) {
  EXPECT_THROW(make_context(20), std::invalid_argument);
  EXPECT_THROW(make_context(40, 4), std::invalid_argument);
  try {
    make_context(20);
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("digits below minimum"), std::string::npos);
  }
}

TEST(Scalar, ScopeRestoresPrecision) {
  const auto before = hp_real::default_precision();
  {
    PrecisionScope s(make_context(100));
    EXPECT_EQ(hp_real::default_precision(), 110u);
    {
      WorkingPrecision<hp_real> inner(make_context(40));
      EXPECT_EQ(hp_real::default_precision(), 50u);
    }
    EXPECT_EQ(hp_real::default_precision(), 110u);
  }
  EXPECT_EQ(hp_real::default_precision(), before);
}

TEST(Scalar, PromoteRaisesPrecision) {
  hp_real::default_precision(20);
  const hp_real third = hp_real(1) / 3;
  PrecisionScope s(make_context(80));
  const hp_real p = promote(third);
  EXPECT_EQ(p.precision(), 90u);
  EXPECT_EQ(p, third);
}

TEST(Scalar, ComplexFormat) {
  PrecisionScope s(make_context(40));
  EXPECT_EQ(to_decimal_string(hp_complex(hp_real(1), hp_real(0)), 5), "1.0000 + i 0.0000e0");
  EXPECT_EQ(to_decimal_string(hp_complex(hp_real(0), hp_real("1e-144")), 12),
            "0.00000000000 + i 1.00000000000e-144");
  EXPECT_EQ(to_decimal_string(hp_complex(hp_real(2), hp_real("-3.5e-7")), 3), "2.00 - i 3.50e-7");
}

TEST(Scalar, TableValueRoundTrip) {
  PrecisionScope s(make_context(40));
  const auto z = parse_complex("1.0005017620 + i 1.17374083059e-144");
  EXPECT_EQ(z.real(), hp_real("1.0005017620"));
  EXPECT_EQ(z.imag(), hp_real("1.17374083059e-144"));
  const auto text = to_decimal_string(z, 40);
  EXPECT_EQ(parse_complex(text), z);
  EXPECT_EQ(to_decimal_string(parse_complex(text), 40), text);
}

TEST(Scalar, RandomRoundTrip) {
  const int d = 40;
  PrecisionScope s(make_context(d));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(1.0, 10.0);
  std::uniform_int_distribution<int> expo(-200, 200);
  for (int i = 0; i < 200; ++i) {
    const hp_real x = hp_real(mant(rng)) * pow(hp_real(10), expo(rng)) / 7 * (i % 2 ? 1 : -1);
    const hp_real back = parse_real(to_decimal_string(x, d));
    EXPECT_LE(abs(back - x) / abs(x), pow(hp_real(10), -(d - 1))) << to_decimal_string(x, d);
  }
}

TEST(Scalar, ParseErrors) {
  EXPECT_THROW(parse_real(""), std::invalid_argument);
  EXPECT_THROW(parse_real("1.2.3"), std::invalid_argument);
  EXPECT_DOUBLE_EQ(parse_real<double>(" 2.5 "), 2.5);
  EXPECT_THROW(parse_real<double>("2.5x"), std::invalid_argument);
}

TEST(Scalar, EpsilonTracksPrecision) {
  PrecisionScope s(make_context(50));
  const hp_real eps = epsilon<hp_real>();
  EXPECT_LT(eps, hp_real("1e-59"));
  EXPECT_GT(eps, hp_real("1e-62"));
  EXPECT_EQ(epsilon<double>(), std::numeric_limits<double>::epsilon());
}
