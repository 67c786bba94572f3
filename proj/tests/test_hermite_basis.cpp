#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "relosc/hermite_basis.hpp"
#include "relosc/operator.hpp"

using namespace relosc;

namespace {

struct PowerOp {
  hp_complex kinetic;
  std::array<hp_complex, 5> c{};
};

PowerOp power_op(int p) {
  PowerOp op;
  op.c[static_cast<size_t>(p)] = hp_complex(hp_real(1));
  return op;
}

}  // namespace

// physicists' Hermite polynomials: x h_k = h_{k+1}/2 + k h_{k-1}
TEST(HermiteRaw, FirstOrderRecurrence) {
  const double x = 0.7;
  EXPECT_NEAR(x * 2 * x, 0.5 * (4 * x * x - 2) + 1.0, 1e-15);
  for (unsigned k = 1; k < 12; ++k) {
    for (double t : {-1.3, 0.2, 0.9}) {
      const double lhs = t * std::hermite(k, t);
      const double rhs = 0.5 * std::hermite(k + 1, t) + k * std::hermite(k - 1, t);
      EXPECT_NEAR(lhs, rhs, 1e-9 * (1 + std::abs(lhs)));
    }
  }
}

// x^2 h_k = h_{k+2}/4 + (k + 1/2) h_k + k(k-1) h_{k-2}
TEST(HermiteRaw, SecondOrderRecurrence) {
  for (unsigned k = 2; k < 12; ++k) {
    for (double t : {-0.8, 0.35, 1.1}) {
      const double lhs = t * t * std::hermite(k, t);
      const double rhs =
          0.25 * std::hermite(k + 2, t) + (k + 0.5) * std::hermite(k, t) + k * (k - 1.0) * std::hermite(k - 2, t);
      EXPECT_NEAR(lhs, rhs, 1e-9 * (1 + std::abs(lhs)));
    }
  }
}

TEST(HermiteBasis, LadderIdentity) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b{hp_real(1), 16};
  const auto col = position_power_column(0, 1, b);
  ASSERT_EQ(col.coeffs.size(), 2u);
  EXPECT_EQ(col.at(0), 0);
  EXPECT_LT(abs(col.at(1) - 1 / sqrt(hp_real(2))), hp_real("1e-45"));
}

TEST(HermiteBasis, PowersMatchQuadrature) {
  const int digits = 40;
  PrecisionScope s(make_context(digits));
  const hp_real tol = pow(hp_real(10), -(digits - 10));
  for (const char* sg : {"1", "1.5"}) {
    const BasisSpec<hp_real> b{hp_real(sg), 28};
    for (int p = 1; p <= 4; ++p) {
      const auto op = power_op(p);
      for (int k = 0; k <= 20; k += 3) {
        const auto col = position_power_column(k, p, b);
        for (int i = std::max(0, k - p); i <= k + p; ++i) {
          const auto q = quadrature_overlap_oracle(i, k, op, b);
          EXPECT_LT(abs(q - hp_complex(col.at(i))), tol) << "p=" << p << " i=" << i << " k=" << k << " sigma=" << sg;
        }
      }
    }
  }
}

TEST(HermiteBasis, IteratedProductsMatchPowers) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b{hp_real("1.25"), 24};
  const BasisMatrices<hp_real> m(b, 32);
  for (int p = 2; p <= 4; ++p) {
    for (int i = 0; i < 20; ++i) {
      for (int k = 0; k < 20; ++k) {
        hp_real acc(0);
        for (int j = 0; j < 32; ++j) acc += m.position[1].at(i, j) * m.position[static_cast<size_t>(p - 1)].at(j, k);
        EXPECT_LT(abs(acc - m.position[static_cast<size_t>(p)].at(i, k)), hp_real("1e-40"));
      }
    }
  }
}

TEST(HermiteBasis, BandAndSymmetry) {
  PrecisionScope s(make_context(30));
  const BasisMatrices<hp_real> m(BasisSpec<hp_real>{hp_real("1.7"), 16});
  for (int p = 0; p <= 4; ++p) {
    const auto& x = m.position[static_cast<size_t>(p)];
    for (int i = 0; i < 16; ++i) {
      for (int k = 0; k < 16; ++k) {
        if (std::abs(i - k) > p) {
          EXPECT_EQ(x.at(i, k), 0);
        }
        EXPECT_EQ(x.at(i, k), x.at(k, i));
      }
    }
  }
  auto kin = m.kinetic;
  EXPECT_THROW(kin.ref(0, 5) = hp_real(1), std::out_of_range);
  EXPECT_EQ(kin.at(0, 5), 0);
}

TEST(HermiteBasis, KineticElements) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b{hp_real(1), 16};
  EXPECT_EQ(kinetic_matrix_element(0, 0, b), hp_real("0.5"));
  EXPECT_LT(abs(kinetic_matrix_element(2, 0, b) + sqrt(hp_real(2)) / 2), hp_real("1e-45"));
  EXPECT_EQ(kinetic_matrix_element(3, 0, b), 0);
  const BasisMatrices<hp_real> m(b);
  for (int i = 0; i < 16; ++i) {
    for (int k = 0; k < 16; ++k) {
      const hp_real h0 = m.kinetic.at(i, k) + m.position[2].at(i, k);
      EXPECT_LT(abs(h0 - (i == k ? hp_real(2 * k + 1) : hp_real(0))), hp_real("1e-45"));
    }
  }
}

TEST(HermiteBasis, KineticMatchesQuadrature) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b{hp_real("1.5"), 16};
  PowerOp op;
  op.kinetic = hp_complex(hp_real(1));
  for (int i = 0; i < 12; ++i) {
    for (int k = 0; k < 12; ++k) {
      const auto q = quadrature_overlap_oracle(i, k, op, b);
      EXPECT_LT(abs(q - hp_complex(kinetic_matrix_element(i, k, b))), hp_real("1e-30"));
    }
  }
}

TEST(HermiteBasis, Derivative) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b1{hp_real(1), 16};
  const auto d0 = derivative_column(0, b1);
  EXPECT_LT(abs(d0.at(1) + 1 / sqrt(hp_real(2))), hp_real("1e-45"));
  for (int k = 0; k + 1 < 15; ++k) {
    EXPECT_EQ(derivative_column(k, b1).at(k + 1), -derivative_column(k + 1, b1).at(k));
  }
  const BasisSpec<hp_real> b3{hp_real(3), 16};
  for (int k = 0; k < 14; ++k) {
    for (int i = std::max(0, k - 1); i <= k + 1; ++i) {
      EXPECT_LT(abs(derivative_column(k, b3).at(i) - sqrt(hp_real(3)) * derivative_column(k, b1).at(i)),
                hp_real("1e-45"));
    }
  }
}

TEST(HermiteBasis, QuadratureMoments) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b{hp_real(1), 16};
  EXPECT_LT(abs(quadrature_overlap_oracle(0, 0, power_op(2), b) - hp_complex(hp_real("0.5"))), hp_real("1e-45"));
  EXPECT_LT(abs(quadrature_overlap_oracle(0, 0, power_op(4), b) - hp_complex(hp_real("0.75"))), hp_real("1e-45"));
  EXPECT_THROW(quadrature_overlap_oracle(0, 0, power_op(4), b, 4), std::invalid_argument);
}

TEST(HermiteBasis, RandomPairsAgainstColumns) {
  PrecisionScope s(make_context(40));
  const BasisSpec<hp_real> b{hp_real("1.3"), 16};
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> idx(0, 12);
  for (int t = 0; t < 30; ++t) {
    const int i = idx(rng);
    const int k = idx(rng);
    const int p = 1 + t % 4;
    EXPECT_LT(abs(quadrature_overlap_oracle(i, k, power_op(p), b) - hp_complex(position_power_column(k, p, b).at(i))),
              hp_real("1e-30"));
  }
}

TEST(HermiteBasis, Validation) {
  PrecisionScope s(make_context(30));
  EXPECT_THROW((BasisSpec<hp_real>{hp_real(0), 8}.validate()), std::invalid_argument);
  EXPECT_THROW((BasisSpec<hp_real>{hp_real(1), 10}.validate()), std::invalid_argument);
  EXPECT_THROW((BasisSpec<hp_real>{hp_real(1), 4}.validate()), std::invalid_argument);
  const BasisSpec<hp_real> b{hp_real(1), 8};
  EXPECT_THROW(position_power_column(8, 1, b), std::out_of_range);
  EXPECT_THROW(position_power_column(0, 5, b), std::invalid_argument);
  EXPECT_THROW(derivative_column(-1, b), std::out_of_range);
}

TEST(HermiteBasis, GaussRuleIntegratesPolynomials) {
  PrecisionScope s(make_context(40));
  const auto rule = gauss_hermite_rule<hp_real>(20);
  hp_real m0(0), m2(0), m4(0);
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const hp_real t2 = rule.nodes[i] * rule.nodes[i];
    m0 += rule.weights[i];
    m2 += rule.weights[i] * t2;
    m4 += rule.weights[i] * t2 * t2;
  }
  const hp_real rp = sqrt(pi<hp_real>());
  EXPECT_LT(abs(m0 - rp), hp_real("1e-45"));
  EXPECT_LT(abs(m2 - rp / 2), hp_real("1e-45"));
  EXPECT_LT(abs(m4 - 3 * rp / 4), hp_real("1e-45"));
}

TEST(HermiteBasis, GaussRuleHighOrder) {
  PrecisionScope s(make_context(40));
  for (int m : {150, 216, 300}) {
    const auto rule = gauss_hermite_rule<hp_real>(m);
    hp_real m0(0), m2(0);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      if (i > 0) {
        EXPECT_LT(rule.nodes[i], rule.nodes[i - 1]) << "m=" << m << " i=" << i;
      }
      m0 += rule.weights[i];
      m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    }
    const hp_real rp = sqrt(pi<hp_real>());
    EXPECT_LT(abs(m0 - rp), hp_real("1e-45")) << "m=" << m;
    EXPECT_LT(abs(m2 - rp / 2), hp_real("1e-45")) << "m=" << m;
  }
}
