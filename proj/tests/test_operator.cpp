#include <gtest/gtest.h>

#include <random>

#include "relosc/operator.hpp"

using namespace relosc;

namespace {

hp_complex eval_poly(const std::array<hp_complex, 5>& c, const hp_complex& x) {
  hp_complex acc;
  for (int j = 4; j >= 0; --j) acc = acc * x + c[static_cast<size_t>(j)];
  return acc;
}

ModelParams<hp_real> params(const char* om, const char* e, Variant v = Variant::dirac_titchmarsh,
                            Branch b = Branch::plus, Frame<hp_real> f = RealFrame<hp_real>{}) {
  return {hp_real(om), hp_complex(hp_real(e)), v, b, f};
}

}  // namespace

TEST(Operator, FromPhysical) {
  PrecisionScope s(make_context(30));
  const hp_real one(1);
  EXPECT_EQ(from_physical(one, one, hp_real(10), one, hp_real(100)).second, 0);
  const auto [om, e] = from_physical(one, hp_real(4), one, one, hp_real(3));
  EXPECT_EQ(om, 1);
  const auto [om2, e2] = from_physical(one, one, hp_real(10), one, hp_real("100.5"));
  EXPECT_EQ(om2, hp_real("0.0025"));
  EXPECT_EQ(e2, 1);
  EXPECT_THROW(from_physical(hp_real(0), one, one, one, one), std::invalid_argument);
  EXPECT_THROW(from_physical(one, one, hp_real(-1), one, one), std::invalid_argument);
}

TEST(Operator, TitchmarshCoefficients) {
  PrecisionScope s(make_context(30));
  const auto op = build_operator(params("0.0025", "1"));
  EXPECT_EQ(op.kinetic, hp_complex(hp_real(1)));
  EXPECT_LT(abs(op.c[1] - hp_complex(hp_real(0), hp_real("-0.1"))), hp_real("1e-35"));
  EXPECT_LT(abs(op.c[2] - hp_complex(hp_real("1.005"))), hp_real("1e-35"));
  EXPECT_EQ(op.c[4], hp_complex(hp_real("-0.0025")));
  EXPECT_EQ(op.c[0], hp_complex());
  EXPECT_EQ(op.c[3], hp_complex());
  // PT: even coefficients real, odd imaginary
  for (size_t j = 0; j < 5; ++j) EXPECT_EQ(j % 2 ? op.c[j].real() : op.c[j].imag(), 0);

  const auto kg = build_operator(params("0.0025", "1", Variant::klein_gordon));
  EXPECT_EQ(kg.c[1], hp_complex());
  EXPECT_EQ(kg.c[2], op.c[2]);

  const auto minus = build_operator(params("0.0025", "1", Variant::dirac_titchmarsh, Branch::minus));
  for (size_t j = 0; j < 5; ++j) EXPECT_EQ(minus.c[j], conj(op.c[j]));
  EXPECT_THROW(build_operator(params("0", "1")), std::invalid_argument);
}

TEST(Operator, TranslationMatchesPolynomial) {
  PrecisionScope s(make_context(40));
  auto op = build_operator(params("0.003", "1.2"));
  op.c[0] = hp_complex(hp_real("0.3"), hp_real("0.1"));
  op.c[3] = hp_complex(hp_real("-0.2"), hp_real("0.05"));
  const hp_complex z(hp_real("0.4"), hp_real("2.5"));
  const auto t = translate_coefficients(op, z);
  for (const char* x : {"-1.5", "0", "0.7", "3"}) {
    const hp_complex xv(hp_real(x), hp_real("0.2"));
    EXPECT_LT(abs(eval_poly(t.c, xv) - eval_poly(op.c, xv + z)), hp_real("1e-35"));
  }
  const auto same = translate_coefficients(op, hp_complex());
  for (size_t j = 0; j < 5; ++j) EXPECT_EQ(same.c[j], op.c[j]);
}

TEST(Operator, TranslatedQuadraticCoefficient) {
  PrecisionScope s(make_context(40));
  const hp_real y(3);
  const auto base = build_operator(params("0.002", "1"));
  const auto t = make_operator(params("0.002", "1", Variant::dirac_titchmarsh, Branch::plus, TranslatedFrame<hp_real>{y}));
  EXPECT_LT(abs(t.c[2] - (base.c[2] + hp_complex(6 * hp_real("0.002") * y * y))), hp_real("1e-35"));
  EXPECT_TRUE(t.framed);
  EXPECT_THROW(apply_frame(t), std::logic_error);
}

TEST(Operator, DilationMultipliers) {
  PrecisionScope s(make_context(40));
  const hp_real th("0.3");
  const auto base = build_operator(params("0.004", "1"));
  const auto d = make_operator(params("0.004", "1", Variant::dirac_titchmarsh, Branch::plus, DilatedFrame<hp_real>{th}));
  EXPECT_LT(abs(d.kinetic - polar(hp_real(1), hp_real(-2 * th))), hp_real("1e-40"));
  EXPECT_LT(abs(d.c[4] - base.c[4] * polar(hp_real(1), hp_real(4 * th))), hp_real("1e-40"));
  EXPECT_LT(abs(d.c[1] - base.c[1] * polar(hp_real(1), th)), hp_real("1e-40"));
}

TEST(Operator, FrameValidation) {
  PrecisionScope s(make_context(30));
  EXPECT_THROW(validate_frame(Frame<hp_real>{TranslatedFrame<hp_real>{hp_real(0)}}), std::invalid_argument);
  EXPECT_THROW(validate_frame(Frame<hp_real>{DilatedFrame<hp_real>{hp_real(0)}}), std::invalid_argument);
  EXPECT_THROW(validate_frame(Frame<hp_real>{DilatedFrame<hp_real>{hp_real("0.6")}}), std::invalid_argument);
  EXPECT_NO_THROW(validate_frame(Frame<hp_real>{DilatedFrame<hp_real>{hp_real("-0.3")}}));
  EXPECT_EQ(frame_name(Frame<hp_real>{RealFrame<hp_real>{}}), "real");
  EXPECT_EQ(frame_parameter(Frame<hp_real>{TranslatedFrame<hp_real>{hp_real(2)}}), 2);
}

TEST(Operator, HarmonicBlocks) {
  PrecisionScope s(make_context(30));
  const auto b = assemble_blocks(harmonic_operator<hp_real>(), BasisSpec<hp_real>{hp_real(1), 16}, 4);
  for (int n = 0; n < 4; ++n) {
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 4; ++k) {
        EXPECT_LT(abs(b.A[n](i, k) - (i == k ? hp_complex(hp_real(8 * n + 2 * i + 1)) : hp_complex())),
                  hp_real("1e-35"));
        EXPECT_EQ(b.B[n](i, k), hp_complex());
        EXPECT_EQ(b.C[n](i, k), hp_complex());
      }
    }
  }
}

TEST(Operator, KleinGordonBlocksSymmetric) {
  PrecisionScope s(make_context(30));
  const auto op = make_operator(params("0.003", "1", Variant::klein_gordon));
  const auto b = assemble_blocks(op, BasisSpec<hp_real>{hp_real("1.25"), 24}, 6);
  for (int n = 0; n < 6; ++n) {
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(b.C[n](i, k), b.B[n](k, i));
        // B is lower triangular with diagonal from x^4
        if (k > i) {
          EXPECT_EQ(b.B[n](i, k), hp_complex());
        }
      }
      EXPECT_NE(b.B[n](i, i), hp_complex());
    }
  }
}

TEST(Operator, UnpackMatchesBanded) {
  PrecisionScope s(make_context(30));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 4; ++trial) {
    QuarticOperator<hp_real> op;
    op.kinetic = hp_complex(hp_real(u(rng)), hp_real(u(rng)));
    for (auto& c : op.c) c = hp_complex(hp_real(u(rng)), hp_real(u(rng)));
    op.framed = true;
    const int n = 3 + trial;
    const BasisSpec<hp_real> basis{hp_real("1.5"), 4 * n};
    const auto blocks = assemble_blocks(op, basis, n);
    const auto dense = unpack(blocks, n);
    const auto banded = assemble_banded(op, BasisMatrices<hp_real>(basis, 4 * n), 4 * n);
    for (int i = 0; i < 4 * n; ++i) {
      for (int k = 0; k < 4 * n; ++k) EXPECT_EQ(dense(i, k), banded.at(i, k));
    }
  }
}

TEST(Operator, AssemblyErrors) {
  PrecisionScope s(make_context(30));
  const auto op = make_operator(params("0.003", "1"));
  EXPECT_THROW(assemble_blocks(op, BasisSpec<hp_real>{hp_real(1), 16}, 5), std::invalid_argument);
  EXPECT_THROW(assemble_blocks(op, BasisSpec<hp_real>{hp_real(1), 16}, 0), std::invalid_argument);
}
