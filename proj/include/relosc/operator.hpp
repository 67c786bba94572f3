#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relosc/block_matrix.hpp"
#include "relosc/complex.hpp"
#include "relosc/hermite_basis.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

enum class Variant { dirac_titchmarsh, klein_gordon };
enum class Branch { plus, minus };

template <class Real>
struct RealFrame {};
template <class Real>
struct TranslatedFrame {
  Real y;  // x -> x + i y
};
template <class Real>
struct DilatedFrame {
  Real theta;  // x -> x exp(i theta)
};
template <class Real>
using Frame = std::variant<RealFrame<Real>, TranslatedFrame<Real>, DilatedFrame<Real>>;

template <class Real>
std::string frame_name(const Frame<Real>& f) {
  switch (f.index()) {
    case 0: return "real";
    case 1: return "translated";
    default: return "dilated";
  }
}

/// The translation length or dilation angle; zero in the real frame.
template <class Real>
Real frame_parameter(const Frame<Real>& f) {
  if (const auto* t = std::get_if<TranslatedFrame<Real>>(&f)) return t->y;
  if (const auto* d = std::get_if<DilatedFrame<Real>>(&f)) return d->theta;
  return Real(0);
}

inline std::string variant_name(Variant v) {
  return v == Variant::dirac_titchmarsh ? "dirac" : "klein_gordon";
}
inline std::string branch_name(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

/// Dimensionless model point: Omega = hbar omega / (4 m c^2) and
/// E = 2 (W - m c^2) / (hbar omega).
template <class Real>
struct ModelParams {
  Real omega_rel;
  Complex<Real> energy;
  Variant variant = Variant::dirac_titchmarsh;
  Branch branch = Branch::plus;
  Frame<Real> frame = RealFrame<Real>{};
};

template <class Real>
void validate_frame(const Frame<Real>& frame) {
  using std::abs;
  if (const auto* t = std::get_if<TranslatedFrame<Real>>(&frame)) {
    if (!(t->y > 0)) throw std::invalid_argument("translation y must be positive");
  } else if (const auto* d = std::get_if<DilatedFrame<Real>>(&frame)) {
    if (d->theta == 0 || !(abs(d->theta) < pi<Real>() / 6)) {
      throw std::invalid_argument("dilation angle must satisfy 0 < |theta| < pi/6");
    }
  }
}

/// -kinetic d^2/dx^2 + sum_j c_j x^j, with the spectral parameter kept
/// outside: eigenvalues lambda satisfy op psi = lambda psi.
template <class Real>
struct QuarticOperator {
  Complex<Real> kinetic;
  std::array<Complex<Real>, 5> c{};
  ModelParams<Real> params;
  bool framed = false;  // true once apply_frame has run
};

template <class Real>
std::pair<Real, Real> from_physical(const Real& m, const Real& omega, const Real& c_light, const Real& hbar,
                                    const Real& W) {
  if (!(m > 0) || !(omega > 0) || !(c_light > 0) || !(hbar > 0)) {
    throw std::invalid_argument("mass, frequency, light speed and hbar must be positive");
  }
  const Real rest = m * c_light * c_light;
  const Real quantum = hbar * omega;
  return {quantum / (4 * rest), 2 * (W - rest) / quantum};
}

/// Real-frame coefficients of the Titchmarsh operator
///   -d^2/dx^2 - 2i sqrt(Omega) x + (1 + 2 E Omega) x^2 - Omega x^4
/// or of the Klein-Gordon operator (same without the linear term). The minus
/// branch is the complex conjugate (equivalently the parity image).
template <class Real>
QuarticOperator<Real> build_operator(const ModelParams<Real>& params) {
  using std::sqrt;
  if (!(params.omega_rel > 0)) throw std::invalid_argument("omega_rel must be positive");
  QuarticOperator<Real> op;
  op.params = params;
  op.kinetic = Complex<Real>(Real(1));
  const Real om = promote(params.omega_rel);
  if (params.variant == Variant::dirac_titchmarsh) op.c[1] = Complex<Real>(Real(0), Real(-2 * sqrt(om)));
  op.c[2] = Complex<Real>(Real(1)) + promote(params.energy) * Complex<Real>(Real(2 * om));
  op.c[4] = Complex<Real>(Real(-om));
  if (params.branch == Branch::minus) {
    for (auto& x : op.c) x = conj(x);
  }
  return op;
}

/// -d^2/dx^2 + x^2, the Omega = 0 limit of every variant (not solvable by
/// the moment recurrence since c_4 = 0).
template <class Real>
QuarticOperator<Real> harmonic_operator() {
  QuarticOperator<Real> op;
  op.kinetic = Complex<Real>(Real(1));
  op.c[2] = Complex<Real>(Real(1));
  op.params.omega_rel = Real(0);
  op.framed = true;
  return op;
}

/// Coefficients of p(x + z) from those of p(x) (binomial expansion).
template <class Real>
QuarticOperator<Real> translate_coefficients(const QuarticOperator<Real>& op, const Complex<Real>& z) {
  static constexpr int kBinom[5][5] = {{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  QuarticOperator<Real> out = op;
  std::array<Complex<Real>, 5> zp;
  zp[0] = Complex<Real>(Real(1));
  const Complex<Real> zz = promote(z);
  for (size_t j = 1; j < 5; ++j) zp[j] = zp[j - 1] * zz;
  for (size_t m = 0; m < 5; ++m) {
    Complex<Real> acc;
    for (size_t j = m; j < 5; ++j) acc += op.c[j] * zp[j - m] * Real(kBinom[j][m]);
    out.c[m] = acc;
  }
  return out;
}

/// Under x -> x e^{i theta}: kinetic picks up e^{-2 i theta}, c_j picks up e^{i j theta}.
template <class Real>
QuarticOperator<Real> dilate_coefficients(const QuarticOperator<Real>& op, const Real& theta) {
  QuarticOperator<Real> out = op;
  const Real th = promote(theta);
  out.kinetic = op.kinetic * polar(Real(1), Real(-2 * th));
  for (size_t j = 1; j < 5; ++j) out.c[j] = op.c[j] * polar(Real(1), Real(th * static_cast<int>(j)));
  return out;
}

/// Moves a real-frame operator into the frame named by its params. The
/// minus branch is translated by -iy, the PT mirror of the plus branch, so
/// both branches stay isospectral for the same positive y.
template <class Real>
QuarticOperator<Real> apply_frame(const QuarticOperator<Real>& op) {
  if (op.framed) throw std::logic_error("apply_frame expects a real-frame operator");
  validate_frame(op.params.frame);
  QuarticOperator<Real> out = op;
  if (const auto* t = std::get_if<TranslatedFrame<Real>>(&op.params.frame)) {
    const Real y = op.params.branch == Branch::plus ? t->y : Real(-t->y);
    out = translate_coefficients(op, Complex<Real>(Real(0), y));
  } else if (const auto* d = std::get_if<DilatedFrame<Real>>(&op.params.frame)) {
    out = dilate_coefficients(op, d->theta);
  }
  out.framed = true;
  return out;
}

template <class Real>
QuarticOperator<Real> make_operator(const ModelParams<Real>& params) {
  return apply_frame(build_operator(params));
}

/// Block-tridiagonal compression: (A_n)_{ik} = H_{4n+i,4n+k},
/// (B_n)_{ik} = H_{4n+i,4(n+1)+k}, (C_n)_{ik} = H_{4(n+1)+i,4n+k}.
/// B_{n_blocks-1} and C_{n_blocks-1} reach one block past the truncation;
/// the moment recurrence needs B_{n-1} to form P_n.
template <class Real>
struct BlockTridiagonal {
  std::vector<Mat4<Real>> A, B, C;
  int n_blocks() const { return static_cast<int>(A.size()); }
};

/// Banded matrix of op over the first `size` basis functions.
template <class Real>
BandedMatrix<Complex<Real>> assemble_banded(const QuarticOperator<Real>& op, const BasisMatrices<Real>& m,
                                            int size) {
  if (size > m.kinetic.size()) throw std::invalid_argument("assemble size exceeds precomputed basis matrices");
  BandedMatrix<Complex<Real>> h(size, 4);
  for (int i = 0; i < size; ++i) {
    for (int k = std::max(0, i - 4); k <= std::min(size - 1, i + 4); ++k) {
      Complex<Real> v = op.kinetic * m.kinetic.at(i, k);
      for (size_t j = 0; j < 5; ++j) {
        const Real x = m.position[j].at(i, k);
        if (x != 0) v += op.c[j] * x;
      }
      h.ref(i, k) = std::move(v);
    }
  }
  return h;
}

/// Precomputed basis matrices large enough for `n_blocks` blocks (including
/// the trailing coupling block).
template <class Real>
BasisMatrices<Real> basis_matrices_for_blocks(const BasisSpec<Real>& basis, int n_blocks) {
  basis.validate();
  if (n_blocks < 1 || 4 * n_blocks > basis.size) {
    throw std::invalid_argument("block count " + std::to_string(n_blocks) + " does not fit basis size " +
                                std::to_string(basis.size));
  }
  return BasisMatrices<Real>(basis, 4 * n_blocks + 4);
}

template <class Real>
BlockTridiagonal<Real> assemble_blocks(const QuarticOperator<Real>& op, const BasisMatrices<Real>& m, int n_blocks) {
  if (n_blocks < 1 || 4 * n_blocks > m.basis.size) {
    throw std::invalid_argument("block count " + std::to_string(n_blocks) + " does not fit basis size " +
                                std::to_string(m.basis.size));
  }
  const auto h = assemble_banded(op, m, 4 * n_blocks + 4);
  BlockTridiagonal<Real> out;
  out.A.resize(static_cast<size_t>(n_blocks));
  out.B.resize(static_cast<size_t>(n_blocks));
  out.C.resize(static_cast<size_t>(n_blocks));
  for (int n = 0; n < n_blocks; ++n) {
    auto& a = out.A[static_cast<size_t>(n)];
    auto& b = out.B[static_cast<size_t>(n)];
    auto& c = out.C[static_cast<size_t>(n)];
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 4; ++k) {
        a(i, k) = h.at(4 * n + i, 4 * n + k);
        b(i, k) = h.at(4 * n + i, 4 * (n + 1) + k);
        c(i, k) = h.at(4 * (n + 1) + i, 4 * n + k);
      }
    }
  }
  return out;
}

template <class Real>
BlockTridiagonal<Real> assemble_blocks(const QuarticOperator<Real>& op, const BasisSpec<Real>& basis, int n_blocks) {
  return assemble_blocks(op, basis_matrices_for_blocks(basis, n_blocks), n_blocks);
}

/// Leading 4n x 4n matrix of the block system.
template <class Real>
DenseMatrix<Real> unpack(const BlockTridiagonal<Real>& blocks, int n) {
  if (n < 1 || n > blocks.n_blocks()) throw std::invalid_argument("unpack: block count out of range");
  DenseMatrix<Real> d(4 * n);
  for (int b = 0; b < n; ++b) {
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 4; ++k) {
        d(4 * b + i, 4 * b + k) = blocks.A[static_cast<size_t>(b)](i, k);
        if (b + 1 < n) {
          d(4 * b + i, 4 * (b + 1) + k) = blocks.B[static_cast<size_t>(b)](i, k);
          d(4 * (b + 1) + i, 4 * b + k) = blocks.C[static_cast<size_t>(b)](i, k);
        }
      }
    }
  }
  return d;
}

}  // namespace relosc
