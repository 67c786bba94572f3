#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relosc/block_matrix.hpp"
#include "relosc/complex.hpp"
#include "relosc/dense_eigen.hpp"
#include "relosc/operator.hpp"
#include "relosc/scalar.hpp"

namespace relosc {

enum class SolverErrorKind {
  singular_b,
  singular_p,
  no_convergence,
  basin_escape,
  no_plateau,
  negative_discriminant,
  theta_plateau_fail,
  nonpositive_gap,
  missing_levels,
  size_cap,
};

inline std::string solver_error_name(SolverErrorKind k) {
  switch (k) {
    case SolverErrorKind::singular_b: return "SingularB";
    case SolverErrorKind::singular_p: return "SingularP";
    case SolverErrorKind::no_convergence: return "NoConvergence";
    case SolverErrorKind::basin_escape: return "BasinEscape";
    case SolverErrorKind::no_plateau: return "NoPlateau";
    case SolverErrorKind::negative_discriminant: return "NegativeDiscriminant";
    case SolverErrorKind::theta_plateau_fail: return "ThetaPlateauFail";
    case SolverErrorKind::nonpositive_gap: return "NonpositiveGap";
    case SolverErrorKind::missing_levels: return "MissingLevels";
    case SolverErrorKind::size_cap: return "SizeCap";
  }
  return "Unknown";
}

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverErrorKind kind, const std::string& what, int index = -1)
      : std::runtime_error(solver_error_name(kind) + ": " + what), kind_(kind), index_(index) {}
  SolverErrorKind kind() const { return kind_; }
  int index() const { return index_; }

 private:
  SolverErrorKind kind_;
  int index_;
};

enum class Bound { upper, lower, none };

inline std::string bound_name(Bound b) {
  switch (b) {
    case Bound::upper: return "upper";
    case Bound::lower: return "lower";
    default: return "none";
  }
}

/// det P_n = scaled * exp(4 * log_scale).
template <class Real>
struct DetValue {
  Complex<Real> scaled;
  Real log_scale;

  bool is_zero() const { return scaled == Complex<Real>(); }
  Real log_abs() const {
    using std::log;
    return log(abs(scaled)) + 4 * log_scale;
  }
  /// this / other as an ordinary complex number.
  Complex<Real> ratio(const DetValue& other) const {
    using std::exp;
    return scaled / other.scaled * exp(4 * (log_scale - other.log_scale));
  }
};

template <class Real>
struct MomentPolynomialState {
  Mat4<Real> P_prev, P_curr;
  Real log_scale;
  int index = 0;
};

enum class Rescaling {
  scalar,  // plain recurrence, entries divided by a common power when large
  matrix,  // right-normalized: tracks R_k = P_{k-1} P_k^{-1}
};

template <class Real>
struct EigenvalueEstimate {
  Complex<Real> lambda;
  Real residual;  // |f / f'| at the last Newton step
  Bound bound = Bound::none;
  int n_blocks = 0;
  int iterations = 0;
};

struct NewtonOptions {
  int max_iter = 200;
  double basin_radius = 1.0;
};

/// Matrix-moment recurrence
///   P_0 = I, P_1 = B_0^{-1}(lambda - A_0),
///   P_n = B_{n-1}^{-1}((lambda - A_{n-1}) P_{n-1} - C_{n-2} P_{n-2})
/// over a fixed block system. The LU factors of the B_k are computed once.
template <class Real>
class MomentRecurrence {
 public:
  MomentRecurrence(const BlockTridiagonal<Real>& blocks, const PrecisionContext& ctx, int n_max = -1)
      : blocks_(&blocks), ctx_(ctx) {
    WorkingPrecision<Real> wp(ctx_);
    const int n = n_max < 0 ? blocks.n_blocks() : n_max;
    if (n < 1 || n > blocks.n_blocks()) throw std::invalid_argument("moment recurrence: block count out of range");
    const Real eps = epsilon<Real>();
    b_lu_.reserve(static_cast<size_t>(n));
    b_det_.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      const auto& b = blocks.B[static_cast<size_t>(k)];
      Lu4<Real> lu(b);
      const Real scale = b.max_abs();
      if (lu.singular() || scale == 0 || abs(lu.det()) <= eps * scale * scale * scale * scale) {
        throw SolverError(SolverErrorKind::singular_b, "coupling block B_" + std::to_string(k) + " is singular", k);
      }
      b_det_.push_back(lu.det());
      b_lu_.push_back(std::move(lu));
    }
    threshold_ = ctx_.rescale_threshold_as<Real>();
  }

  int n_max() const { return static_cast<int>(b_lu_.size()); }
  const PrecisionContext& context() const { return ctx_; }
  const BlockTridiagonal<Real>& blocks() const { return *blocks_; }

  /// P_{n-1}, P_n with a common scalar rescaling.
  MomentPolynomialState<Real> state(const Complex<Real>& lambda, int n) const {
    WorkingPrecision<Real> wp(ctx_);
    check_n(n);
    using std::log;
    MomentPolynomialState<Real> st;
    st.P_prev = Mat4<Real>();
    st.P_curr = Mat4<Real>::identity();
    st.log_scale = Real(0);
    const Real inv_threshold = Real(1) / threshold_;
    for (int k = 0; k < n; ++k) {
      Mat4<Real> rhs = shifted(lambda, k) * st.P_curr;
      if (k > 0) rhs -= blocks_->C[static_cast<size_t>(k - 1)] * st.P_prev;
      st.P_prev = std::move(st.P_curr);
      st.P_curr = b_lu_[static_cast<size_t>(k)].solve(rhs);
      const Real m = std::max(st.P_curr.max_abs(), st.P_prev.max_abs());
      if (m > threshold_ || (m < inv_threshold && m != 0)) {
        st.P_curr /= m;
        st.P_prev /= m;
        st.log_scale += log(m);
      }
      st.index = k + 1;
    }
    return st;
  }

  DetValue<Real> det_p(const Complex<Real>& lambda, int n, Rescaling mode = Rescaling::matrix) const {
    WorkingPrecision<Real> wp(ctx_);
    check_n(n);
    if (mode == Rescaling::matrix) {
      if (auto r = riccati(lambda, n, nullptr)) return *r;
    }
    const auto st = state(lambda, n);
    return normalize(DetValue<Real>{Lu4<Real>(st.P_curr).det(), st.log_scale});
  }

  /// R_n = P_{n-1} P_n^{-1} together with det P_n; nullopt if an
  /// intermediate Schur step was exactly singular.
  std::optional<DetValue<Real>> riccati(const Complex<Real>& lambda, int n, Mat4<Real>* r_out) const {
    WorkingPrecision<Real> wp(ctx_);
    check_n(n);
    Mat4<Real> r;  // R_0 = 0
    DetValue<Real> d{Complex<Real>(Real(1)), Real(0)};
    for (int k = 0; k < n; ++k) {
      Mat4<Real> s = shifted(lambda, k);
      if (k > 0) s -= blocks_->C[static_cast<size_t>(k - 1)] * r;
      Lu4<Real> lu(s);
      if (lu.singular()) {
        if (k + 1 == n && r_out == nullptr) return DetValue<Real>{Complex<Real>(), Real(0)};
        return std::nullopt;
      }
      d.scaled *= lu.det() / b_det_[static_cast<size_t>(k)];
      d = normalize(std::move(d));
      r = lu.solve(blocks_->B[static_cast<size_t>(k)]);
    }
    if (r_out != nullptr) *r_out = std::move(r);
    return d;
  }

 private:
  void check_n(int n) const {
    if (n < 1 || n > n_max()) {
      throw std::invalid_argument("det_p: n=" + std::to_string(n) + " outside [1, " + std::to_string(n_max()) + "]");
    }
  }

  Mat4<Real> shifted(const Complex<Real>& lambda, int k) const {
    Mat4<Real> m = Mat4<Real>() - blocks_->A[static_cast<size_t>(k)];
    for (int i = 0; i < 4; ++i) m(i, i) += lambda;
    return m;
  }

  DetValue<Real> normalize(DetValue<Real> d) const {
    using std::log;
    const Real a = abs(d.scaled);
    if (a == 0) return d;
    if (a > threshold_ || a * threshold_ < 1) {
      d.scaled /= a;
      d.log_scale += log(a) / 4;
    }
    return d;
  }

  const BlockTridiagonal<Real>* blocks_;
  PrecisionContext ctx_;
  std::vector<Lu4<Real>> b_lu_;
  std::vector<Complex<Real>> b_det_;
  Real threshold_;
};

template <class Real>
DetValue<Real> det_p(const BlockTridiagonal<Real>& blocks, const Complex<Real>& lambda, int n,
                     const PrecisionContext& ctx, Rescaling mode = Rescaling::matrix) {
  return MomentRecurrence<Real>(blocks, ctx, n).det_p(lambda, n, mode);
}

namespace detail {

/// Newton iteration on a function given through its DetValue, derivative by
/// central difference of the ratio f(lambda +- h) / f(lambda).
template <class Real, class F>
EigenvalueEstimate<Real> newton_on_det(F&& f, const Complex<Real>& lambda0, const PrecisionContext& ctx,
                                       const NewtonOptions& opt) {
  using std::abs;
  using std::pow;
  const Real tol = ctx.newton_tol_as<Real>();
  const Real rel_h = pow(Real(10), Real(-ctx.working_digits()) / 3);
  const Real radius(opt.basin_radius);
  EigenvalueEstimate<Real> est;
  Complex<Real> lam = promote(lambda0);
  for (int it = 1; it <= opt.max_iter; ++it) {
    const DetValue<Real> f0 = f(lam);
    est.iterations = it;
    if (f0.is_zero()) {
      est.lambda = lam;
      est.residual = Real(0);
      return est;
    }
    const Real h = rel_h * (1 + abs(lam));
    const Complex<Real> hp(h);
    const Complex<Real> rp = f(lam + hp).ratio(f0);
    const Complex<Real> rm = f(lam - hp).ratio(f0);
    const Complex<Real> dlog = (rp - rm) / (2 * h);  // f'/f
    if (dlog == Complex<Real>()) {
      throw SolverError(SolverErrorKind::no_convergence, "vanishing Newton derivative");
    }
    const Complex<Real> step = Complex<Real>(Real(1)) / dlog;
    lam -= step;
    est.residual = abs(step);
    if (abs(lam - lambda0) > radius) {
      throw SolverError(SolverErrorKind::basin_escape,
                        "iterate left the disk of radius " + to_decimal_string(radius, 6) + " around the seed");
    }
    if (est.residual < tol * (1 + abs(lam))) {
      est.lambda = lam;
      return est;
    }
  }
  throw SolverError(SolverErrorKind::no_convergence,
                    "Newton budget of " + std::to_string(opt.max_iter) + " iterations exceeded");
}

}  // namespace detail

/// Zero of det P_n nearest the seed (Rayleigh-Ritz value of the 4n x 4n
/// truncation).
template <class Real>
EigenvalueEstimate<Real> find_eigenvalue(const MomentRecurrence<Real>& rec, const Complex<Real>& lambda0, int n,
                                         const NewtonOptions& opt = {}) {
  WorkingPrecision<Real> wp(rec.context());
  auto est = detail::newton_on_det<Real>([&](const Complex<Real>& l) { return rec.det_p(l, n); }, lambda0,
                                         rec.context(), opt);
  est.bound = Bound::upper;
  est.n_blocks = n;
  return est;
}

template <class Real>
EigenvalueEstimate<Real> find_eigenvalue(const BlockTridiagonal<Real>& blocks, const Complex<Real>& lambda0, int n,
                                         const PrecisionContext& ctx, const NewtonOptions& opt = {}) {
  return find_eigenvalue(MomentRecurrence<Real>(blocks, ctx, n), lambda0, n, opt);
}

/// Zero of det(P_n(l) - P_n(0) P_{n-1}(0)^{-1} P_{n-1}(l)). With
/// R_n = P_{n-1} P_n^{-1} this is det P_n(l) det(I - R_n(0)^{-1} R_n(l)),
/// evaluated up to the constant det R_n(0)^{-1}.
template <class Real>
EigenvalueEstimate<Real> lower_bound_eigenvalue(const MomentRecurrence<Real>& rec, const Complex<Real>& lambda0,
                                                int n, const NewtonOptions& opt = {}) {
  WorkingPrecision<Real> wp(rec.context());
  Mat4<Real> r0;
  const Complex<Real> zero;
  const auto d0 = rec.riccati(zero, n, &r0);
  if (!d0 || d0->is_zero()) {
    throw SolverError(SolverErrorKind::singular_p, "P_n(0) is singular", n);
  }
  const Lu4<Real> r0_lu(r0);
  const Real scale = r0.max_abs();
  if (r0_lu.singular() || abs(r0_lu.det()) <= epsilon<Real>() * scale * scale * scale * scale) {
    throw SolverError(SolverErrorKind::singular_p, "P_{n-1}(0) is singular", n - 1);
  }
  auto f = [&](const Complex<Real>& l) {
    Mat4<Real> r;
    auto d = rec.riccati(l, n, &r);
    if (!d) throw SolverError(SolverErrorKind::no_convergence, "singular intermediate moment step");
    d->scaled *= det(r0 - r);
    return *d;
  };
  auto est = detail::newton_on_det<Real>(f, lambda0, rec.context(), opt);
  est.bound = Bound::lower;
  est.n_blocks = n;
  return est;
}

template <class Real>
EigenvalueEstimate<Real> lower_bound_eigenvalue(const BlockTridiagonal<Real>& blocks, const Complex<Real>& lambda0,
                                                int n, const PrecisionContext& ctx, const NewtonOptions& opt = {}) {
  return lower_bound_eigenvalue(MomentRecurrence<Real>(blocks, ctx, n), lambda0, n, opt);
}

inline constexpr int kDenseOracleCap = 64;

/// Every eigenvalue of the leading 4n x 4n matrix, sorted by real part then
/// imaginary part.
template <class Real>
std::vector<Complex<Real>> dense_eigensolve_oracle(const BlockTridiagonal<Real>& blocks, int n,
                                                   const PrecisionContext& ctx) {
  if (4 * n > kDenseOracleCap) {
    throw SolverError(SolverErrorKind::size_cap, "dense oracle limited to " + std::to_string(kDenseOracleCap) +
                                                     " rows, got " + std::to_string(4 * n));
  }
  WorkingPrecision<Real> wp(ctx);
  return dense_eigenvalues(unpack(blocks, n));
}

/// Eigenvalues of a block system whose leading 4n x 4n matrix is diagonal
/// (the harmonic limit at sigma^2 = c_2), sorted ascending by real part.
template <class Real>
std::vector<Complex<Real>> diagonal_levels(const BlockTridiagonal<Real>& blocks, int n) {
  const auto d = unpack(blocks, n);
  std::vector<Complex<Real>> out;
  for (int i = 0; i < d.size(); ++i) {
    for (int k = 0; k < d.size(); ++k) {
      if (i != k && d(i, k) != Complex<Real>()) throw std::invalid_argument("diagonal_levels: matrix is not diagonal");
    }
    out.push_back(d(i, i));
  }
  std::sort(out.begin(), out.end(), [](const Complex<Real>& x, const Complex<Real>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

template <class Real>
struct StabilizationResult {
  Real value;
  Real flatness;  // min_j |E(N_{j+1}) - E(N_j)|
  int n_blocks = 0;
  std::vector<Complex<Real>> values;
};

struct StabilizationOptions {
  double threshold = 1e-8;
  NewtonOptions newton{};
};

/// Plateau reading of a level of the real-frame operator, whose truncations
/// eventually pick up the -x^4 continuum. basis_sizes are basis-function
/// counts (multiples of 4), ascending.
template <class Real>
StabilizationResult<Real> stabilization_scan(const QuarticOperator<Real>& op, const Real& sigma,
                                             const std::vector<int>& basis_sizes, int target_index,
                                             const PrecisionContext& ctx, const StabilizationOptions& opt = {}) {
  using std::abs;
  using std::sqrt;
  if (basis_sizes.size() < 2) {
    throw SolverError(SolverErrorKind::no_plateau, "need at least two basis sizes");
  }
  if (!std::is_sorted(basis_sizes.begin(), basis_sizes.end())) {
    throw std::invalid_argument("basis sizes must be ascending");
  }
  if (target_index < 0) throw std::invalid_argument("target index must be non-negative");
  WorkingPrecision<Real> wp(ctx);
  const int max_size = basis_sizes.back();
  const BasisSpec<Real> basis{sigma, max_size};
  const int max_blocks = max_size / 4;
  const auto blocks = assemble_blocks(op, basis, max_blocks);
  const MomentRecurrence<Real> rec(blocks, ctx, max_blocks);

  StabilizationResult<Real> out;
  Complex<Real> seed = sqrt(op.c[2] * op.kinetic) * Real(2 * target_index + 1);
  for (int size : basis_sizes) {
    if (size % 4 != 0 || size < 8) throw std::invalid_argument("basis size must be a multiple of 4, at least 8");
    const auto est = find_eigenvalue(rec, seed, size / 4, opt.newton);
    out.values.push_back(est.lambda);
    seed = est.lambda;
  }
  size_t best = 0;
  for (size_t j = 0; j + 1 < out.values.size(); ++j) {
    const Real d = abs(out.values[j + 1] - out.values[j]);
    if (j == 0 || d < out.flatness) {
      out.flatness = d;
      best = j;
    }
  }
  out.value = out.values[best + 1].real();
  out.n_blocks = basis_sizes[best + 1] / 4;
  if (out.flatness > Real(opt.threshold)) {
    throw SolverError(SolverErrorKind::no_plateau,
                      "smallest size increment changes the level by " + to_decimal_string(out.flatness, 6));
  }
  return out;
}

}  // namespace relosc
