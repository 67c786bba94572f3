#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdlib>
#include <ios>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "relosc/complex.hpp"

namespace relosc {

/// Variable-precision MPFR real. Expression templates are off so that
/// `auto` in generic code always holds a value.
using hp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;
using hp_complex = Complex<hp_real>;

inline constexpr int kMinDigits = 30;

/// Precision budget shared by every solver stage.
///
/// `digits` is the number of decimal digits results are trusted to;
/// arithmetic runs at `digits + guard_digits`.
struct PrecisionContext {
  int digits = kMinDigits;
  int guard_digits = 10;
  hp_real newton_tol;             // 10^-(digits-10)
  hp_real det_rescale_threshold;  // 10^100

  int working_digits() const { return digits + guard_digits; }

  template <class Real>
  Real newton_tol_as() const {
    return static_cast<Real>(newton_tol);
  }
  template <class Real>
  Real rescale_threshold_as() const {
    return static_cast<Real>(det_rescale_threshold);
  }
};

/// Sets the process-wide MPFR default precision for the lifetime of the
/// scope and restores the previous value on exit. Every hp_real created
/// inside the scope carries the working precision of the context.
class PrecisionScope {
 public:
  explicit PrecisionScope(const PrecisionContext& ctx) : PrecisionScope(ctx.working_digits()) {}
  explicit PrecisionScope(int digits10) : saved_(hp_real::default_precision()) {
    hp_real::default_precision(static_cast<unsigned>(digits10));
  }
  ~PrecisionScope() { hp_real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

/// PrecisionScope for multiprecision Real, no-op for built-in floating types.
template <class Real>
class WorkingPrecision {
 public:
  explicit WorkingPrecision(const PrecisionContext& ctx) {
    if constexpr (!std::is_floating_point_v<Real>) scope_.emplace(ctx);
  }

 private:
  std::optional<PrecisionScope> scope_;
};

inline PrecisionContext make_context(int digits, int guard_digits = 10) {
  if (digits < kMinDigits) {
    throw std::invalid_argument("digits below minimum (" + std::to_string(digits) + " < " +
                                std::to_string(kMinDigits) + ")");
  }
  if (guard_digits < 5) throw std::invalid_argument("guard_digits below minimum (5)");
  PrecisionContext ctx;
  ctx.digits = digits;
  ctx.guard_digits = guard_digits;
  PrecisionScope scope(ctx);
  ctx.newton_tol = boost::multiprecision::pow(hp_real(10), -(digits - 10));
  ctx.det_rescale_threshold = boost::multiprecision::pow(hp_real(10), 100);
  return ctx;
}

/// Copy of x carried at the current default precision. Values created
/// before a PrecisionScope keep their own precision, and unary functions
/// propagate it, so inputs are promoted where they enter a computation.
template <class Real>
Real promote(const Real& x) {
  if constexpr (std::is_floating_point_v<Real>) {
    return x;
  } else {
    Real y(x);
    y.precision(Real::default_precision());
    return y;
  }
}

template <class Real>
Complex<Real> promote(const Complex<Real>& z) {
  return {promote(z.real()), promote(z.imag())};
}

/// Unit roundoff of the current working precision.
template <class Real>
Real epsilon() {
  if constexpr (std::is_floating_point_v<Real>) {
    return std::numeric_limits<Real>::epsilon();
  } else {
    const Real one(1);
    const auto bits = static_cast<int>(mpfr_get_prec(one.backend().data()));
    return ldexp(one, 1 - bits);
  }
}

template <class Real>
Real pi() {
  using std::acos;
  return acos(Real(-1));
}

namespace detail {

struct SciParts {
  bool negative = false;
  std::string mantissa;  // "d.ddd" without sign
  long exponent = 0;
};

template <class Real>
SciParts sci_parts(const Real& x, int digits) {
  std::string s;
  if constexpr (std::is_floating_point_v<Real>) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    s = buf;
  } else {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, x.backend().data());
    s = buf;
    mpfr_free_str(buf);
  }
  SciParts p;
  std::string_view v(s);
  if (!v.empty() && (v.front() == '-' || v.front() == '+')) {
    p.negative = v.front() == '-';
    v.remove_prefix(1);
  }
  const auto e = v.find_first_of("eE");
  p.mantissa = std::string(v.substr(0, e));
  if (e != std::string_view::npos) p.exponent = std::strtol(std::string(v.substr(e + 1)).c_str(), nullptr, 10);
  // -0 prints as zero without sign
  if (p.mantissa.find_first_not_of("0.") == std::string::npos) p.negative = false;
  return p;
}

}  // namespace detail

/// Scientific decimal form "d.ddd[e<exp>]" with `digits` significant digits.
/// The exponent suffix is dropped when it is zero unless `force_exponent`.
template <class Real>
std::string to_decimal_string(const Real& x, int digits, bool force_exponent = false) {
  if (digits < 1) throw std::invalid_argument("digits must be positive");
  const auto p = detail::sci_parts(x, digits);
  std::string out = p.negative ? "-" : "";
  out += p.mantissa;
  if (force_exponent || p.exponent != 0) out += "e" + std::to_string(p.exponent);
  return out;
}

/// "re + i im" with sign-explicit imaginary part; the imaginary magnitude
/// always carries its exponent, e.g. "1.0005017620 + i 1.17374083059e-144".
template <class Real>
std::string to_decimal_string(const Complex<Real>& z, int digits) {
  const auto im = detail::sci_parts(z.imag(), digits);
  std::string out = to_decimal_string(z.real(), digits);
  out += im.negative ? " - i " : " + i ";
  out += im.mantissa + "e" + std::to_string(im.exponent);
  return out;
}

template <class Real = hp_real>
Real parse_real(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty number");
  const std::string str(s);
  if constexpr (std::is_floating_point_v<Real>) {
    size_t used = 0;
    Real v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("malformed number: " + str);
    return v;
  } else {
    try {
      return Real(str);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed number: " + str);
    }
  }
}

/// Inverse of to_decimal_string for complex values; a bare real is accepted.
template <class Real = hp_real>
Complex<Real> parse_complex(std::string_view s) {
  for (std::string_view sep : {" + i ", " - i "}) {
    const auto pos = s.find(sep);
    if (pos == std::string_view::npos) continue;
    Real re = parse_real<Real>(s.substr(0, pos));
    Real im = parse_real<Real>(s.substr(pos + sep.size()));
    if (sep[1] == '-') im = -im;
    return {re, im};
  }
  return Complex<Real>(parse_real<Real>(s));
}

}  // namespace relosc
