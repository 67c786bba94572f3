#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>
#include <utility>

namespace relosc {

// Minimal complex number over an arbitrary real field. std::complex is
// unspecified for non-fundamental value types, so multiprecision code
// goes through this instead.
template <class Real>
class Complex {
 public:
  Complex() : re_(0), im_(0) {}
  Complex(Real re) : re_(std::move(re)), im_(0) {}  // NOLINT(google-explicit-constructor)
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
  template <class T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, Real>)
  Complex(T re) : re_(re), im_(0) {}  // NOLINT(google-explicit-constructor)

  const Real& real() const { return re_; }
  const Real& imag() const { return im_; }
  void real(Real v) { re_ = std::move(v); }
  void imag(Real v) { im_ = std::move(v); }

  Complex& operator+=(const Complex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re_ *= s;
    im_ *= s;
    return *this;
  }
  Complex& operator/=(const Real& s) {
    re_ /= s;
    im_ /= s;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real d = o.re_ * o.re_ + o.im_ * o.im_;
    Real r = (re_ * o.re_ + im_ * o.im_) / d;
    im_ = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(r);
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const Real& s) { return a *= s; }
  friend Complex operator*(const Real& s, Complex a) { return a *= s; }
  friend Complex operator/(Complex a, const Real& s) { return a /= s; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re_, -a.im_); }
  friend bool operator==(const Complex& a, const Complex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Complex& z) {
    return os << '(' << z.re_ << ',' << z.im_ << ')';
  }

 private:
  Real re_;
  Real im_;
};

template <class Real>
Complex<Real> conj(const Complex<Real>& z) {
  return {z.real(), -z.imag()};
}

template <class Real>
Real norm(const Complex<Real>& z) {
  return z.real() * z.real() + z.imag() * z.imag();
}

template <class Real>
Real abs(const Complex<Real>& z) {
  using std::abs;
  using std::sqrt;
  // hypot without the overflow guard: both supported real types have
  // exponent range far beyond what the solvers produce.
  return sqrt(norm(z));
}

template <class Real>
Real arg(const Complex<Real>& z) {
  using std::atan2;
  return atan2(z.imag(), z.real());
}

template <class Real>
Complex<Real> polar(const Real& r, const Real& phi) {
  using std::cos;
  using std::sin;
  return {r * cos(phi), r * sin(phi)};
}

/// Principal square root; branch cut on the negative real axis, Re >= 0.
template <class Real>
Complex<Real> sqrt(const Complex<Real>& z) {
  using std::abs;
  using std::sqrt;
  const Real m = relosc::abs(z);
  if (m == 0) return {};
  Real t = sqrt((m + abs(z.real())) / 2);
  if (z.real() >= 0) return {t, z.imag() / (2 * t)};
  return {abs(z.imag()) / (2 * t), z.imag() < 0 ? Real(-t) : t};
}

template <class Real>
Complex<Real> exp(const Complex<Real>& z) {
  using std::exp;
  return polar(Real(exp(z.real())), z.imag());
}

/// Principal logarithm.
template <class Real>
Complex<Real> log(const Complex<Real>& z) {
  using std::log;
  return {log(relosc::abs(z)), relosc::arg(z)};
}

template <class Real>
Complex<Real> ipow(Complex<Real> z, unsigned n) {
  Complex<Real> r(Real(1));
  while (n != 0) {
    if (n & 1U) r *= z;
    z *= z;
    n >>= 1U;
  }
  return r;
}

}  // namespace relosc
