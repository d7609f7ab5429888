#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

#include "ggk/rational.hpp"

namespace ggk {

// Complex numbers with exact rational components. std::complex is only
// specified for floating-point types, hence this small stand-in.
struct RatC {
  Rat re{};
  Rat im{};

  RatC() = default;
  RatC(Rat r) : re(std::move(r)) {}
  RatC(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  friend RatC operator+(const RatC& a, const RatC& b) { return {a.re + b.re, a.im + b.im}; }
  friend RatC operator-(const RatC& a, const RatC& b) { return {a.re - b.re, a.im - b.im}; }
  friend RatC operator*(const RatC& a, const RatC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  RatC& operator+=(const RatC& o) { re += o.re; im += o.im; return *this; }
  RatC& operator-=(const RatC& o) { re -= o.re; im -= o.im; return *this; }
  RatC& operator*=(const RatC& o) { *this = *this * o; return *this; }
  friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  using Magnitude = double;
  using AbsSq = double;
  static constexpr bool exact = false;
  static constexpr bool complex_valued = false;
  static const char* name() { return "binary64"; }
  static double conj(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static double abs(double v) { return std::abs(v); }
  static double abs_sq(double v) { return v * v; }
  static double to_dbl(double v) { return v; }
  static std::complex<double> to_cdbl(double v) { return {v, 0.0}; }
  static double from_rat(const Rat& r) { return to_double(r); }
  static bool is_real(double) { return true; }
  static double real_part(double v) { return v; }
};

template <>
struct ScalarTraits<std::complex<double>> {
  using Magnitude = double;
  using AbsSq = double;
  static constexpr bool exact = false;
  static constexpr bool complex_valued = true;
  static const char* name() { return "complex-binary64"; }
  static std::complex<double> conj(const std::complex<double>& v) { return std::conj(v); }
  static bool is_zero(const std::complex<double>& v) { return v == std::complex<double>{}; }
  static double abs(const std::complex<double>& v) { return std::abs(v); }
  static double abs_sq(const std::complex<double>& v) { return std::norm(v); }
  static double to_dbl(const std::complex<double>& v) { return v.real(); }
  static std::complex<double> to_cdbl(const std::complex<double>& v) { return v; }
  static std::complex<double> from_rat(const Rat& r) { return {to_double(r), 0.0}; }
  static bool is_real(const std::complex<double>& v) { return v.imag() == 0.0; }
  static double real_part(const std::complex<double>& v) { return v.real(); }
};

template <>
struct ScalarTraits<Rat> {
  using Magnitude = Rat;
  using AbsSq = Rat;
  static constexpr bool exact = true;
  static constexpr bool complex_valued = false;
  static const char* name() { return "rational"; }
  static Rat conj(const Rat& v) { return v; }
  static bool is_zero(const Rat& v) { return v.is_zero(); }
  static Rat abs(const Rat& v) { return rat_abs(v); }
  static Rat abs_sq(const Rat& v) { return v * v; }
  static double to_dbl(const Rat& v) { return to_double(v); }
  static std::complex<double> to_cdbl(const Rat& v) { return {to_double(v), 0.0}; }
  static Rat from_rat(const Rat& r) { return r; }
  static bool is_real(const Rat&) { return true; }
  static Rat real_part(const Rat& v) { return v; }
};

template <>
struct ScalarTraits<RatC> {
  using Magnitude = double;
  using AbsSq = Rat;
  static constexpr bool exact = true;
  static constexpr bool complex_valued = true;
  static const char* name() { return "complex-rational"; }
  static RatC conj(const RatC& v) { return {v.re, -v.im}; }
  static bool is_zero(const RatC& v) { return v.re.is_zero() && v.im.is_zero(); }
  static double abs(const RatC& v) { return std::hypot(to_double(v.re), to_double(v.im)); }
  static Rat abs_sq(const RatC& v) { return v.re * v.re + v.im * v.im; }
  static double to_dbl(const RatC& v) { return to_double(v.re); }
  static std::complex<double> to_cdbl(const RatC& v) { return {to_double(v.re), to_double(v.im)}; }
  static RatC from_rat(const Rat& r) { return RatC(r); }
  static bool is_real(const RatC& v) { return v.im.is_zero(); }
  static Rat real_part(const RatC& v) { return v.re; }
};

template <class S>
concept Scalar = requires { typename ScalarTraits<S>::Magnitude; };

template <Scalar S>
inline double magnitude_as_double(const typename ScalarTraits<S>::Magnitude& m) {
  if constexpr (std::is_same_v<typename ScalarTraits<S>::Magnitude, Rat>) {
    return to_double(m);
  } else {
    return m;
  }
}

} // namespace ggk
