#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "ggk/errors.hpp"

namespace ggk {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

inline Rat rat(long long num, long long den = 1) {
  if (den == 0) raise(ErrorCode::BadParameters, "rational with zero denominator");
  BigInt n(num), d(den);
  if (d < 0) {
    n = -n;
    d = -d;
  }
  return Rat(n, d);
}

// Every finite double is p/2^k; the conversion below is exact.
Rat rat_from_double(double x);

// Accepts "p/q", "p", and plain decimal strings like "0.25".
Rat parse_rational(const std::string& text);

std::string format_rational(const Rat& r);

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

} // namespace ggk
