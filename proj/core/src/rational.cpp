#include "ggk/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ggk {

Rat rat_from_double(double x) {
  if (!std::isfinite(x)) raise(ErrorCode::BadParameters, "cannot convert non-finite double");
  if (x == 0.0) return Rat(0);
  int exp = 0;
  double mant = std::frexp(x, &exp); // x = mant * 2^exp, |mant| in [0.5, 1)
  // 53 doublings make the mantissa integral.
  for (int i = 0; i < 53 && mant != std::floor(mant); ++i) {
    mant *= 2.0;
    --exp;
  }
  BigInt num(static_cast<long long>(mant));
  if (exp >= 0) {
    return Rat(num << exp, BigInt(1));
  }
  return Rat(num, BigInt(1) << (-exp));
}

namespace {

// Base-ten only; BigInt's own string constructor would read a leading
// zero as an octal prefix.
BigInt parse_decimal_int(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size()) throw std::invalid_argument("no digits");
  BigInt value(0);
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("bad digit");
    value *= 10;
    value += text[i] - '0';
  }
  return negative ? BigInt(-value) : value;
}

} // namespace

Rat parse_rational(const std::string& text) {
  if (text.empty()) raise(ErrorCode::ParseError, "empty rational literal");
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num = parse_decimal_int(text.substr(0, slash));
      BigInt den = parse_decimal_int(text.substr(slash + 1));
      if (den == 0) raise(ErrorCode::ParseError, "zero denominator in: " + text);
      if (den < 0) {
        num = -num;
        den = -den;
      }
      return Rat(num, den);
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
      const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      const std::size_t frac_len = text.size() - dot - 1;
      BigInt num = parse_decimal_int(digits);
      BigInt den(1);
      for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
      return Rat(num, den);
    }
    return Rat(parse_decimal_int(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    raise(ErrorCode::ParseError, "bad rational literal: " + text);
  }
}

std::string format_rational(const Rat& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) {
    os << "/" << denominator(r);
  }
  return os.str();
}

} // namespace ggk
