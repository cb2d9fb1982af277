#include "mechkit/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace mechkit {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

}  // namespace

void Rational::reduce_and_store(__int128 n, __int128 d) {
  // callers guarantee d > 0
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > kInt64Max || n < kInt64Min || d > kInt64Max) throw rational_overflow();
  num_ = static_cast<std::int64_t>(n);
  den_ = static_cast<std::int64_t>(d);
}

std::optional<Rational> Rational::from_double(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  // 53 mantissa bits
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  // strip trailing zero bits so the exponent range check is as permissive as possible
  while (scaled != 0 && (scaled & 1) == 0) {
    scaled >>= 1;
    ++exp;
  }
  if (exp >= 0) {
    if (exp > 62) return std::nullopt;
    __int128 n = static_cast<__int128>(scaled) << exp;
    if (n > std::numeric_limits<std::int64_t>::max() ||
        n < std::numeric_limits<std::int64_t>::min())
      return std::nullopt;
    return Rational(static_cast<std::int64_t>(n), 1);
  }
  if (-exp > 62) return std::nullopt;
  return Rational(scaled, std::int64_t{1} << -exp);
}

Rational Rational::parse(const std::string& text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("rational: cannot parse '" + text + "'");
  };
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  Rational value(0);
  bool any_digit = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    value = value * Rational(10) + Rational(text[i] - '0');
    any_digit = true;
    ++i;
  }
  if (i < text.size() && text[i] == '/') {
    ++i;
    std::int64_t den = 0;
    bool den_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      den = den * 10 + (text[i] - '0');
      den_digit = true;
      ++i;
    }
    skip_ws();
    if (!any_digit || !den_digit || i != text.size()) fail();
    Rational r = value / Rational(den);
    return neg ? -r : r;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    Rational scale(1);
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      value = value * Rational(10) + Rational(text[i] - '0');
      scale = scale * Rational(10);
      any_digit = true;
      ++i;
    }
    value = value / scale;
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    int e = 0;
    bool e_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i] - '0');
      e_digit = true;
      if (e > 18) fail();
      ++i;
    }
    if (!e_digit) fail();
    Rational p(1);
    for (int k = 0; k < e; ++k) p = p * Rational(10);
    value = eneg ? value / p : value * p;
  }
  skip_ws();
  if (!any_digit || i != text.size()) fail();
  return neg ? -value : value;
}

}  // namespace mechkit
