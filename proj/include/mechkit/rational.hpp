#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mechkit {

// Exact rational arithmetic on a 64-bit numerator/denominator, with all
// intermediates widened to 128 bits. Values are kept normalized (gcd 1,
// positive denominator). Results that do not fit back into 64 bits after
// reduction throw rational_overflow; the toolkit's domains (grid points,
// piecewise coefficients, bid lattices) are sized so this does not happen
// in normal use.
class rational_overflow : public std::overflow_error {
 public:
  rational_overflow() : std::overflow_error("rational: value out of 64-bit range") {}
};

class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("rational: zero denominator");
    __int128 nn = n, dd = d;
    if (dd < 0) { nn = -nn; dd = -dd; }
    reduce_and_store(nn, dd);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }

  // Exact conversion of a finite double (doubles are dyadic rationals).
  // Returns nullopt when the value needs more than 64 bits.
  static std::optional<Rational> from_double(double x);

  // Parses "3", "-7/2", "0.01", "1.25e-2" style literals exactly.
  static Rational parse(const std::string& text);

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("rational: division by zero");
    __int128 n = i128(a.num_) * b.den_;
    __int128 d = i128(a.den_) * b.num_;
    if (d < 0) { n = -n; d = -d; }
    return make(n, d);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 lhs = i128(a.num_) * b.den_;
    __int128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  // floor(*this), as an integer-valued rational.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

 private:
  static constexpr __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

  static Rational make(__int128 n, __int128 d) {
    Rational r;
    r.reduce_and_store(n, d);
    return r;
  }

  void reduce_and_store(__int128 n, __int128 d);

  std::int64_t num_;
  std::int64_t den_;
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace mechkit
