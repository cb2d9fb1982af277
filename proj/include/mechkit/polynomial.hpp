#pragma once

#include <vector>

#include "mechkit/rational.hpp"

namespace mechkit {

// Polynomial with rational coefficients, ascending powers. The zero
// polynomial is an empty coefficient list.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  static Polynomial constant(const Rational& c) { return Polynomial({c}); }

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero poly
  bool is_zero() const { return coeffs_.empty(); }

  Rational coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Rational(0); }

  Rational operator()(const Rational& x) const {
    Rational acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return Polynomial();
    std::vector<Rational> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * Rational(static_cast<std::int64_t>(k));
    return Polynomial(std::move(d));
  }

  // Antiderivative with zero constant term.
  Polynomial antiderivative() const {
    if (coeffs_.empty()) return Polynomial();
    std::vector<Rational> a(coeffs_.size() + 1);
    a[0] = Rational(0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
      a[k + 1] = coeffs_[k] / Rational(static_cast<std::int64_t>(k + 1));
    return Polynomial(std::move(a));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Rational& s, const Polynomial& p) {
    std::vector<Rational> c(p.coeffs_);
    for (auto& v : c) v = v * s;
    return Polynomial(std::move(c));
  }
  // p(s*x) as a polynomial in x.
  Polynomial compose_scale(const Rational& s) const {
    std::vector<Rational> c(coeffs_);
    Rational pow(1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = c[k] * pow;
      pow = pow * s;
    }
    return Polynomial(std::move(c));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }
  std::vector<Rational> coeffs_;
};

}  // namespace mechkit
