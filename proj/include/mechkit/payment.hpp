#pragma once

#include <memory>
#include <optional>
#include <stdexcept>

#include "mechkit/curve.hpp"
#include "mechkit/interval.hpp"

namespace mechkit {

// Payment rules g: R>=0 -> R. The canonical construction is the unique
// incentive-compatible rule for a monotone allocation curve f,
//
//   g(x) = C + x * f(x) - integral of f from 0 to x,
//
// with pivot constant C = g(0). Hand-built payments (for counterexamples)
// are expressed as a direct curve plus pivot, or as a perturbation of
// another payment.
enum class PaymentForm {
  myerson_closed,     // exact closed form (f supports exact evaluation)
  myerson_bracketed,  // f requires bracketed integration (Cantor leaves)
  direct,
  perturbed,
};

class NotMonotoneError : public std::domain_error {
 public:
  explicit NotMonotoneError(MonotonicityReport report)
      : std::domain_error("myerson_payment: allocation curve is not monotone"),
        report(std::move(report)) {}
  MonotonicityReport report;
};

class PaymentCurve {
 public:
  // g(x) = pivot + curve(x)
  static PaymentCurve direct(AllocationCurve g, const Rational& pivot = Rational(0));
  // g(x) = inner(x) + bump(x)
  static PaymentCurve perturbed(PaymentCurve inner, AllocationCurve bump);
  // The closed formula applied without the monotonicity gate; for building
  // the counterexamples where the formula is applied to a non-monotone f.
  static PaymentCurve myerson_unchecked(AllocationCurve f, const Rational& pivot);

  PaymentForm form() const;
  bool is_myerson() const {
    return form() == PaymentForm::myerson_closed || form() == PaymentForm::myerson_bracketed;
  }
  const AllocationCurve& base_curve() const;  // f for myerson forms, g for direct
  const Rational& pivot() const;              // myerson and direct forms
  const PaymentCurve& inner() const;          // perturbed
  const AllocationCurve& perturbation() const;  // perturbed

  bool supports_exact() const;
  std::vector<Rational> collect_breakpoints() const;

 private:
  struct Node;
  explicit PaymentCurve(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// The incentive-compatible payment rule for a monotone f. Throws
// NotMonotoneError (carrying the witness) otherwise; a non-monotone
// allocation admits no incentive-compatible payment at all.
PaymentCurve myerson_payment(const AllocationCurve& f, const Rational& pivot = Rational(0));

// Exact rational value of g(x) when every ingredient has a closed form.
std::optional<Rational> payment_exact(const PaymentCurve& g, const Rational& x);

// Enclosure of g(x); zero-width whenever payment_exact succeeds. Bracketed
// payments integrate f with `opts`.
IntervalBound eval_payment(const PaymentCurve& g, const Rational& x,
                           const IntegrationOptions& opts = {});

// The textbook integration-by-parts payment: the integral of z * f'(z) over
// [0, x], reading f' as the classical derivative wherever it is defined and
// ignoring the isolated or null set where it is not (f'(q) taken as 0 at
// jump points). Supported for the leaf families whose derivative has that
// description: piecewise constant (0 off the jumps), piecewise polynomial,
// Cantor (0 wherever defined), and the step series (0 off the jumps).
// Returns nullopt for sums and scalings.
std::optional<IntervalBound> naive_by_parts_payment(const AllocationCurve& f, const Rational& x);

}  // namespace mechkit
