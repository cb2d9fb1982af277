#pragma once

#include <optional>
#include <vector>

#include "mechkit/curve.hpp"
#include "mechkit/exec.hpp"
#include "mechkit/grid.hpp"
#include "mechkit/payment.hpp"

namespace mechkit {

// Grid verification of the core incentive inequality
//
//   g(y) - g(x) >= x * (f(y) - f(x))   for all ordered pairs (x, y)
//
// and its sandwich form x * (f(y) - f(x)) <= g(y) - g(x) <= y * (f(y) - f(x)).
// All pairs over a finite grid are checked; the grid always contains the
// curves' breakpoints and their +/- step/2 neighbors, where violations of the
// piecewise families must show up first.
//
// Comparisons are exact rational arithmetic whenever both curves admit exact
// evaluation, and bracket-aware otherwise: a pair is a violation only when
// its most favorable bracket reading fails, a verified pass only when its
// least favorable reading holds, and inconclusive in between. Inconclusive
// is a third verdict, distinct from pass and fail.

struct PairWitness {
  Rational x{0};
  Rational y{0};
  double lhs = 0.0;    // g(y) - g(x)
  double rhs = 0.0;    // x * (f(y) - f(x)), or the y-side bound for sandwich
  double slack = 0.0;  // lhs - rhs for the lower side; rhs - lhs for the upper
  // sandwich side: 0 = lower inequality (the core one), 1 = upper
  int side = 0;
};

enum class Verdict { passed, violated, inconclusive };

struct ViolationReport {
  Verdict verdict = Verdict::passed;
  bool passed = true;  // == witnesses.empty()
  std::vector<PairWitness> witnesses;     // sorted by (x, y, side)
  std::vector<PairWitness> inconclusive;  // bracket too wide to decide
  double max_slack_violation = 0.0;       // most negative witness slack
  std::size_t pairs_checked = 0;
  bool exact_path = false;  // comparisons were exact rational
};

struct CheckOptions {
  double tol = 1e-9;       // bracketed paths
  Rational exact_tol{0};   // exact rational paths
  Execution exec = Execution::parallel;
  IntegrationOptions integration{};  // how bracketed payments integrate
};

ViolationReport check_ic_pairs(const AllocationCurve& f, const PaymentCurve& g,
                               const GridSpec& grid, const CheckOptions& opts = {});

ViolationReport check_sandwich(const AllocationCurve& f, const PaymentCurve& g,
                               const GridSpec& grid, const CheckOptions& opts = {});

// ---- monotonicity necessity --------------------------------------------------

// If the core inequality holds on the grid then f is nondecreasing across
// the grid; contrapositively a decreasing pair forces at least one of its
// two orientations to violate the inequality.
struct NecessityReport {
  ViolationReport ic;
  bool monotone_on_grid = true;
  std::optional<MonotoneWitness> monotone_witness;
  // the orientation of the decreasing pair that violates the inequality
  std::optional<PairWitness> forced_violation;
  bool implication_holds = true;  // ic passed implies monotone on grid
};

NecessityReport check_monotone_necessity(const AllocationCurve& f, const PaymentCurve& g,
                                         const GridSpec& grid, const CheckOptions& opts = {});

// ---- derivative identity -----------------------------------------------------

// At points where f is a polynomial piece (and [x-h, x+h] stays inside the
// piece), the central finite difference of g matches x * f'(x) up to
// tol plus the usual h^2 truncation allowance.
class PointAtBreakpointError : public std::invalid_argument {
 public:
  explicit PointAtBreakpointError(const Rational& x)
      : std::invalid_argument("derivative check: [x-h, x+h] crosses a breakpoint at x = " +
                              x.str()),
        point(x) {}
  Rational point;
};

struct DerivativePoint {
  Rational x{0};
  double finite_difference = 0.0;
  double analytic = 0.0;  // x * f'(x)
  double error = 0.0;
  double allowance = 0.0;
  bool ok = true;
};

struct DerivativeReport {
  bool passed = true;
  std::vector<DerivativePoint> points;
};

DerivativeReport check_derivative_identity(const AllocationCurve& f, const PaymentCurve& g,
                                           const std::vector<Rational>& points, const Rational& h,
                                           double tol);

// ---- revenue equivalence -----------------------------------------------------

// Two payments that both satisfy the inequality for the same f differ by a
// constant. Both hypotheses are checked first; a violated hypothesis is a
// precondition failure, not a verdict about equivalence.
struct RevenueReport {
  bool precondition_ok = true;
  int failing_payment = 0;  // 1 or 2 when a hypothesis fails
  std::optional<PairWitness> precondition_witness;
  ViolationReport ic1, ic2;

  bool passed = false;
  // the constant by which g2 exceeds g1 (midpoint of the observed range)
  std::optional<double> constant_diff;
  std::optional<Rational> constant_exact;
  // points of maximal deviation when the difference is not constant
  std::vector<Rational> spread_witnesses;
  double spread = 0.0;  // max - min of g2 - g1 over the grid
};

RevenueReport check_revenue_equivalence(const AllocationCurve& f, const PaymentCurve& g1,
                                        const PaymentCurve& g2, const GridSpec& grid,
                                        const CheckOptions& opts = {});

}  // namespace mechkit
