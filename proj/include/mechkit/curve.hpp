#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "mechkit/exec.hpp"
#include "mechkit/grid.hpp"
#include "mechkit/interval.hpp"
#include "mechkit/polynomial.hpp"
#include "mechkit/rational.hpp"

namespace mechkit {

// Symbolic allocation curves f: R>=0 -> R>=0. Closed families only; every
// value is immutable after construction and cheap to copy (shared nodes).
//
// Piecewise families use left-closed pieces: with breakpoints q_1 < ... < q_k
// the pieces are [0, q_1], (q_1, q_2], ..., (q_k, inf), so the value AT a
// breakpoint is the lower piece's value. The unit step with threshold q is
// 0 on [0, q] and 1 above it.
enum class CurveKind {
  piecewise_constant,
  piecewise_polynomial,
  cantor,       // Cantor function on [0,1], extended by 1 for x > 1
  step_series,  // sum over n >= 1 of 2^-n * (unit step at 1 - 2^-n)
  sum,
  scale,
};

class AllocationCurve {
 public:
  static AllocationCurve piecewise_constant(std::vector<Rational> breakpoints,
                                            std::vector<Rational> values);
  static AllocationCurve step(const Rational& threshold);  // 0 on [0, q], 1 on (q, inf)
  static AllocationCurve constant(const Rational& c);
  static AllocationCurve piecewise_polynomial(std::vector<Rational> breakpoints,
                                              std::vector<Polynomial> pieces);
  static AllocationCurve polynomial(Polynomial p);  // single piece on [0, inf)
  static AllocationCurve cantor();
  static AllocationCurve step_series();
  static AllocationCurve sum(AllocationCurve left, AllocationCurve right);
  static AllocationCurve scale(const Rational& factor, AllocationCurve inner);

  CurveKind kind() const;

  // piecewise accessors (invalid_argument on wrong kind)
  const std::vector<Rational>& breakpoints() const;
  const std::vector<Rational>& values() const;      // piecewise_constant
  const std::vector<Polynomial>& pieces() const;    // piecewise_polynomial
  const AllocationCurve& left() const;              // sum
  const AllocationCurve& right() const;             // sum
  const Rational& factor() const;                   // scale
  const AllocationCurve& inner() const;             // scale

  // Breakpoints of every piecewise node in the expression, plus the step
  // locations 1 - 2^-n (up to a fixed horizon) for step_series nodes.
  // Sorted, duplicate-free. Used for grid injection by the checkers.
  std::vector<Rational> collect_breakpoints() const;

  // True when the curve has no Cantor leaf, i.e. eval_exact/integrate_exact
  // succeed at every rational point in range.
  bool supports_exact() const;

  bool structurally_equal(const AllocationCurve& other) const;

 private:
  struct Node;
  explicit AllocationCurve(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  friend struct CurveAccess;
};

struct MonotoneWitness {
  Rational x;
  Rational y;  // x < y and f(x) > f(y)
  double fx = 0.0;
  double fy = 0.0;
};

struct MonotonicityReport {
  bool monotone = true;
  std::optional<MonotoneWitness> witness;  // present iff !monotone
};

// ---- evaluation ------------------------------------------------------------

// Exact rational value, when the curve supports it at x (always, except for
// curves containing a Cantor leaf, and for step_series points so close to 1
// that the step index would overflow 64-bit rationals).
std::optional<Rational> eval_exact(const AllocationCurve& curve, const Rational& x);

// Point value as a double. Total on x >= 0.
double eval(const AllocationCurve& curve, double x);

// Rigorous enclosure of f(x); zero-width (exact) whenever eval_exact works.
IntervalBound eval_bracket(const AllocationCurve& curve, const Rational& x);

// Cantor function value from the ternary-digit expansion truncated at
// `depth` digits: the true value lies in [result, result + 2^-depth].
// Exposed because the truncation depth is part of the evaluation contract.
long double cantor_value_truncated(const Rational& x, int depth = 64);

// ---- integration -----------------------------------------------------------

struct IntegrationOptions {
  double tolerance = 1e-9;            // target bracket width for refined leaves
  std::size_t max_cells = std::size_t{1} << 24;
  // Force the uniform-partition Darboux refiner for Cantor and step-series
  // leaves instead of their tight closed/self-similar routes. The refiner
  // stops at max_cells and may then return a bracket wider than `tolerance`
  // (never an error).
  bool uniform_darboux = false;
  Execution exec = Execution::parallel;
};

// Integral of f over [a, b], 0 <= a <= b. Exact (zero-width) for curves made
// of piecewise and step-series nodes; rigorous bracket otherwise.
IntervalBound integrate(const AllocationCurve& curve, const Rational& a, const Rational& b,
                        const IntegrationOptions& opts = {});

// Exact route only; nullopt when some leaf has no closed form.
std::optional<Rational> integrate_exact(const AllocationCurve& curve, const Rational& a,
                                        const Rational& b);

// Uniform-partition Darboux bracket for a monotone curve, refined until the
// width is at most opts.tolerance or opts.max_cells is reached. Kept public
// as the reference bracketing engine (and for the kernel benchmark).
IntervalBound darboux_uniform(const AllocationCurve& curve, const Rational& a, const Rational& b,
                              const IntegrationOptions& opts = {});

// ---- monotonicity ----------------------------------------------------------

// Structural check for piecewise families (exact for pieces of degree <= 2;
// grid fallback above), known-monotone for cantor/step_series, grid check for
// composites that are not monotone-by-construction.
MonotonicityReport is_monotone(const AllocationCurve& curve, const GridSpec& grid);
MonotonicityReport is_monotone(const AllocationCurve& curve);  // default grid

}  // namespace mechkit
