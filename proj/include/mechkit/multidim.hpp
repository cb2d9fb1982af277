#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mechkit/curve.hpp"
#include "mechkit/exec.hpp"
#include "mechkit/interval.hpp"
#include "mechkit/payment.hpp"

namespace mechkit {

using Vec = std::vector<Rational>;

// Vector allocation rules f: R^n>=0 -> R^n>=0, restricted to variants whose
// ray reductions
//
//   f_x(t) = f(t * x) . x        (dot product)
//
// land in the supported scalar curve families, so every ray can be handled
// by the one-dimensional machinery:
//
//   diagonal      -- coordinate j applies its own scalar curve to x_j;
//                    coordinate curves must be piecewise families (their
//                    argument gets rescaled along rays)
//   linear        -- f(x) = M x with a nonnegative rational matrix
//   bundle_table  -- allocations tabulated on a finite lattice of quantity
//                    vectors, constant on cells (left-closed per axis);
//                    the table must be monotone along the axes
class VectorAllocation {
 public:
  static VectorAllocation diagonal(std::vector<AllocationCurve> coordinates);
  static VectorAllocation linear(std::vector<std::vector<Rational>> matrix);
  static VectorAllocation bundle_table(int dimension, const Rational& cell_size,
                                       std::vector<int> cells_per_axis,
                                       std::vector<Vec> table);

  enum class Kind { diagonal, linear, bundle_table };
  Kind kind() const;
  int dimension() const;

  const std::vector<AllocationCurve>& coordinates() const;      // diagonal
  const std::vector<std::vector<Rational>>& matrix() const;     // linear
  const Rational& cell_size() const;                            // bundle_table
  const std::vector<int>& cells_per_axis() const;               // bundle_table
  const std::vector<Vec>& table() const;                        // bundle_table

 private:
  struct Node;
  explicit VectorAllocation(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Exact pointwise evaluation.
Vec eval(const VectorAllocation& f, const Vec& x);

Rational dot(const Vec& a, const Vec& b);

// ---- ray reduction -----------------------------------------------------------

struct RayReduction {
  Vec ray;                // the base vector x
  AllocationCurve curve;  // t -> f(t x) . x, as a scalar curve
};

RayReduction ray_reduce(const VectorAllocation& f, const Vec& x);

struct RayWitness {
  Vec ray;
  MonotoneWitness scalar;  // t-values with f_x decreasing
};

struct RayMonotonicityReport {
  bool monotone = true;
  std::optional<RayWitness> witness;
};

RayMonotonicityReport is_ray_monotone(const VectorAllocation& f, const std::vector<Vec>& rays);

// ---- payments ------------------------------------------------------------------

class NotRayMonotoneError : public std::domain_error {
 public:
  NotRayMonotoneError(Vec ray, MonotonicityReport report)
      : std::domain_error("payment: allocation is not monotone along the ray"),
        ray(std::move(ray)),
        report(std::move(report)) {}
  Vec ray;
  MonotonicityReport report;
};

// g(x) = C + f(x) . x - integral over [0, 1] of f(z x) . x dz, evaluated as
// the one-dimensional payment of the ray reduction at t = 1. Exact for every
// supported variant. Throws NotRayMonotoneError when f_x is not monotone.
Rational myerson_payment_nd_exact(const VectorAllocation& f, const Vec& x,
                                  const Rational& pivot = Rational(0));
IntervalBound myerson_payment_nd(const VectorAllocation& f, const Vec& x,
                                 const Rational& pivot = Rational(0));

// ---- vector incentive check ------------------------------------------------------

struct NdPairWitness {
  Vec x, y;
  Rational lhs{0};  // g(y) - g(x)
  Rational rhs{0};  // (f(y) - f(x)) . x, or the scalar-route bound
  bool scalar_route = false;
};

struct NdCheckOptions {
  Rational tol{0};  // everything on this path is exact rational
  Execution exec = Execution::parallel;
  // scalar cross-check grid for the ray route (values of s and t)
  std::vector<Rational> scalar_grid{Rational(0),     Rational(1, 4), Rational(1, 2),
                                    Rational(3, 4),  Rational(1),    Rational(3, 2),
                                    Rational(2)};
};

struct NdViolationReport {
  bool passed = true;
  std::vector<NdPairWitness> witnesses;
  std::size_t pairs_checked = 0;
  std::size_t scalar_checks = 0;
};

// Checks g(y) - g(x) >= (f(y) - f(x)) . x for every supplied pair, and
// cross-checks the equivalent scalar inequality on the ray through each
// pair's base vector over the scalar grid. Every supported variant evaluates
// exactly, so verdicts are two-valued here: the inconclusive outcome of the
// scalar checker cannot arise.
NdViolationReport check_ic_nd(const VectorAllocation& f,
                              const std::function<Rational(const Vec&)>& g,
                              const std::vector<std::pair<Vec, Vec>>& pairs,
                              const NdCheckOptions& opts = {});

// Deterministic seeded sample vectors in [0, max]^n with small denominators,
// plus the axis unit vectors and the all-ones diagonal.
std::vector<Vec> sample_vectors(int count, int dimension, std::uint64_t seed,
                                const Rational& max_coord = Rational(10));
std::vector<std::pair<Vec, Vec>> sample_pairs(int count, int dimension, std::uint64_t seed,
                                              const Rational& max_coord = Rational(10));

}  // namespace mechkit
