#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "mechkit/curve.hpp"
#include "mechkit/rational.hpp"

namespace mechkit {

// Symbolic sets of discontinuity points on the nonnegative axis, closed
// under the derived-set (limit point) operator.
//
// The geometric variant at level 1 is the set {limit - offset * ratio^n :
// n >= 0}, strictly increasing to `limit`. At level k >= 2 it is the union,
// over the level-1 points L_n, of a level-(k-1) copy accumulating to L_n
// from below (with offsets shrunk so the copies stay disjoint between
// consecutive L_n). Dense discontinuity sets are deliberately not
// representable.
class DiscontinuitySet {
 public:
  enum class Kind { empty, finite, geometric, union_set };

  static DiscontinuitySet empty();
  static DiscontinuitySet finite(std::vector<Rational> points);
  static DiscontinuitySet geometric(const Rational& limit, const Rational& offset,
                                    const Rational& ratio, int level = 1);
  // Drops empty parts; zero parts collapse to empty, one part to itself.
  static DiscontinuitySet union_of(std::vector<DiscontinuitySet> parts);

  Kind kind() const;
  bool is_empty() const { return kind() == Kind::empty; }
  const std::vector<Rational>& points() const;          // finite
  const Rational& limit() const;                        // geometric
  const Rational& offset() const;                       // geometric
  const Rational& ratio() const;                        // geometric
  int level() const;                                    // geometric
  const std::vector<DiscontinuitySet>& parts() const;   // union_set

  // Finite sample of the set: geometric families are cut off at `per_level`
  // points per level. Sorted, duplicate-free.
  std::vector<Rational> enumerate(int per_level = 8) const;

  bool structurally_equal(const DiscontinuitySet& other) const;

 private:
  struct Node;
  explicit DiscontinuitySet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Set of limit points. For these representations the operator is exact:
// finite sets drop to empty, a level-k geometric family drops to its
// level-(k-1) family together with its level-1 family of inner limits and
// the outer limit itself, and a (finite) union maps to the union of its
// parts' derived sets -- a finite union contributes no limit points beyond
// those of its parts.
DiscontinuitySet derived_set(const DiscontinuitySet& s);

struct SpeciesClassification {
  enum class Status { first_species, not_first_species, unsupported };
  Status status = Status::first_species;
  // Number of nonempty derived levels: finite sets have type 0, a set whose
  // derived set is finite and nonempty has type 1, and so on.
  int type = 0;
};

SpeciesClassification classify_species(const DiscontinuitySet& s);

// Jump points of the curve. Piecewise families yield the breakpoints with an
// actual jump; the step series yields its geometric family accumulating at 1;
// sums yield the union of their parts' sets (points where two jumps happen to
// cancel are retained). The Cantor curve is continuous.
DiscontinuitySet discontinuities(const AllocationCurve& curve);

}  // namespace mechkit
