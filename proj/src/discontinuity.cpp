#include "mechkit/discontinuity.hpp"

#include <algorithm>
#include <stdexcept>

namespace mechkit {

struct DiscontinuitySet::Node {
  Kind kind = Kind::empty;
  std::vector<Rational> points;
  Rational limit{0}, offset{0}, ratio{0};
  int level = 1;
  std::vector<DiscontinuitySet> parts;
};

DiscontinuitySet DiscontinuitySet::empty() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::empty;
  return DiscontinuitySet(std::move(n));
}

DiscontinuitySet DiscontinuitySet::finite(std::vector<Rational> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.empty()) return empty();
  if (points.front() < Rational(0))
    throw std::invalid_argument("discontinuity set: negative point");
  auto n = std::make_shared<Node>();
  n->kind = Kind::finite;
  n->points = std::move(points);
  return DiscontinuitySet(std::move(n));
}

DiscontinuitySet DiscontinuitySet::geometric(const Rational& limit, const Rational& offset,
                                             const Rational& ratio, int level) {
  if (!(offset > Rational(0))) throw std::invalid_argument("geometric set: offset must be > 0");
  if (!(ratio > Rational(0)) || !(ratio < Rational(1)))
    throw std::invalid_argument("geometric set: ratio must be in (0, 1)");
  if (limit - offset < Rational(0))
    throw std::invalid_argument("geometric set: first point below 0");
  if (level < 1 || level > 8) throw std::invalid_argument("geometric set: level out of range");
  auto n = std::make_shared<Node>();
  n->kind = Kind::geometric;
  n->limit = limit;
  n->offset = offset;
  n->ratio = ratio;
  n->level = level;
  return DiscontinuitySet(std::move(n));
}

DiscontinuitySet DiscontinuitySet::union_of(std::vector<DiscontinuitySet> parts) {
  std::vector<DiscontinuitySet> kept;
  for (auto& p : parts) {
    if (p.is_empty()) continue;
    kept.push_back(std::move(p));
  }
  if (kept.empty()) return empty();
  if (kept.size() == 1) return kept.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::union_set;
  n->parts = std::move(kept);
  return DiscontinuitySet(std::move(n));
}

DiscontinuitySet::Kind DiscontinuitySet::kind() const { return node_->kind; }

namespace {
[[noreturn]] void set_wrong_kind() {
  throw std::invalid_argument("discontinuity set: accessor on wrong kind");
}
}  // namespace

const std::vector<Rational>& DiscontinuitySet::points() const {
  if (node_->kind != Kind::finite) set_wrong_kind();
  return node_->points;
}
const Rational& DiscontinuitySet::limit() const {
  if (node_->kind != Kind::geometric) set_wrong_kind();
  return node_->limit;
}
const Rational& DiscontinuitySet::offset() const {
  if (node_->kind != Kind::geometric) set_wrong_kind();
  return node_->offset;
}
const Rational& DiscontinuitySet::ratio() const {
  if (node_->kind != Kind::geometric) set_wrong_kind();
  return node_->ratio;
}
int DiscontinuitySet::level() const {
  if (node_->kind != Kind::geometric) set_wrong_kind();
  return node_->level;
}
const std::vector<DiscontinuitySet>& DiscontinuitySet::parts() const {
  if (node_->kind != Kind::union_set) set_wrong_kind();
  return node_->parts;
}

namespace {

void enumerate_geometric(const Rational& limit, const Rational& offset, const Rational& ratio,
                         int level, int per_level, std::vector<Rational>& out) {
  Rational r = offset;
  for (int n = 0; n < per_level; ++n) {
    try {
      const Rational point = limit - r;
      if (level == 1) {
        out.push_back(point);
      } else {
        // level-(k-1) copy accumulating to `point` from below, with offset
        // r * (1 - ratio) / 2 so copies between consecutive outer points
        // stay disjoint
        enumerate_geometric(point, r * (Rational(1) - ratio) / Rational(2), ratio, level - 1,
                            per_level, out);
      }
      r = r * ratio;
    } catch (const rational_overflow&) {
      return;  // deeper points exist but exceed 64-bit rationals; sample ends here
    }
  }
}

}  // namespace

std::vector<Rational> DiscontinuitySet::enumerate(int per_level) const {
  std::vector<Rational> out;
  switch (node_->kind) {
    case Kind::empty:
      break;
    case Kind::finite:
      out = node_->points;
      break;
    case Kind::geometric:
      enumerate_geometric(node_->limit, node_->offset, node_->ratio, node_->level, per_level, out);
      break;
    case Kind::union_set:
      for (const auto& p : node_->parts) {
        auto sub = p.enumerate(per_level);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool DiscontinuitySet::structurally_equal(const DiscontinuitySet& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::empty:
      return true;
    case Kind::finite:
      return node_->points == other.node_->points;
    case Kind::geometric:
      return node_->limit == other.node_->limit && node_->offset == other.node_->offset &&
             node_->ratio == other.node_->ratio && node_->level == other.node_->level;
    case Kind::union_set: {
      if (node_->parts.size() != other.node_->parts.size()) return false;
      for (std::size_t i = 0; i < node_->parts.size(); ++i)
        if (!node_->parts[i].structurally_equal(other.node_->parts[i])) return false;
      return true;
    }
  }
  return false;
}

DiscontinuitySet derived_set(const DiscontinuitySet& s) {
  switch (s.kind()) {
    case DiscontinuitySet::Kind::empty:
    case DiscontinuitySet::Kind::finite:
      return DiscontinuitySet::empty();
    case DiscontinuitySet::Kind::geometric: {
      if (s.level() == 1) return DiscontinuitySet::finite({s.limit()});
      // limit points: each inner copy's accumulation target (the level-1
      // family), the lower-level structure around those targets, and the
      // outer limit itself
      return DiscontinuitySet::union_of(
          {DiscontinuitySet::geometric(s.limit(), s.offset(), s.ratio(), s.level() - 1),
           DiscontinuitySet::geometric(s.limit(), s.offset(), s.ratio(), 1),
           DiscontinuitySet::finite({s.limit()})});
    }
    case DiscontinuitySet::Kind::union_set: {
      std::vector<DiscontinuitySet> derived;
      for (const auto& p : s.parts()) derived.push_back(derived_set(p));
      return DiscontinuitySet::union_of(std::move(derived));
    }
  }
  return DiscontinuitySet::empty();
}

SpeciesClassification classify_species(const DiscontinuitySet& s) {
  SpeciesClassification result;
  DiscontinuitySet cur = s;
  int levels = 0;
  while (!cur.is_empty()) {
    cur = derived_set(cur);
    if (cur.is_empty()) break;
    ++levels;
    if (levels > 64) {
      // unreachable for these representations; kept as a guard
      result.status = SpeciesClassification::Status::unsupported;
      result.type = -1;
      return result;
    }
  }
  result.status = SpeciesClassification::Status::first_species;
  result.type = levels;
  return result;
}

DiscontinuitySet discontinuities(const AllocationCurve& curve) {
  switch (curve.kind()) {
    case CurveKind::piecewise_constant: {
      std::vector<Rational> jumps;
      const auto& v = curve.values();
      const auto& bps = curve.breakpoints();
      for (std::size_t j = 0; j < bps.size(); ++j)
        if (v[j] != v[j + 1]) jumps.push_back(bps[j]);
      return DiscontinuitySet::finite(std::move(jumps));
    }
    case CurveKind::piecewise_polynomial: {
      std::vector<Rational> jumps;
      const auto& p = curve.pieces();
      const auto& bps = curve.breakpoints();
      for (std::size_t j = 0; j < bps.size(); ++j)
        if (p[j](bps[j]) != p[j + 1](bps[j])) jumps.push_back(bps[j]);
      return DiscontinuitySet::finite(std::move(jumps));
    }
    case CurveKind::cantor:
      return DiscontinuitySet::empty();
    case CurveKind::step_series:
      // jumps at 1 - 2^-n for n >= 1, accumulating at 1
      return DiscontinuitySet::geometric(Rational(1), Rational(1, 2), Rational(1, 2), 1);
    case CurveKind::sum:
      return DiscontinuitySet::union_of(
          {discontinuities(curve.left()), discontinuities(curve.right())});
    case CurveKind::scale:
      if (curve.factor().is_zero()) return DiscontinuitySet::empty();
      return discontinuities(curve.inner());
  }
  return DiscontinuitySet::empty();
}

}  // namespace mechkit
