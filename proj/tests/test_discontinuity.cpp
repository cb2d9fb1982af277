#include <doctest.h>

#include <random>

#include "mechkit/discontinuity.hpp"
#include "test_support.hpp"

using namespace mechkit;

TEST_CASE("discontinuities of the built-in families") {
  const auto h = discontinuities(AllocationCurve::step(Rational(1, 2)));
  REQUIRE(h.kind() == DiscontinuitySet::Kind::finite);
  CHECK(h.points() == std::vector<Rational>{Rational(1, 2)});

  // continuous piecewise polynomial: pieces meet at the breakpoint
  const auto cont = AllocationCurve::piecewise_polynomial(
      {Rational(1)},
      {Polynomial({Rational(0), Rational(1)}), Polynomial({Rational(1)})});  // x then 1
  CHECK(discontinuities(cont).is_empty());

  CHECK(discontinuities(AllocationCurve::cantor()).is_empty());

  const auto s = discontinuities(AllocationCurve::step_series());
  REQUIRE(s.kind() == DiscontinuitySet::Kind::geometric);
  CHECK(s.limit() == Rational(1));
  CHECK(s.level() == 1);
  const auto pts = s.enumerate(4);
  CHECK(pts == std::vector<Rational>{Rational(1, 2), Rational(3, 4), Rational(7, 8),
                                     Rational(15, 16)});
}

TEST_CASE("discontinuities of composites form unions") {
  const auto f = AllocationCurve::sum(AllocationCurve::step(Rational(1, 2)),
                                      AllocationCurve::step_series());
  const auto s = discontinuities(f);
  REQUIRE(s.kind() == DiscontinuitySet::Kind::union_set);
  CHECK(s.parts().size() == 2);
  // scaling by zero wipes the set
  CHECK(discontinuities(AllocationCurve::scale(Rational(0), AllocationCurve::step(Rational(1))))
            .is_empty());
}

TEST_CASE("derived sets of the basic representations") {
  CHECK(derived_set(DiscontinuitySet::empty()).is_empty());
  CHECK(derived_set(DiscontinuitySet::finite({Rational(1, 2), Rational(3, 4)})).is_empty());

  const auto geo = DiscontinuitySet::geometric(Rational(1), Rational(1, 2), Rational(1, 2));
  const auto d = derived_set(geo);
  REQUIRE(d.kind() == DiscontinuitySet::Kind::finite);
  CHECK(d.points() == std::vector<Rational>{Rational(1)});
}

TEST_CASE("derived set confirmed by enumeration: points crowd every claimed limit") {
  const auto geo = DiscontinuitySet::geometric(Rational(1), Rational(1, 2), Rational(1, 2));
  const auto limits = derived_set(geo).enumerate(64);
  for (const Rational& limit : limits) {
    for (int k = 1; k <= 6; ++k) {
      const Rational eps(1, 1 << (2 * k));
      bool found = false;
      for (const Rational& p : geo.enumerate(64))
        if (p != limit && (p - limit).abs() < eps) found = true;
      CHECK(found);
    }
  }
  // and a finite set crowds nothing: gaps are bounded below
  const auto fin = DiscontinuitySet::finite({Rational(0), Rational(1, 3), Rational(2)});
  const auto pts = fin.enumerate();
  Rational min_gap = pts[1] - pts[0];
  for (std::size_t i = 1; i + 1 < pts.size(); ++i)
    min_gap = min(min_gap, pts[i + 1] - pts[i]);
  CHECK(min_gap > Rational(0));
  CHECK(derived_set(fin).is_empty());
}

TEST_CASE("species classification of the named examples") {
  CHECK(classify_species(DiscontinuitySet::empty()).type == 0);
  CHECK(classify_species(DiscontinuitySet::finite({Rational(1, 2)})).type == 0);

  const auto series_set = discontinuities(AllocationCurve::step_series());
  CHECK(classify_species(series_set).type == 1);

  // geometric sequences accumulating to a geometric sequence of limits
  const auto two_level = DiscontinuitySet::geometric(Rational(1), Rational(1, 2), Rational(1, 2), 2);
  CHECK(classify_species(two_level).type == 2);
}

TEST_CASE("classification drops by exactly one under the derived-set operator") {
  std::mt19937_64 eng(41);
  for (int i = 0; i < 40; ++i) {
    const int level = static_cast<int>(testsupport::draw(eng, 1, 4));
    const Rational ratio(1, testsupport::draw(eng, 2, 5));
    const Rational limit = testsupport::random_rational(eng, 40, 4) + Rational(2);
    const auto s = DiscontinuitySet::geometric(limit, Rational(1), ratio, level);
    auto cur = s;
    for (int expect = level; expect >= 0; --expect) {
      const auto cls = classify_species(cur);
      CHECK(cls.status == SpeciesClassification::Status::first_species);
      CHECK(cls.type == expect);
      cur = derived_set(cur);
    }
    CHECK(cur.is_empty());
  }
}

TEST_CASE("two-level enumeration: inner copies stay between consecutive outer limits") {
  const auto s = DiscontinuitySet::geometric(Rational(1), Rational(1, 2), Rational(1, 2), 2);
  const auto inner = s.enumerate(6);
  REQUIRE(!inner.empty());
  for (const auto& p : inner) {
    CHECK(p >= Rational(0));
    CHECK(p < Rational(1));
  }
  // every level-1 limit has inner points arbitrarily close below it
  for (const Rational& limit : {Rational(1, 2), Rational(3, 4), Rational(7, 8)}) {
    bool close = false;
    for (const auto& p : s.enumerate(12))
      if (p < limit && limit - p < Rational(1, 500)) close = true;
    CHECK(close);
  }
}

TEST_CASE("geometric construction rejects bad parameters") {
  CHECK_THROWS_AS(DiscontinuitySet::geometric(Rational(1), Rational(0), Rational(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscontinuitySet::geometric(Rational(1), Rational(1, 2), Rational(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscontinuitySet::geometric(Rational(1), Rational(2), Rational(1, 2)),
                  std::invalid_argument);  // first point below zero
}

TEST_CASE("union collapses empties and classification takes the max part") {
  const auto u = DiscontinuitySet::union_of(
      {DiscontinuitySet::empty(), DiscontinuitySet::finite({Rational(1)}),
       DiscontinuitySet::geometric(Rational(2), Rational(1, 2), Rational(1, 2))});
  CHECK(classify_species(u).type == 1);
  CHECK(DiscontinuitySet::union_of({DiscontinuitySet::empty()}).is_empty());
  const auto single = DiscontinuitySet::union_of({DiscontinuitySet::finite({Rational(3)})});
  CHECK(single.kind() == DiscontinuitySet::Kind::finite);
}
