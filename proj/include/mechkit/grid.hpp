#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mechkit/rational.hpp"

namespace mechkit {

// Finite evaluation grid on the nonnegative axis. Either an arithmetic
// progression start, start+step, ..., stop, or an explicit point list.
// Extra points can be attached to both forms.
struct GridSpec {
  Rational start{0};
  Rational stop{2};
  Rational step{1, 100};
  std::vector<Rational> explicit_points;  // when nonempty, replaces the progression
  std::vector<Rational> extra_points;

  static GridSpec range(const Rational& start, const Rational& stop, const Rational& step) {
    GridSpec g;
    g.start = start;
    g.stop = stop;
    g.step = step;
    g.validate();
    return g;
  }
  static GridSpec from_points(std::vector<Rational> pts) {
    GridSpec g;
    g.explicit_points = std::move(pts);
    if (g.explicit_points.empty()) throw std::invalid_argument("grid: empty point list");
    return g;
  }

  void validate() const {
    if (start < Rational(0)) throw std::invalid_argument("grid: start < 0");
    if (explicit_points.empty()) {
      if (!(stop > start)) throw std::invalid_argument("grid: stop <= start");
      if (!(step > Rational(0))) throw std::invalid_argument("grid: step <= 0");
      Rational count = (stop - start) / step;
      if (count > Rational(1'000'000)) throw std::invalid_argument("grid: too many points");
    }
  }

  // Sorted, duplicate-free.
  std::vector<Rational> points() const;
};

// The point set used by the checking operations: the grid itself plus every
// breakpoint of the curves under test and the points breakpoint +/- step/2,
// clipped to [start, stop] (explicit grids: to [min, max]).
std::vector<Rational> effective_points(const GridSpec& grid,
                                       const std::vector<Rational>& breakpoints);

}  // namespace mechkit
