#include "mechkit/grid.hpp"

#include <algorithm>

namespace mechkit {

std::vector<Rational> GridSpec::points() const {
  validate();
  std::vector<Rational> pts;
  if (!explicit_points.empty()) {
    pts = explicit_points;
  } else {
    for (Rational x = start; x <= stop; x += step) pts.push_back(x);
    if (pts.empty() || pts.back() != stop) pts.push_back(stop);
  }
  pts.insert(pts.end(), extra_points.begin(), extra_points.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<Rational> effective_points(const GridSpec& grid,
                                       const std::vector<Rational>& breakpoints) {
  std::vector<Rational> pts = grid.points();
  const Rational lo = pts.front();
  const Rational hi = pts.back();
  const Rational half_step =
      grid.explicit_points.empty() ? grid.step / Rational(2) : Rational(0);
  auto push_clipped = [&](const Rational& p) {
    if (p >= lo && p <= hi) pts.push_back(p);
  };
  for (const Rational& q : breakpoints) {
    push_clipped(q);
    if (!half_step.is_zero()) {
      push_clipped(q - half_step);
      push_clipped(q + half_step);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace mechkit
