#include "mechkit/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace mechkit {

struct AllocationCurve::Node {
  CurveKind kind;
  std::vector<Rational> breakpoints;
  std::vector<Rational> values;     // piecewise_constant
  std::vector<Polynomial> pieces;   // piecewise_polynomial
  std::vector<AllocationCurve> children;  // sum: {left, right}; scale: {inner}
  Rational factor{1};
};

namespace {

// index of the piece containing x under the left-closed convention:
// the number of breakpoints strictly below x.
std::size_t piece_index(const std::vector<Rational>& bps, const Rational& x) {
  return static_cast<std::size_t>(std::lower_bound(bps.begin(), bps.end(), x) - bps.begin());
}

void check_breakpoints(const std::vector<Rational>& bps) {
  for (std::size_t i = 0; i < bps.size(); ++i) {
    if (bps[i] < Rational(0)) throw std::invalid_argument("curve: negative breakpoint");
    if (i > 0 && !(bps[i - 1] < bps[i]))
      throw std::invalid_argument("curve: breakpoints not strictly increasing");
  }
}

struct PolySignCheck {
  enum class Status { nonneg, negative, needs_sampling } status;
  Rational where{0};  // a point with p(where) < 0 when status == negative
};

// Is p >= 0 on [lo, hi] (hi absent: [lo, inf))? Exact for degree <= 2.
PolySignCheck poly_nonneg_on(const Polynomial& p, const Rational& lo,
                             const std::optional<Rational>& hi) {
  using S = PolySignCheck::Status;
  const int deg = p.degree();
  if (deg <= 0) {
    if (p.coeff(0) < Rational(0)) return {S::negative, lo};
    return {S::nonneg, {}};
  }
  if (p(lo) < Rational(0)) return {S::negative, lo};
  if (hi && p(*hi) < Rational(0)) return {S::negative, *hi};
  if (deg == 1) {
    if (!hi && p.coeff(1) < Rational(0)) {
      // negative far enough right; pick a concrete point past the sign change
      Rational root = -p.coeff(0) / p.coeff(1);
      return {S::negative, max(lo, root) + Rational(1)};
    }
    return {S::nonneg, {}};
  }
  if (deg == 2) {
    const Rational a = p.coeff(2);
    if (!hi && a < Rational(0)) {
      // eventually negative: walk right until the value drops below zero
      Rational x = max(lo, Rational(1));
      for (int i = 0; i < 256; ++i) {
        if (p(x) < Rational(0)) return {S::negative, x};
        x = x * Rational(2);
      }
      return {S::negative, x};
    }
    if (a > Rational(0)) {
      const Rational vertex = -p.coeff(1) / (Rational(2) * a);
      if (vertex > lo && (!hi || vertex < *hi) && p(vertex) < Rational(0))
        return {S::negative, vertex};
    }
    return {S::nonneg, {}};
  }
  return {S::needs_sampling, {}};
}

// Sampling fallback for degree >= 3 pieces: a dense scan over the piece
// (clamped to a finite window for unbounded pieces); degree >= 3 negativity
// between sample points goes undetected.
std::optional<Rational> sampled_negative_point(const Polynomial& p, const Rational& lo,
                                               const std::optional<Rational>& hi) {
  const Rational window_hi = hi ? *hi : lo + Rational(8);
  const int n = 128;
  const Rational h = (window_hi - lo) / Rational(n);
  for (int i = 0; i <= n; ++i) {
    const Rational x = lo + Rational(i) * h;
    if (p(x) < Rational(0)) return x;
  }
  if (!hi) {
    // unbounded piece: negative leading coefficient means eventually negative
    if (p.coeffs().back() < Rational(0)) {
      Rational x = window_hi;
      for (int i = 0; i < 256; ++i) {
        if (p(x) < Rational(0)) return x;
        x = x * Rational(2);
      }
    }
  }
  return std::nullopt;
}

void check_piece_nonnegative(const Polynomial& p, const Rational& lo,
                             const std::optional<Rational>& hi) {
  auto res = poly_nonneg_on(p, lo, hi);
  if (res.status == PolySignCheck::Status::negative)
    throw std::invalid_argument("curve: piece is negative at x = " + res.where.str());
  if (res.status == PolySignCheck::Status::needs_sampling) {
    if (auto bad = sampled_negative_point(p, lo, hi))
      throw std::invalid_argument("curve: piece is negative at x = " + bad->str());
  }
}

// ---- Cantor function -------------------------------------------------------

struct CantorEval {
  long double value;
  bool exact;                      // the ternary expansion terminated
  std::optional<Rational> exact_value;  // set when exact and representable
};

CantorEval cantor_eval_impl(const Rational& x, int depth) {
  if (x <= Rational(0)) return {0.0L, true, Rational(0)};
  if (x >= Rational(1)) return {1.0L, true, Rational(1)};
  long double acc = 0.0L;
  long double bit = 0.5L;
  std::int64_t num = 0;  // acc as num / 2^d, while d stays small enough
  Rational cur = x;
  for (int d = 1; d <= depth; ++d) {
    cur = Rational(3) * cur;
    const std::int64_t digit = cur.floor();
    cur -= Rational(digit);
    if (digit == 1) {
      acc += bit;
      if (d <= 62) return {acc, true, Rational(2 * num + 1, std::int64_t{1} << d)};
      return {acc, true, std::nullopt};
    }
    num = 2 * num + digit / 2;
    if (digit == 2) acc += bit;
    if (cur.is_zero()) {
      if (d <= 62) return {acc, true, Rational(num, std::int64_t{1} << d)};
      return {acc, true, std::nullopt};
    }
    bit *= 0.5L;
  }
  return {acc, false, std::nullopt};
}

// Integral of the Cantor function from 0 to x, x in [0,1]. Uses the
// self-similar decomposition
//   I(x) = I(3x)/6                 for x in [0, 1/3]
//   I(x) = 1/12 + (x - 1/3)/2      for x in [1/3, 2/3]
//   I(x) = (x - 1/2) + I(1 - x)    for x in [2/3, 1]
// descending until the argument lands in the middle branch or the scale
// factor is negligible. The result is a tight two-sided bracket.
struct LInterval {
  long double lo, hi;
};

LInterval cantor_integral01(const Rational& x) {
  static const Rational kThird(1, 3);
  static const Rational kTwoThirds(2, 3);
  static const Rational kHalf(1, 2);
  static const Rational kTwelfth(1, 12);
  constexpr long double kPad = 0x1p-50L;  // covers accumulated rounding

  long double scale = 1.0L;
  long double t = 0.0L;
  Rational cur = x;
  for (int iter = 0; iter < 120; ++iter) {
    if (cur <= Rational(0)) return {t - kPad, t + kPad};
    if (cur >= Rational(1)) return {t + scale * 0.5L - kPad, t + scale * 0.5L + kPad};
    if (cur < kThird) {
      scale /= 6.0L;
      cur = Rational(3) * cur;
    } else if (cur <= kTwoThirds) {
      const long double v = (kTwelfth + (cur - kThird) * kHalf).to_long_double();
      return {t + scale * v - kPad, t + scale * v + kPad};
    } else {
      t += scale * (cur - kHalf).to_long_double();
      cur = Rational(1) - cur;
    }
  }
  // scale <= 6^-60 here; bound the remaining integral by [0, 1/2]
  return {t - kPad, t + scale * 0.5L + kPad};
}

// Integral of the extended Cantor function (1 above x = 1) from 0 to x.
LInterval cantor_integral_ext(const Rational& x) {
  if (x <= Rational(1)) return cantor_integral01(x);
  LInterval base = cantor_integral01(Rational(1));
  const long double extra = (x - Rational(1)).to_long_double();
  return {base.lo + extra, base.hi + extra};
}

// ---- step series -----------------------------------------------------------

// f(x) = sum over n >= 1 of 2^-n * [x > 1 - 2^-n]. The fired steps are the
// consecutive n = 1..N with 2^-n > 1 - x, so f(x) = 1 - 2^-N.
// Returns the fired-step count, or nullopt when it exceeds the cap.
std::optional<int> step_series_fired(const Rational& x, int cap) {
  if (x >= Rational(1)) return std::nullopt;  // all steps fired; callers special-case
  const Rational gap = Rational(1) - x;
  int n = 0;
  Rational pow(1, 2);
  while (pow > gap) {
    ++n;
    if (n > cap) return std::nullopt;
    pow = pow / Rational(2);
  }
  return n;
}

std::optional<Rational> step_series_value_exact(const Rational& x) {
  if (x >= Rational(1)) return Rational(1);
  auto n = step_series_fired(x, 61);
  if (!n) return std::nullopt;
  const std::int64_t den = std::int64_t{1} << *n;
  return Rational(den - 1, den);  // 1 - 2^-n
}

// Integral from 0 to x. Each fired step n contributes 2^-n * (x - (1 - 2^-n)).
// From x = 1 on, the total is 1/3 + (x - 1).
std::optional<Rational> step_series_integral0_exact(const Rational& x) {
  if (x >= Rational(1)) return Rational(1, 3) + (x - Rational(1));
  auto n = step_series_fired(x, 30);  // 4^-n terms must stay in 64 bits
  if (!n) return std::nullopt;
  Rational total(0);
  Rational pow(1, 2);
  for (int k = 1; k <= *n; ++k) {
    total += pow * (x - (Rational(1) - pow));
    pow = pow / Rational(2);
  }
  return total;
}

// Bracket fallback for points too close to 1 for exact rationals.
LInterval step_series_integral0_bracket(const Rational& x) {
  if (x >= Rational(1)) {
    const long double v = (Rational(1, 3) + (x - Rational(1))).to_long_double();
    return {v - 0x1p-60L, v + 0x1p-60L};
  }
  long double total = 0.0L;
  long double pow = 0.5L;
  const long double xd = x.to_long_double();
  for (int n = 1; n <= 62; ++n) {
    if (!(xd > 1.0L - pow)) break;
    total += pow * (xd - (1.0L - pow));
    pow *= 0.5L;
  }
  // unfired tail is zero; remaining fired terms (n > 62) are < 2^-62 each
  return {total - 0x1p-50L, total + 0x1p-50L};
}

// ---- fast double-valued evaluator for the Darboux kernel -------------------

// Closure tree evaluating the curve at double arguments, together with a
// bound on the absolute error of one evaluation on [0, xmax]. The Cantor
// leaf runs a fixed-point ternary scan (39 reliable digits); everything else
// is exact up to ordinary rounding. darboux_uniform pads its bracket by the
// accumulated bound.
using FastEval = std::function<long double(double)>;

struct FastCurve {
  FastEval f;
  long double err;  // per-evaluation absolute error bound
};

long double cantor_fast(double x) {
  if (x <= 0.0) return 0.0L;
  if (x >= 1.0) return 1.0L;
  auto u = static_cast<std::uint64_t>(static_cast<long double>(x) * 0x1p62L);
  long double acc = 0.0L;
  long double bit = 0.5L;
  constexpr std::uint64_t kMask = (std::uint64_t{1} << 62) - 1;
  for (int d = 0; d < 39; ++d) {
    const std::uint64_t u3 = 3 * u;
    const std::uint64_t digit = u3 >> 62;
    u = u3 & kMask;
    if (digit == 1) return acc + bit;
    if (digit == 2) acc += bit;
    if (u == 0) return acc;
    bit *= 0.5L;
  }
  return acc;
}

long double step_series_fast(double x) {
  if (x >= 1.0) return 1.0L;
  const double gap = 1.0 - x;
  long double pow = 0.5L;
  long double value = 0.0L;
  int n = 0;
  while (pow > gap && n < 62) {
    value += pow;
    ++n;
    pow *= 0.5L;
  }
  return value;
}

FastCurve build_fast_curve(const AllocationCurve& c, double xmax);

}  // namespace

// ---- construction ----------------------------------------------------------

AllocationCurve AllocationCurve::piecewise_constant(std::vector<Rational> breakpoints,
                                                    std::vector<Rational> values) {
  check_breakpoints(breakpoints);
  if (values.size() != breakpoints.size() + 1)
    throw std::invalid_argument("curve: need one more value than breakpoints");
  for (const auto& v : values)
    if (v < Rational(0)) throw std::invalid_argument("curve: negative value");
  auto n = std::make_shared<Node>();
  n->kind = CurveKind::piecewise_constant;
  n->breakpoints = std::move(breakpoints);
  n->values = std::move(values);
  return AllocationCurve(std::move(n));
}

AllocationCurve AllocationCurve::step(const Rational& threshold) {
  return piecewise_constant({threshold}, {Rational(0), Rational(1)});
}

AllocationCurve AllocationCurve::constant(const Rational& c) {
  return piecewise_constant({}, {c});
}

AllocationCurve AllocationCurve::piecewise_polynomial(std::vector<Rational> breakpoints,
                                                      std::vector<Polynomial> pieces) {
  check_breakpoints(breakpoints);
  if (pieces.size() != breakpoints.size() + 1)
    throw std::invalid_argument("curve: need one more piece than breakpoints");
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const Rational lo = j == 0 ? Rational(0) : breakpoints[j - 1];
    const std::optional<Rational> hi =
        j < breakpoints.size() ? std::optional<Rational>(breakpoints[j]) : std::nullopt;
    check_piece_nonnegative(pieces[j], lo, hi);
  }
  auto n = std::make_shared<Node>();
  n->kind = CurveKind::piecewise_polynomial;
  n->breakpoints = std::move(breakpoints);
  n->pieces = std::move(pieces);
  return AllocationCurve(std::move(n));
}

AllocationCurve AllocationCurve::polynomial(Polynomial p) {
  return piecewise_polynomial({}, {std::move(p)});
}

AllocationCurve AllocationCurve::cantor() {
  auto n = std::make_shared<Node>();
  n->kind = CurveKind::cantor;
  return AllocationCurve(std::move(n));
}

AllocationCurve AllocationCurve::step_series() {
  auto n = std::make_shared<Node>();
  n->kind = CurveKind::step_series;
  return AllocationCurve(std::move(n));
}

AllocationCurve AllocationCurve::sum(AllocationCurve left, AllocationCurve right) {
  auto n = std::make_shared<Node>();
  n->kind = CurveKind::sum;
  n->children.push_back(std::move(left));
  n->children.push_back(std::move(right));
  return AllocationCurve(std::move(n));
}

AllocationCurve AllocationCurve::scale(const Rational& factor, AllocationCurve inner) {
  if (factor < Rational(0)) throw std::invalid_argument("curve: negative scale factor");
  auto n = std::make_shared<Node>();
  n->kind = CurveKind::scale;
  n->factor = factor;
  n->children.push_back(std::move(inner));
  return AllocationCurve(std::move(n));
}

// ---- accessors ---------------------------------------------------------------

CurveKind AllocationCurve::kind() const { return node_->kind; }

namespace {
[[noreturn]] void wrong_kind() { throw std::invalid_argument("curve: accessor on wrong kind"); }
}  // namespace

const std::vector<Rational>& AllocationCurve::breakpoints() const {
  if (node_->kind != CurveKind::piecewise_constant &&
      node_->kind != CurveKind::piecewise_polynomial)
    wrong_kind();
  return node_->breakpoints;
}
const std::vector<Rational>& AllocationCurve::values() const {
  if (node_->kind != CurveKind::piecewise_constant) wrong_kind();
  return node_->values;
}
const std::vector<Polynomial>& AllocationCurve::pieces() const {
  if (node_->kind != CurveKind::piecewise_polynomial) wrong_kind();
  return node_->pieces;
}
const AllocationCurve& AllocationCurve::left() const {
  if (node_->kind != CurveKind::sum) wrong_kind();
  return node_->children[0];
}
const AllocationCurve& AllocationCurve::right() const {
  if (node_->kind != CurveKind::sum) wrong_kind();
  return node_->children[1];
}
const Rational& AllocationCurve::factor() const {
  if (node_->kind != CurveKind::scale) wrong_kind();
  return node_->factor;
}
const AllocationCurve& AllocationCurve::inner() const {
  if (node_->kind != CurveKind::scale) wrong_kind();
  return node_->children[0];
}

std::vector<Rational> AllocationCurve::collect_breakpoints() const {
  std::vector<Rational> out;
  std::function<void(const AllocationCurve&)> walk = [&](const AllocationCurve& c) {
    switch (c.kind()) {
      case CurveKind::piecewise_constant:
      case CurveKind::piecewise_polynomial:
        out.insert(out.end(), c.node_->breakpoints.begin(), c.node_->breakpoints.end());
        break;
      case CurveKind::step_series: {
        Rational pow(1, 2);
        for (int n = 1; n <= 20; ++n) {
          out.push_back(Rational(1) - pow);
          pow = pow / Rational(2);
        }
        out.push_back(Rational(1));
        break;
      }
      case CurveKind::cantor:
        break;
      case CurveKind::sum:
        walk(c.left());
        walk(c.right());
        break;
      case CurveKind::scale:
        walk(c.inner());
        break;
    }
  };
  walk(*this);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool AllocationCurve::supports_exact() const {
  switch (kind()) {
    case CurveKind::cantor:
      return false;
    case CurveKind::sum:
      return left().supports_exact() && right().supports_exact();
    case CurveKind::scale:
      return inner().supports_exact();
    default:
      return true;
  }
}

bool AllocationCurve::structurally_equal(const AllocationCurve& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case CurveKind::piecewise_constant:
      return node_->breakpoints == other.node_->breakpoints && node_->values == other.node_->values;
    case CurveKind::piecewise_polynomial:
      return node_->breakpoints == other.node_->breakpoints && node_->pieces == other.node_->pieces;
    case CurveKind::cantor:
    case CurveKind::step_series:
      return true;
    case CurveKind::sum:
      return left().structurally_equal(other.left()) && right().structurally_equal(other.right());
    case CurveKind::scale:
      return node_->factor == other.node_->factor && inner().structurally_equal(other.inner());
  }
  return false;
}

// ---- evaluation --------------------------------------------------------------

long double cantor_value_truncated(const Rational& x, int depth) {
  return cantor_eval_impl(x, depth).value;
}

std::optional<Rational> eval_exact(const AllocationCurve& curve, const Rational& x) {
  if (x < Rational(0)) throw std::invalid_argument("eval: negative argument");
  switch (curve.kind()) {
    case CurveKind::piecewise_constant:
      return curve.values()[piece_index(curve.breakpoints(), x)];
    case CurveKind::piecewise_polynomial:
      return curve.pieces()[piece_index(curve.breakpoints(), x)](x);
    case CurveKind::cantor:
      return std::nullopt;
    case CurveKind::step_series:
      return step_series_value_exact(x);
    case CurveKind::sum: {
      auto l = eval_exact(curve.left(), x);
      if (!l) return std::nullopt;
      auto r = eval_exact(curve.right(), x);
      if (!r) return std::nullopt;
      return *l + *r;
    }
    case CurveKind::scale: {
      auto v = eval_exact(curve.inner(), x);
      if (!v) return std::nullopt;
      return curve.factor() * *v;
    }
  }
  return std::nullopt;
}

IntervalBound eval_bracket(const AllocationCurve& curve, const Rational& x) {
  if (auto v = eval_exact(curve, x)) return IntervalBound::from_exact(*v);
  switch (curve.kind()) {
    case CurveKind::cantor: {
      auto r = cantor_eval_impl(x, 64);
      if (r.exact && r.exact_value) return IntervalBound::from_exact(*r.exact_value);
      const long double lo = r.value;
      const long double hi = r.exact ? r.value : r.value + 0x1p-64L;
      return IntervalBound::from_bounds(std::nextafter(static_cast<double>(lo), -INFINITY),
                                        std::nextafter(static_cast<double>(hi), INFINITY));
    }
    case CurveKind::step_series: {
      // only reachable within 2^-61 of x = 1
      return IntervalBound::from_bounds(1.0 - 0x1p-60, 1.0);
    }
    case CurveKind::sum:
      return eval_bracket(curve.left(), x) + eval_bracket(curve.right(), x);
    case CurveKind::scale:
      return curve.factor() * eval_bracket(curve.inner(), x);
    default:
      throw std::logic_error("eval_bracket: unreachable");
  }
}

// Point evaluation at a double argument. Piece selection is exact (the
// argument is a dyadic rational, compared against the exact breakpoints);
// polynomial values are computed in long double rather than exact rationals,
// whose denominators would explode at 52-bit dyadic arguments.
double eval(const AllocationCurve& curve, double x) {
  if (x < 0.0) throw std::invalid_argument("eval: negative argument");
  const auto r = Rational::from_double(x);
  switch (curve.kind()) {
    case CurveKind::piecewise_constant: {
      const std::size_t j = r ? piece_index(curve.breakpoints(), *r)
                              : curve.breakpoints().size();  // huge x: tail piece
      return curve.values()[j].to_double();
    }
    case CurveKind::piecewise_polynomial: {
      const std::size_t j =
          r ? piece_index(curve.breakpoints(), *r) : curve.breakpoints().size();
      const auto& p = curve.pieces()[j];
      long double acc = 0.0L;
      for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it)
        acc = acc * x + it->to_long_double();
      return static_cast<double>(acc);
    }
    case CurveKind::cantor: {
      if (x >= 1.0) return 1.0;
      if (!r) return 1.0;  // unrepresentable implies astronomically large
      auto v = cantor_eval_impl(*r, 64);
      return static_cast<double>(v.value + (v.exact ? 0.0L : 0x1p-65L));
    }
    case CurveKind::step_series: {
      if (x >= 1.0) return 1.0;
      if (!r) return 1.0;
      if (auto v = step_series_value_exact(*r)) return v->to_double();
      return 1.0;  // within 2^-61 of the accumulation point
    }
    case CurveKind::sum:
      return eval(curve.left(), x) + eval(curve.right(), x);
    case CurveKind::scale:
      return curve.factor().to_double() * eval(curve.inner(), x);
  }
  return 0.0;
}

// ---- integration -------------------------------------------------------------

std::optional<Rational> integrate_exact(const AllocationCurve& curve, const Rational& a,
                                        const Rational& b) {
  if (a < Rational(0) || b < a) throw std::invalid_argument("integrate: need 0 <= a <= b");
  if (a == b) return Rational(0);
  switch (curve.kind()) {
    case CurveKind::piecewise_constant:
    case CurveKind::piecewise_polynomial: {
      const auto& bps = curve.breakpoints();
      const bool constant = curve.kind() == CurveKind::piecewise_constant;
      Rational total(0);
      for (std::size_t j = 0; j <= bps.size(); ++j) {
        const Rational lo = j == 0 ? Rational(0) : bps[j - 1];
        const std::optional<Rational> hi =
            j < bps.size() ? std::optional<Rational>(bps[j]) : std::nullopt;
        const Rational from = max(lo, a);
        const Rational to = hi ? min(*hi, b) : b;
        if (!(from < to)) continue;
        if (constant) {
          total += curve.values()[j] * (to - from);
        } else {
          const Polynomial anti = curve.pieces()[j].antiderivative();
          total += anti(to) - anti(from);
        }
      }
      return total;
    }
    case CurveKind::cantor:
      return std::nullopt;
    case CurveKind::step_series: {
      auto ib = step_series_integral0_exact(b);
      if (!ib) return std::nullopt;
      auto ia = step_series_integral0_exact(a);
      if (!ia) return std::nullopt;
      return *ib - *ia;
    }
    case CurveKind::sum: {
      auto l = integrate_exact(curve.left(), a, b);
      if (!l) return std::nullopt;
      auto r = integrate_exact(curve.right(), a, b);
      if (!r) return std::nullopt;
      return *l + *r;
    }
    case CurveKind::scale: {
      auto v = integrate_exact(curve.inner(), a, b);
      if (!v) return std::nullopt;
      return curve.factor() * *v;
    }
  }
  return std::nullopt;
}

namespace {

FastCurve build_fast_curve(const AllocationCurve& c, double xmax) {
  const long double xm = std::max(1.0, xmax);
  switch (c.kind()) {
    case CurveKind::piecewise_constant: {
      std::vector<double> bps;
      std::vector<double> vals;
      long double vmax = 0.0L;
      for (const auto& q : c.breakpoints()) bps.push_back(q.to_double());
      for (const auto& v : c.values()) {
        vals.push_back(v.to_double());
        vmax = std::max(vmax, std::fabs(static_cast<long double>(vals.back())));
      }
      FastEval f = [bps = std::move(bps), vals = std::move(vals)](double x) -> long double {
        std::size_t j = std::lower_bound(bps.begin(), bps.end(), x) - bps.begin();
        return vals[j];
      };
      return {std::move(f), (1.0L + vmax) * 0x1p-52L};
    }
    case CurveKind::piecewise_polynomial: {
      std::vector<double> bps;
      std::vector<std::vector<double>> coeffs;
      long double mag = 0.0L;
      for (const auto& q : c.breakpoints()) bps.push_back(q.to_double());
      for (const auto& p : c.pieces()) {
        std::vector<double> cc;
        long double pw = 1.0L;
        long double m = 0.0L;
        for (const auto& v : p.coeffs()) {
          cc.push_back(v.to_double());
          m += std::fabs(static_cast<long double>(cc.back())) * pw;
          pw *= xm;
        }
        mag = std::max(mag, m);
        coeffs.push_back(std::move(cc));
      }
      FastEval f = [bps = std::move(bps), coeffs = std::move(coeffs)](double x) -> long double {
        std::size_t j = std::lower_bound(bps.begin(), bps.end(), x) - bps.begin();
        long double acc = 0.0L;
        for (auto it = coeffs[j].rbegin(); it != coeffs[j].rend(); ++it) acc = acc * x + *it;
        return acc;
      };
      return {std::move(f), (1.0L + mag) * 0x1p-48L};
    }
    case CurveKind::cantor:
      return {[](double x) { return cantor_fast(x); }, 0x1p-37L};
    case CurveKind::step_series:
      return {[](double x) { return step_series_fast(x); }, 0x1p-58L};
    case CurveKind::sum: {
      auto l = build_fast_curve(c.left(), xmax);
      auto r = build_fast_curve(c.right(), xmax);
      FastEval f = [lf = std::move(l.f), rf = std::move(r.f)](double x) { return lf(x) + rf(x); };
      return {std::move(f), l.err + r.err + 0x1p-52L};
    }
    case CurveKind::scale: {
      const double s = c.factor().to_double();
      auto in = build_fast_curve(c.inner(), xmax);
      FastEval f = [s, inf = std::move(in.f)](double x) { return s * inf(x); };
      return {std::move(f), std::fabs(static_cast<long double>(s)) * in.err + 0x1p-52L};
    }
  }
  throw std::logic_error("build_fast_curve: unreachable");
}

IntervalBound lint_to_interval(long double lo, long double hi) {
  return IntervalBound::from_bounds(std::nextafter(static_cast<double>(lo), -INFINITY),
                                    std::nextafter(static_cast<double>(hi), INFINITY));
}

}  // namespace

IntervalBound darboux_uniform(const AllocationCurve& curve, const Rational& a, const Rational& b,
                              const IntegrationOptions& opts) {
  if (a < Rational(0) || b < a) throw std::invalid_argument("integrate: need 0 <= a <= b");
  if (a == b) return IntervalBound::from_exact(Rational(0));
  if (!(opts.tolerance > 0)) throw std::invalid_argument("integrate: tolerance must be > 0");

  const double ad = a.to_double();
  const double bd = b.to_double();
  const double len = bd - ad;
  FastCurve fc = build_fast_curve(curve, bd);
  const long double fa = fc.f(ad);
  const long double fb = fc.f(bd);
  if (fb < fa)
    throw std::invalid_argument("darboux_uniform: curve is not monotone on [a, b]");

  // For a nondecreasing integrand on a uniform partition the lower sum takes
  // left endpoints and the gap to the upper sum is h * (f(b) - f(a)); pick
  // the cell count that meets the tolerance directly, capped at max_cells.
  const long double needed = static_cast<long double>(len) * (fb - fa) / opts.tolerance;
  std::size_t cells = 1;
  if (needed > 1.0L) {
    cells = needed >= static_cast<long double>(opts.max_cells)
                ? opts.max_cells
                : static_cast<std::size_t>(needed) + 1;
  }
  const double h = len / static_cast<double>(cells);
  const long double sum_left =
      detail::chunked_sum(cells, opts.exec, [&](std::size_t i) -> long double {
        return fc.f(ad + static_cast<double>(i) * h);
      });
  const long double lower = static_cast<long double>(h) * sum_left;
  const long double upper = lower + static_cast<long double>(h) * (fb - fa);

  // per-evaluation error plus summation rounding
  const long double pad = static_cast<long double>(len) * fc.err +
                          0x1p-40L * std::fabs(static_cast<double>(upper)) + 0x1p-45L;
  return IntervalBound::from_bounds(static_cast<double>(lower - pad),
                                    static_cast<double>(upper + pad));
}

IntervalBound integrate(const AllocationCurve& curve, const Rational& a, const Rational& b,
                        const IntegrationOptions& opts) {
  if (a < Rational(0) || b < a) throw std::invalid_argument("integrate: need 0 <= a <= b");
  if (a == b) return IntervalBound::from_exact(Rational(0));

  if (!opts.uniform_darboux) {
    if (auto v = integrate_exact(curve, a, b)) return IntervalBound::from_exact(*v);
  } else {
    switch (curve.kind()) {
      case CurveKind::piecewise_constant:
      case CurveKind::piecewise_polynomial:
        return IntervalBound::from_exact(*integrate_exact(curve, a, b));
      case CurveKind::cantor:
      case CurveKind::step_series:
        return darboux_uniform(curve, a, b, opts);
      default:
        break;  // recurse structurally below
    }
  }

  switch (curve.kind()) {
    case CurveKind::cantor: {
      const LInterval ib = cantor_integral_ext(b);
      const LInterval ia = cantor_integral_ext(a);
      return lint_to_interval(ib.lo - ia.hi, ib.hi - ia.lo);
    }
    case CurveKind::step_series: {
      const LInterval ib = step_series_integral0_bracket(b);
      const LInterval ia = step_series_integral0_bracket(a);
      return lint_to_interval(ib.lo - ia.hi, ib.hi - ia.lo);
    }
    case CurveKind::sum:
      return integrate(curve.left(), a, b, opts) + integrate(curve.right(), a, b, opts);
    case CurveKind::scale:
      return curve.factor() * integrate(curve.inner(), a, b, opts);
    default:
      throw std::logic_error("integrate: unreachable");
  }
}

// ---- monotonicity --------------------------------------------------------------

namespace {

MonotoneWitness make_witness(const AllocationCurve& c, const Rational& x, const Rational& y) {
  MonotoneWitness w;
  w.x = x;
  w.y = y;
  w.fx = eval(c, x.to_double());
  w.fy = eval(c, y.to_double());
  return w;
}

// Grid scan: adjacent comparisons over the effective point set. A violation
// is reported only when certain (exact compare when both values are exact,
// bracket compare otherwise).
MonotonicityReport grid_monotone_scan(const AllocationCurve& c, const GridSpec& grid) {
  const auto pts = effective_points(grid, c.collect_breakpoints());
  std::optional<IntervalBound> prev;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    IntervalBound v = eval_bracket(c, pts[i]);
    if (prev) {
      const bool violated = (prev->exact && v.exact) ? *prev->value > *v.value
                                                     : prev->safe_lower() > v.safe_upper();
      if (violated) return {false, make_witness(c, pts[i - 1], pts[i])};
    }
    prev = v;
  }
  return {true, std::nullopt};
}

// Finds y > x close to x with f(y) < f(x), for a curve known to drop just
// after x (jump or local decrease). Falls back to x + 1 when the drop is at
// the tail piece.
std::optional<Rational> shrink_toward(const AllocationCurve& c, const Rational& x,
                                      const Rational& fx, const Rational& upper_hint) {
  Rational delta = (upper_hint > x ? upper_hint - x : Rational(1)) / Rational(2);
  for (int i = 0; i < 80; ++i) {
    const Rational y = x + delta;
    if (auto fy = eval_exact(c, y); fy && *fy < fx) return y;
    delta = delta / Rational(2);
  }
  return std::nullopt;
}

}  // namespace

MonotonicityReport is_monotone(const AllocationCurve& curve, const GridSpec& grid) {
  switch (curve.kind()) {
    case CurveKind::piecewise_constant: {
      const auto& v = curve.values();
      const auto& bps = curve.breakpoints();
      for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        if (v[j] > v[j + 1]) {
          const Rational x = bps[j];
          const Rational y =
              j + 1 < bps.size() ? (bps[j] + bps[j + 1]) / Rational(2) : bps[j] + Rational(1);
          return {false, make_witness(curve, x, y)};
        }
      }
      return {true, std::nullopt};
    }
    case CurveKind::piecewise_polynomial: {
      const auto& bps = curve.breakpoints();
      const auto& pieces = curve.pieces();
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        const Rational lo = j == 0 ? Rational(0) : bps[j - 1];
        const std::optional<Rational> hi =
            j < bps.size() ? std::optional<Rational>(bps[j]) : std::nullopt;
        const Polynomial deriv = pieces[j].derivative();
        auto res = poly_nonneg_on(deriv, lo, hi);
        if (res.status == PolySignCheck::Status::needs_sampling) {
          if (auto bad = sampled_negative_point(deriv, lo, hi))
            res = {PolySignCheck::Status::negative, *bad};
          else
            res.status = PolySignCheck::Status::nonneg;
        }
        if (res.status == PolySignCheck::Status::negative) {
          const Rational x = max(lo, res.where);
          const Rational fx = pieces[j](x);
          if (auto y = shrink_toward(curve, x, fx, hi.value_or(x + Rational(2))))
            return {false, make_witness(curve, x, *y)};
          return grid_monotone_scan(curve, grid);
        }
        // nonnegative jump at the right breakpoint of this piece
        if (j < bps.size()) {
          const Rational q = bps[j];
          if (pieces[j + 1](q) < pieces[j](q)) {
            const Rational fx = pieces[j](q);
            const Rational next_hi = j + 1 < bps.size() ? bps[j + 1] : q + Rational(2);
            if (auto y = shrink_toward(curve, q, fx, next_hi))
              return {false, make_witness(curve, q, *y)};
            return grid_monotone_scan(curve, grid);
          }
        }
      }
      return {true, std::nullopt};
    }
    case CurveKind::cantor:
    case CurveKind::step_series:
      return {true, std::nullopt};
    case CurveKind::scale: {
      if (curve.factor().is_zero()) return {true, std::nullopt};
      MonotonicityReport inner = is_monotone(curve.inner(), grid);
      if (inner.monotone) return inner;
      MonotoneWitness w = *inner.witness;
      return {false, make_witness(curve, w.x, w.y)};
    }
    case CurveKind::sum: {
      if (is_monotone(curve.left(), grid).monotone && is_monotone(curve.right(), grid).monotone)
        return {true, std::nullopt};
      return grid_monotone_scan(curve, grid);
    }
  }
  return {true, std::nullopt};
}

MonotonicityReport is_monotone(const AllocationCurve& curve) {
  Rational hi(2);
  const auto bps = curve.collect_breakpoints();
  if (!bps.empty()) hi = max(hi, bps.back() + Rational(1));
  return is_monotone(curve, GridSpec::range(Rational(0), hi, Rational(1, 64)));
}

}  // namespace mechkit
