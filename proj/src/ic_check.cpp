#include "mechkit/ic_check.hpp"

#include <algorithm>
#include <cmath>

namespace mechkit {

namespace {

struct RowResult {
  std::vector<PairWitness> witnesses;
  std::vector<PairWitness> inconclusive;
  std::size_t pairs = 0;
};

struct PointTable {
  std::vector<Rational> points;
  bool exact = false;
  std::vector<Rational> f_exact, g_exact;
  std::vector<IntervalBound> f_br, g_br;
};

PointTable tabulate(const AllocationCurve& f, const PaymentCurve& g, const GridSpec& grid,
                    const CheckOptions& opts) {
  PointTable t;
  std::vector<Rational> bps = f.collect_breakpoints();
  auto extra = g.collect_breakpoints();
  bps.insert(bps.end(), extra.begin(), extra.end());
  t.points = effective_points(grid, bps);

  if (f.supports_exact() && g.supports_exact()) {
    t.exact = true;
    t.f_exact.reserve(t.points.size());
    t.g_exact.reserve(t.points.size());
    for (const Rational& x : t.points) {
      auto fv = eval_exact(f, x);
      auto gv = payment_exact(g, x);
      if (!fv || !gv) {
        t.exact = false;  // rare exact-path dropout (step-series overflow guard)
        t.f_exact.clear();
        t.g_exact.clear();
        break;
      }
      t.f_exact.push_back(*fv);
      t.g_exact.push_back(*gv);
    }
  }
  if (!t.exact) {
    t.f_br.reserve(t.points.size());
    t.g_br.reserve(t.points.size());
    for (const Rational& x : t.points) {
      t.f_br.push_back(eval_bracket(f, x));
      t.g_br.push_back(eval_payment(g, x, opts.integration));
    }
  }
  return t;
}

ViolationReport scan_pairs(const PointTable& t, const CheckOptions& opts, bool sandwich) {
  const std::size_t n = t.points.size();

  auto row = [&](std::size_t i) {
    RowResult r;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        // diagonal pair: both sides are identically zero
        r.pairs += sandwich ? 2 : 1;
        continue;
      }
      const Rational& x = t.points[i];
      const Rational& y = t.points[j];
      // lower side: g(y) - g(x) >= x (f(y) - f(x)).
      // upper side (sandwich only, x < y ordering covers both orientations
      // of the core inequality): y (f(y) - f(x)) >= g(y) - g(x).
      if (t.exact) {
        const Rational lhs = t.g_exact[j] - t.g_exact[i];
        const Rational df = t.f_exact[j] - t.f_exact[i];
        const Rational rhs = x * df;
        ++r.pairs;
        if (lhs < rhs - opts.exact_tol) {
          PairWitness w{x, y, lhs.to_double(), rhs.to_double(), (lhs - rhs).to_double(), 0};
          r.witnesses.push_back(w);
        }
        if (sandwich) {
          const Rational cap = y * df;
          ++r.pairs;
          if (cap < lhs - opts.exact_tol) {
            PairWitness w{x, y, lhs.to_double(), cap.to_double(), (cap - lhs).to_double(), 1};
            r.witnesses.push_back(w);
          }
        }
      } else {
        const IntervalBound lhs = t.g_br[j] - t.g_br[i];
        const IntervalBound df = t.f_br[j] - t.f_br[i];
        const IntervalBound rhs = x * df;
        ++r.pairs;
        if (lhs.safe_upper() < rhs.safe_lower() - opts.tol) {
          PairWitness w{x, y, lhs.midpoint(), rhs.midpoint(),
                        lhs.safe_upper() - rhs.safe_lower(), 0};
          r.witnesses.push_back(w);
        } else if (!(lhs.safe_lower() >= rhs.safe_upper() - opts.tol)) {
          PairWitness w{x, y, lhs.midpoint(), rhs.midpoint(),
                        lhs.safe_lower() - rhs.safe_upper(), 0};
          r.inconclusive.push_back(w);
        }
        if (sandwich) {
          const IntervalBound cap = y * df;
          ++r.pairs;
          if (cap.safe_upper() < lhs.safe_lower() - opts.tol) {
            PairWitness w{x, y, lhs.midpoint(), cap.midpoint(),
                          cap.safe_upper() - lhs.safe_lower(), 1};
            r.witnesses.push_back(w);
          } else if (!(cap.safe_lower() >= lhs.safe_upper() - opts.tol)) {
            PairWitness w{x, y, lhs.midpoint(), cap.midpoint(),
                          cap.safe_lower() - lhs.safe_upper(), 1};
            r.inconclusive.push_back(w);
          }
        }
      }
    }
    return std::vector<RowResult>{std::move(r)};
  };

  auto rows = detail::ordered_collect<RowResult>(n, opts.exec, row);

  ViolationReport report;
  report.exact_path = t.exact;
  for (auto& r : rows) {
    report.pairs_checked += r.pairs;
    for (auto& w : r.witnesses) {
      report.max_slack_violation = std::min(report.max_slack_violation, w.slack);
      report.witnesses.push_back(std::move(w));
    }
    for (auto& w : r.inconclusive) report.inconclusive.push_back(std::move(w));
  }
  report.passed = report.witnesses.empty();
  report.verdict = !report.passed ? Verdict::violated
                   : report.inconclusive.empty() ? Verdict::passed
                                                 : Verdict::inconclusive;
  return report;
}

}  // namespace

ViolationReport check_ic_pairs(const AllocationCurve& f, const PaymentCurve& g,
                               const GridSpec& grid, const CheckOptions& opts) {
  return scan_pairs(tabulate(f, g, grid, opts), opts, /*sandwich=*/false);
}

ViolationReport check_sandwich(const AllocationCurve& f, const PaymentCurve& g,
                               const GridSpec& grid, const CheckOptions& opts) {
  return scan_pairs(tabulate(f, g, grid, opts), opts, /*sandwich=*/true);
}

NecessityReport check_monotone_necessity(const AllocationCurve& f, const PaymentCurve& g,
                                         const GridSpec& grid, const CheckOptions& opts) {
  NecessityReport report;
  report.ic = check_ic_pairs(f, g, grid, opts);

  // monotonicity of f restricted to the same point set
  const PointTable t = tabulate(f, g, grid, opts);
  for (std::size_t i = 0; i + 1 < t.points.size(); ++i) {
    bool decreasing;
    double fx, fy;
    if (t.exact) {
      decreasing = t.f_exact[i] > t.f_exact[i + 1];
      fx = t.f_exact[i].to_double();
      fy = t.f_exact[i + 1].to_double();
    } else {
      decreasing = t.f_br[i].safe_lower() > t.f_br[i + 1].safe_upper();
      fx = t.f_br[i].midpoint();
      fy = t.f_br[i + 1].midpoint();
    }
    if (decreasing) {
      report.monotone_on_grid = false;
      report.monotone_witness = MonotoneWitness{t.points[i], t.points[i + 1], fx, fy};
      break;
    }
  }

  report.implication_holds = !report.ic.passed || report.monotone_on_grid;

  // contrapositive chain: a decreasing pair (x, y) forces a violation in one
  // of its two orientations, since both holding would give
  // (y - x)(f(y) - f(x)) >= 0
  if (!report.monotone_on_grid) {
    const Rational& wx = report.monotone_witness->x;
    const Rational& wy = report.monotone_witness->y;
    for (const auto& w : report.ic.witnesses) {
      if ((w.x == wx && w.y == wy) || (w.x == wy && w.y == wx)) {
        report.forced_violation = w;
        break;
      }
    }
  }
  return report;
}

DerivativeReport check_derivative_identity(const AllocationCurve& f, const PaymentCurve& g,
                                           const std::vector<Rational>& points, const Rational& h,
                                           double tol) {
  if (f.kind() != CurveKind::piecewise_polynomial)
    throw std::invalid_argument("derivative check: f must be piecewise polynomial");
  if (!(h > Rational(0))) throw std::invalid_argument("derivative check: h must be > 0");

  const auto& bps = f.breakpoints();
  auto piece_of = [&](const Rational& x) {
    return static_cast<std::size_t>(std::lower_bound(bps.begin(), bps.end(), x) - bps.begin());
  };

  DerivativeReport report;
  for (const Rational& x : points) {
    if (x - h < Rational(0)) throw PointAtBreakpointError(x);
    if (piece_of(x - h) != piece_of(x + h)) throw PointAtBreakpointError(x);

    DerivativePoint p;
    p.x = x;
    const IntervalBound gp = eval_payment(g, x + h);
    const IntervalBound gm = eval_payment(g, x - h);
    if (gp.exact && gm.exact) {
      p.finite_difference = ((*gp.value - *gm.value) / (Rational(2) * h)).to_double();
    } else {
      p.finite_difference = (gp.midpoint() - gm.midpoint()) / (2.0 * h.to_double());
    }

    const Polynomial& piece = f.pieces()[piece_of(x)];
    p.analytic = (x * piece.derivative()(x)).to_double();

    // central difference truncation: |error| <= h^2 / 6 * max |g'''| with
    // g'(z) = z f'(z), so g''' = 2 f'' + z f'''; bound the coefficients on
    // |z| <= x + h
    const Polynomial f2 = piece.derivative().derivative();
    const Polynomial f3 = f2.derivative();
    const double z = (x + h).to_double();
    double mag = 0.0;
    double pw = 1.0;
    for (std::size_t k = 0; k < 8; ++k) {
      mag += (2.0 * std::fabs(f2.coeff(k).to_double()) + z * std::fabs(f3.coeff(k).to_double())) *
             pw;
      pw *= z;
    }
    const double hd = h.to_double();
    p.allowance = hd * hd / 6.0 * mag + 1e-12;
    p.error = std::fabs(p.finite_difference - p.analytic);
    p.ok = p.error <= tol + p.allowance;
    if (!p.ok) report.passed = false;
    report.points.push_back(std::move(p));
  }
  return report;
}

RevenueReport check_revenue_equivalence(const AllocationCurve& f, const PaymentCurve& g1,
                                        const PaymentCurve& g2, const GridSpec& grid,
                                        const CheckOptions& opts) {
  RevenueReport report;
  report.ic1 = check_ic_pairs(f, g1, grid, opts);
  report.ic2 = check_ic_pairs(f, g2, grid, opts);
  if (!report.ic1.passed || !report.ic2.passed) {
    report.precondition_ok = false;
    report.failing_payment = !report.ic1.passed ? 1 : 2;
    const auto& bad = !report.ic1.passed ? report.ic1 : report.ic2;
    report.precondition_witness = bad.witnesses.front();
    return report;
  }

  std::vector<Rational> bps = f.collect_breakpoints();
  for (const auto* g : {&g1, &g2}) {
    auto extra = g->collect_breakpoints();
    bps.insert(bps.end(), extra.begin(), extra.end());
  }
  const auto points = effective_points(grid, bps);

  const bool exact = g1.supports_exact() && g2.supports_exact();
  if (exact) {
    std::optional<Rational> lo, hi;
    Rational lo_at(0), hi_at(0);
    bool all_exact = true;
    for (const Rational& x : points) {
      auto v1 = payment_exact(g1, x);
      auto v2 = payment_exact(g2, x);
      if (!v1 || !v2) {
        all_exact = false;
        break;
      }
      const Rational d = *v2 - *v1;
      if (!lo || d < *lo) {
        lo = d;
        lo_at = x;
      }
      if (!hi || d > *hi) {
        hi = d;
        hi_at = x;
      }
    }
    if (all_exact) {
      const Rational spread = *hi - *lo;
      report.spread = spread.to_double();
      report.constant_exact = (*hi + *lo) / Rational(2);
      report.constant_diff = report.constant_exact->to_double();
      report.passed = spread.to_double() <= opts.tol ||
                      spread <= opts.exact_tol;  // exact grids usually use exact_tol = 0
      if (!report.passed) report.spread_witnesses = {lo_at, hi_at};
      return report;
    }
  }

  std::optional<double> lo, hi;
  Rational lo_at(0), hi_at(0);
  for (const Rational& x : points) {
    const double d =
        eval_payment(g2, x, opts.integration).midpoint() -
        eval_payment(g1, x, opts.integration).midpoint();
    if (!lo || d < *lo) {
      lo = d;
      lo_at = x;
    }
    if (!hi || d > *hi) {
      hi = d;
      hi_at = x;
    }
  }
  report.spread = *hi - *lo;
  report.constant_diff = 0.5 * (*hi + *lo);
  report.passed = report.spread <= opts.tol;
  if (!report.passed) report.spread_witnesses = {lo_at, hi_at};
  return report;
}

}  // namespace mechkit
