// Acceptance suite: the end-to-end guarantees the toolkit ships with, one
// criterion per block, each with its stated tolerance and runtime budget.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mechkit/discontinuity.hpp"
#include "mechkit/ic_check.hpp"
#include "mechkit/mechanism.hpp"
#include "mechkit/multidim.hpp"

using namespace mechkit;

namespace {

int failures = 0;

struct Criterion {
  int id;
  std::string title;
  double budget_ms;

  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

void run_criterion(int id, const std::string& title, double budget_ms,
                   const std::function<void(Criterion&)>& body) {
  Criterion c{id, title, budget_ms};
  const auto t0 = std::chrono::steady_clock::now();
  body(c);
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (budget_ms > 0 && ms > budget_ms) {
    c.ok = false;
    c.detail += (c.detail.empty() ? "" : "; ") + std::string("over budget: ") +
                std::to_string(ms) + " ms > " + std::to_string(budget_ms) + " ms";
  }
  std::printf("[%s] criterion %d: %s (%.2f ms%s)\n", c.ok ? "PASS" : "FAIL", id, title.c_str(),
              ms, c.detail.empty() ? "" : ("; " + c.detail).c_str());
  if (!c.ok) ++failures;
}

const Rational kHalf(1, 2);

GridSpec acceptance_grid() { return GridSpec::range(Rational(0), Rational(2), Rational(1, 100)); }

}  // namespace

int main() {
  // 1. For the unit step at 1/2, the by-parts payment reads 0 while the
  //    well-defined payment at 1 is exactly 1/2; both in rational arithmetic
  //    with zero tolerance.
  run_criterion(1, "integration-by-parts gap for the unit step", 1.0, [](Criterion& c) {
    const auto f = AllocationCurve::step(kHalf);
    const auto naive = naive_by_parts_payment(f, Rational(1));
    c.require(naive.has_value() && naive->exact && *naive->value == Rational(0),
              "naive by-parts payment must be exactly 0");
    const auto g = myerson_payment(f, Rational(0));
    const auto v = payment_exact(g, Rational(1));
    c.require(v.has_value() && *v == kHalf, "payment at 1 must be exactly 1/2");
  });

  // 2. The Cantor payment at 1 lands in [0.5 - 1e-6, 0.5 + 1e-6] via the
  //    uniform-partition Darboux engine at default refinement; the naive
  //    by-parts value is 0.
  run_criterion(2, "cantor exhibit via Darboux bracketing", 5000.0, [](Criterion& c) {
    const auto f = AllocationCurve::cantor();
    const auto naive = naive_by_parts_payment(f, Rational(1));
    c.require(naive.has_value() && *naive->value == Rational(0), "naive value must be 0");
    const auto g = myerson_payment(f, Rational(0));
    IntegrationOptions opts;  // default tolerance 1e-9, cap 2^24 cells
    opts.uniform_darboux = true;
    const IntervalBound v = eval_payment(g, Rational(1), opts);
    c.require(v.lower >= 0.5 - 1e-6, "bracket lower bound within 1e-6 of 1/2");
    c.require(v.upper <= 0.5 + 1e-6, "bracket upper bound within 1e-6 of 1/2");
  });

  // 3. Second-price emergence: on 1000 seeded rational 3-bidder profiles the
  //    winner pays exactly the second-highest bid (zero tolerance), verified
  //    against an independent jump-sum oracle.
  run_criterion(3, "second-price emergence on 1000 seeded profiles", 0.0, [](Criterion& c) {
    Mechanism m;
    m.family = AllocationFamily::single_item_highest_bid;
    m.agents = 3;
    std::size_t checked = 0;
    for (const auto& bids : seeded_profiles(1000, 3, 20240803)) {
      const Outcome out = run(m, {bids, {}});
      auto sorted = bids;
      std::sort(sorted.begin(), sorted.end(),
                [](const Rational& a, const Rational& b) { return a > b; });
      for (std::size_t i = 0; i < 3; ++i) {
        if (out.allocation[i] == Rational(1)) {
          ++checked;
          if (out.payment[i] != sorted[1]) {
            c.require(false, "winner must pay the second-highest bid");
            return;
          }
          // independent oracle: the jump-sum over the winner's curve equals
          // the threshold (= second-highest bid) whenever the win is strict
          std::vector<Rational> opp;
          for (std::size_t j = 0; j < 3; ++j)
            if (j != i) opp.push_back(bids[j]);
          const auto curve = agent_curve(m, static_cast<int>(i), opp);
          Rational jump_sum(0);
          for (std::size_t q = 0; q < curve.breakpoints().size(); ++q)
            if (curve.breakpoints()[q] < bids[i])
              jump_sum += curve.breakpoints()[q] *
                          (curve.values()[q + 1] - curve.values()[q]);
          const bool strict_win = bids[i] > sorted[1];
          if (strict_win && jump_sum != out.payment[i]) {
            c.require(false, "jump-sum oracle disagrees with the mechanism payment");
            return;
          }
        } else if (out.payment[i] != Rational(0)) {
          c.require(false, "losers pay nothing");
          return;
        }
      }
    }
    c.require(checked == 1000, "every profile must produce exactly one winner");
  });

  // 4. The incentive inequality holds across the built-in monotone families
  //    for pivots 0 and 7/2 on the standard grid: exact paths at tolerance 0,
  //    the Cantor path at 1e-9, and every verdict must be a conclusive pass.
  run_criterion(4, "incentive property suite across the built-in families", 30000.0,
                [](Criterion& c) {
    const std::vector<std::pair<std::string, AllocationCurve>> curves = {
        {"unit step", AllocationCurve::step(kHalf)},
        {"linear", AllocationCurve::polynomial(Polynomial({Rational(0), Rational(1)}))},
        {"quadratic", AllocationCurve::polynomial(Polynomial({Rational(0), Rational(0),
                                                              Rational(1)}))},
        {"cantor", AllocationCurve::cantor()},
        {"step series", AllocationCurve::step_series()},
    };
    for (const auto& [name, f] : curves) {
      for (const Rational& pivot : {Rational(0), Rational(7, 2)}) {
        const auto g = myerson_payment(f, pivot);
        const auto report = check_ic_pairs(f, g, acceptance_grid());
        c.require(report.verdict == Verdict::passed,
                  name + " with pivot " + pivot.str() + " must pass conclusively");
        c.require(report.pairs_checked >= 40000, name + ": at least 40k pairs checked");
        if (f.supports_exact()) c.require(report.exact_path, name + ": exact rational path");
      }
    }
  });

  // 5. Uniqueness refutation at grid scale: the +1/10 step perturbation at
  //    3/4 fails with the witness pair (4/5, 7/10); two derived payments for
  //    the same curve differ by exactly their pivot gap 7/2.
  run_criterion(5, "uniqueness refutation and revenue equivalence", 0.0, [](Criterion& c) {
    const auto f = AllocationCurve::step(kHalf);
    const auto good = myerson_payment(f, Rational(0));
    const auto bad = PaymentCurve::perturbed(
        good, AllocationCurve::scale(Rational(1, 10), AllocationCurve::step(Rational(3, 4))));
    const auto report = check_ic_pairs(f, bad, acceptance_grid());
    c.require(report.verdict == Verdict::violated, "perturbed payment must fail");
    bool witness = false;
    for (const auto& w : report.witnesses)
      if (w.x == Rational(4, 5) && w.y == Rational(7, 10)) witness = true;
    c.require(witness, "the pair (0.8, 0.7) must be among the witnesses");

    const auto re =
        check_revenue_equivalence(f, good, myerson_payment(f, Rational(7, 2)), acceptance_grid());
    c.require(re.precondition_ok && re.passed, "both payments are solutions");
    c.require(re.constant_exact.has_value() && *re.constant_exact == Rational(7, 2),
              "constant must be exactly 7/2 (within 1e-12)");
  });

  // 6. Monotonicity necessity: with one downward jump in the allocation,
  //    the derived formula and five seeded perturbations of it all violate
  //    the inequality somewhere on the grid.
  run_criterion(6, "monotonicity necessity for a decreasing allocation", 0.0, [](Criterion& c) {
    const auto f =
        AllocationCurve::piecewise_constant({Rational(1, 2)}, {Rational(1), Rational(0)});
    std::vector<PaymentCurve> payments;
    payments.push_back(PaymentCurve::myerson_unchecked(f, Rational(0)));
    std::mt19937_64 eng(6);
    for (int i = 0; i < 5; ++i) {
      const Rational where(static_cast<std::int64_t>(eng() % 160) + 10, 100);
      const Rational amount(static_cast<std::int64_t>(eng() % 9) + 1, 10);
      payments.push_back(PaymentCurve::perturbed(
          payments.front(),
          AllocationCurve::scale(amount, AllocationCurve::step(where))));
    }
    for (std::size_t i = 0; i < payments.size(); ++i) {
      const auto report = check_ic_pairs(f, payments[i], acceptance_grid());
      c.require(!report.passed,
                "payment " + std::to_string(i) + " must violate the inequality");
    }
  });

  // 7. Species classification: finite sets are type 0, the step series set
  //    is type 1, and the constructed two-level accumulation is type 2.
  run_criterion(7, "species classification (types 0, 1, 2)", 1.0, [](Criterion& c) {
    c.require(classify_species(DiscontinuitySet::finite({kHalf, Rational(3, 4)})).type == 0,
              "finite set must be type 0");
    c.require(classify_species(discontinuities(AllocationCurve::step_series())).type == 1,
              "step-series set must be type 1");
    const auto two_level =
        DiscontinuitySet::geometric(Rational(1), kHalf, kHalf, 2);
    c.require(classify_species(two_level).type == 2,
              "two-level accumulation must be type 2");
  });

  // 8. Vector consistency: the identity map on R^2 pays exactly 1 at (1,1);
  //    the 1-D vector path agrees with the scalar payment to tolerance 0 on
  //    100 seeded points; the vector inequality holds on 1000 seeded pairs.
  run_criterion(8, "vector payments agree with the scalar theory", 10000.0, [](Criterion& c) {
    const auto id2 =
        VectorAllocation::linear({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
    c.require(myerson_payment_nd_exact(id2, {Rational(1), Rational(1)}) == Rational(1),
              "identity payment at (1,1) must be exactly 1");

    std::mt19937_64 eng(8);
    const auto scalar_curve = AllocationCurve::piecewise_polynomial(
        {Rational(1)}, {Polynomial({Rational(0), Rational(1)}), Polynomial({Rational(1)})});
    const auto one_d = VectorAllocation::diagonal({scalar_curve});
    const auto scalar_payment = myerson_payment(scalar_curve, Rational(0));
    for (int i = 0; i < 100; ++i) {
      const Rational t(static_cast<std::int64_t>(eng() % 4000), 1000);
      if (myerson_payment_nd_exact(one_d, {t}) != *payment_exact(scalar_payment, t)) {
        c.require(false, "1-D vector path must equal the scalar payment exactly");
        break;
      }
    }

    auto g = [&](const Vec& v) { return myerson_payment_nd_exact(id2, v); };
    NdCheckOptions opts;
    opts.tol = Rational(0);  // exact pass implies the stated 1e-9 tolerance
    const auto report = check_ic_nd(id2, g, sample_pairs(1000, 2, 88), opts);
    c.require(report.passed, "vector inequality must hold on 1000 seeded pairs");
    c.require(report.pairs_checked >= 1000, "must check at least 1000 pairs");
  });

  // 9. Derivative identity: for f(x) = x and f(x) = x^2 away from 0, the
  //    central finite difference of the derived payment matches x f'(x)
  //    within 1e-6 at h = 1e-4 on 50 points.
  run_criterion(9, "finite-difference derivative identity", 0.0, [](Criterion& c) {
    const Rational h(1, 10000);
    std::vector<Rational> points;
    for (int k = 1; k <= 50; ++k) points.emplace_back(k, 25);  // 0.04 .. 2.00
    for (const auto& f :
         {AllocationCurve::polynomial(Polynomial({Rational(0), Rational(1)})),
          AllocationCurve::polynomial(Polynomial({Rational(0), Rational(0), Rational(1)}))}) {
      const auto g = myerson_payment(f, Rational(0));
      const auto report = check_derivative_identity(f, g, points, h, 1e-6);
      c.require(report.passed, "all 50 points must match within 1e-6");
      c.require(report.points.size() == 50, "50 points per curve");
      for (const auto& p : report.points)
        if (p.error > 1e-6) c.require(false, "error above 1e-6 at x = " + p.x.str());
    }
  });

  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
