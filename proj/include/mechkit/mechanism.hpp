#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mechkit/curve.hpp"
#include "mechkit/exec.hpp"
#include "mechkit/grid.hpp"
#include "mechkit/payment.hpp"
#include "mechkit/rational.hpp"

namespace mechkit {

// n-agent single-parameter mechanisms. An allocation family produces, for
// each agent and each fixed profile of opponent bids, a monotone allocation
// curve in the agent's own bid; payments are the incentive-compatible rule
// derived from that curve (or pay-your-bid, kept as a counterexample).
//
// Built-in families:
//   single_item_highest_bid  -- one unit to the highest bidder
//   top_k_units              -- k identical units, one per winner
//   linear_capped            -- divisible good, a_i = min(b_i, cap), no
//                               interaction between agents
//
// Ties go to the lowest agent index. The agent's allocation curve is the
// left-closed step at the opponents' threshold; at an exact tie the realized
// allocation is the step's right limit for the favored agent. Payments use
// the realized allocation in the b * a(b) term together with the curve's
// integral, which keeps the mechanism incentive compatible at tie points.
enum class AllocationFamily { single_item_highest_bid, top_k_units, linear_capped };
enum class PaymentMode { myerson, pay_your_bid };

struct Mechanism {
  AllocationFamily family = AllocationFamily::single_item_highest_bid;
  int agents = 2;
  int units = 1;        // top_k_units
  Rational cap{1};      // linear_capped
  PaymentMode payments = PaymentMode::myerson;
  std::vector<Rational> pivots;  // per-agent constants; empty means all zero

  Rational pivot_of(int agent) const {
    return pivots.empty() ? Rational(0) : pivots.at(static_cast<std::size_t>(agent));
  }
  void validate() const;
};

struct BidProfile {
  std::vector<Rational> bids;
  std::vector<Rational> valuations;  // empty means truthful (== bids)

  const Rational& valuation_of(std::size_t i) const {
    return valuations.empty() ? bids[i] : valuations[i];
  }
};

struct Outcome {
  std::vector<Rational> allocation;
  std::vector<Rational> payment;
  std::vector<Rational> utility;  // v_i * a_i - p_i
};

// The agent's allocation as a curve in its own bid, opponents fixed.
AllocationCurve agent_curve(const Mechanism& m, int agent,
                            const std::vector<Rational>& opponent_bids);

// Realized allocation vector for a bid profile (tie-break applied).
std::vector<Rational> allocate(const Mechanism& m, const std::vector<Rational>& bids);

Outcome run(const Mechanism& m, const BidProfile& bids);

// ---- truthfulness fuzzing ----------------------------------------------------

struct DeviationWitness {
  int agent = 0;
  std::vector<Rational> opponent_bids;
  Rational truthful_bid{0};
  Rational deviation{0};
  Rational truthful_utility{0};
  Rational deviated_utility{0};
  Rational gain{0};  // > tol
};

struct TruthfulnessReport {
  bool truthful = true;
  std::vector<DeviationWitness> witnesses;
  std::size_t cases_checked = 0;
};

struct TruthfulnessOptions {
  // opponent profiles: every point of a small lattice plus seeded rationals
  std::vector<Rational> lattice{Rational(0), Rational(1, 2), Rational(1), Rational(3, 2),
                                Rational(2)};
  int seeded_profiles = 16;
  std::uint64_t seed = 1;
  Rational tol{0};
  Execution exec = Execution::parallel;
};

// For each agent, each opponent profile, and each deviation on the grid,
// checks u_i(v_i, b_-i) >= u_i(b, b_-i) - tol. All arithmetic is exact.
TruthfulnessReport verify_truthfulness(const Mechanism& m,
                                       const std::vector<Rational>& valuations,
                                       const GridSpec& deviation_grid,
                                       const TruthfulnessOptions& opts = {});

// Deterministic seeded bid profiles on a small-denominator rational lattice.
std::vector<std::vector<Rational>> seeded_profiles(int count, int agents, std::uint64_t seed,
                                                   const Rational& max_bid = Rational(10));

}  // namespace mechkit
