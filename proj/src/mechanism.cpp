#include "mechkit/mechanism.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mechkit {

void Mechanism::validate() const {
  if (agents < 1) throw std::invalid_argument("mechanism: need at least one agent");
  if (family == AllocationFamily::top_k_units && units < 1)
    throw std::invalid_argument("mechanism: top_k_units needs k >= 1");
  if (family == AllocationFamily::linear_capped && !(cap > Rational(0)))
    throw std::invalid_argument("mechanism: linear_capped needs cap > 0");
  if (!pivots.empty() && pivots.size() != static_cast<std::size_t>(agents))
    throw std::invalid_argument("mechanism: pivot count must match agent count");
  for (const auto& c : pivots)
    if (c < Rational(0)) throw std::invalid_argument("mechanism: negative pivot");
}

namespace {

void check_bids(const Mechanism& m, const std::vector<Rational>& bids) {
  if (bids.size() != static_cast<std::size_t>(m.agents))
    throw std::invalid_argument("mechanism: bid count must match agent count");
  for (const auto& b : bids)
    if (b < Rational(0)) throw std::invalid_argument("mechanism: negative bid");
}

// k-th highest (1-based) among the given bids; nullopt when fewer than k.
std::optional<Rational> kth_highest(std::vector<Rational> v, int k) {
  if (static_cast<int>(v.size()) < k) return std::nullopt;
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end(),
                   [](const Rational& a, const Rational& b) { return a > b; });
  return v[static_cast<std::size_t>(k - 1)];
}

}  // namespace

AllocationCurve agent_curve(const Mechanism& m, int agent,
                            const std::vector<Rational>& opponent_bids) {
  m.validate();
  if (agent < 0 || agent >= m.agents) throw std::invalid_argument("mechanism: bad agent index");
  if (opponent_bids.size() != static_cast<std::size_t>(m.agents - 1))
    throw std::invalid_argument("mechanism: need one bid per opponent");

  switch (m.family) {
    case AllocationFamily::single_item_highest_bid: {
      if (opponent_bids.empty()) return AllocationCurve::constant(Rational(1));
      const Rational threshold = *std::max_element(opponent_bids.begin(), opponent_bids.end());
      return AllocationCurve::step(threshold);
    }
    case AllocationFamily::top_k_units: {
      auto threshold = kth_highest(opponent_bids, m.units);
      if (!threshold) return AllocationCurve::constant(Rational(1));  // unit always left over
      return AllocationCurve::step(*threshold);
    }
    case AllocationFamily::linear_capped:
      // min(b, cap): identity up to the cap, constant after
      return AllocationCurve::piecewise_polynomial(
          {m.cap}, {Polynomial({Rational(0), Rational(1)}), Polynomial::constant(m.cap)});
  }
  throw std::logic_error("agent_curve: unreachable");
}

std::vector<Rational> allocate(const Mechanism& m, const std::vector<Rational>& bids) {
  m.validate();
  check_bids(m, bids);
  const auto n = static_cast<std::size_t>(m.agents);
  std::vector<Rational> a(n, Rational(0));

  switch (m.family) {
    case AllocationFamily::single_item_highest_bid: {
      std::size_t winner = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (bids[i] > bids[winner]) winner = i;  // ties keep the lower index
      a[winner] = Rational(1);
      return a;
    }
    case AllocationFamily::top_k_units: {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return bids[i] > bids[j];  // bid descending; stable keeps index order at ties
      });
      const std::size_t winners = std::min<std::size_t>(n, static_cast<std::size_t>(m.units));
      for (std::size_t r = 0; r < winners; ++r) a[order[r]] = Rational(1);
      return a;
    }
    case AllocationFamily::linear_capped: {
      for (std::size_t i = 0; i < n; ++i) a[i] = min(bids[i], m.cap);
      return a;
    }
  }
  throw std::logic_error("allocate: unreachable");
}

Outcome run(const Mechanism& m, const BidProfile& profile) {
  m.validate();
  check_bids(m, profile.bids);
  if (!profile.valuations.empty() && profile.valuations.size() != profile.bids.size())
    throw std::invalid_argument("mechanism: valuation count must match bid count");

  const auto n = static_cast<std::size_t>(m.agents);
  Outcome out;
  out.allocation = allocate(m, profile.bids);
  out.payment.resize(n);
  out.utility.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Rational& b = profile.bids[i];
    if (m.payments == PaymentMode::pay_your_bid) {
      out.payment[i] = b * out.allocation[i];
    } else {
      std::vector<Rational> opp;
      opp.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) opp.push_back(profile.bids[j]);
      const AllocationCurve curve = agent_curve(m, static_cast<int>(i), opp);
      // realized allocation in the b * a term, curve integral below it;
      // the two differ only at tie points, where the realized value is the
      // step's right limit
      const auto integral = integrate_exact(curve, Rational(0), b);
      out.payment[i] = m.pivot_of(static_cast<int>(i)) + b * out.allocation[i] - *integral;
    }
    out.utility[i] = profile.valuation_of(i) * out.allocation[i] - out.payment[i];
  }
  return out;
}

std::vector<std::vector<Rational>> seeded_profiles(int count, int agents, std::uint64_t seed,
                                                   const Rational& max_bid) {
  std::mt19937_64 eng(seed);
  // raw engine output reduced by modulo: deterministic across platforms
  auto draw = [&](std::uint64_t k) { return static_cast<std::int64_t>(eng() % k); };
  std::vector<std::vector<Rational>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    std::vector<Rational> profile;
    profile.reserve(static_cast<std::size_t>(agents));
    for (int a = 0; a < agents; ++a) {
      const std::int64_t den = draw(16) + 1;
      const std::int64_t num_max = (max_bid * Rational(den)).floor();
      profile.emplace_back(draw(static_cast<std::uint64_t>(num_max) + 1), den);
    }
    out.push_back(std::move(profile));
  }
  return out;
}

TruthfulnessReport verify_truthfulness(const Mechanism& m,
                                       const std::vector<Rational>& valuations,
                                       const GridSpec& deviation_grid,
                                       const TruthfulnessOptions& opts) {
  m.validate();
  if (valuations.size() != static_cast<std::size_t>(m.agents))
    throw std::invalid_argument("mechanism: valuation count must match agent count");

  const int n_opp = m.agents - 1;
  std::vector<std::vector<Rational>> profiles;
  if (n_opp == 0) {
    profiles.push_back({});
  } else {
    // full lattice over the opponents, capped to keep the case count sane
    const std::size_t lattice_total = [&] {
      std::size_t t = 1;
      for (int i = 0; i < n_opp; ++i) {
        t *= opts.lattice.size();
        if (t > 4096) return std::size_t{4096};
      }
      return t;
    }();
    if (lattice_total < 4096) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(n_opp), 0);
      while (true) {
        std::vector<Rational> p;
        p.reserve(static_cast<std::size_t>(n_opp));
        for (int i = 0; i < n_opp; ++i) p.push_back(opts.lattice[idx[static_cast<std::size_t>(i)]]);
        profiles.push_back(std::move(p));
        int pos = 0;
        while (pos < n_opp) {
          if (++idx[static_cast<std::size_t>(pos)] < opts.lattice.size()) break;
          idx[static_cast<std::size_t>(pos)] = 0;
          ++pos;
        }
        if (pos == n_opp) break;
      }
    }
    auto seeded = seeded_profiles(opts.seeded_profiles, n_opp, opts.seed);
    profiles.insert(profiles.end(), seeded.begin(), seeded.end());
  }

  const auto deviations = deviation_grid.points();
  const std::size_t cases = static_cast<std::size_t>(m.agents) * profiles.size();

  struct CaseResult {
    std::vector<DeviationWitness> witnesses;
    std::size_t checked = 0;
  };

  auto one_case = [&](std::size_t c) {
    const int agent = static_cast<int>(c / profiles.size());
    const auto& opp_bids = profiles[c % profiles.size()];
    CaseResult result;

    auto full_profile = [&](const Rational& own_bid) {
      BidProfile p;
      p.bids.reserve(static_cast<std::size_t>(m.agents));
      std::size_t k = 0;
      for (int i = 0; i < m.agents; ++i) {
        if (i == agent)
          p.bids.push_back(own_bid);
        else
          p.bids.push_back(opp_bids[k++]);
      }
      p.valuations = p.bids;
      p.valuations[static_cast<std::size_t>(agent)] = valuations[static_cast<std::size_t>(agent)];
      return p;
    };

    const Rational v = valuations[static_cast<std::size_t>(agent)];
    const Rational truthful_u = run(m, full_profile(v)).utility[static_cast<std::size_t>(agent)];
    for (const Rational& d : deviations) {
      ++result.checked;
      const Rational u = run(m, full_profile(d)).utility[static_cast<std::size_t>(agent)];
      if (u > truthful_u + opts.tol) {
        DeviationWitness w;
        w.agent = agent;
        w.opponent_bids = opp_bids;
        w.truthful_bid = v;
        w.deviation = d;
        w.truthful_utility = truthful_u;
        w.deviated_utility = u;
        w.gain = u - truthful_u;
        result.witnesses.push_back(std::move(w));
      }
    }
    return std::vector<CaseResult>{std::move(result)};
  };

  auto results = detail::ordered_collect<CaseResult>(cases, opts.exec, one_case);

  TruthfulnessReport report;
  for (auto& r : results) {
    report.cases_checked += r.checked;
    for (auto& w : r.witnesses) report.witnesses.push_back(std::move(w));
  }
  report.truthful = report.witnesses.empty();
  return report;
}

}  // namespace mechkit
