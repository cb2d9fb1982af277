#include "mechkit/json_io.hpp"

#include <cinttypes>
#include <cstdio>

namespace mechkit {

using nlohmann::json;

namespace {

// stable double formatting for byte-identical reports
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void bad_format(const std::string& what, const json& j) {
  throw std::invalid_argument("json: " + what + " (got " + j.dump().substr(0, 120) + ")");
}

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad_format(std::string("missing field '") + key + "'", j);
  return *it;
}

}  // namespace

json rational_to_json(const Rational& r) {
  return json{{"num", r.num()}, {"den", r.den()}};
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_object()) {
    const std::int64_t num = need(j, "num").get<std::int64_t>();
    const std::int64_t den = j.contains("den") ? j["den"].get<std::int64_t>() : 1;
    return Rational(num, den);
  }
  bad_format("expected a rational ({num, den}, integer, or 'p/q' string)", j);
}

namespace {

std::vector<Rational> rationals_from_json(const json& j) {
  if (!j.is_array()) bad_format("expected an array of rationals", j);
  std::vector<Rational> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(rational_from_json(e));
  return out;
}

json rationals_to_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(rational_to_json(r));
  return out;
}

}  // namespace

json curve_to_json(const AllocationCurve& c) {
  switch (c.kind()) {
    case CurveKind::piecewise_constant:
      return json{{"kind", "piecewise_constant"},
                  {"breakpoints", rationals_to_json(c.breakpoints())},
                  {"values", rationals_to_json(c.values())}};
    case CurveKind::piecewise_polynomial: {
      json pieces = json::array();
      for (const auto& p : c.pieces()) pieces.push_back(rationals_to_json(p.coeffs()));
      return json{{"kind", "piecewise_polynomial"},
                  {"breakpoints", rationals_to_json(c.breakpoints())},
                  {"pieces", pieces}};
    }
    case CurveKind::cantor:
      return json{{"kind", "cantor"}};
    case CurveKind::step_series:
      return json{{"kind", "step_series"}};
    case CurveKind::sum:
      return json{{"kind", "sum"}, {"left", curve_to_json(c.left())},
                  {"right", curve_to_json(c.right())}};
    case CurveKind::scale:
      return json{{"kind", "scale"}, {"factor", rational_to_json(c.factor())},
                  {"inner", curve_to_json(c.inner())}};
  }
  throw std::logic_error("curve_to_json: unreachable");
}

AllocationCurve curve_from_json(const json& j) {
  if (!j.is_object()) bad_format("expected a curve object", j);
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "piecewise_constant")
    return AllocationCurve::piecewise_constant(rationals_from_json(need(j, "breakpoints")),
                                               rationals_from_json(need(j, "values")));
  if (kind == "piecewise_polynomial") {
    std::vector<Polynomial> pieces;
    for (const auto& p : need(j, "pieces")) pieces.emplace_back(rationals_from_json(p));
    return AllocationCurve::piecewise_polynomial(rationals_from_json(need(j, "breakpoints")),
                                                 std::move(pieces));
  }
  if (kind == "cantor") return AllocationCurve::cantor();
  if (kind == "step_series") return AllocationCurve::step_series();
  if (kind == "sum")
    return AllocationCurve::sum(curve_from_json(need(j, "left")),
                                curve_from_json(need(j, "right")));
  if (kind == "scale")
    return AllocationCurve::scale(rational_from_json(need(j, "factor")),
                                  curve_from_json(need(j, "inner")));
  bad_format("unknown curve kind '" + kind + "'", j);
}

json payment_to_json(const PaymentCurve& g) {
  switch (g.form()) {
    case PaymentForm::myerson_closed:
    case PaymentForm::myerson_bracketed:
      return json{{"kind", "myerson"}, {"f", curve_to_json(g.base_curve())},
                  {"pivot", rational_to_json(g.pivot())}};
    case PaymentForm::direct:
      return json{{"kind", "direct"}, {"g", curve_to_json(g.base_curve())},
                  {"pivot", rational_to_json(g.pivot())}};
    case PaymentForm::perturbed:
      return json{{"kind", "perturbed"}, {"inner", payment_to_json(g.inner())},
                  {"perturbation", curve_to_json(g.perturbation())}};
  }
  throw std::logic_error("payment_to_json: unreachable");
}

PaymentCurve payment_from_json(const json& j) {
  if (!j.is_object()) bad_format("expected a payment object", j);
  const std::string kind = need(j, "kind").get<std::string>();
  const Rational pivot = j.contains("pivot") ? rational_from_json(j["pivot"]) : Rational(0);
  if (kind == "myerson") return myerson_payment(curve_from_json(need(j, "f")), pivot);
  if (kind == "direct") return PaymentCurve::direct(curve_from_json(need(j, "g")), pivot);
  if (kind == "perturbed")
    return PaymentCurve::perturbed(payment_from_json(need(j, "inner")),
                                   curve_from_json(need(j, "perturbation")));
  bad_format("unknown payment kind '" + kind + "'", j);
}

json set_to_json(const DiscontinuitySet& s) {
  switch (s.kind()) {
    case DiscontinuitySet::Kind::empty:
      return json{{"kind", "empty"}};
    case DiscontinuitySet::Kind::finite:
      return json{{"kind", "finite"}, {"points", rationals_to_json(s.points())}};
    case DiscontinuitySet::Kind::geometric:
      return json{{"kind", "geometric"},
                  {"limit", rational_to_json(s.limit())},
                  {"offset", rational_to_json(s.offset())},
                  {"ratio", rational_to_json(s.ratio())},
                  {"level", s.level()}};
    case DiscontinuitySet::Kind::union_set: {
      json parts = json::array();
      for (const auto& p : s.parts()) parts.push_back(set_to_json(p));
      return json{{"kind", "union"}, {"parts", parts}};
    }
  }
  throw std::logic_error("set_to_json: unreachable");
}

DiscontinuitySet set_from_json(const json& j) {
  if (!j.is_object()) bad_format("expected a set object", j);
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "empty") return DiscontinuitySet::empty();
  if (kind == "finite") return DiscontinuitySet::finite(rationals_from_json(need(j, "points")));
  if (kind == "geometric")
    return DiscontinuitySet::geometric(rational_from_json(need(j, "limit")),
                                       rational_from_json(need(j, "offset")),
                                       rational_from_json(need(j, "ratio")),
                                       j.contains("level") ? j["level"].get<int>() : 1);
  if (kind == "union") {
    std::vector<DiscontinuitySet> parts;
    for (const auto& p : need(j, "parts")) parts.push_back(set_from_json(p));
    return DiscontinuitySet::union_of(std::move(parts));
  }
  bad_format("unknown set kind '" + kind + "'", j);
}

json mechanism_to_json(const Mechanism& m) {
  json j{{"agents", m.agents},
         {"payments", m.payments == PaymentMode::myerson ? "myerson" : "pay_your_bid"}};
  switch (m.family) {
    case AllocationFamily::single_item_highest_bid:
      j["family"] = "single_item";
      break;
    case AllocationFamily::top_k_units:
      j["family"] = "top_k";
      j["k"] = m.units;
      break;
    case AllocationFamily::linear_capped:
      j["family"] = "linear_capped";
      j["cap"] = rational_to_json(m.cap);
      break;
  }
  if (!m.pivots.empty()) j["pivots"] = rationals_to_json(m.pivots);
  return j;
}

Mechanism mechanism_from_json(const json& j) {
  if (!j.is_object()) bad_format("expected a mechanism object", j);
  Mechanism m;
  const std::string family = need(j, "family").get<std::string>();
  if (family == "single_item") {
    m.family = AllocationFamily::single_item_highest_bid;
  } else if (family == "top_k") {
    m.family = AllocationFamily::top_k_units;
    m.units = need(j, "k").get<int>();
  } else if (family == "linear_capped") {
    m.family = AllocationFamily::linear_capped;
    m.cap = rational_from_json(need(j, "cap"));
  } else {
    bad_format("unknown mechanism family '" + family + "'", j);
  }
  m.agents = need(j, "agents").get<int>();
  if (j.contains("payments")) {
    const std::string p = j["payments"].get<std::string>();
    if (p == "myerson")
      m.payments = PaymentMode::myerson;
    else if (p == "pay_your_bid")
      m.payments = PaymentMode::pay_your_bid;
    else
      bad_format("unknown payment mode '" + p + "'", j);
  }
  if (j.contains("pivots")) m.pivots = rationals_from_json(j["pivots"]);
  m.validate();
  return m;
}

json vector_allocation_to_json(const VectorAllocation& f) {
  switch (f.kind()) {
    case VectorAllocation::Kind::diagonal: {
      json coords = json::array();
      for (const auto& c : f.coordinates()) coords.push_back(curve_to_json(c));
      return json{{"kind", "diagonal"}, {"coordinates", coords}};
    }
    case VectorAllocation::Kind::linear: {
      json rows = json::array();
      for (const auto& row : f.matrix()) rows.push_back(rationals_to_json(row));
      return json{{"kind", "linear"}, {"matrix", rows}};
    }
    case VectorAllocation::Kind::bundle_table: {
      json table = json::array();
      for (const auto& v : f.table()) table.push_back(rationals_to_json(v));
      return json{{"kind", "bundle_table"},
                  {"dimension", f.dimension()},
                  {"cell_size", rational_to_json(f.cell_size())},
                  {"cells_per_axis", f.cells_per_axis()},
                  {"table", table}};
    }
  }
  throw std::logic_error("vector_allocation_to_json: unreachable");
}

VectorAllocation vector_allocation_from_json(const json& j) {
  if (!j.is_object()) bad_format("expected a vector allocation object", j);
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "diagonal") {
    std::vector<AllocationCurve> coords;
    for (const auto& c : need(j, "coordinates")) coords.push_back(curve_from_json(c));
    return VectorAllocation::diagonal(std::move(coords));
  }
  if (kind == "linear") {
    std::vector<std::vector<Rational>> matrix;
    for (const auto& row : need(j, "matrix")) matrix.push_back(rationals_from_json(row));
    return VectorAllocation::linear(std::move(matrix));
  }
  if (kind == "bundle_table") {
    std::vector<Vec> table;
    for (const auto& v : need(j, "table")) table.push_back(rationals_from_json(v));
    return VectorAllocation::bundle_table(need(j, "dimension").get<int>(),
                                          rational_from_json(need(j, "cell_size")),
                                          need(j, "cells_per_axis").get<std::vector<int>>(),
                                          std::move(table));
  }
  bad_format("unknown vector allocation kind '" + kind + "'", j);
}

// ---- reports --------------------------------------------------------------------

namespace {

json witness_to_json(const PairWitness& w) {
  return json{{"x", rational_to_json(w.x)},   {"y", rational_to_json(w.y)},
              {"lhs", fmt_double(w.lhs)},     {"rhs", fmt_double(w.rhs)},
              {"slack", fmt_double(w.slack)}, {"side", w.side}};
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::passed:
      return "passed";
    case Verdict::violated:
      return "violated";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

}  // namespace

json report_to_json(const ViolationReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(witness_to_json(w));
  json inconclusive = json::array();
  for (const auto& w : r.inconclusive) inconclusive.push_back(witness_to_json(w));
  return json{{"verdict", verdict_name(r.verdict)},
              {"passed", r.passed},
              {"witnesses", witnesses},
              {"inconclusive", inconclusive},
              {"max_slack_violation", fmt_double(r.max_slack_violation)},
              {"pairs_checked", r.pairs_checked},
              {"exact_path", r.exact_path}};
}

json report_to_json(const NecessityReport& r) {
  json j{{"ic", report_to_json(r.ic)},
         {"monotone_on_grid", r.monotone_on_grid},
         {"implication_holds", r.implication_holds}};
  if (r.monotone_witness) {
    j["monotone_witness"] = json{{"x", rational_to_json(r.monotone_witness->x)},
                                 {"y", rational_to_json(r.monotone_witness->y)},
                                 {"fx", fmt_double(r.monotone_witness->fx)},
                                 {"fy", fmt_double(r.monotone_witness->fy)}};
  }
  if (r.forced_violation) j["forced_violation"] = witness_to_json(*r.forced_violation);
  return j;
}

json report_to_json(const RevenueReport& r) {
  json j{{"precondition_ok", r.precondition_ok}, {"passed", r.passed}};
  if (!r.precondition_ok) {
    j["failing_payment"] = r.failing_payment;
    if (r.precondition_witness) j["witness"] = witness_to_json(*r.precondition_witness);
    return j;
  }
  if (r.constant_diff) j["constant_diff"] = fmt_double(*r.constant_diff);
  if (r.constant_exact) j["constant_exact"] = rational_to_json(*r.constant_exact);
  j["spread"] = fmt_double(r.spread);
  if (!r.spread_witnesses.empty()) j["spread_witnesses"] = rationals_to_json(r.spread_witnesses);
  return j;
}

json report_to_json(const DerivativeReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back(json{{"x", rational_to_json(p.x)},
                          {"finite_difference", fmt_double(p.finite_difference)},
                          {"analytic", fmt_double(p.analytic)},
                          {"error", fmt_double(p.error)},
                          {"allowance", fmt_double(p.allowance)},
                          {"ok", p.ok}});
  }
  return json{{"passed", r.passed}, {"points", points}};
}

json report_to_json(const TruthfulnessReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back(json{{"agent", w.agent},
                             {"opponent_bids", rationals_to_json(w.opponent_bids)},
                             {"truthful_bid", rational_to_json(w.truthful_bid)},
                             {"deviation", rational_to_json(w.deviation)},
                             {"truthful_utility", rational_to_json(w.truthful_utility)},
                             {"deviated_utility", rational_to_json(w.deviated_utility)},
                             {"gain", rational_to_json(w.gain)}});
  }
  return json{{"truthful", r.truthful},
              {"witnesses", witnesses},
              {"cases_checked", r.cases_checked}};
}

json report_to_json(const NdViolationReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back(json{{"x", rationals_to_json(w.x)},
                             {"y", rationals_to_json(w.y)},
                             {"lhs", rational_to_json(w.lhs)},
                             {"rhs", rational_to_json(w.rhs)},
                             {"scalar_route", w.scalar_route}});
  }
  return json{{"passed", r.passed},
              {"witnesses", witnesses},
              {"pairs_checked", r.pairs_checked},
              {"scalar_checks", r.scalar_checks}};
}

json outcome_to_json(const Outcome& o) {
  return json{{"allocation", rationals_to_json(o.allocation)},
              {"payment", rationals_to_json(o.payment)},
              {"utility", rationals_to_json(o.utility)}};
}

std::string witnesses_csv(const ViolationReport& r) {
  std::string out = "x,y,lhs,rhs,slack\n";
  for (const auto& w : r.witnesses) {
    out += w.x.str() + "," + w.y.str() + "," + fmt_double(w.lhs) + "," + fmt_double(w.rhs) + "," +
           fmt_double(w.slack) + "\n";
  }
  return out;
}

}  // namespace mechkit
