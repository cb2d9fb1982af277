// mechkit -- command-line front end: evaluate and integrate allocation
// curves, derive incentive-compatible payments, run the inequality checkers,
// simulate auctions, and reproduce the counterexample gallery.
//
// Exit codes: 0 all checks passed, 1 violation found (witnesses in the
// report), 2 inconclusive brackets present, 3 input or precondition error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mechkit/json_io.hpp"

using namespace mechkit;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInputError = 3;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return json::parse(in);  // parse_error carries the byte position
}

struct OutputSink {
  std::string path;  // empty = stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (text.empty() || text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
  }
};

GridSpec parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw std::invalid_argument("grid must be start:stop:step, got '" + text + "'");
  return GridSpec::range(Rational::parse(text.substr(0, first)),
                         Rational::parse(text.substr(first + 1, second - first - 1)),
                         Rational::parse(text.substr(second + 1)));
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Rational::parse(item));
  return out;
}

std::string describe(const IntervalBound& v) {
  if (v.exact) return v.value->str() + " (exact, = " + fmt_double(v.value->to_double()) + ")";
  return "[" + fmt_double(v.lower) + ", " + fmt_double(v.upper) + "] (width " +
         fmt_double(v.width()) + ")";
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::passed:
      return kExitOk;
    case Verdict::violated:
      return kExitViolation;
    case Verdict::inconclusive:
      return kExitInconclusive;
  }
  return kExitInputError;
}

struct CommonArgs {
  std::string curve_path;
  std::string payment_path;
  std::string payment2_path;
  std::string mechanism_path;
  std::string set_path;
  std::string grid = "0:2:0.01";
  std::string format = "text";
  std::string out_path;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string x_value = "1";
  std::string a_value = "0";
  std::string b_value = "1";
  std::string pivot = "0";
  std::string bids;
  std::string valuations;
  double integrate_tol = 1e-9;
  std::uint64_t max_cells = std::uint64_t{1} << 24;
  bool uniform_darboux = false;
  bool naive = false;
  bool sandwich = false;
  bool verify = false;
  bool serial = false;
};

IntegrationOptions integration_options(const CommonArgs& args) {
  IntegrationOptions opts;
  opts.tolerance = args.integrate_tol;
  opts.max_cells = static_cast<std::size_t>(args.max_cells);
  opts.uniform_darboux = args.uniform_darboux;
  opts.exec = args.serial ? Execution::serial : Execution::parallel;
  return opts;
}

CheckOptions check_options(const CommonArgs& args) {
  CheckOptions opts;
  opts.tol = args.tol;
  opts.integration = integration_options(args);
  opts.exec = args.serial ? Execution::serial : Execution::parallel;
  return opts;
}

int cmd_eval(const CommonArgs& args) {
  const auto curve = curve_from_json(load_json(args.curve_path));
  const Rational x = Rational::parse(args.x_value);
  const IntervalBound v = eval_bracket(curve, x);
  OutputSink sink{args.out_path};
  if (args.format == "json") {
    json j{{"x", rational_to_json(x)}, {"value", fmt_double(v.midpoint())}, {"exact", v.exact}};
    if (v.exact) j["value_exact"] = rational_to_json(*v.value);
    sink.write(j.dump(2));
  } else {
    sink.write("f(" + x.str() + ") = " + describe(v));
  }
  return kExitOk;
}

int cmd_integrate(const CommonArgs& args) {
  const auto curve = curve_from_json(load_json(args.curve_path));
  const Rational a = Rational::parse(args.a_value);
  const Rational b = Rational::parse(args.b_value);
  const IntervalBound v = integrate(curve, a, b, integration_options(args));
  OutputSink sink{args.out_path};
  if (args.format == "json") {
    json j{{"a", rational_to_json(a)},       {"b", rational_to_json(b)},
           {"lower", fmt_double(v.lower)},   {"upper", fmt_double(v.upper)},
           {"width", fmt_double(v.width())}, {"exact", v.exact}};
    if (v.exact) j["value_exact"] = rational_to_json(*v.value);
    sink.write(j.dump(2));
  } else {
    sink.write("integral of f over [" + a.str() + ", " + b.str() + "] = " + describe(v));
  }
  return kExitOk;
}

PaymentCurve payment_from_args(const CommonArgs& args) {
  if (!args.payment_path.empty()) return payment_from_json(load_json(args.payment_path));
  if (args.curve_path.empty())
    throw std::invalid_argument("need --payment, or --curve to derive the payment from");
  const auto f = curve_from_json(load_json(args.curve_path));
  return myerson_payment(f, Rational::parse(args.pivot));
}

int cmd_payment(const CommonArgs& args) {
  const Rational x = Rational::parse(args.x_value);
  OutputSink sink{args.out_path};
  json j{{"x", rational_to_json(x)}};
  std::string text;

  const PaymentCurve g = payment_from_args(args);
  const IntervalBound v = eval_payment(g, x, integration_options(args));
  j["payment"] = fmt_double(v.midpoint());
  j["exact"] = v.exact;
  if (v.exact) j["payment_exact"] = rational_to_json(*v.value);
  text = "g(" + x.str() + ") = " + describe(v);

  if (args.naive) {
    if (args.curve_path.empty())
      throw std::invalid_argument("--naive needs --curve (the allocation f)");
    const auto f = curve_from_json(load_json(args.curve_path));
    const auto naive = naive_by_parts_payment(f, x);
    if (naive) {
      j["naive_by_parts"] = fmt_double(naive->midpoint());
      text += "\nnaive by-parts integral of z f'(z) over [0, " + x.str() +
              "] = " + describe(*naive);
      // the gap is only meaningful against the payment derived right here;
      // a --payment file carries its own pivot
      if (naive->exact && v.exact && args.payment_path.empty()) {
        const Rational gap = *naive->value - (*v.value - Rational::parse(args.pivot));
        j["gap"] = rational_to_json(gap);
        text += "\ngap (naive - myerson, pivot removed) = " + gap.str();
      }
    } else {
      j["naive_by_parts"] = nullptr;
      text += "\nnaive by-parts payment: undefined for this curve family";
    }
  }
  sink.write(args.format == "json" ? j.dump(2) : text);
  return kExitOk;
}

int cmd_check_ic(const CommonArgs& args) {
  const auto f = curve_from_json(load_json(args.curve_path));
  const PaymentCurve g = payment_from_args(args);
  const GridSpec grid = parse_grid(args.grid);
  const auto report = args.sandwich ? check_sandwich(f, g, grid, check_options(args))
                                    : check_ic_pairs(f, g, grid, check_options(args));
  OutputSink sink{args.out_path};
  if (args.format == "json") {
    sink.write(report_to_json(report).dump(2));
  } else if (args.format == "csv") {
    sink.write(witnesses_csv(report));
  } else {
    std::string text = std::string(args.sandwich ? "sandwich" : "incentive") +
                       " check: " + (report.passed ? "no violations" : "VIOLATED") + " (" +
                       std::to_string(report.pairs_checked) + " pairs, " +
                       std::to_string(report.witnesses.size()) + " witnesses, " +
                       std::to_string(report.inconclusive.size()) + " inconclusive)";
    for (std::size_t i = 0; i < report.witnesses.size() && i < 5; ++i) {
      const auto& w = report.witnesses[i];
      text += "\n  witness x = " + w.x.str() + ", y = " + w.y.str() +
              ": g(y) - g(x) = " + fmt_double(w.lhs) + " < " + fmt_double(w.rhs);
    }
    sink.write(text);
  }
  return verdict_exit(report.verdict);
}

int cmd_check_re(const CommonArgs& args) {
  const auto f = curve_from_json(load_json(args.curve_path));
  if (args.payment_path.empty() || args.payment2_path.empty())
    throw std::invalid_argument("check-re needs --payment and --payment2");
  const auto g1 = payment_from_json(load_json(args.payment_path));
  const auto g2 = payment_from_json(load_json(args.payment2_path));
  const auto report = check_revenue_equivalence(f, g1, g2, parse_grid(args.grid),
                                                check_options(args));
  OutputSink sink{args.out_path};
  if (args.format == "json") {
    sink.write(report_to_json(report).dump(2));
  } else {
    std::string text;
    if (!report.precondition_ok) {
      text = "precondition failed: payment " + std::to_string(report.failing_payment) +
             " is not incentive compatible";
      if (report.precondition_witness)
        text += " (witness x = " + report.precondition_witness->x.str() +
                ", y = " + report.precondition_witness->y.str() + ")";
    } else {
      text = std::string("revenue equivalence: ") + (report.passed ? "holds" : "FAILS") +
             ", g2 - g1 = " +
             (report.constant_exact ? report.constant_exact->str()
                                    : fmt_double(*report.constant_diff)) +
             " (spread " + fmt_double(report.spread) + ")";
    }
    sink.write(text);
  }
  if (!report.precondition_ok) return kExitInputError;
  return report.passed ? kExitOk : kExitViolation;
}

int cmd_classify(const CommonArgs& args) {
  DiscontinuitySet set = [&] {
    if (!args.set_path.empty()) return set_from_json(load_json(args.set_path));
    if (args.curve_path.empty())
      throw std::invalid_argument("classify needs --curve or --set");
    return discontinuities(curve_from_json(load_json(args.curve_path)));
  }();
  const auto cls = classify_species(set);
  OutputSink sink{args.out_path};
  if (args.format == "json") {
    json j{{"set", set_to_json(set)}};
    switch (cls.status) {
      case SpeciesClassification::Status::first_species:
        j["first_species"] = true;
        j["type"] = cls.type;
        break;
      case SpeciesClassification::Status::not_first_species:
        j["first_species"] = false;
        break;
      case SpeciesClassification::Status::unsupported:
        j["first_species"] = nullptr;
        break;
    }
    sink.write(j.dump(2));
  } else {
    std::string text = "discontinuity set: " + set_to_json(set).dump();
    if (cls.status == SpeciesClassification::Status::first_species)
      text += "\nfirst species of type " + std::to_string(cls.type);
    else if (cls.status == SpeciesClassification::Status::not_first_species)
      text += "\nnot first species";
    else
      text += "\nclassification unsupported for this representation";
    sink.write(text);
  }
  return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
  const Mechanism m = mechanism_from_json(load_json(args.mechanism_path));
  OutputSink sink{args.out_path};

  if (args.verify) {
    if (args.valuations.empty())
      throw std::invalid_argument("--verify-truthfulness needs --valuations");
    TruthfulnessOptions opts;
    opts.seed = args.seed;
    opts.exec = args.serial ? Execution::serial : Execution::parallel;
    const auto report =
        verify_truthfulness(m, parse_rational_list(args.valuations), parse_grid(args.grid), opts);
    if (args.format == "json") {
      sink.write(report_to_json(report).dump(2));
    } else {
      std::string text = std::string("truthfulness: ") +
                         (report.truthful ? "no profitable deviation" : "DEVIATION FOUND") +
                         " (" + std::to_string(report.cases_checked) + " cases)";
      for (std::size_t i = 0; i < report.witnesses.size() && i < 5; ++i) {
        const auto& w = report.witnesses[i];
        text += "\n  agent " + std::to_string(w.agent) + " gains " + w.gain.str() +
                " by bidding " + w.deviation.str() + " instead of " + w.truthful_bid.str();
      }
      sink.write(text);
    }
    return report.truthful ? kExitOk : kExitViolation;
  }

  if (args.bids.empty()) throw std::invalid_argument("simulate needs --bids");
  BidProfile profile;
  profile.bids = parse_rational_list(args.bids);
  if (!args.valuations.empty()) profile.valuations = parse_rational_list(args.valuations);
  const Outcome out = run(m, profile);
  if (args.format == "json") {
    sink.write(outcome_to_json(out).dump(2));
  } else {
    auto row = [](const char* name, const std::vector<Rational>& v) {
      std::string s = name;
      for (const auto& r : v) s += " " + r.str();
      return s;
    };
    sink.write(row("allocation:", out.allocation) + "\n" + row("payment:   ", out.payment) +
               "\n" + row("utility:   ", out.utility));
  }
  return kExitOk;
}

int cmd_gallery(const CommonArgs& args) {
  OutputSink sink{args.out_path};
  json j = json::array();
  std::string text = "counterexample gallery\n======================";

  // Exhibit 1: the unit step H_q with q = 1/2. Integration by parts reads
  // the payment as the integral of z f'(z), which is 0; the correct value
  // at x = 1 is 1/2.
  {
    const auto f = AllocationCurve::step(Rational(1, 2));
    const Rational naive = *naive_by_parts_payment(f, Rational(1))->value;
    const Rational correct = *payment_exact(myerson_payment(f, Rational(0)), Rational(1));
    const Rational gap = correct - naive;
    j.push_back(json{{"exhibit", "unit step"},
                     {"f", "H_q with q = 1/2"},
                     {"naive_by_parts", rational_to_json(naive)},
                     {"g_at_1", rational_to_json(correct)},
                     {"gap", rational_to_json(gap)}});
    text += "\n\n[1] f = H_q, q = 1/2 (a jump the by-parts rule cannot see)";
    text += "\n    integral of z f'(z) over [0,1] = " + naive.str();
    text += "\n    g(1) = C + 1 f(1) - integral of f = " + correct.str();
    text += "\n    gap = " + gap.str();
  }

  // Exhibit 2: the Cantor function. Continuous, f' = 0 wherever defined, so
  // the naive rule still returns 0; bracketed integration pins g(1) at 1/2.
  {
    const auto f = AllocationCurve::cantor();
    const Rational naive = *naive_by_parts_payment(f, Rational(1))->value;
    IntegrationOptions opts = integration_options(args);
    opts.uniform_darboux = true;  // exercise the refining engine end to end
    const IntervalBound g1 = eval_payment(myerson_payment(f, Rational(0)), Rational(1), opts);
    j.push_back(json{{"exhibit", "cantor"},
                     {"naive_by_parts", rational_to_json(naive)},
                     {"g_at_1_lower", fmt_double(g1.lower)},
                     {"g_at_1_upper", fmt_double(g1.upper)}});
    text += "\n\n[2] f = Cantor function (continuous, f' = 0 almost everywhere)";
    text += "\n    integral of z f'(z) over [0,1] = " + naive.str();
    text += "\n    g(1) via Darboux bracketing = " + describe(g1);
  }

  // Exhibit 3: the step series with jumps at 1 - 2^-n. Its discontinuity
  // set accumulates at 1: first species of type 1, beyond piecewise
  // continuity, yet the payment is still well defined.
  {
    const auto f = AllocationCurve::step_series();
    const auto set = discontinuities(f);
    const auto cls = classify_species(set);
    const IntervalBound g1 = eval_payment(myerson_payment(f, Rational(0)), Rational(1));
    j.push_back(json{{"exhibit", "step series"},
                     {"species_type", cls.type},
                     {"g_at_1_lower", fmt_double(g1.lower)},
                     {"g_at_1_upper", fmt_double(g1.upper)},
                     {"g_at_1_exact", g1.exact ? rational_to_json(*g1.value) : json(nullptr)}});
    text += "\n\n[3] f = sum of 2^-n steps at q_n = 1 - 2^-n (infinitely many jumps)";
    text += "\n    discontinuity set {1/2, 3/4, 7/8, ...}: first species of type " +
            std::to_string(cls.type);
    text += "\n    g(1) = " + describe(g1);
  }

  sink.write(args.format == "json" ? j.dump(2) : text);
  return kExitOk;
}

void add_common_output(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--format", args.format, "output format: text, json, or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--out", args.out_path, "write the report to this path instead of stdout");
}

void add_integration_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--integrate-tol", args.integrate_tol,
                  "target bracket width for refined integrals");
  cmd->add_option("--max-cells", args.max_cells, "cell cap for the Darboux refiner");
  cmd->add_flag("--uniform-darboux", args.uniform_darboux,
                "force the uniform-partition Darboux engine for Cantor/step-series leaves");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mechkit: incentive-compatible payments for monotone allocation curves,\n"
      "executable incentive-compatibility checks, and the counterexample gallery."};
  app.require_subcommand(1);
  CommonArgs args;

  auto* eval_cmd = app.add_subcommand("eval", "evaluate an allocation curve at a point");
  eval_cmd->add_option("--curve", args.curve_path, "curve JSON file")->required();
  eval_cmd->add_option("-x", args.x_value, "evaluation point (rational or decimal)");
  add_common_output(eval_cmd, args);

  auto* int_cmd = app.add_subcommand("integrate", "integrate an allocation curve over [a, b]");
  int_cmd->add_option("--curve", args.curve_path, "curve JSON file")->required();
  int_cmd->add_option("-a", args.a_value, "lower endpoint");
  int_cmd->add_option("-b", args.b_value, "upper endpoint");
  add_integration_flags(int_cmd, args);
  add_common_output(int_cmd, args);

  auto* pay_cmd = app.add_subcommand(
      "payment", "evaluate a payment rule (derived from --curve, or a --payment file)");
  pay_cmd->add_option("--curve", args.curve_path, "allocation curve JSON file");
  pay_cmd->add_option("--payment", args.payment_path, "payment JSON file");
  pay_cmd->add_option("--pivot", args.pivot, "pivot constant C = g(0)");
  pay_cmd->add_option("-x", args.x_value, "evaluation point");
  pay_cmd->add_flag("--naive", args.naive,
                    "also compute the integration-by-parts payment and the gap");
  add_integration_flags(pay_cmd, args);
  add_common_output(pay_cmd, args);

  auto* ic_cmd = app.add_subcommand("check-ic", "verify the incentive inequality on a grid");
  ic_cmd->add_option("--curve", args.curve_path, "allocation curve JSON file")->required();
  ic_cmd->add_option("--payment", args.payment_path, "payment JSON file (default: derived)");
  ic_cmd->add_option("--pivot", args.pivot, "pivot when deriving the payment");
  ic_cmd->add_option("--grid", args.grid, "grid as start:stop:step");
  ic_cmd->add_option("--tol", args.tol, "decision tolerance for bracketed paths");
  ic_cmd->add_flag("--sandwich", args.sandwich, "check both sides of the sandwich form");
  ic_cmd->add_flag("--serial", args.serial, "run the pair scan single-threaded");
  add_integration_flags(ic_cmd, args);
  add_common_output(ic_cmd, args);

  auto* re_cmd = app.add_subcommand(
      "check-re", "check that two incentive-compatible payments differ by a constant");
  re_cmd->add_option("--curve", args.curve_path, "allocation curve JSON file")->required();
  re_cmd->add_option("--payment", args.payment_path, "first payment JSON file")->required();
  re_cmd->add_option("--payment2", args.payment2_path, "second payment JSON file")->required();
  re_cmd->add_option("--grid", args.grid, "grid as start:stop:step");
  re_cmd->add_option("--tol", args.tol, "tolerance on the constant");
  re_cmd->add_flag("--serial", args.serial, "run single-threaded");
  add_common_output(re_cmd, args);

  auto* cls_cmd = app.add_subcommand(
      "classify", "classify a discontinuity set (first species of type n)");
  cls_cmd->add_option("--curve", args.curve_path, "derive the set from this curve");
  cls_cmd->add_option("--set", args.set_path, "or classify this set JSON file");
  add_common_output(cls_cmd, args);

  auto* sim_cmd = app.add_subcommand("simulate", "run an auction or fuzz its truthfulness");
  sim_cmd->add_option("--mechanism", args.mechanism_path, "mechanism JSON file")->required();
  sim_cmd->add_option("--bids", args.bids, "comma-separated bids");
  sim_cmd->add_option("--valuations", args.valuations, "comma-separated true valuations");
  sim_cmd->add_flag("--verify-truthfulness", args.verify,
                    "search the deviation grid for profitable lies");
  sim_cmd->add_option("--grid", args.grid, "deviation grid as start:stop:step");
  sim_cmd->add_option("--seed", args.seed, "seed for opponent-profile sampling");
  sim_cmd->add_flag("--serial", args.serial, "run single-threaded");
  add_common_output(sim_cmd, args);

  auto* gal_cmd = app.add_subcommand(
      "gallery", "reproduce the three exhibits where naive integration by parts fails");
  add_integration_flags(gal_cmd, args);
  add_common_output(gal_cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval_cmd->parsed()) return cmd_eval(args);
    if (int_cmd->parsed()) return cmd_integrate(args);
    if (pay_cmd->parsed()) return cmd_payment(args);
    if (ic_cmd->parsed()) return cmd_check_ic(args);
    if (re_cmd->parsed()) return cmd_check_re(args);
    if (cls_cmd->parsed()) return cmd_classify(args);
    if (sim_cmd->parsed()) return cmd_simulate(args);
    if (gal_cmd->parsed()) return cmd_gallery(args);
  } catch (const json::parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NotMonotoneError& e) {
    std::cerr << "precondition error: " << e.what();
    if (e.report.witness)
      std::cerr << " (decreases between x = " << e.report.witness->x.str()
                << " and y = " << e.report.witness->y.str() << ")";
    std::cerr << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
