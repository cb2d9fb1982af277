// Timing harness for the parallel kernels against their serial reference:
// the uniform Darboux refiner, the incentive pair scan, and the
// truthfulness deviation search. Results from both paths must match
// (bit-identical for the refiner, identical reports for the scans); the
// table prints the speedup.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mechkit/ic_check.hpp"
#include "mechkit/mechanism.hpp"

using namespace mechkit;

namespace {

double time_ms(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-34s %10.1f ms %10.1f ms %7.2fx   %s\n", name.c_str(), serial_ms, parallel_ms,
              serial_ms / parallel_ms, match ? "results match" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("built without openmp: parallel path runs serially\n\n");
#endif
  std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  // uniform Darboux refinement of the Cantor integral, 2^22 cells
  {
    const auto cantor = AllocationCurve::cantor();
    IntegrationOptions serial;
    serial.exec = Execution::serial;
    serial.max_cells = std::size_t{1} << 22;
    serial.tolerance = 1e-12;  // force the cap
    IntegrationOptions parallel = serial;
    parallel.exec = Execution::parallel;

    IntervalBound rs, rp;
    const double ts = time_ms([&] { rs = darboux_uniform(cantor, Rational(0), Rational(1), serial); });
    const double tp =
        time_ms([&] { rp = darboux_uniform(cantor, Rational(0), Rational(1), parallel); });
    report("darboux refine (cantor, 2^22)", ts, tp, rs.lower == rp.lower && rs.upper == rp.upper);
  }

  // incentive pair scan on a dense grid (float path: Cantor payment)
  {
    const auto f = AllocationCurve::cantor();
    const auto g = myerson_payment(f, Rational(0));
    const auto grid = GridSpec::range(Rational(0), Rational(1), Rational(1, 700));
    CheckOptions serial;
    serial.exec = Execution::serial;
    CheckOptions parallel;
    parallel.exec = Execution::parallel;

    ViolationReport rs, rp;
    const double ts = time_ms([&] { rs = check_ic_pairs(f, g, grid, serial); });
    const double tp = time_ms([&] { rp = check_ic_pairs(f, g, grid, parallel); });
    report("pair scan (cantor, ~700^2 pairs)", ts, tp,
           rs.pairs_checked == rp.pairs_checked && rs.verdict == rp.verdict &&
               rs.witnesses.size() == rp.witnesses.size());
  }

  // exact-rational pair scan (step payment with a perturbation: many witnesses)
  {
    const auto f = AllocationCurve::step(Rational(1, 2));
    const auto g = PaymentCurve::perturbed(
        myerson_payment(f, Rational(0)),
        AllocationCurve::scale(Rational(1, 10), AllocationCurve::step(Rational(3, 4))));
    const auto grid = GridSpec::range(Rational(0), Rational(2), Rational(1, 400));
    CheckOptions serial;
    serial.exec = Execution::serial;
    CheckOptions parallel;
    parallel.exec = Execution::parallel;

    ViolationReport rs, rp;
    const double ts = time_ms([&] { rs = check_ic_pairs(f, g, grid, serial); });
    const double tp = time_ms([&] { rp = check_ic_pairs(f, g, grid, parallel); });
    bool match = rs.witnesses.size() == rp.witnesses.size();
    for (std::size_t i = 0; match && i < rs.witnesses.size(); ++i)
      match = rs.witnesses[i].x == rp.witnesses[i].x && rs.witnesses[i].y == rp.witnesses[i].y;
    report("pair scan (rational, 800^2 pairs)", ts, tp, match);
  }

  // truthfulness deviation search over agents x profiles x deviations
  {
    Mechanism m;
    m.family = AllocationFamily::top_k_units;
    m.agents = 4;
    m.units = 2;
    const auto grid = GridSpec::range(Rational(0), Rational(4), Rational(1, 50));
    TruthfulnessOptions serial;
    serial.exec = Execution::serial;
    serial.seeded_profiles = 24;
    TruthfulnessOptions parallel = serial;
    parallel.exec = Execution::parallel;
    const std::vector<Rational> vals{Rational(1), Rational(2), Rational(3), Rational(1, 2)};

    TruthfulnessReport rs, rp;
    const double ts = time_ms([&] { rs = verify_truthfulness(m, vals, grid, serial); });
    const double tp = time_ms([&] { rp = verify_truthfulness(m, vals, grid, parallel); });
    report("truthfulness fuzz (4 agents)", ts, tp,
           rs.cases_checked == rp.cases_checked && rs.truthful == rp.truthful);
  }

  return 0;
}
