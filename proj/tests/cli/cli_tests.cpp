// End-to-end tests for the mechkit binary: fixture files in a temp
// directory, one process per command, asserting the exit-code contract
// (0 pass, 1 violation, 2 inconclusive, 3 input error), report contents,
// and byte-identical reruns.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::cerr << "[FAIL] " << what << "\n";
    ++failures;
  } else {
    std::cout << "[ ok ] " << what << "\n";
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

struct Runner {
  std::string binary;
  fs::path dir;

  // returns the exit code; stdout+stderr captured into `out`
  int run(const std::string& cli_args, std::string* out = nullptr) const {
    const fs::path capture = dir / "capture.txt";
    const std::string cmd = binary + " " + cli_args + " > " + capture.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    if (out) *out = slurp(capture);
    if (raw == -1) return -1;
    return WEXITSTATUS(raw);
  }
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: mechkit_cli_tests <path-to-mechkit-binary>\n";
    return 2;
  }
  Runner mk{argv[1], fs::temp_directory_path() / "mechkit_cli_tests"};
  fs::create_directories(mk.dir);
  const std::string d = mk.dir.string() + "/";

  // ---- fixtures ----
  put(mk.dir / "h_half.json", R"({
    "kind": "piecewise_constant",
    "breakpoints": [{"num": 1, "den": 2}],
    "values": [{"num": 0, "den": 1}, {"num": 1, "den": 1}]
  })");
  put(mk.dir / "cantor.json", R"({"kind": "cantor"})");
  put(mk.dir / "series.json", R"({"kind": "step_series"})");
  put(mk.dir / "myerson_h.json", R"({
    "kind": "myerson",
    "f": {"kind": "piecewise_constant",
          "breakpoints": [{"num": 1, "den": 2}],
          "values": [{"num": 0, "den": 1}, {"num": 1, "den": 1}]},
    "pivot": 0
  })");
  put(mk.dir / "myerson_h_7_2.json", R"({
    "kind": "myerson",
    "f": {"kind": "piecewise_constant",
          "breakpoints": [{"num": 1, "den": 2}],
          "values": [{"num": 0, "den": 1}, {"num": 1, "den": 1}]},
    "pivot": "7/2"
  })");
  put(mk.dir / "perturbed.json", R"({
    "kind": "perturbed",
    "inner": {"kind": "myerson",
              "f": {"kind": "piecewise_constant",
                    "breakpoints": [{"num": 1, "den": 2}],
                    "values": [{"num": 0, "den": 1}, {"num": 1, "den": 1}]},
              "pivot": 0},
    "perturbation": {"kind": "scale", "factor": {"num": 1, "den": 10},
                     "inner": {"kind": "piecewise_constant",
                               "breakpoints": [{"num": 3, "den": 4}],
                               "values": [{"num": 0, "den": 1}, {"num": 1, "den": 1}]}}
  })");
  put(mk.dir / "single_item.json", R"({
    "family": "single_item", "agents": 2, "payments": "myerson"
  })");
  put(mk.dir / "pay_your_bid.json", R"({
    "family": "single_item", "agents": 2, "payments": "pay_your_bid"
  })");
  put(mk.dir / "broken.json", R"({"kind": "piecewise_constant", )");
  put(mk.dir / "decreasing_myerson.json", R"({
    "kind": "myerson",
    "f": {"kind": "piecewise_constant",
          "breakpoints": [{"num": 1, "den": 1}],
          "values": [{"num": 1, "den": 1}, {"num": 0, "den": 1}]},
    "pivot": 0
  })");

  std::string out;

  // ---- eval / integrate / payment ----
  expect(mk.run("eval --curve " + d + "h_half.json -x 1/2", &out) == 0 &&
             out.find("f(1/2) = 0") != std::string::npos,
         "eval at the threshold returns the lower value");
  expect(mk.run("eval --curve " + d + "h_half.json -x 0.6", &out) == 0 &&
             out.find("= 1 (exact") != std::string::npos,
         "eval just above the threshold returns 1");

  expect(mk.run("integrate --curve " + d + "h_half.json -a 0 -b 1", &out) == 0 &&
             out.find("1/2 (exact") != std::string::npos,
         "integrate the unit step exactly");
  expect(mk.run("integrate --curve " + d + "series.json -a 0 -b 0.8", &out) == 0 &&
             out.find("13/80") != std::string::npos,
         "integrate the step series exactly (13/80 = 0.1625)");

  expect(mk.run("payment --curve " + d + "h_half.json --pivot 0 -x 1 --naive", &out) == 0 &&
             out.find("g(1) = 1/2") != std::string::npos &&
             out.find("[0, 1] = 0") != std::string::npos &&
             out.find("gap (naive - myerson, pivot removed) = -1/2") != std::string::npos,
         "payment for the unit step shows the by-parts gap");
  expect(mk.run("payment --payment " + d + "myerson_h_7_2.json -x 0", &out) == 0 &&
             out.find("g(0) = 7/2") != std::string::npos,
         "payment at zero is the pivot");

  // ---- check-ic exit codes ----
  expect(mk.run("check-ic --curve " + d + "h_half.json --payment " + d + "myerson_h.json") == 0,
         "check-ic on the derived payment exits 0");
  expect(mk.run("check-ic --curve " + d + "h_half.json --payment " + d + "perturbed.json",
                &out) == 1 &&
             out.find("VIOLATED") != std::string::npos,
         "check-ic on the perturbed payment exits 1");
  expect(mk.run("check-ic --curve " + d + "h_half.json --payment " + d +
                "perturbed.json --format csv", &out) == 1 &&
             out.find("4/5,7/10,") != std::string::npos,
         "the csv witness table contains the pair (4/5, 7/10)");
  expect(mk.run("check-ic --curve " + d + "cantor.json --grid 0:1:1/4 --uniform-darboux "
                "--max-cells 16") == 2,
         "check-ic with an under-refined bracket exits 2 (inconclusive)");
  expect(mk.run("check-ic --curve " + d + "broken.json", &out) == 3 &&
             out.find("input error") != std::string::npos,
         "malformed JSON exits 3 with a parse diagnostic");
  expect(mk.run("check-ic --curve " + d + "h_half.json --grid 0-2-0.01", &out) == 3 &&
             out.find("start:stop:step") != std::string::npos,
         "malformed grid syntax exits 3");
  expect(mk.run("check-ic --curve " + d + "h_half.json --payment " + d +
                "decreasing_myerson.json", &out) == 3 &&
             out.find("not monotone") != std::string::npos,
         "a myerson payload on a decreasing curve exits 3");

  // sandwich flag shares the exit contract
  expect(mk.run("check-ic --sandwich --curve " + d + "h_half.json --payment " + d +
                "myerson_h.json") == 0,
         "sandwich check passes for the derived payment");

  // ---- check-re ----
  expect(mk.run("check-re --curve " + d + "h_half.json --payment " + d + "myerson_h.json" +
                " --payment2 " + d + "myerson_h_7_2.json", &out) == 0 &&
             out.find("g2 - g1 = 7/2") != std::string::npos,
         "check-re reports the pivot difference 7/2");
  expect(mk.run("check-re --curve " + d + "h_half.json --payment " + d + "myerson_h.json" +
                " --payment2 " + d + "perturbed.json", &out) == 3 &&
             out.find("payment 2 is not incentive compatible") != std::string::npos,
         "check-re flags a non-solution as a precondition failure (exit 3)");

  // ---- classify ----
  expect(mk.run("classify --curve " + d + "series.json", &out) == 0 &&
             out.find("first species of type 1") != std::string::npos,
         "classify the step series as first species of type 1");
  expect(mk.run("classify --curve " + d + "h_half.json", &out) == 0 &&
             out.find("first species of type 0") != std::string::npos,
         "classify a finite jump set as type 0");

  // ---- simulate ----
  expect(mk.run("simulate --mechanism " + d + "single_item.json --bids 3,5", &out) == 0 &&
             out.find("allocation: 0 1") != std::string::npos &&
             out.find("payment:    0 3") != std::string::npos,
         "simulate a second-price sale: winner pays the losing bid");
  expect(mk.run("simulate --mechanism " + d + "single_item.json --bids 3,5 --valuations 3,5 "
                "--verify-truthfulness --grid 0:6:1/2") == 0,
         "derived payments survive the truthfulness fuzz (exit 0)");
  expect(mk.run("simulate --mechanism " + d + "pay_your_bid.json --bids 5,3 --valuations 5,3 "
                "--verify-truthfulness --grid 0:6:1/2", &out) == 1 &&
             out.find("DEVIATION FOUND") != std::string::npos,
         "pay-your-bid fails the truthfulness fuzz (exit 1)");
  expect(mk.run("simulate --mechanism " + d + "single_item.json") == 3,
         "simulate without bids exits 3");

  // ---- gallery ----
  expect(mk.run("gallery --max-cells 65536", &out) == 0 &&
             out.find("gap = 1/2") != std::string::npos &&
             out.find("first species of type 1") != std::string::npos &&
             out.find("g(1) = 2/3") != std::string::npos,
         "gallery reproduces the three exhibits");

  // ---- formats and determinism ----
  const std::string check_cmd = "check-ic --curve " + d + "h_half.json --payment " + d +
                                "perturbed.json --format csv --out " + d;
  expect(mk.run(check_cmd + "w1.csv") == 1 && mk.run(check_cmd + "w2.csv") == 1 &&
             slurp(mk.dir / "w1.csv") == slurp(mk.dir / "w2.csv") &&
             slurp(mk.dir / "w1.csv").rfind("x,y,lhs,rhs,slack\n", 0) == 0,
         "csv reports are byte-identical across runs and carry the fixed header");

  const std::string gal_cmd = "gallery --max-cells 4096 --format json --out " + d;
  expect(mk.run(gal_cmd + "g1.json") == 0 && mk.run(gal_cmd + "g2.json") == 0 &&
             slurp(mk.dir / "g1.json") == slurp(mk.dir / "g2.json"),
         "json gallery output is byte-identical across runs");

  const std::string sim_cmd = "simulate --mechanism " + d + "pay_your_bid.json --bids 5,3 "
                              "--valuations 5,3 --verify-truthfulness --grid 0:6:1/2 --seed 9 "
                              "--format json --out " + d;
  mk.run(sim_cmd + "t1.json");
  mk.run(sim_cmd + "t2.json");
  expect(slurp(mk.dir / "t1.json") == slurp(mk.dir / "t2.json"),
         "seeded truthfulness reports are byte-identical across runs");

  std::cout << (failures == 0 ? "all cli tests passed\n"
                              : std::to_string(failures) + " cli tests failed\n");
  return failures == 0 ? 0 : 1;
}
