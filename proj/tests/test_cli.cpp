#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "physarum/harness.hpp"
#include "physarum/io.hpp"
#include "physarum/oracles.hpp"

using namespace physarum;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PHYSARUM_TEST_DATA;
const std::string kCli = PHYSARUM_CLI;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run cli(const std::string& args) {
  const auto dir = fs::temp_directory_path();
  const auto out = dir / "physarum_cli_stdout.txt";
  const auto err = dir / "physarum_cli_stderr.txt";
  const std::string cmd = kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

// --- solve ----------------------------------------------------------------

TEST_CASE("solve on the toy LP") {
  const auto out = temp("physarum_toy_out.json");
  const auto r = cli("solve --lp " + (kData / "toy_lp.json").string() + " --iters 100 --out " + out.string());
  CHECK(r.code == 0);
  const auto j = io::read_json_file(out);
  const double obj = j.at("objective").get<double>();
  CHECK(obj >= 1.0 - 1e-9);
  CHECK(obj <= 1.001);
  CHECK(j.at("x").size() == 2);
  CHECK(j.contains("trace"));
  CHECK(j.contains("status"));
  CHECK(j.contains("residual"));
}

TEST_CASE("solve exit codes") {
  CHECK(cli("solve --lp " + (kData / "malformed.json").string()).code == 1);
  CHECK(cli("solve --lp " + (kData / "does_not_exist.json").string()).code == 1);
  const auto zero = cli("solve --lp " + (kData / "zero_cost_lp.json").string() + " --gamma 0");
  CHECK(zero.code == 2);
  CHECK(zero.err.find("ZeroCostNeedsGamma") != std::string::npos);
  CHECK(cli("solve --lp " + (kData / "ragged_lp.json").string()).code == 2);
  CHECK(cli("solve --lp " + (kData / "toy_lp.json").string() + " --step 2").code == 2);
  CHECK(cli("solve").code == 1);
  CHECK(cli("no-such-command").code == 1);
}

TEST_CASE("solve output is byte-identical across runs") {
  const std::string args = "solve --lp " + (kData / "toy_lp.json").string() + " --iters 30 --seed 7";
  const auto a = cli(args);
  const auto b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

// --- match-bench ----------------------------------------------------------

TEST_CASE("match-bench on a 1x1 instance has no error") {
  harness::MatchBenchOptions opt;
  opt.n = 1;
  opt.m = 1;
  opt.trials = 5;
  const auto report = harness::match_bench(opt);
  for (const auto& agg : report.aggregates) CHECK(agg.mean_error <= 1e-6);
}

TEST_CASE("match-bench aggregates recompute from the records") {
  harness::MatchBenchOptions opt;
  opt.n = 3;
  opt.m = 8;
  opt.trials = 7;
  opt.iters = {20, 5};
  const auto report = harness::match_bench(opt);
  CHECK(report.options.iters == std::vector<int>{5, 20});
  CHECK(report.records.size() == 14);
  for (const auto& agg : report.aggregates) {
    double sum = 0.0, sum_x = 0.0;
    int count = 0;
    for (const auto& r : report.records) {
      if (r.iterations != agg.iterations) continue;
      sum += r.error;
      sum_x += r.error_x_block;
      ++count;
      CHECK(r.error_x_block <= r.error);
    }
    CHECK(count == 7);
    CHECK(agg.mean_error == doctest::Approx(sum / count).epsilon(1e-15));
    CHECK(agg.mean_error_x_block == doctest::Approx(sum_x / count).epsilon(1e-15));
  }
}

TEST_CASE("match-bench report does not depend on the thread count") {
  harness::MatchBenchOptions opt;
  opt.n = 3;
  opt.m = 10;
  opt.trials = 12;
  opt.iters = {10, 30};
  omp_set_num_threads(1);
  const auto one = harness::to_json(harness::match_bench(opt), false).dump();
  omp_set_num_threads(4);
  const auto four = harness::to_json(harness::match_bench(opt), false).dump();
  CHECK(one == four);
}

TEST_CASE("match-bench CLI writes JSON and CSV reports") {
  const auto json_path = temp("physarum_bench.json");
  const auto csv_path = temp("physarum_bench.csv");
  const std::string args = "match-bench --n 2 --m 6 --trials 4 --iters 5,15 --no-timing --out " +
                           json_path.string() + " --csv " + csv_path.string();
  REQUIRE(cli(args).code == 0);
  const auto first = slurp(json_path);
  const auto first_csv = slurp(csv_path);
  REQUIRE(cli(args).code == 0);
  CHECK(slurp(json_path) == first);
  CHECK(slurp(csv_path) == first_csv);

  const auto j = io::json::parse(first);
  CHECK(j.at("options").at("norm") == "full");
  CHECK(j.at("records").size() == 8);
  CHECK(j.at("aggregates").size() == 2);
  CHECK(first_csv.rfind("trial,seed,iterations,error,error_x_block,decoded_matches_oracle\n", 0) == 0);

  CHECK(cli("match-bench --n 3 --m 2 --trials 1").code == 2);
  CHECK(cli("match-bench --norm diagonal").code == 1);
}

TEST_CASE("match-bench at 10 iterations lands in the 0.2 to 0.55 band") {
  harness::MatchBenchOptions opt;
  opt.iters = {10};
  const auto report = harness::match_bench(opt);
  const double e = report.aggregates.front().mean_error;
  MESSAGE("mean full-vector error at 10 iterations: ", e,
          " (X block: ", report.aggregates.front().mean_error_x_block, ")");
  CHECK(e >= 0.2);
  CHECK(e <= 0.55);
}

// --- svm-demo -------------------------------------------------------------

TEST_CASE("svm-demo separates blobs at sep 2") {
  const auto r = cli("svm-demo --sep 2.0 --kernel linear --seed 0");
  CHECK(r.code == 0);
  CHECK(r.out.find("variables=182 equalities=80") != std::string::npos);
  CHECK(r.out.find("train_accuracy=") != std::string::npos);

  const auto res = harness::svm_demo({});
  CHECK(res.solve.status != SolveStatus::LinSolveFailure);
  CHECK(res.solve.trace.size() == 100);
  CHECK(res.solve.residual <= 1e-4);
}

TEST_CASE("svm-demo with identical distributions stays near chance and exits 3") {
  harness::SvmDemoOptions opt;
  opt.sep = 0.0;
  const auto res = harness::svm_demo(opt);
  CHECK(res.accuracy >= 0.2);
  CHECK(res.accuracy <= 0.9);
  CHECK(cli("svm-demo --sep 0").code == 3);
}

TEST_CASE("svm-demo with one point per class matches the vertex oracle") {
  harness::SvmDemoOptions opt;
  opt.per_class = 1;
  opt.sep = 5.0;
  const auto res = harness::svm_demo(opt);
  CHECK(res.accuracy == 1.0);

  std::mt19937_64 rng(opt.seed);
  const auto blobs = gaussian_blobs(1, opt.dim, opt.sep, rng);
  SvmInstance inst;
  inst.points = blobs.points;
  inst.labels = blobs.labels;
  inst.c_reg = opt.c_reg;
  const auto v = oracles::enumerate_vertices(build_l1svm_lp(inst));
  CHECK(decode_svm(v.x_star, inst).accuracy(inst.points, inst.labels) == 1.0);
  CHECK(std::abs(res.solve.objective - v.objective) <= 1e-3 * (1.0 + v.objective));
  CHECK(cli("svm-demo --n-per-class 1 --sep 5").code == 0);
}

TEST_CASE("svm-demo gaussian kernel") {
  CHECK(cli("svm-demo --kernel gaussian --sigma 2").code == 0);
}

// --- learn-cost -----------------------------------------------------------

TEST_CASE("learn-cost with zero steps leaves C alone") {
  harness::LearnCostOptions opt;
  opt.steps = 0;
  const auto res = harness::learn_cost(opt);
  CHECK(res.final_cost == res.initial_cost);
  CHECK(res.losses.size() == 1);
}

TEST_CASE("learn-cost with zero learning rate has a flat loss curve") {
  harness::LearnCostOptions opt;
  opt.steps = 5;
  opt.lr = 0.0;
  const auto res = harness::learn_cost(opt);
  REQUIRE(res.losses.size() == 6);
  for (double l : res.losses) CHECK(l == res.losses.front());
}

TEST_CASE("learn-cost reduces the loss and reaches an explicit target") {
  harness::LearnCostOptions opt;
  opt.target = {2, 0, 4};
  const auto res = harness::learn_cost(opt);
  CHECK(res.losses.back() < res.losses.front());
  CHECK(res.success);
  for (double c : res.final_cost.data()) CHECK(c >= opt.cost_floor);

  const auto out = temp("physarum_learn.json");
  const auto r = cli("learn-cost --target 2,0,4 --steps 200 --out " + out.string());
  CHECK(r.code == 0);
  const auto j = io::read_json_file(out);
  CHECK(j.at("decoded").get<std::vector<int>>() == std::vector<int>{2, 0, 4});
  CHECK(j.at("losses").size() == 201);
  CHECK(cli("learn-cost --target 1,1,2").code == 2);
}

// --- shortest-path --------------------------------------------------------

TEST_CASE("shortest-path on the triangle prints 2 twice") {
  const auto r = cli("shortest-path --graph " + (kData / "triangle.json").string() +
                     " --source 0 --sink 2 --iters 100");
  CHECK(r.code == 0);
  const auto cmp = harness::shortest_path_compare(
      io::graph_from_json(io::read_json_file(kData / "triangle.json")), 0, 2, 100);
  CHECK(cmp.dijkstra_length == 2.0);
  CHECK(std::abs(cmp.pd_objective - 2.0) <= 1e-3);
  CHECK(r.out.find("dijkstra=2 ") != std::string::npos);
}

TEST_CASE("shortest-path on a single arc prints its weight") {
  const auto r = cli("shortest-path --graph " + (kData / "single_arc.json").string() + " --source 0 --sink 1");
  CHECK(r.code == 0);
  const auto pos = r.out.find("pd_objective=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::abs(std::stod(r.out.substr(pos + 13)) - 3.0) <= 1e-3);
  CHECK(r.out.find("dijkstra=3 ") != std::string::npos);
}

TEST_CASE("shortest-path to an unreachable sink exits 2") {
  const auto r = cli("shortest-path --graph " + (kData / "unreachable.json").string() + " --source 0 --sink 2");
  CHECK(r.code == 2);
  CHECK(r.err.find("Unreachable") != std::string::npos);
}
