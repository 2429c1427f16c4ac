// physarum_cli: solve LPs with the Physarum iteration and run the matching,
// SVM, cost-learning and shortest-path workflows.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "physarum/error.hpp"
#include "physarum/harness.hpp"
#include "physarum/io.hpp"
#include "physarum/oracles.hpp"
#include "physarum/solver.hpp"

namespace {

using namespace physarum;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitSolver = 2;
constexpr int kExitBelowThreshold = 3;

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    io::write_json_file(out_path, j);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct SolveArgs {
  std::string lp_path;
  int iters = 10;
  double step = 1.0;
  double eps = 1e-8;
  std::optional<double> gamma;
  std::optional<double> bound;
  std::uint64_t seed = 0;
  std::string out;
};

int run_solve(const SolveArgs& a) {
  const StandardFormLP lp = io::lp_from_json(io::read_json_file(a.lp_path));
  SolverConfig cfg;
  cfg.max_iters = a.iters;
  cfg.step_size = a.step;
  cfg.clamp_floor = a.eps;
  cfg.gamma = a.gamma;
  cfg.flip_bound = a.bound;
  cfg.seed = a.seed;
  emit(io::to_json(solve(lp, cfg)), a.out);
  return kExitOk;
}

struct BenchArgs {
  harness::MatchBenchOptions opt;
  std::string norm = "full";
  bool timing = true;
  std::string out;
  std::string csv;
};

int run_match_bench(BenchArgs a) {
  a.opt.norm = a.norm == "x_block" ? harness::ErrorNorm::XBlock : harness::ErrorNorm::FullVector;
  const auto report = harness::match_bench(a.opt);
  if (!a.csv.empty()) write_text(a.csv, harness::to_csv(report, a.timing));
  if (!a.out.empty()) io::write_json_file(a.out, harness::to_json(report, a.timing));

  std::printf("gamma=%s norm=%s trials=%d\n", io::format_double(report.gamma).c_str(),
              a.norm.c_str(), report.options.trials);
  std::printf("%10s %12s %14s %12s %10s\n", "iters", "mean_error", "mean_err_X", "decode_acc", "mean_s");
  for (const auto& agg : report.aggregates) {
    std::printf("%10d %12.6f %14.6f %12.3f %10.5f\n", agg.iterations, agg.mean_error,
                agg.mean_error_x_block, agg.decode_accuracy, agg.mean_seconds);
  }
  return kExitOk;
}

struct SvmArgs {
  harness::SvmDemoOptions opt;
  std::string kernel = "linear";
};

int run_svm_demo(SvmArgs a) {
  a.opt.kernel.type = a.kernel == "gaussian" ? KernelType::Gaussian : KernelType::Linear;
  const auto res = harness::svm_demo(a.opt);
  std::printf("variables=%d equalities=%d iterations=%zu status=%s\n", res.num_vars, res.num_rows,
              res.solve.trace.size(), std::string(to_string(res.solve.status)).c_str());
  std::printf("objective=%s residual=%s\n", io::format_double(res.solve.objective).c_str(),
              io::format_double(res.solve.residual).c_str());
  std::printf("train_accuracy=%s\n", io::format_double(res.accuracy).c_str());
  return res.accuracy >= 0.95 ? kExitOk : kExitBelowThreshold;
}

struct LearnArgs {
  harness::LearnCostOptions opt;
  std::string out;
};

int run_learn_cost(const LearnArgs& a) {
  const auto res = harness::learn_cost(a.opt);
  json j{{"target", res.target},
         {"decoded", res.decoded.map},
         {"success", res.success},
         {"losses", res.losses},
         {"initial_cost", io::to_json(MatchingInstance{res.initial_cost, std::nullopt}).at("C")},
         {"final_cost", io::to_json(MatchingInstance{res.final_cost, std::nullopt}).at("C")}};
  if (!a.out.empty()) io::write_json_file(a.out, j);
  std::printf("initial_loss=%s final_loss=%s\n", io::format_double(res.losses.front()).c_str(),
              io::format_double(res.losses.back()).c_str());
  std::printf("target=%s decoded=%s\n", json(res.target).dump().c_str(),
              json(res.decoded.map).dump().c_str());
  return res.success ? kExitOk : kExitBelowThreshold;
}

struct PathArgs {
  std::string graph;
  int source = 0;
  int sink = -1;
  int iters = 200;
  std::uint64_t seed = 0;
};

int run_shortest_path(const PathArgs& a) {
  const Graph g = io::graph_from_json(io::read_json_file(a.graph));
  const int sink = a.sink < 0 ? g.num_nodes - 1 : a.sink;
  const auto cmp = harness::shortest_path_compare(g, a.source, sink, a.iters, a.seed);
  std::printf("pd_objective=%s\n", io::format_double(cmp.pd_objective).c_str());
  std::printf("dijkstra=%s path=%s\n", io::format_double(cmp.dijkstra_length).c_str(),
              json(cmp.dijkstra_path).dump().c_str());
  return cmp.within_tolerance ? kExitOk : kExitBelowThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physarum-dynamics LP solver"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a standard-form LP from JSON");
  solve_cmd->add_option("--lp", solve_args.lp_path, "LP file {A, b, c}")->required();
  solve_cmd->add_option("--iters", solve_args.iters, "Iteration budget K");
  solve_cmd->add_option("--step", solve_args.step, "Step size h in (0, 1]");
  solve_cmd->add_option("--eps", solve_args.eps, "Clamp floor");
  solve_cmd->add_option("--gamma", solve_args.gamma, "Cost given to zero-cost columns");
  solve_cmd->add_option("--bound", solve_args.bound, "Upper bound M for negative-cost columns");
  solve_cmd->add_option("--seed", solve_args.seed, "Seed of the random start");
  solve_cmd->add_option("--out", solve_args.out, "Output file (stdout if omitted)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("match-bench", "Random matching benchmark against Hungarian");
  bench_cmd->add_option("--n", bench_args.opt.n, "Templates");
  bench_cmd->add_option("--m", bench_args.opt.m, "Proposals");
  bench_cmd->add_option("--trials", bench_args.opt.trials, "Random instances");
  bench_cmd->add_option("--iters", bench_args.opt.iters, "Iteration budgets")->delimiter(',');
  bench_cmd->add_option("--step", bench_args.opt.step_size, "Step size h");
  bench_cmd->add_option("--gamma", bench_args.opt.gamma, "Slack cost (default 1e-3/sqrt(m))");
  bench_cmd->add_option("--seed", bench_args.opt.seed, "Base seed; trial t uses seed + t");
  bench_cmd->add_option("--norm", bench_args.norm, "Error vector: full or x_block")
      ->check(CLI::IsMember({"full", "x_block"}));
  bench_cmd->add_flag("!--no-timing", bench_args.timing, "Leave wall times out of the reports");
  bench_cmd->add_option("--out", bench_args.out, "JSON report file");
  bench_cmd->add_option("--csv", bench_args.csv, "CSV report file");

  SvmArgs svm_args;
  auto* svm_cmd = app.add_subcommand("svm-demo", "l1-SVM on two Gaussian blobs");
  svm_cmd->add_option("--n-per-class", svm_args.opt.per_class, "Points per class");
  svm_cmd->add_option("--dim", svm_args.opt.dim, "Feature dimension");
  svm_cmd->add_option("--sep", svm_args.opt.sep, "Distance of each mean from the origin");
  svm_cmd->add_option("--kernel", svm_args.kernel, "linear or gaussian")
      ->check(CLI::IsMember({"linear", "gaussian"}));
  svm_cmd->add_option("--sigma", svm_args.opt.kernel.sigma, "Gaussian kernel width");
  svm_cmd->add_option("--C", svm_args.opt.c_reg, "Slack penalty");
  svm_cmd->add_option("--M", svm_args.opt.big_m, "Big-M coupling of z");
  svm_cmd->add_option("--iters", svm_args.opt.iters, "Iteration budget");
  svm_cmd->add_option("--seed", svm_args.opt.seed, "Data and start seed");

  LearnArgs learn_args;
  auto* learn_cmd = app.add_subcommand("learn-cost", "Learn a matching cost matrix by gradient descent");
  learn_cmd->add_option("--n", learn_args.opt.n, "Templates");
  learn_cmd->add_option("--m", learn_args.opt.m, "Proposals");
  learn_cmd->add_option("--target", learn_args.opt.target, "Target map, e.g. 2,0,4")->delimiter(',');
  learn_cmd->add_option("--lr", learn_args.opt.lr, "Learning rate");
  learn_cmd->add_option("--steps", learn_args.opt.steps, "Gradient steps T");
  learn_cmd->add_option("--iters", learn_args.opt.iters, "Unrolled solver iterations");
  learn_cmd->add_option("--seed", learn_args.opt.seed, "Seed for C and the target");
  learn_cmd->add_option("--out", learn_args.out, "JSON report file");

  PathArgs path_args;
  auto* path_cmd = app.add_subcommand("shortest-path", "Shortest path as an LP, checked by Dijkstra");
  path_cmd->add_option("--graph", path_args.graph, "Graph file {nodes, arcs}")->required();
  path_cmd->add_option("--source", path_args.source, "Source node");
  path_cmd->add_option("--sink", path_args.sink, "Sink node (default: last node)");
  path_cmd->add_option("--iters", path_args.iters, "Iteration budget");
  path_cmd->add_option("--seed", path_args.seed, "Seed of the random start");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*solve_cmd) return run_solve(solve_args);
    if (*bench_cmd) return run_match_bench(bench_args);
    if (*svm_cmd) return run_svm_demo(svm_args);
    if (*learn_cmd) return run_learn_cost(learn_args);
    if (*path_cmd) return run_shortest_path(path_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitIo;
}
