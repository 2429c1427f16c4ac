#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "physarum/lp.hpp"
#include "physarum/problems.hpp"

namespace physarum::harness {

// Library side of the CLI subcommands, so tests can drive them without a
// subprocess.

enum class ErrorNorm { FullVector, XBlock };

struct MatchBenchOptions {
  int n = 5;
  int m = 50;
  int trials = 100;
  std::vector<int> iters = {10, 50, 100};
  double step_size = 1.0;
  std::optional<double> gamma;  // slack cost; unset: kMatchBenchGammaScale/√m
  std::uint64_t seed = 0;
  ErrorNorm norm = ErrorNorm::FullVector;
};

/// Slack cost scale used by the matching benchmark: γ = scale/√m.
inline constexpr double kMatchBenchGammaScale = 1e-3;

struct BenchRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double error = 0.0;        // under the report's norm
  double error_x_block = 0.0;
  double seconds = 0.0;
  bool decoded_matches_oracle = false;
};

struct BenchAggregate {
  int iterations = 0;
  double mean_error = 0.0;
  double mean_error_x_block = 0.0;
  double mean_seconds = 0.0;
  double decode_accuracy = 0.0;
};

struct BenchReport {
  MatchBenchOptions options;
  double gamma = 0.0;
  std::vector<BenchRecord> records;  // sorted by (iterations, trial)
  std::vector<BenchAggregate> aggregates;

  /// Recomputes aggregates from records.
  void aggregate();
};

/// Trials run in parallel; each trial's instance and start are derived from
/// (seed, trial) only, so the report does not depend on the thread count.
BenchReport match_bench(const MatchBenchOptions& opt);

nlohmann::json to_json(const BenchReport& r, bool include_timing = true);
std::string to_csv(const BenchReport& r, bool include_timing = true);

struct SvmDemoOptions {
  int per_class = 10;
  int dim = 4;
  double sep = 2.0;
  SvmKernel kernel;
  double c_reg = 10.0;
  double big_m = 0.001;
  int iters = 100;
  std::uint64_t seed = 0;
};

struct SvmDemoResult {
  double accuracy = 0.0;
  int num_vars = 0;
  int num_rows = 0;
  SolveResult solve;
};

SvmDemoResult svm_demo(const SvmDemoOptions& opt);

struct LearnCostOptions {
  int n = 3;
  int m = 5;
  std::vector<int> target;  // empty: random injection drawn from seed
  double lr = 0.5;
  int steps = 200;
  int iters = 10;
  double step_size = 0.5;
  double cost_floor = 1e-3;
  std::uint64_t seed = 0;
};

struct LearnCostResult {
  Matrix initial_cost;
  Matrix final_cost;
  std::vector<int> target;
  std::vector<double> losses;  // steps + 1 entries
  Assignment decoded;
  bool success = false;
};

/// Gradient descent on C for loss Σᵢ (1 − X[i, target(i)]), with gradients
/// from backward() through the unrolled solver.
LearnCostResult learn_cost(const LearnCostOptions& opt);

struct ShortestPathComparison {
  double pd_objective = 0.0;
  double dijkstra_length = 0.0;
  std::vector<int> dijkstra_path;
  SolveResult solve;
  bool within_tolerance = false;
};

ShortestPathComparison shortest_path_compare(const Graph& g, int source, int sink, int iters,
                                             std::uint64_t seed = 0);

}  // namespace physarum::harness
