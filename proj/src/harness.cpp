#include "physarum/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>

#include "physarum/autodiff.hpp"
#include "physarum/error.hpp"
#include "physarum/io.hpp"
#include "physarum/oracles.hpp"
#include "physarum/solver.hpp"

namespace physarum::harness {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double distance(std::span<const double> a, std::span<const double> b, std::size_t len) {
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

std::string_view norm_name(ErrorNorm n) { return n == ErrorNorm::FullVector ? "full" : "x_block"; }

}  // namespace

void BenchReport::aggregate() {
  aggregates.clear();
  for (int k : options.iters) {
    BenchAggregate agg;
    agg.iterations = k;
    std::size_t count = 0;
    for (const auto& r : records) {
      if (r.iterations != k) continue;
      agg.mean_error += r.error;
      agg.mean_error_x_block += r.error_x_block;
      agg.mean_seconds += r.seconds;
      agg.decode_accuracy += r.decoded_matches_oracle ? 1.0 : 0.0;
      ++count;
    }
    if (count > 0) {
      const auto c = static_cast<double>(count);
      agg.mean_error /= c;
      agg.mean_error_x_block /= c;
      agg.mean_seconds /= c;
      agg.decode_accuracy /= c;
    }
    aggregates.push_back(agg);
  }
}

BenchReport match_bench(const MatchBenchOptions& opt) {
  if (opt.n < 1 || opt.m < opt.n) throw Error(ErrorCode::InvalidArgument, "match-bench needs 1 <= n <= m");
  if (opt.trials < 1) throw Error(ErrorCode::InvalidArgument, "match-bench needs trials >= 1");
  if (opt.iters.empty()) throw Error(ErrorCode::InvalidArgument, "no iteration budgets");

  BenchReport report;
  report.options = opt;
  std::sort(report.options.iters.begin(), report.options.iters.end());
  report.options.iters.erase(std::unique(report.options.iters.begin(), report.options.iters.end()),
                             report.options.iters.end());
  const auto& budgets = report.options.iters;
  if (budgets.front() < 0) throw Error(ErrorCode::InvalidArgument, "iteration budgets must be >= 0");

  const auto n = static_cast<std::size_t>(opt.n);
  const auto m = static_cast<std::size_t>(opt.m);
  report.gamma = opt.gamma.value_or(kMatchBenchGammaScale / std::sqrt(static_cast<double>(m)));

  const std::size_t nb = budgets.size();
  std::vector<BenchRecord> slots(static_cast<std::size_t>(opt.trials) * nb);
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(opt.trials));

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < opt.trials; ++t) {
    try {
      const std::uint64_t trial_seed = opt.seed + static_cast<std::uint64_t>(t);
      std::mt19937_64 rng(trial_seed);
      MatchingInstance inst{random_cost_matrix(n, m, rng), report.gamma};
      const StandardFormLP lp = build_matching_lp(inst);
      const Assignment oracle = oracles::hungarian(inst.cost);
      const Vector x_oracle = embed_assignment(oracle, n, m);

      for (std::size_t k = 0; k < nb; ++k) {
        SolverConfig cfg;
        cfg.max_iters = budgets[k];
        cfg.step_size = opt.step_size;
        cfg.early_stop = false;
        cfg.seed = trial_seed;
        const auto start = std::chrono::steady_clock::now();
        const SolveResult res = solve(lp, cfg);
        BenchRecord& rec = slots[static_cast<std::size_t>(t) * nb + k];
        rec.seconds = seconds_since(start);
        rec.trial = t;
        rec.seed = trial_seed;
        rec.iterations = budgets[k];
        const double full = distance(res.x, x_oracle, x_oracle.size());
        rec.error_x_block = distance(res.x, x_oracle, n * m);
        rec.error = opt.norm == ErrorNorm::FullVector ? full : rec.error_x_block;
        rec.decoded_matches_oracle = decode_matching(res.x, n, m) == oracle;
      }
    } catch (...) {
      failures[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  report.records.reserve(slots.size());
  for (std::size_t k = 0; k < nb; ++k) {
    for (int t = 0; t < opt.trials; ++t) report.records.push_back(slots[static_cast<std::size_t>(t) * nb + k]);
  }
  report.aggregate();
  return report;
}

nlohmann::json to_json(const BenchReport& r, bool include_timing) {
  using nlohmann::json;
  json options{{"n", r.options.n},
               {"m", r.options.m},
               {"trials", r.options.trials},
               {"iters", r.options.iters},
               {"step_size", r.options.step_size},
               {"gamma", r.gamma},
               {"seed", r.options.seed},
               {"norm", norm_name(r.options.norm)}};
  json records = json::array();
  for (const auto& rec : r.records) {
    json row{{"trial", rec.trial},
             {"seed", rec.seed},
             {"iterations", rec.iterations},
             {"error", rec.error},
             {"error_x_block", rec.error_x_block},
             {"decoded_matches_oracle", rec.decoded_matches_oracle}};
    if (include_timing) row["seconds"] = rec.seconds;
    records.push_back(row);
  }
  json aggregates = json::array();
  for (const auto& agg : r.aggregates) {
    json row{{"iterations", agg.iterations},
             {"mean_error", agg.mean_error},
             {"mean_error_x_block", agg.mean_error_x_block},
             {"decode_accuracy", agg.decode_accuracy}};
    if (include_timing) row["mean_seconds"] = agg.mean_seconds;
    aggregates.push_back(row);
  }
  return {{"options", options}, {"records", records}, {"aggregates", aggregates}};
}

std::string to_csv(const BenchReport& r, bool include_timing) {
  std::ostringstream out;
  out << "trial,seed,iterations,error,error_x_block,decoded_matches_oracle";
  if (include_timing) out << ",seconds";
  out << '\n';
  for (const auto& rec : r.records) {
    out << rec.trial << ',' << rec.seed << ',' << rec.iterations << ',' << io::format_double(rec.error)
        << ',' << io::format_double(rec.error_x_block) << ',' << (rec.decoded_matches_oracle ? 1 : 0);
    if (include_timing) out << ',' << io::format_double(rec.seconds);
    out << '\n';
  }
  return out.str();
}

SvmDemoResult svm_demo(const SvmDemoOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  BlobData data = gaussian_blobs(opt.per_class, opt.dim, opt.sep, rng);
  SvmInstance inst;
  inst.points = std::move(data.points);
  inst.labels = std::move(data.labels);
  inst.kernel = opt.kernel;
  inst.c_reg = opt.c_reg;
  inst.big_m = opt.big_m;
  const StandardFormLP lp = build_l1svm_lp(inst);

  SolverConfig cfg;
  cfg.max_iters = opt.iters;
  cfg.seed = opt.seed;
  cfg.gamma = inst.gamma;

  SvmDemoResult out;
  out.solve = solve(lp, cfg);
  out.num_vars = static_cast<int>(lp.num_vars());
  out.num_rows = static_cast<int>(lp.num_rows());
  out.accuracy = decode_svm(out.solve.x, inst).accuracy(inst.points, inst.labels);
  return out;
}

LearnCostResult learn_cost(const LearnCostOptions& opt) {
  if (opt.n < 1 || opt.m < opt.n) throw Error(ErrorCode::InvalidArgument, "learn-cost needs 1 <= n <= m");
  if (opt.steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  const auto n = static_cast<std::size_t>(opt.n);
  const auto m = static_cast<std::size_t>(opt.m);

  std::mt19937_64 rng(opt.seed);
  LearnCostResult out;
  out.initial_cost = random_cost_matrix(n, m, rng);
  if (opt.target.empty()) {
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    out.target.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    out.target = opt.target;
    if (out.target.size() != n) throw Error(ErrorCode::DimensionMismatch, "target needs n entries");
    std::vector<bool> seen(m, false);
    for (int j : out.target) {
      if (j < 0 || static_cast<std::size_t>(j) >= m || seen[static_cast<std::size_t>(j)]) {
        throw Error(ErrorCode::InvalidArgument, "target must map rows to distinct columns in [0, m)");
      }
      seen[static_cast<std::size_t>(j)] = true;
    }
  }

  // Feasible interior start: X = 1/m, slack = 1 − n/m (strictly positive only when n < m).
  Vector x0(n * m + m, 1.0 / static_cast<double>(m));
  const double slack = n < m ? 1.0 - static_cast<double>(n) / static_cast<double>(m) : 1.0;
  std::fill(x0.begin() + static_cast<std::ptrdiff_t>(n * m), x0.end(), slack);

  SolverConfig cfg;
  cfg.max_iters = opt.iters;
  cfg.step_size = opt.step_size;

  Matrix cost = out.initial_cost;
  Vector grad_x(n * m + m, 0.0);
  for (std::size_t i = 0; i < n; ++i) grad_x[i * m + static_cast<std::size_t>(out.target[i])] = -1.0;

  Vector x_last;
  for (int step = 0; step <= opt.steps; ++step) {
    const StandardFormLP lp = build_matching_lp({cost, std::nullopt});
    auto [res, tape] = solve_with_tape(lp, cfg, std::span<const double>(x0));
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += 1.0 - res.x[i * m + static_cast<std::size_t>(out.target[i])];
    out.losses.push_back(loss);
    x_last = std::move(res.x);
    if (step == opt.steps) break;
    const LpGradients g = backward(tape, grad_x);
    for (std::size_t k = 0; k < n * m; ++k) {
      double& c = cost.data()[k];
      c = std::max(c - opt.lr * g.grad_c[k], opt.cost_floor);
    }
  }
  out.final_cost = cost;
  out.decoded = decode_matching(x_last, n, m);
  out.decoded.cost = assignment_cost(out.final_cost, out.decoded.map);
  out.success = out.decoded.map == out.target;
  return out;
}

ShortestPathComparison shortest_path_compare(const Graph& g, int source, int sink, int iters,
                                             std::uint64_t seed) {
  const StandardFormLP lp = build_shortest_path_lp(g, source, sink);
  const oracles::PathResult best = oracles::dijkstra(g, source, sink);
  SolverConfig cfg;
  cfg.max_iters = iters;
  cfg.seed = seed;
  ShortestPathComparison out;
  out.solve = solve(lp, cfg);
  out.pd_objective = out.solve.objective;
  out.dijkstra_length = best.length;
  out.dijkstra_path = best.path;
  out.within_tolerance =
      std::abs(out.pd_objective - best.length) <= 1e-3 * (1.0 + best.length);
  return out;
}

}  // namespace physarum::harness
