#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "physarum/lp.hpp"

namespace physarum {

// ---------------------------------------------------------------------------
// Bipartite matching

/// n templates (rows of C) matched into m ≥ n proposals (columns of C).
struct MatchingInstance {
  Matrix cost;
  /// Cost of each slack column; unset uses default_matching_gamma(m).
  std::optional<double> gamma_slack;

  std::size_t n() const noexcept { return cost.rows(); }
  std::size_t m() const noexcept { return cost.cols(); }
};

/// 1/(2√m), m = number of slack columns.
double default_matching_gamma(std::size_t m);

struct Assignment {
  std::vector<int> map;  // template i -> proposal map[i]
  double cost = 0.0;

  bool operator==(const Assignment& o) const { return map == o.map; }
};

/// Variables: X row-major (n·m), then one slack per proposal.
/// Rows: n row sums = 1, then m column sums + slack = 1.
StandardFormLP build_matching_lp(const MatchingInstance& inst);

/// Greedy rounding: repeatedly fix the largest remaining X entry (ties go to
/// the lowest row, then lowest column).
Assignment decode_matching(std::span<const double> x, std::size_t n, std::size_t m);

/// The n×m block of x holding X.
Matrix matching_block(std::span<const double> x, std::size_t n, std::size_t m);

/// The 0/1 vertex of the matching LP for an assignment, slacks included.
Vector embed_assignment(const Assignment& a, std::size_t n, std::size_t m);

double assignment_cost(const Matrix& cost, std::span<const int> map);

// ---------------------------------------------------------------------------
// ℓ1 SVM

enum class KernelType { Linear, Gaussian };

struct SvmKernel {
  KernelType type = KernelType::Linear;
  double sigma = 1.0;

  double operator()(std::span<const double> u, std::span<const double> v) const;
};

struct SvmInstance {
  std::vector<Vector> points;
  std::vector<int> labels;  // ±1
  SvmKernel kernel;
  double c_reg = 1.0;
  double big_m = 0.001;
  std::optional<double> gamma;  // solver perturbation for zero-cost columns

  std::size_t size() const noexcept { return points.size(); }
};

/// Column offsets of each variable block in the ℓ1-SVM LP.
struct SvmLayout {
  std::size_t n;
  std::size_t alpha_pos() const { return 0; }
  std::size_t alpha_neg() const { return n; }
  std::size_t s() const { return 2 * n; }
  std::size_t bias_pos() const { return 3 * n; }
  std::size_t bias_neg() const { return 3 * n + 1; }
  std::size_t xi() const { return 3 * n + 2; }
  std::size_t z() const { return 4 * n + 2; }
  std::size_t l() const { return 5 * n + 2; }
  std::size_t p() const { return 6 * n + 2; }
  std::size_t q() const { return 7 * n + 2; }
  std::size_t r() const { return 8 * n + 2; }
  std::size_t num_vars() const { return 9 * n + 2; }
  std::size_t num_rows() const { return 4 * n; }
};

void validate(const SvmInstance& inst);

Matrix kernel_matrix(const SvmInstance& inst);

/// Standard-form ℓ1-SVM: 9n+2 columns, 4n equality rows.
StandardFormLP build_l1svm_lp(const SvmInstance& inst);

/// A point satisfying every equality of build_l1svm_lp exactly (α = 0, s = 0).
Vector svm_feasible_witness(const SvmInstance& inst);

struct SvmClassifier {
  Vector alpha;  // α₁ − α₂
  double bias = 0.0;
  std::vector<Vector> points;
  std::vector<int> labels;
  SvmKernel kernel;

  double decision(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : -1; }
  double accuracy(const std::vector<Vector>& xs, std::span<const int> ys) const;
};

SvmClassifier decode_svm(std::span<const double> x, const SvmInstance& inst);

/// One-vs-one voting over k(k−1)/2 binary problems.
struct PairwiseMulticlass {
  int num_classes = 0;
  std::vector<std::pair<int, int>> pairs;  // (positive class, negative class)
  std::vector<SvmInstance> instances;

  /// Majority vote; ties go to the lowest class index.
  int vote(const std::vector<SvmClassifier>& classifiers, std::span<const double> x) const;
};

/// Labels are 0..k−1. `tmpl` supplies kernel, C, M and γ.
PairwiseMulticlass pairwise_multiclass(const std::vector<Vector>& points,
                                       std::span<const int> labels, int num_classes,
                                       const SvmInstance& tmpl);

// ---------------------------------------------------------------------------
// Shortest path

struct Arc {
  int tail;
  int head;
  double weight;
};

struct Graph {
  int num_nodes = 0;
  std::vector<Arc> arcs;
};

/// Node-arc incidence LP: +1 at the tail, −1 at the head of each arc. The
/// source row is dropped for full row rank, so b holds −1 at the sink and 0
/// elsewhere. Rows of nodes without arcs are dropped too.
StandardFormLP build_shortest_path_lp(const Graph& g, int source, int sink);

// ---------------------------------------------------------------------------
// Random instance generators (tests, benchmarks, CLI demos)

Matrix random_cost_matrix(std::size_t n, std::size_t m, std::mt19937_64& rng);

/// m rows, n columns, first row strictly positive (so P is bounded), b = A·x̂
/// for a positive x̂ (so P is nonempty), c uniform in [0.1, 1.1].
StandardFormLP random_bounded_lp(std::size_t m, std::size_t n, std::mt19937_64& rng);

/// Arcs i→j (i < j) each present with probability `density`, weights in (0,1);
/// resampled until node n−1 is reachable from node 0.
Graph random_dag(int num_nodes, double density, std::mt19937_64& rng);

struct BlobData {
  std::vector<Vector> points;
  std::vector<int> labels;
};

/// Two Gaussian blobs with identity covariance at ±sep·1/√dim; labels +1 / −1.
BlobData gaussian_blobs(int per_class, int dim, double sep, std::mt19937_64& rng);

}  // namespace physarum
