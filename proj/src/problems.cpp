#include "physarum/problems.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "physarum/error.hpp"

namespace physarum {

namespace {

void check_matching(const MatchingInstance& inst) {
  if (inst.n() == 0) throw Error(ErrorCode::DimensionMismatch, "matching needs n >= 1");
  if (inst.m() < inst.n()) throw Error(ErrorCode::DimensionMismatch, "matching needs m >= n");
  for (double v : inst.cost.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteEntry, "cost matrix");
  }
  if (inst.gamma_slack && !(std::isfinite(*inst.gamma_slack) && *inst.gamma_slack >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "slack cost must be finite and >= 0");
  }
}

std::string indexed(const char* base, std::size_t i) { return std::string(base) + "[" + std::to_string(i) + "]"; }

}  // namespace

double default_matching_gamma(std::size_t m) {
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(m)));
}

StandardFormLP build_matching_lp(const MatchingInstance& inst) {
  check_matching(inst);
  const std::size_t n = inst.n();
  const std::size_t m = inst.m();
  const double gamma = inst.gamma_slack.value_or(default_matching_gamma(m));

  StandardFormLP lp;
  lp.a = Matrix(n + m, n * m + m);
  lp.b.assign(n + m, 1.0);
  lp.c.resize(n * m + m);
  lp.names.resize(n * m + m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t col = i * m + j;
      lp.a(i, col) = 1.0;
      lp.a(n + j, col) = 1.0;
      lp.c[col] = inst.cost(i, j);
      lp.names[col] = "X[" + std::to_string(i) + "," + std::to_string(j) + "]";
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t col = n * m + j;
    lp.a(n + j, col) = 1.0;
    lp.c[col] = gamma;
    lp.names[col] = indexed("s", j);
  }
  return lp;
}

Assignment decode_matching(std::span<const double> x, std::size_t n, std::size_t m) {
  if (x.size() != n * m + m) throw Error(ErrorCode::DimensionMismatch, "len(x) != n*m + m");
  if (m < n) throw Error(ErrorCode::DimensionMismatch, "matching needs m >= n");
  std::vector<bool> row_used(n, false), col_used(m, false);
  Assignment out;
  out.map.assign(n, -1);
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t best_i = n, best_j = m;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (col_used[j]) continue;
        const double v = x[i * m + j];
        if (best_i == n || v > best) {
          best = v;
          best_i = i;
          best_j = j;
        }
      }
    }
    row_used[best_i] = true;
    col_used[best_j] = true;
    out.map[best_i] = static_cast<int>(best_j);
  }
  return out;
}

Matrix matching_block(std::span<const double> x, std::size_t n, std::size_t m) {
  if (x.size() < n * m) throw Error(ErrorCode::DimensionMismatch, "x shorter than the X block");
  Matrix block(n, m);
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n * m), block.data().begin());
  return block;
}

Vector embed_assignment(const Assignment& a, std::size_t n, std::size_t m) {
  if (a.map.size() != n) throw Error(ErrorCode::DimensionMismatch, "assignment length != n");
  Vector x(n * m + m, 0.0);
  std::fill(x.begin() + static_cast<std::ptrdiff_t>(n * m), x.end(), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = a.map[i];
    if (j < 0 || static_cast<std::size_t>(j) >= m) {
      throw Error(ErrorCode::InvalidArgument, "assignment entry out of range");
    }
    x[i * m + static_cast<std::size_t>(j)] = 1.0;
    x[n * m + static_cast<std::size_t>(j)] = 0.0;
  }
  return x;
}

double assignment_cost(const Matrix& cost, std::span<const int> map) {
  double total = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) total += cost(i, static_cast<std::size_t>(map[i]));
  return total;
}

// ---------------------------------------------------------------------------

double SvmKernel::operator()(std::span<const double> u, std::span<const double> v) const {
  if (type == KernelType::Linear) return dot(u, v);
  double d2 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) d2 += (u[k] - v[k]) * (u[k] - v[k]);
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

void validate(const SvmInstance& inst) {
  const std::size_t n = inst.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "no training points");
  if (inst.labels.size() != n) throw Error(ErrorCode::DimensionMismatch, "one label per point");
  const std::size_t dim = inst.points.front().size();
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.points[i].size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged points");
    for (double v : inst.points[i]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteEntry, "points");
    }
    if (inst.labels[i] == 1) {
      has_pos = true;
    } else if (inst.labels[i] == -1) {
      has_neg = true;
    } else {
      throw Error(ErrorCode::InvalidArgument, "labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw Error(ErrorCode::EmptyClass, "both labels must occur");
  if (inst.kernel.type == KernelType::Gaussian && !(inst.kernel.sigma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian sigma must be > 0");
  }
  if (!(inst.c_reg > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be > 0");
  if (!(inst.big_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "M must be > 0");
}

Matrix kernel_matrix(const SvmInstance& inst) {
  const std::size_t n = inst.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      k(i, j) = inst.kernel(inst.points[i], inst.points[j]);
      if (!std::isfinite(k(i, j))) {
        throw Error(ErrorCode::KernelDegenerate,
                    "K(" + std::to_string(i) + "," + std::to_string(j) + ") is not finite");
      }
    }
  }
  return k;
}

StandardFormLP build_l1svm_lp(const SvmInstance& inst) {
  validate(inst);
  const std::size_t n = inst.size();
  const SvmLayout at{n};
  const Matrix k = kernel_matrix(inst);

  StandardFormLP lp;
  lp.a = Matrix(at.num_rows(), at.num_vars());
  lp.b.assign(at.num_rows(), 0.0);
  lp.c.assign(at.num_vars(), 0.0);
  auto& a = lp.a;
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = inst.labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double yk = inst.labels[j] * k(i, j);
      a(i, at.alpha_pos() + j) = yi * yk;
      a(i, at.alpha_neg() + j) = -yi * yk;
      a(n + i, at.alpha_pos() + j) = yk;
      a(n + i, at.alpha_neg() + j) = -yk;
      a(2 * n + i, at.alpha_pos() + j) = yk;
      a(2 * n + i, at.alpha_neg() + j) = -yk;
    }
    a(i, at.bias_pos()) = yi;
    a(i, at.bias_neg()) = -yi;
    a(i, at.xi() + i) = 1.0;
    a(i, at.z() + i) = -inst.big_m;
    a(i, at.l() + i) = -1.0;
    lp.b[i] = 1.0;

    a(n + i, at.s() + i) = -1.0;
    a(n + i, at.p() + i) = 1.0;

    a(2 * n + i, at.s() + i) = 1.0;
    a(2 * n + i, at.q() + i) = -1.0;

    a(3 * n + i, at.z() + i) = 1.0;
    a(3 * n + i, at.r() + i) = 1.0;
    lp.b[3 * n + i] = 1.0;

    lp.c[at.s() + i] = 1.0;
    lp.c[at.xi() + i] = inst.c_reg;
    lp.c[at.z() + i] = 2.0 * inst.c_reg;
  }

  lp.names.resize(at.num_vars());
  const std::pair<const char*, std::size_t> blocks[] = {
      {"alpha1", at.alpha_pos()}, {"alpha2", at.alpha_neg()}, {"s", at.s()}, {"xi", at.xi()},
      {"z", at.z()},              {"l", at.l()},              {"p", at.p()}, {"q", at.q()},
      {"r", at.r()}};
  for (const auto& [name, offset] : blocks) {
    for (std::size_t i = 0; i < n; ++i) lp.names[offset + i] = indexed(name, i);
  }
  lp.names[at.bias_pos()] = "b1";
  lp.names[at.bias_neg()] = "b2";

  const Vector witness = svm_feasible_witness(inst);
  if (feasibility_residual(lp, witness) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "SVM LP lost its feasible witness");
  }
  return lp;
}

Vector svm_feasible_witness(const SvmInstance& inst) {
  const SvmLayout at{inst.size()};
  Vector x(at.num_vars(), 0.0);
  for (std::size_t i = 0; i < at.n; ++i) {
    x[at.xi() + i] = 1.0;
    x[at.r() + i] = 1.0;
  }
  return x;
}

double SvmClassifier::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] != 0.0) f += labels[j] * alpha[j] * kernel(x, points[j]);
  }
  return f;
}

double SvmClassifier::accuracy(const std::vector<Vector>& xs, std::span<const int> ys) const {
  if (xs.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (predict(xs[i]) == ys[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(xs.size());
}

SvmClassifier decode_svm(std::span<const double> x, const SvmInstance& inst) {
  const SvmLayout at{inst.size()};
  if (x.size() != at.num_vars()) throw Error(ErrorCode::DimensionMismatch, "len(x) != 9n+2");
  SvmClassifier out;
  out.alpha.resize(at.n);
  for (std::size_t j = 0; j < at.n; ++j) out.alpha[j] = x[at.alpha_pos() + j] - x[at.alpha_neg() + j];
  out.bias = x[at.bias_pos()] - x[at.bias_neg()];
  out.points = inst.points;
  out.labels = inst.labels;
  out.kernel = inst.kernel;
  return out;
}

int PairwiseMulticlass::vote(const std::vector<SvmClassifier>& classifiers,
                             std::span<const double> x) const {
  if (classifiers.size() != pairs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one classifier per class pair");
  }
  std::vector<int> votes(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int winner = classifiers[k].predict(x) > 0 ? pairs[k].first : pairs[k].second;
    ++votes[static_cast<std::size_t>(winner)];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

PairwiseMulticlass pairwise_multiclass(const std::vector<Vector>& points,
                                       std::span<const int> labels, int num_classes,
                                       const SvmInstance& tmpl) {
  if (num_classes < 2) throw Error(ErrorCode::InvalidArgument, "need at least two classes");
  if (points.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "one label per point");
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw Error(ErrorCode::InvalidArgument, "label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (int k = 0; k < num_classes; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(k) + " has no points");
    }
  }

  PairwiseMulticlass out;
  out.num_classes = num_classes;
  for (int pos = 0; pos < num_classes; ++pos) {
    for (int neg = pos + 1; neg < num_classes; ++neg) {
      SvmInstance inst;
      inst.kernel = tmpl.kernel;
      inst.c_reg = tmpl.c_reg;
      inst.big_m = tmpl.big_m;
      inst.gamma = tmpl.gamma;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] == pos || labels[i] == neg) {
          inst.points.push_back(points[i]);
          inst.labels.push_back(labels[i] == pos ? 1 : -1);
        }
      }
      out.pairs.emplace_back(pos, neg);
      out.instances.push_back(std::move(inst));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_graph(const Graph& g) {
  if (g.num_nodes < 1) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
  for (const Arc& arc : g.arcs) {
    if (arc.tail < 0 || arc.tail >= g.num_nodes || arc.head < 0 || arc.head >= g.num_nodes) {
      throw Error(ErrorCode::InvalidArgument, "arc endpoint out of range");
    }
    if (!(std::isfinite(arc.weight) && arc.weight > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "arc weights must be positive and finite");
    }
  }
}

bool reachable(const Graph& g, int source, int sink) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(g.num_nodes));
  for (const Arc& arc : g.arcs) out[static_cast<std::size_t>(arc.tail)].push_back(arc.head);
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes), false);
  std::queue<int> frontier;
  frontier.push(source);
  seen[static_cast<std::size_t>(source)] = true;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    if (u == sink) return true;
    for (int v : out[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        frontier.push(v);
      }
    }
  }
  return false;
}

}  // namespace

StandardFormLP build_shortest_path_lp(const Graph& g, int source, int sink) {
  check_graph(g);
  if (source < 0 || source >= g.num_nodes || sink < 0 || sink >= g.num_nodes) {
    throw Error(ErrorCode::InvalidArgument, "source or sink out of range");
  }
  if (source == sink) throw Error(ErrorCode::InvalidArgument, "source and sink must differ");
  if (!reachable(g, source, sink)) {
    throw Error(ErrorCode::Unreachable,
                "node " + std::to_string(sink) + " is not reachable from " + std::to_string(source));
  }

  std::vector<int> row_of(static_cast<std::size_t>(g.num_nodes), -1);
  std::vector<bool> touched(static_cast<std::size_t>(g.num_nodes), false);
  for (const Arc& arc : g.arcs) {
    touched[static_cast<std::size_t>(arc.tail)] = true;
    touched[static_cast<std::size_t>(arc.head)] = true;
  }
  int rows = 0;
  for (int v = 0; v < g.num_nodes; ++v) {
    if (v != source && touched[static_cast<std::size_t>(v)]) row_of[static_cast<std::size_t>(v)] = rows++;
  }

  StandardFormLP lp;
  lp.a = Matrix(static_cast<std::size_t>(rows), g.arcs.size());
  lp.b.assign(static_cast<std::size_t>(rows), 0.0);
  lp.c.resize(g.arcs.size());
  lp.names.resize(g.arcs.size());
  for (std::size_t e = 0; e < g.arcs.size(); ++e) {
    const Arc& arc = g.arcs[e];
    if (const int r = row_of[static_cast<std::size_t>(arc.tail)]; r >= 0) lp.a(static_cast<std::size_t>(r), e) += 1.0;
    if (const int r = row_of[static_cast<std::size_t>(arc.head)]; r >= 0) lp.a(static_cast<std::size_t>(r), e) -= 1.0;
    lp.c[e] = arc.weight;
    lp.names[e] = std::to_string(arc.tail) + "->" + std::to_string(arc.head);
  }
  lp.b[static_cast<std::size_t>(row_of[static_cast<std::size_t>(sink)])] = -1.0;
  return lp;
}

// ---------------------------------------------------------------------------

Matrix random_cost_matrix(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix c(n, m);
  for (double& v : c.data()) v = unit(rng);
  return c;
}

StandardFormLP random_bounded_lp(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  if (m == 0 || n == 0) throw Error(ErrorCode::DimensionMismatch, "empty LP");
  std::uniform_real_distribution<double> positive(0.5, 1.5);
  std::uniform_real_distribution<double> centered(-1.0, 1.0);
  std::uniform_real_distribution<double> cost(0.1, 1.1);
  StandardFormLP lp;
  lp.a = Matrix(m, n);
  for (std::size_t j = 0; j < n; ++j) lp.a(0, j) = positive(rng);
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.a(i, j) = centered(rng);
  }
  Vector x_hat(n);
  for (double& v : x_hat) v = positive(rng);
  lp.b = multiply(lp.a, x_hat);
  lp.c.resize(n);
  for (double& v : lp.c) v = cost(rng);
  return lp;
}

Graph random_dag(int num_nodes, double density, std::mt19937_64& rng) {
  if (num_nodes < 2) throw Error(ErrorCode::InvalidArgument, "a DAG path needs two nodes");
  if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorCode::InvalidArgument, "density in (0,1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    Graph g;
    g.num_nodes = num_nodes;
    for (int i = 0; i < num_nodes; ++i) {
      for (int j = i + 1; j < num_nodes; ++j) {
        if (unit(rng) >= density) continue;
        double w = 0.0;
        while (w <= 0.0) w = unit(rng);
        g.arcs.push_back({i, j, w});
      }
    }
    if (reachable(g, 0, num_nodes - 1)) return g;
  }
}

BlobData gaussian_blobs(int per_class, int dim, double sep, std::mt19937_64& rng) {
  if (per_class < 1 || dim < 1) throw Error(ErrorCode::InvalidArgument, "per_class and dim must be >= 1");
  std::normal_distribution<double> noise(0.0, 1.0);
  const double offset = sep / std::sqrt(static_cast<double>(dim));
  BlobData out;
  for (int label : {1, -1}) {
    for (int k = 0; k < per_class; ++k) {
      Vector p(static_cast<std::size_t>(dim));
      for (double& v : p) v = label * offset + noise(rng);
      out.points.push_back(std::move(p));
      out.labels.push_back(label);
    }
  }
  return out;
}

}  // namespace physarum
