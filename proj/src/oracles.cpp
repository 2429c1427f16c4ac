#include "physarum/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "physarum/error.hpp"

namespace physarum::oracles {

Assignment hungarian(const Matrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0) return {};
  if (m < n) throw Error(ErrorCode::DimensionMismatch, "hungarian needs n <= m");
  for (double v : cost.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteEntry, "cost matrix");
  }

  // 1-based potentials u (rows), v (columns); way[j] is the column preceding j
  // on the current augmenting path, owner[j] the row matched to column j.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> min_slack(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.map.assign(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) out.map[owner[j] - 1] = static_cast<int>(j - 1);
  }
  out.cost = assignment_cost(cost, out.map);
  return out;
}

namespace {

using EMatrix = Eigen::MatrixXd;
using EVector = Eigen::VectorXd;

constexpr double kFeasTol = 1e-9;

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

struct Vertex {
  Vector x;
  double objective;
  std::vector<std::size_t> basis;
};

struct Enumeration {
  std::vector<Vertex> vertices;  // distinct points, in basis order
  std::size_t singular = 0;
  std::size_t feasible = 0;
};

// Drops dependent rows of [A | b]; throws InfeasibleDetected when they are inconsistent.
std::pair<EMatrix, EVector> independent_rows(const EMatrix& a, const EVector& b) {
  EMatrix aug(a.rows(), a.cols() + 1);
  aug << a, b;
  Eigen::FullPivLU<EMatrix> lu_a(a.transpose());
  lu_a.setThreshold(1e-10);
  Eigen::FullPivLU<EMatrix> lu_aug(aug);
  lu_aug.setThreshold(1e-10);
  if (lu_aug.rank() > lu_a.rank()) {
    throw Error(ErrorCode::InfeasibleDetected, "Ax = b has no solution");
  }
  if (lu_a.rank() == a.rows()) return {a, b};
  // Greedy: keep each row that raises the rank.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    keep.push_back(i);
    EMatrix sub(static_cast<Eigen::Index>(keep.size()), a.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = a.row(keep[k]);
    Eigen::FullPivLU<EMatrix> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.rank() < static_cast<Eigen::Index>(keep.size())) keep.pop_back();
  }
  EMatrix ra(static_cast<Eigen::Index>(keep.size()), a.cols());
  EVector rb(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    ra.row(static_cast<Eigen::Index>(k)) = a.row(keep[k]);
    rb(static_cast<Eigen::Index>(k)) = b(keep[k]);
  }
  return {ra, rb};
}

Enumeration enumerate_bfs(const EMatrix& a_in, const EVector& b_in, const Vector& c) {
  const auto [a, b] = independent_rows(a_in, b_in);
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  if (n > kMaxEnumerationVars) {
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " variables exceed the enumeration limit");
  }
  if (binomial(n, m) > static_cast<double>(kMaxEnumerationBases)) {
    throw Error(ErrorCode::TooLarge, "too many bases to enumerate");
  }

  Enumeration out;
  std::vector<std::size_t> basis(m);
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t depth, std::size_t start) {
    if (depth == m) {
      EMatrix sq(a.rows(), a.rows());
      for (std::size_t k = 0; k < m; ++k) sq.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(basis[k]));
      Eigen::FullPivLU<EMatrix> lu(sq);
      lu.setThreshold(1e-10);
      if (!lu.isInvertible()) {
        ++out.singular;
        return;
      }
      const EVector xb = lu.solve(b);
      Vector x(n, 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        const double v = xb(static_cast<Eigen::Index>(k));
        if (v < -kFeasTol) return;
        x[basis[k]] = std::max(v, 0.0);
      }
      Eigen::Map<const EVector> xe(x.data(), static_cast<Eigen::Index>(n));
      if ((a * xe - b).norm() > kFeasTol * (1.0 + b.norm())) return;
      ++out.feasible;
      for (const Vertex& seen : out.vertices) {
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(seen.x[j] - x[j]));
        if (diff <= kFeasTol) return;
      }
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += c[j] * x[j];
      out.vertices.push_back({std::move(x), obj, basis});
      return;
    }
    for (std::size_t j = start; j + (m - depth) <= n; ++j) {
      basis[depth] = j;
      visit(depth + 1, j + 1);
    }
  };
  visit(0, 0);
  return out;
}

}  // namespace

VertexSolution enumerate_vertices(const StandardFormLP& lp) {
  validate(lp);
  const auto m = static_cast<Eigen::Index>(lp.num_rows());
  const auto n = static_cast<Eigen::Index>(lp.num_vars());
  if (lp.num_vars() > kMaxEnumerationVars) {
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " variables exceed the enumeration limit");
  }
  EMatrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = lp.a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  const EVector b = Eigen::Map<const EVector>(lp.b.data(), m);

  const Enumeration found = enumerate_bfs(a, b, lp.c);
  if (found.vertices.empty()) {
    throw Error(ErrorCode::InfeasibleDetected, "no nonnegative basic solution");
  }

  // A negative cost along a recession direction means the LP is unbounded.
  // Such directions are the vertices of {A d = 0, 1ᵀd = 1, d ≥ 0}.
  if (std::any_of(lp.c.begin(), lp.c.end(), [](double v) { return v < 0.0; })) {
    EMatrix cone(m + 1, n);
    cone << a, EMatrix::Ones(1, n);
    EVector rhs = EVector::Zero(m + 1);
    rhs(m) = 1.0;
    try {
      for (const Vertex& d : enumerate_bfs(cone, rhs, lp.c).vertices) {
        if (d.objective < -kFeasTol) {
          throw Error(ErrorCode::UnboundedUnsupported, "objective is unbounded below");
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleDetected) throw;
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < found.vertices.size(); ++k) {
    if (found.vertices[k].objective < found.vertices[best].objective) best = k;
  }
  VertexSolution out;
  out.x_star = found.vertices[best].x;
  out.objective = found.vertices[best].objective;
  out.basis = found.vertices[best].basis;
  out.singular_bases = found.singular;
  out.feasible_bases = found.feasible;
  for (std::size_t k = 0; k < found.vertices.size(); ++k) {
    if (k == best) continue;
    const double obj = found.vertices[k].objective;
    if (!out.second_best || obj < *out.second_best) out.second_best = obj;
  }
  out.unique = !out.second_best || *out.second_best - out.objective > kFeasTol;
  return out;
}

PathResult dijkstra(const Graph& g, int source, int sink) {
  if (g.num_nodes < 1) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
  if (source < 0 || source >= g.num_nodes || sink < 0 || sink >= g.num_nodes) {
    throw Error(ErrorCode::InvalidArgument, "source or sink out of range");
  }
  const auto nodes = static_cast<std::size_t>(g.num_nodes);
  std::vector<std::vector<std::pair<int, double>>> out(nodes);
  for (const Arc& arc : g.arcs) {
    if (arc.tail < 0 || arc.tail >= g.num_nodes || arc.head < 0 || arc.head >= g.num_nodes) {
      throw Error(ErrorCode::InvalidArgument, "arc endpoint out of range");
    }
    if (!(arc.weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative arc weight");
    out[static_cast<std::size_t>(arc.tail)].emplace_back(arc.head, arc.weight);
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes, inf);
  std::vector<int> pred(nodes, -1);
  std::vector<bool> done(nodes, false);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[static_cast<std::size_t>(source)] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = true;
    for (const auto& [v, w] : out[static_cast<std::size_t>(u)]) {
      const auto vi = static_cast<std::size_t>(v);
      const double nd = d + w;
      if (nd < dist[vi] || (nd == dist[vi] && !done[vi] && u < pred[vi])) {
        dist[vi] = nd;
        pred[vi] = u;
        frontier.emplace(nd, v);
      }
    }
  }
  if (dist[static_cast<std::size_t>(sink)] == inf) {
    throw Error(ErrorCode::Unreachable,
                "node " + std::to_string(sink) + " is not reachable from " + std::to_string(source));
  }
  PathResult res;
  res.length = dist[static_cast<std::size_t>(sink)];
  for (int v = sink; v != -1; v = pred[static_cast<std::size_t>(v)]) res.path.push_back(v);
  std::reverse(res.path.begin(), res.path.end());
  return res;
}

}  // namespace physarum::oracles
