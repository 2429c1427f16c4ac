#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "physarum/lp.hpp"
#include "physarum/problems.hpp"

namespace physarum::oracles {

/// Exact min-cost assignment of each row of an n×m cost matrix (n ≤ m) to a
/// distinct column (shortest augmenting paths with potentials).
Assignment hungarian(const Matrix& cost);

struct VertexSolution {
  Vector x_star;
  double objective = 0.0;
  std::vector<std::size_t> basis;
  bool unique = true;
  /// Best objective among vertices that differ from x_star; empty if none.
  std::optional<double> second_best;
  std::size_t singular_bases = 0;
  std::size_t feasible_bases = 0;
};

inline constexpr std::size_t kMaxEnumerationVars = 24;
inline constexpr std::size_t kMaxEnumerationBases = 200000;

/// Brute force over all m-column bases. Exact at small sizes only.
VertexSolution enumerate_vertices(const StandardFormLP& lp);

struct PathResult {
  std::vector<int> path;  // node sequence source..sink
  double length = 0.0;
};

PathResult dijkstra(const Graph& g, int source, int sink);

}  // namespace physarum::oracles
