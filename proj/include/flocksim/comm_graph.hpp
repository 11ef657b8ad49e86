#pragma once

#include <vector>

#include "flocksim/core.hpp"

// Range-limited communication topology. Rebuilt from scratch each round;
// O(N^2) all-pairs distances, which is exact and plenty fast at the team
// sizes this simulator targets.

namespace flocksim {

struct CommGraph {
  int round = 0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbor ids, symmetric, irreflexive

  int size() const { return static_cast<int>(adjacency.size()); }
  const std::vector<int>& neighbors(int i) const { return adjacency.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency.at(i).size()); }
};

// Edge (i, j) present iff distance <= r_comm; the boundary is a neighbor.
CommGraph build_graph(const std::vector<Vec2>& positions, double r_comm);

// Neighbor count over total team size.
double influence(const CommGraph& g, int robot_id);

// True when one connected component covers all robots.
bool is_connected(const CommGraph& g);

// Number of hops between i and j, or -1 when disconnected.
int hop_distance(const CommGraph& g, int from, int to);

// Longest shortest path over all pairs, or -1 when disconnected.
int diameter(const CommGraph& g);

}  // namespace flocksim
