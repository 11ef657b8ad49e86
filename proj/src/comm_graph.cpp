#include "flocksim/comm_graph.hpp"

#include <queue>

namespace flocksim {

CommGraph build_graph(const std::vector<Vec2>& positions, double r_comm) {
  if (positions.size() < 2)
    throw ContractError("build_graph: need at least two positions");
  if (!(r_comm > 0.0)) throw ContractError("build_graph: r_comm must be positive");

  const int n = static_cast<int>(positions.size());
  CommGraph g;
  g.adjacency.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (distance(positions[i], positions[j]) <= r_comm) {
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
      }
    }
  }
  return g;
}

double influence(const CommGraph& g, int robot_id) {
  if (robot_id < 0 || robot_id >= g.size())
    throw ContractError("influence: robot id out of range");
  return static_cast<double>(g.degree(robot_id)) / g.size();
}

namespace {

// BFS distances from `from`; -1 marks unreachable nodes.
std::vector<int> bfs_hops(const CommGraph& g, int from) {
  std::vector<int> dist(g.size(), -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

}  // namespace

bool is_connected(const CommGraph& g) {
  if (g.size() == 0) return true;
  const auto dist = bfs_hops(g, 0);
  for (int d : dist)
    if (d < 0) return false;
  return true;
}

int hop_distance(const CommGraph& g, int from, int to) {
  if (from < 0 || from >= g.size() || to < 0 || to >= g.size())
    throw ContractError("hop_distance: robot id out of range");
  return bfs_hops(g, from)[to];
}

int diameter(const CommGraph& g) {
  int best = 0;
  for (int i = 0; i < g.size(); ++i) {
    const auto dist = bfs_hops(g, i);
    for (int d : dist) {
      if (d < 0) return -1;
      best = std::max(best, d);
    }
  }
  return best;
}

}  // namespace flocksim
