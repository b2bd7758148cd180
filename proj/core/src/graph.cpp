#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "decopt/errors.hpp"
#include "decopt/network.hpp"

namespace decopt {

WeightedGraph::WeightedGraph(int nodes) : nodes_(nodes) {
  if (nodes < 1) throw InvalidArgument("graph needs at least one node");
}

void WeightedGraph::add_edge(int u, int v, double weight) {
  if (u < 0 || v < 0 || u >= nodes_ || v >= nodes_) {
    throw InvalidArgument("edge endpoint out of range: (" + std::to_string(u) + ", " +
                          std::to_string(v) + ")");
  }
  if (u == v) throw InvalidArgument("self-loops are not allowed");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InvalidArgument("edge weights must be finite and positive");
  }
  if (has_edge(u, v)) throw InvalidArgument("duplicate edge");
  edges_.push_back({std::min(u, v), std::max(u, v), weight});
}

void WeightedGraph::remove_edge(int u, int v) {
  const int a = std::min(u, v);
  const int b = std::max(u, v);
  auto it = std::find_if(edges_.begin(), edges_.end(),
                         [&](const Edge& e) { return e.u == a && e.v == b; });
  if (it == edges_.end()) throw InvalidArgument("edge not present");
  edges_.erase(it);
}

bool WeightedGraph::has_edge(int u, int v) const {
  const int a = std::min(u, v);
  const int b = std::max(u, v);
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.u == a && e.v == b; });
}

bool WeightedGraph::is_connected() const {
  std::vector<std::vector<int>> adj(nodes_);
  for (const auto& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(nodes_, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == nodes_;
}

Matrix WeightedGraph::laplacian() const {
  Matrix lap = Matrix::Zero(nodes_, nodes_);
  for (const auto& e : edges_) {
    lap(e.u, e.u) += e.weight;
    lap(e.v, e.v) += e.weight;
    lap(e.u, e.v) -= e.weight;
    lap(e.v, e.u) -= e.weight;
  }
  return lap;
}

bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
  if (a.nodes_ != b.nodes_ || a.edges_.size() != b.edges_.size()) return false;
  auto key = [](const Edge& e) { return std::pair{e.u, e.v}; };
  auto ea = a.edges_;
  auto eb = b.edges_;
  auto by_key = [&](const Edge& x, const Edge& y) { return key(x) < key(y); };
  std::sort(ea.begin(), ea.end(), by_key);
  std::sort(eb.begin(), eb.end(), by_key);
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (key(ea[i]) != key(eb[i]) || ea[i].weight != eb[i].weight) return false;
  }
  return true;
}

WeightedGraph complete_graph(int nodes) {
  WeightedGraph g(nodes);
  for (int u = 0; u < nodes; ++u) {
    for (int v = u + 1; v < nodes; ++v) g.add_edge(u, v);
  }
  return g;
}

WeightedGraph star_graph(int nodes, int center) {
  if (center < 0 || center >= nodes) throw InvalidArgument("star center out of range");
  WeightedGraph g(nodes);
  for (int v = 0; v < nodes; ++v) {
    if (v != center) g.add_edge(center, v);
  }
  return g;
}

WeightedGraph ring_graph(int nodes) {
  WeightedGraph g(nodes);
  if (nodes == 2) {
    g.add_edge(0, 1);
    return g;
  }
  for (int v = 0; v + 1 < nodes; ++v) g.add_edge(v, v + 1);
  if (nodes > 2) g.add_edge(nodes - 1, 0);
  return g;
}

}  // namespace decopt
