#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "decopt/errors.hpp"
#include "decopt/network.hpp"
#include "decopt/rng.hpp"

namespace decopt {

namespace {

constexpr int kConnectivityRetries = 1000;

}  // namespace

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kStatic:
      return "static";
    case TopologyKind::kRandomGeometric:
      return "random_geometric";
    case TopologyKind::kTwoStarHop:
      return "two_star_hop";
    case TopologyKind::kRotatingStar:
      return "rotating_star";
    case TopologyKind::kRecorded:
      return "recorded";
  }
  return "unknown";
}

GraphSequence::GraphSequence(TopologyKind kind, std::vector<WeightedGraph> cycle)
    : kind_(kind), nodes_(0), cycle_(std::move(cycle)) {
  if (cycle_.empty()) throw InvalidArgument("graph sequence needs at least one graph");
  nodes_ = cycle_.front().nodes();
  gossip_.reserve(cycle_.size());
  for (const auto& g : cycle_) {
    if (g.nodes() != nodes_) throw InvalidArgument("all graphs in a sequence must share m");
    gossip_.push_back(nodes_ == 1 ? GossipMatrix::trivial(1) : gossip_from_laplacian(g));
  }
}

std::size_t GraphSequence::index(std::int64_t step) const {
  if (step < 0) throw InvalidArgument("graph steps start at zero");
  return static_cast<std::size_t>(step % period());
}

const WeightedGraph& GraphSequence::graph(std::int64_t step) const {
  return cycle_[index(step)];
}

const GossipMatrix& GraphSequence::gossip(std::int64_t step) const {
  return gossip_[index(step)];
}

double GraphSequence::max_chi() const {
  double chi = 1.0;
  for (const auto& w : gossip_) chi = std::max(chi, w.chi);
  return chi;
}

GraphSequence static_sequence(const WeightedGraph& graph) {
  return GraphSequence(TopologyKind::kStatic, {graph});
}

GraphSequence single_node_sequence() {
  return GraphSequence(TopologyKind::kStatic, {WeightedGraph(1)});
}

GraphSequence random_geometric_sequence(int nodes, double radius, std::uint64_t seed,
                                        std::int64_t horizon) {
  if (nodes < 2) throw InvalidArgument("random geometric graphs need m >= 2");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  std::vector<WeightedGraph> cycle;
  cycle.reserve(static_cast<std::size_t>(horizon));
  std::vector<double> px(nodes), py(nodes);
  for (std::int64_t step = 0; step < horizon; ++step) {
    bool connected = false;
    for (int attempt = 0; attempt < kConnectivityRetries && !connected; ++attempt) {
      auto gen = substream(seed, static_cast<std::uint64_t>(step),
                           static_cast<std::uint64_t>(attempt), StreamPurpose::kGraph);
      for (int i = 0; i < nodes; ++i) {
        px[i] = uniform01(gen);
        py[i] = uniform01(gen);
      }
      WeightedGraph g(nodes);
      for (int u = 0; u < nodes; ++u) {
        for (int v = u + 1; v < nodes; ++v) {
          if (std::hypot(px[u] - px[v], py[u] - py[v]) <= radius) g.add_edge(u, v);
        }
      }
      if (g.is_connected()) {
        cycle.push_back(std::move(g));
        connected = true;
      }
    }
    if (!connected) {
      std::ostringstream msg;
      msg << "random geometric graph with m=" << nodes << ", radius=" << radius
          << " stayed disconnected after " << kConnectivityRetries << " resamples at step "
          << step << "; increase the radius";
      throw DisconnectedGraph(msg.str());
    }
  }
  return GraphSequence(TopologyKind::kRandomGeometric, std::move(cycle));
}

WeightedGraph two_star_graph(int nodes, int left_leaves) {
  if (nodes < 3) throw InvalidArgument("T_{a,b} needs at least three nodes");
  const int others = nodes - 2;
  if (left_leaves < 0 || left_leaves >= others) {
    throw InvalidArgument("left star size out of range");
  }
  WeightedGraph g(nodes);
  // Vertices 2..m-1 in a fixed order; position `left_leaves` is the middle.
  for (int pos = 0; pos < others; ++pos) {
    const int v = pos + 2;
    if (pos < left_leaves) {
      g.add_edge(kLeftCenter, v);
    } else if (pos == left_leaves) {
      g.add_edge(kLeftCenter, v);
      g.add_edge(kRightCenter, v);
    } else {
      g.add_edge(kRightCenter, v);
    }
  }
  return g;
}

GraphSequence two_star_hop_sequence(int nodes) {
  if (nodes < 4) throw InvalidArgument("two-star hop sequence needs m >= 4");
  const int span = nodes - 3;
  std::vector<WeightedGraph> cycle;
  cycle.reserve(2 * span);
  for (int k = 0; k < 2 * span; ++k) {
    const int left = k <= span ? k : 2 * span - k;
    cycle.push_back(two_star_graph(nodes, left));
  }
  GraphSequence seq(TopologyKind::kTwoStarHop, std::move(cycle));
  const double chi = measure_chi(seq, static_cast<int>(seq.period()), 0);
  if (chi > 8.0 * nodes) {
    std::ostringstream msg;
    msg << "two-star hop sequence with unit weights has chi=" << chi << " > 8m=" << 8 * nodes;
    throw Error(msg.str());
  }
  return seq;
}

GraphSequence rotating_star_sequence(int nodes, const std::vector<int>& s1,
                                     const std::vector<int>& s2) {
  if (nodes < 3) throw InvalidArgument("rotating star sequence needs m >= 3");
  const std::size_t part = static_cast<std::size_t>((nodes + 2) / 3);
  if (s1.size() != part || s2.size() != part) {
    throw InvalidArgument("S1 and S2 must each contain ceil(m/3) = " + std::to_string(part) +
                          " nodes");
  }
  std::set<int> used;
  for (int v : s1) used.insert(v);
  for (int v : s2) used.insert(v);
  if (used.size() != 2 * part) throw InvalidArgument("S1 and S2 must be disjoint");
  if (*used.begin() < 0 || *used.rbegin() >= nodes) {
    throw InvalidArgument("S1/S2 node index out of range");
  }
  std::vector<int> s3;
  for (int v = 0; v < nodes; ++v) {
    if (!used.count(v)) s3.push_back(v);
  }
  std::vector<int> exchange;
  for (std::size_t i = 0; i < part; ++i) {
    exchange.push_back(s1[i]);
    exchange.push_back(s2[i]);
  }
  std::vector<WeightedGraph> cycle;
  for (int bridge : exchange) {
    for (int center : s3) cycle.push_back(star_graph(nodes, center));
    cycle.push_back(star_graph(nodes, bridge));
  }
  return GraphSequence(TopologyKind::kRotatingStar, std::move(cycle));
}

GraphSequence rotating_star_sequence(int nodes) {
  if (nodes < 3) throw InvalidArgument("rotating star sequence needs m >= 3");
  const int part = (nodes + 2) / 3;
  std::vector<int> s1, s2;
  for (int v = 0; v < part; ++v) {
    s1.push_back(v);
    s2.push_back(part + v);
  }
  return rotating_star_sequence(nodes, s1, s2);
}

double measure_chi(const GraphSequence& seq, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("measure_chi needs at least one trial");
  double worst = 0.0;
  if (trials >= seq.period()) {
    for (std::int64_t k = 0; k < seq.period(); ++k) {
      worst = std::max(worst, zero_mean_contraction(seq.gossip(k)));
    }
  } else {
    auto gen = substream(seed, 0, kSharedNode, StreamPurpose::kProbe);
    std::uniform_int_distribution<std::int64_t> pick(0, seq.period() - 1);
    for (int t = 0; t < trials; ++t) {
      worst = std::max(worst, zero_mean_contraction(seq.gossip(pick(gen))));
    }
  }
  return 1.0 / (1.0 - worst);
}

}  // namespace decopt
