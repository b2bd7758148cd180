#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decopt/node_vector.hpp"

namespace decopt {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Weighted undirected graph without self-loops.
class WeightedGraph {
 public:
  explicit WeightedGraph(int nodes);

  /// Adds the undirected edge {u, v}; rejects self-loops, duplicates,
  /// out-of-range endpoints and non-positive weights.
  void add_edge(int u, int v, double weight = 1.0);
  /// Removes {u, v}; throws if absent.
  void remove_edge(int u, int v);
  bool has_edge(int u, int v) const;

  int nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool is_connected() const;
  Matrix laplacian() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&);

 private:
  int nodes_;
  std::vector<Edge> edges_;  // stored with u < v
};

WeightedGraph complete_graph(int nodes);
WeightedGraph star_graph(int nodes, int center = 0);
WeightedGraph ring_graph(int nodes);

/// Extremes of the Laplacian spectrum; the smallest positive eigenvalue is the
/// smallest one above 1e-8 * lambda_max.
struct LaplacianSpectrum {
  double lambda_max = 0.0;
  double lambda_min_positive = 0.0;
  int zero_eigenvalues = 0;
};
LaplacianSpectrum laplacian_spectrum(const WeightedGraph& graph);

/// Symmetric gossip matrix W with consensus kernel and zero-sum range.
///
/// For a graph with Laplacian L, W = L / lambda_max(L). chi is the
/// contraction parameter: on zero-mean x, ||Wx - x|| <= (1 - 1/chi) ||x||,
/// hence also ||Wx - x||^2 <= (1 - 1/chi) ||x||^2.
struct GossipMatrix {
  Matrix entries;
  double chi = 1.0;
  double lambda_max = 0.0;
  double lambda_min_positive = 0.0;

  int nodes() const { return static_cast<int>(entries.rows()); }
  /// The zero operator on a single node (no communication partner).
  static GossipMatrix trivial(int nodes);
};

/// W = L(g) / lambda_max(L(g)); chi = lambda_max / lambda_min_positive.
/// Throws DisconnectedGraph or InvalidArgument (m < 2).
GossipMatrix gossip_from_laplacian(const WeightedGraph& graph);

/// Returns (W kron I_d) x, i.e. block i = sum_j W_ij x_j.
NodeVector apply_mixing(const GossipMatrix& w, const NodeVector& x);

/// Largest ||Wx - x|| / ||x|| over zero-mean x, from the spectrum of W.
double zero_mean_contraction(const GossipMatrix& w);

enum class TopologyKind { kStatic, kRandomGeometric, kTwoStarHop, kRotatingStar, kRecorded };

std::string to_string(TopologyKind kind);

/// Periodic sequence of graphs G^k with their gossip matrices.
///
/// Every supported topology is periodic (random geometric sequences repeat
/// after their horizon), so the sequence stores one period of graphs and
/// precomputes W(k) for each. Access is random and deterministic.
class GraphSequence {
 public:
  GraphSequence(TopologyKind kind, std::vector<WeightedGraph> cycle);

  TopologyKind kind() const { return kind_; }
  int nodes() const { return nodes_; }
  std::int64_t period() const { return static_cast<std::int64_t>(cycle_.size()); }

  const WeightedGraph& graph(std::int64_t step) const;
  const GossipMatrix& gossip(std::int64_t step) const;

  /// Largest chi over one period (exact per graph).
  double max_chi() const;

 private:
  std::size_t index(std::int64_t step) const;

  TopologyKind kind_;
  int nodes_;
  std::vector<WeightedGraph> cycle_;
  std::vector<GossipMatrix> gossip_;
};

GraphSequence static_sequence(const WeightedGraph& graph);
/// A one-node network whose gossip matrix is zero.
GraphSequence single_node_sequence();

/// Fresh random geometric graph per step: m uniform points in the unit
/// square, unit-weight edges between points within `radius`, resampled until
/// connected (at most 1000 attempts per step). The sequence repeats after
/// `horizon` steps.
GraphSequence random_geometric_sequence(int nodes, double radius, std::uint64_t seed,
                                        std::int64_t horizon);

/// Role labels of the two-star hop topology: v_l = 0, v_r = 1, the rest are
/// leaves or the middle vertex.
inline constexpr int kLeftCenter = 0;
inline constexpr int kRightCenter = 1;

/// T_{a,b} for a + b + 3 = nodes, built with unit weights.
WeightedGraph two_star_graph(int nodes, int left_leaves);

/// Cycle T_{0,m-3} -> hops left -> T_{m-3,0} -> hops right -> T_{0,m-3};
/// period 2(m-3). Verifies the sampled chi is at most 8m and throws
/// otherwise.
GraphSequence two_star_hop_sequence(int nodes);

/// Star graphs whose center first runs through S3 and then picks one vertex of
/// S1 u S2 (alternating between the sets across cycles).
GraphSequence rotating_star_sequence(int nodes, const std::vector<int>& s1,
                                     const std::vector<int>& s2);
/// S1 = first ceil(m/3) nodes, S2 = next ceil(m/3), S3 = rest.
GraphSequence rotating_star_sequence(int nodes);

/// Empirical chi over `trials` graphs of the sequence. When trials covers a
/// full period every graph is examined; otherwise steps are drawn from the
/// seed. Each sampled graph contributes its exact zero-mean contraction.
double measure_chi(const GraphSequence& seq, int trials, std::uint64_t seed);

/// W(k;T) x = x - prod_{q} (I - W(q)) x over steps start, ..., start + T - 1
/// (earliest step applied first).
NodeVector multi_stage_mix(const GraphSequence& seq, std::int64_t start_step, int stages,
                           const NodeVector& x);

/// P(W) x, where 1 - P is the degree-k Chebyshev polynomial on
/// [lambda_min_positive / lambda_max, 1] normalized to 1 at 0. Consensus
/// vectors map to zero.
NodeVector chebyshev_mix(const GossipMatrix& w, int degree, const NodeVector& x);
/// Same, but rejects sequences that are not static.
NodeVector chebyshev_mix(const GraphSequence& seq, int degree, const NodeVector& x);
/// Zero-mean contraction factor ||P(W)x - x|| / ||x|| bound of chebyshev_mix.
double chebyshev_contraction(double chi, int degree);

/// Line-based dump: "m <count>", then per step "step k" and "edge i j w".
void write_graph_sequence(std::ostream& out, const GraphSequence& seq,
                          std::optional<std::int64_t> steps = std::nullopt);
GraphSequence read_graph_sequence(std::istream& in);

}  // namespace decopt
