#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "decopt/network.hpp"
#include "decopt/objectives.hpp"

namespace decopt {

/// Bump: 0 for z <= 1/2, exp(1 - 1/(2z - 1)^2) otherwise.
double psi(double z);
double psi_derivative(double z);
/// sqrt(e) times the integral of exp(-t^2/2) over (-inf, z].
double phi(double z);
double phi_derivative(double z);

inline constexpr double kChainL0 = 152.0;
inline constexpr double kChainDelta0 = 12.0;
inline constexpr double kChainG0 = 23.0;

/// Index (1-based) of the last nonzero coordinate; 0 for the zero vector.
int prog(VectorCRef x);

/// Link j of the zero-chain (1-based). Link 1 is -Psi(1) Phi(x_1); link
/// j >= 2 is Psi(-x_{j-1}) Phi(-x_j) - Psi(x_{j-1}) Phi(x_j).
double zero_chain_link(int j, VectorCRef x);
/// grad += scale * grad of link j.
void add_zero_chain_link_gradient(int j, VectorCRef x, double scale, VectorRef grad);

struct ZeroChainEvaluation {
  double value = 0.0;
  Vector gradient;
};
/// l(x) = sum of links 1..d, d = x.size().
ZeroChainEvaluation zero_chain_l(VectorCRef x);

/// Strongly convex chain functions on the two-star hop topology.
///
/// Node 0 is v_l, node 1 is v_r and the others hold a plain quadratic.
/// f_ij(x) = g_i(x_j), where x in R^{n * slot_dim} is split into n slots.
/// With L and mu the constants of each g_i, every F_i is (L/n)-smooth and the
/// minimizer has x*_j = q^j in every slot (1-based coordinates).
class ChainInstance final : public FiniteSumObjective {
 public:
  ChainInstance(int nodes, int components, double L, double mu, int slot_dim);

  std::string name() const override { return "chain"; }
  double component_value(int i, int j, VectorCRef x) const override;
  void add_component_gradient(int i, int j, VectorCRef x, double scale,
                              VectorRef out) const override;

  double q() const { return q_; }
  int slot_dim() const { return slot_dim_; }
  /// (q, q^2, ..., q^slot_dim) repeated in every slot.
  Vector x_star() const;
  /// q^{2 slot_dim} / (1 - q^2): squared l2 mass dropped by the truncation.
  double tail_bound() const;

 private:
  double slot_value(int node, VectorCRef y) const;
  void add_slot_gradient(int node, VectorCRef y, double scale, VectorRef out) const;

  double L_;
  double mu_;
  int slot_dim_;
  double q_;
};

/// q = (s - 1) / (s + 1), s = sqrt(2 kappa / 3 + 1/3).
double chain_q(double kappa);
/// Smallest dim with q^{2 dim} / (1 - q^2) < tail.
int chain_dimension_for_tail(double q, double tail);

struct LowerBoundValue {
  std::optional<double> t1;  // empty when chi <= 24
  std::optional<double> t2;  // empty when kappa_s < n
  double value = 0.0;        // max of the applicable terms
};

/// Evaluates max{T1, T2} of the strongly convex lower bound.
LowerBoundValue lower_bound_value(double kappa_b, double kappa_s, double chi, int n,
                                  double comm_rounds, double local_steps);

/// Nonconvex zero-chain instance on S1/S2/S3 with n-block splitting.
///
/// F_i(x) = (L C^2 / (3 L0)) l_1(x / C) on S1, l_2 on S2, 0 on S3, where l_1
/// holds link 1 and the odd links, l_2 the even links, both scaled by
/// m / ceil(m/3). Component k of an S1 node keeps the links j with
/// j = 2k - 1 (mod 2n) (plus link 1 for k = 1), of an S2 node the links
/// j = 2k (mod 2n), each multiplied by n.
class ZeroChainInstance final : public FiniteSumObjective {
 public:
  ZeroChainInstance(int nodes, int components, double L, double delta, std::int64_t comm_budget,
                    std::int64_t oracle_budget);

  std::string name() const override { return "zero_chain"; }
  double component_value(int i, int j, VectorCRef x) const override;
  void add_component_gradient(int i, int j, VectorCRef x, double scale,
                              VectorRef out) const override;

  double scale() const { return scale_; }
  /// Role of node i: 1, 2 or 3.
  int role(int node) const;
  const std::vector<int>& set(int role) const { return sets_[role - 1]; }
  /// Links held by component k (0-based) of a node with the given role.
  const std::vector<int>& links(int role, int component) const;
  /// (L C^2 / (3 L0)) * m / ceil(m/3).
  double amplitude() const { return amplitude_; }

 private:
  double amplitude_;
  double scale_;
  std::vector<int> sets_[3];
  std::vector<std::vector<int>> links_[2];
};

struct HardInstance {
  std::unique_ptr<ZeroChainInstance> objective;
  GraphSequence sequence;
};

/// Builds the instance for comm_budget N >= m/4 and oracle_budget K >= n,
/// with d = 2 + min(floor(4N/m), floor(K/n)) and the matching rotating-star
/// sequence.
HardInstance nonconvex_hard_objective(int nodes, int components, double L, double delta,
                                      std::int64_t comm_budget, std::int64_t oracle_budget);

/// min(floor(4N/m) + 1, floor(K/n) + 1).
std::int64_t progress_bound(int nodes, int components, std::int64_t comms,
                            std::int64_t oracle_calls);

struct ProgressPoint {
  std::int64_t iteration = 0;
  std::int64_t communications = 0;
  std::int64_t oracle_calls = 0;
  int progress = 0;  // max over nodes and recorded times so far
  std::int64_t bound = 0;
};

/// Tracks prog of every node's iterate over a run.
class ProgressAuditor {
 public:
  ProgressAuditor(int nodes, int components);

  void record(std::int64_t iteration, std::int64_t comms, std::int64_t oracle_calls,
              const NodeVector& x);

  const std::vector<ProgressPoint>& points() const { return points_; }
  const std::vector<int>& node_progress() const { return node_progress_; }
  int global_progress() const;
  /// True when every recorded point satisfies progress <= bound.
  bool within_bound() const;

 private:
  int nodes_;
  int components_;
  std::vector<int> node_progress_;
  std::vector<ProgressPoint> points_;
};

}  // namespace decopt
