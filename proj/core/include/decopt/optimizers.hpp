#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "decopt/errors.hpp"
#include "decopt/network.hpp"
#include "decopt/objectives.hpp"

namespace decopt {

// ---------------------------------------------------------------------------
// Consensus operators per iteration

enum class MixingScheme { kPlain, kMultiStage, kChebyshev };

std::string to_string(MixingScheme scheme);

/// How one optimizer iteration talks to its neighbours. kPlain uses W(k) once;
/// kMultiStage uses W(k;T) over T consecutive graphs; kChebyshev applies a
/// degree-T polynomial of a static W.
struct MixingSpec {
  MixingScheme scheme = MixingScheme::kPlain;
  int rounds = 1;
};

/// The gossip operator of one iteration and the communication rounds it costs.
class IterationGossip {
 public:
  IterationGossip(const GraphSequence& seq, const MixingSpec& spec, std::int64_t iteration);

  /// Effective gossip matrix applied to x (consensus vectors map to zero).
  NodeVector apply(const NodeVector& x) const;
  /// (I - W_eff) x.
  NodeVector mix(const NodeVector& x) const;
  int rounds() const { return spec_.rounds; }

 private:
  const GraphSequence& seq_;
  MixingSpec spec_;
  std::int64_t first_step_;
};

/// chi of the effective operator, i.e. 1 / (1 - c) for its zero-mean
/// contraction bound c given the per-graph chi.
double effective_chi(const MixingSpec& spec, double chi);
/// rho with ||(I - W_eff) x||^2 <= (1 - rho) ||x||^2 on zero-mean x; for
/// multi-stage mixing 1 - exp(-T / chi), hence 1 - 1/e at T = ceil(chi).
double effective_rho(const MixingSpec& spec, double chi);

// ---------------------------------------------------------------------------
// ADOM+VR

struct AdomVrParams {
  double tau0 = 0, tau1 = 0, tau2 = 0;
  double eta = 0, alpha = 0, nu = 0, beta = 0;
  double sigma1 = 0, sigma2 = 0, theta = 0, gamma = 0, delta = 0, zeta = 0;
  double lambda = 0, p1 = 0, p2 = 0;
  int b = 1;
  int n = 1;
  double chi = 1, mu = 0, L = 0, Lbar = 0;
};

/// Parameter schedule of ADOM+VR. Requires 0 < mu <= L <= Lbar <= nL,
/// chi >= 1 and Lbar/L <= b <= n.
AdomVrParams adom_vr_params(double mu, double L, double Lbar, double chi, int n, int b);

/// b = ceil(max{sqrt(n Lbar / L), n sqrt(mu / L)}), raised to ceil(Lbar/L) and
/// capped at n.
int adom_vr_batch_size(double mu, double L, double Lbar, int n);

/// 32 max{n/b, sqrt(n)/b sqrt(kappa), n Lbar/(b^2 L) sqrt(kappa), chi sqrt(kappa)}
/// * ln(1/epsilon), kappa = L/mu.
double adom_vr_iteration_bound(const AdomVrParams& params, double epsilon);

/// When the new full local gradient at a reset snapshot is evaluated: at the
/// reset (eager) or at the start of the next step (lazy). Only the timing of
/// the oracle charge differs.
enum class SnapshotRefresh { kEager, kLazy };

struct AdomVrOptions {
  SnapshotRefresh refresh = SnapshotRefresh::kEager;
  MixingSpec mixing;
};

struct AdomVrState {
  NodeVector x, x_f, omega, y, y_f, z, z_f, momentum;
  std::int64_t step = 0;
  std::int64_t communications = 0;
  std::vector<std::int64_t> oracle_calls;  // per node
  std::int64_t snapshot_resets = 0;

  // grad f_ij(omega_i) for every component (d x n per node) and their mean.
  std::vector<Matrix> snapshot_components;
  NodeVector snapshot_gradient;
  std::vector<char> snapshot_stale;
};

/// x^0 = x_f^0 = omega^0 = x0 replicated, y = z = momentum = 0; evaluates the
/// snapshot gradients (n calls per node).
AdomVrState adom_vr_init(const FiniteSumObjective& obj, const Vector& x0);

/// Importance sampling p_ij = L_ij / (n Lbar_i), uniform when Lbar_i = 0.
class ImportanceSampler {
 public:
  explicit ImportanceSampler(const SmoothnessInfo& info);

  double probability(int node, int component) const { return prob_(component, node); }
  /// Inverse-CDF draw from one uniform variate.
  int draw(int node, std::mt19937_64& gen) const;

 private:
  Matrix prob_;  // n x m
  Matrix cdf_;   // n x m
  std::vector<int> last_positive_;
};

/// The variance-reduced estimator of node i at x_g for a given batch:
/// grad F_i(omega_i) + (1/b) sum_j 1/(n p_ij) [grad f_ij(x_g) - grad f_ij(omega_i)].
Vector adom_vr_estimator(const FiniteSumObjective& obj, const AdomVrState& state,
                         const ImportanceSampler& sampler, int node, VectorCRef x_g,
                         std::span<const int> batch);

/// One iteration of ADOM+VR with randomness drawn from substreams of seed.
void adom_vr_step(AdomVrState& state, const AdomVrParams& params, const FiniteSumObjective& obj,
                  const GraphSequence& seq, std::uint64_t seed, const AdomVrOptions& options = {});

// ---------------------------------------------------------------------------
// GT-PAGE

struct GtPageParams {
  double eta = 0;
  double p = 1;
  int b = 1;
  int n = 1;
  MixingSpec mixing;
  double chi = 1, rho = 1, L = 0, Lhat = 0;
  double c_tilde = 4;
  double bound2 = 0, bound3 = 0, bound4 = 0;
  bool eta_from_theory = true;
  bool per_node_coins = false;
};

/// Defaults: b = ceil(sqrt(n) Lhat / L) clamped to [1, n], p = b / (n + b),
/// multi-stage mixing with T = ceil(chi). eta is the minimum of the three
/// step-size bounds and rho / L.
GtPageParams gt_page_params(double L, double Lhat, double chi, int n,
                            std::optional<int> b = std::nullopt,
                            std::optional<double> p = std::nullopt,
                            std::optional<MixingSpec> mixing = std::nullopt);

/// Replaces the theoretical step size by a user-chosen one.
GtPageParams with_step_size(GtPageParams params, double eta);

struct GtPageState {
  NodeVector x, y, v;
  std::int64_t step = 0;
  std::int64_t communications = 0;
  std::vector<std::int64_t> oracle_calls;
  bool last_full_gradient = true;
};

/// x^0 = x0 replicated, y^0 = grad F(x^0) (n calls per node), v^0 = mean(y^0)
/// in every block.
GtPageState gt_page_init(const FiniteSumObjective& obj, const Vector& x0);

/// PAGE correction of node i without restart:
/// y_i + (1/b) sum_{j in batch} [grad f_ij(x_next) - grad f_ij(x)].
Vector gt_page_estimator(const FiniteSumObjective& obj, int node, VectorCRef y, VectorCRef x_next,
                         VectorCRef x, std::span<const int> batch);

void gt_page_step(GtPageState& state, const GtPageParams& params, const FiniteSumObjective& obj,
                  const GraphSequence& seq, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Gradient tracking baseline

struct GradientTrackingState {
  NodeVector x, y, gradient;  // gradient = grad F(x)
  std::int64_t step = 0;
  std::int64_t communications = 0;
  std::vector<std::int64_t> oracle_calls;
};

GradientTrackingState gradient_tracking_init(const FiniteSumObjective& obj, const Vector& x0);

/// x' = (I - W) x - eta y, y' = (I - W) y + grad F(x') - grad F(x).
void gradient_tracking_step(GradientTrackingState& state, double eta,
                            const FiniteSumObjective& obj, const GraphSequence& seq,
                            const MixingSpec& mixing = {});

// ---------------------------------------------------------------------------
// Runs and traces

enum class Method { kAdomVr, kGtPage, kGtBaseline };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct TraceRecord {
  std::int64_t iteration = 0;
  std::int64_t communications = 0;
  std::int64_t oracle_calls = 0;  // max over nodes
  double dist_sq = 0;             // ||x - 1 (x) x*||^2, NaN without x*
  double mean_dist_sq = 0;        // ||xbar - x*||^2, NaN without x*
  double grad_norm_sq = 0;        // ||(1/m) sum_i grad F_i(xbar)||^2
  double consensus_error = 0;     // sum_i ||x_i - xbar||^2
  double value = 0;               // (1/m) sum_i F_i(xbar)
};

struct RunTrace {
  std::vector<TraceRecord> records;
  NodeVector final_iterate;
};

inline constexpr std::int64_t kUnlimited = std::numeric_limits<std::int64_t>::max();

/// A run stops before an iteration that would exceed max_iterations or
/// max_communications, and after the first iteration that reaches
/// max_oracle_calls (its cost is random).
struct Budgets {
  std::int64_t max_iterations = kUnlimited;
  std::int64_t max_communications = kUnlimited;
  std::int64_t max_oracle_calls = kUnlimited;
};

struct RunConfig {
  Method method = Method::kAdomVr;
  AdomVrParams adom;
  AdomVrOptions adom_options;
  GtPageParams page;
  double baseline_eta = 0;
  MixingSpec baseline_mixing;

  Budgets budgets;
  std::int64_t cadence = 1;
  std::uint64_t seed = 0;
  std::optional<Vector> x0;      // zero when empty
  std::optional<Vector> x_star;  // enables dist_sq
  double divergence_limit = 1e12;
  /// Stop once dist_sq <= stop_dist_sq (needs x_star).
  std::optional<double> stop_dist_sq;

  /// Called after initialization and after every iteration.
  std::function<void(std::int64_t iteration, std::int64_t comms, std::int64_t oracle_calls,
                     const NodeVector& x)>
      observer;
};

/// Raised when a run fails; carries the trace up to the last good iterate.
class RunError : public Error {
 public:
  RunError(const std::string& what, std::int64_t step, RunTrace partial)
      : Error(what), step_(step), partial_(std::move(partial)) {}
  std::int64_t step() const { return step_; }
  const RunTrace& partial() const { return partial_; }

 private:
  std::int64_t step_;
  RunTrace partial_;
};

RunTrace run(const FiniteSumObjective& obj, const GraphSequence& seq, const RunConfig& config);

/// Metrics of one record evaluated at iterate x.
TraceRecord measure(const FiniteSumObjective& obj, const NodeVector& x,
                    const std::optional<Vector>& x_star);

}  // namespace decopt
