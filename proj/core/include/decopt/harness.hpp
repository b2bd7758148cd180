#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decopt/hard_instances.hpp"
#include "decopt/network.hpp"
#include "decopt/objectives.hpp"
#include "decopt/optimizers.hpp"

namespace decopt {

// ---------------------------------------------------------------------------
// LibSVM data

/// Dense view of a labelled dataset: features is rows x d.
struct Dataset {
  Matrix features;
  Vector labels;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

struct LibsvmOptions {
  /// Densify to exactly this many features (error if an index exceeds it).
  std::optional<int> dim;
  /// Map labels {0, 1} to {-1, +1} when every label is 0 or 1.
  bool map_binary_zero = true;
};

/// Parses `label idx:val idx:val ...` lines with 1-based indices; blank lines
/// and lines starting with '#' are skipped. Throws ParseError with the line.
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {});
Dataset parse_libsvm(const std::string& path, const LibsvmOptions& options = {});

/// Writes nonzero features only, with round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& data);

/// Maps labels -1 -> 0 and keeps +1 (for losses on {0, 1} targets).
Dataset to_unit_labels(Dataset data);

/// Seeded shuffle, contiguous split over m nodes (the first rows % m nodes get
/// one extra row), then round-robin assignment to the n components of each
/// node. Throws when m n exceeds the number of rows unless allow_empty.
std::vector<DatasetShard> partition_dataset(const Dataset& data, int nodes, int components,
                                            std::uint64_t seed, bool allow_empty = false);

// ---------------------------------------------------------------------------
// Reference solution

struct ReferenceSolution {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  std::int64_t iterations = 0;
};

/// Accelerated gradient with adaptive restart on (1/m) sum_i F_i, step 1/L,
/// until ||grad|| <= tolerance * max(1, ||grad at 0||). Requires mu > 0.
ReferenceSolution reference_solution(const FiniteSumObjective& obj, double tolerance = 1e-12,
                                     std::int64_t max_iterations = 10'000'000);

// ---------------------------------------------------------------------------
// Experiments

enum class ObjectiveKind { kLogistic, kNlls, kChain, kZeroChain };

std::string to_string(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(const std::string& name);

struct ExperimentConfig {
  Method method = Method::kAdomVr;
  ObjectiveKind objective = ObjectiveKind::kLogistic;
  std::string dataset;
  int m = 10;
  int n = 10;
  std::optional<int> b;
  std::uint64_t seed = 0;
  double lambda = 0.1;

  // Topology: complete, ring, star, random_geometric, two_star_hop,
  // rotating_star or file (reads graph_file). Unset: two_star_hop for chain,
  // rotating_star for zero_chain, random_geometric otherwise.
  std::optional<std::string> topology;
  double radius = 0.5;
  std::int64_t horizon = 200;
  std::string graph_file;
  std::optional<double> chi;  // overrides the measured value
  int chi_trials = 1000;

  // Mixing per iteration: plain, multi_stage or chebyshev.
  std::optional<std::string> mixing;
  std::optional<int> rounds;

  std::optional<double> step;  // GT-PAGE / baseline step size override
  std::optional<double> p;     // GT-PAGE restart probability override
  bool per_node_coins = false;
  SnapshotRefresh refresh = SnapshotRefresh::kEager;

  // Synthetic instances.
  double L = 1.0;
  double mu = 0.25;
  int chain_dim = 12;
  double delta = 1.0;
  std::int64_t hard_comm_budget = 0;    // N of the hard instance (defaults to budget_comms)
  std::int64_t hard_oracle_budget = 0;  // K of the hard instance (defaults to budget_oracle)

  Budgets budgets;
  std::int64_t cadence = 1;
  std::optional<double> target_dist_sq;  // relative to the initial distance
  std::string out = "trace";
};

/// Applies one key=value setting; throws InvalidArgument naming valid keys.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
/// Reads a flat key=value file ('#' comments, blank lines ignored).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Canonical key=value listing of every setting.
std::map<std::string, std::string> config_entries(const ExperimentConfig& config);

struct ExperimentResult {
  RunTrace trace;
  std::string csv;
  std::string metadata_json;
};

/// Wires topology, objective and optimizer, runs and renders CSV + JSON.
ExperimentResult execute_experiment(const ExperimentConfig& config);
/// execute_experiment and write <out>.csv and <out>.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// `iter,comms,oracle_calls,dist_sq,grad_norm_sq,consensus_err`, NaN for
/// unavailable metrics.
std::string trace_csv(const RunTrace& trace);

}  // namespace decopt
