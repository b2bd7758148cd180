#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decopt/node_vector.hpp"

namespace decopt {

/// Smoothness and strong-convexity constants of a finite-sum objective.
struct SmoothnessInfo {
  double L = 0.0;      // every F_i is L-smooth
  double mu = 0.0;     // every F_i is mu-strongly convex (0 if nonconvex)
  Matrix L_ij;         // m x n component smoothness constants
  Vector Lbar_i;       // (1/n) sum_j L_ij
  double Lbar = 0.0;   // max_i Lbar_i
  double Lhat = 0.0;   // average smoothness
  std::string method;  // how the constants were obtained

  /// Fills Lbar_i and Lbar from L_ij, then clamps into L <= Lbar <= nL and
  /// L <= Lhat <= sqrt(n) L.
  void finalize();
  /// True when the ordering constraints hold (up to 1e-12 relative).
  bool ordered() const;
};

/// F(x) = sum_i F_i(x_i), F_i = (1/n) sum_j f_ij, each f_ij : R^d -> R.
///
/// Objectives are immutable after construction.
class FiniteSumObjective {
 public:
  FiniteSumObjective(int nodes, int components, int dim);
  virtual ~FiniteSumObjective() = default;

  int nodes() const { return nodes_; }
  int components() const { return components_; }
  int dim() const { return dim_; }
  const SmoothnessInfo& smoothness() const { return info_; }

  virtual std::string name() const = 0;

  virtual double component_value(int i, int j, VectorCRef x) const = 0;
  /// out += scale * grad f_ij(x).
  virtual void add_component_gradient(int i, int j, VectorCRef x, double scale,
                                      VectorRef out) const = 0;
  /// out += scale * (grad f_ij(x) - grad f_ij(y)); one oracle call.
  virtual void add_component_difference(int i, int j, VectorCRef x, VectorCRef y, double scale,
                                        VectorRef out) const;
  /// F_i(x).
  virtual double local_value(int i, VectorCRef x) const;
  /// out += scale * grad F_i(x); n oracle calls.
  virtual void add_local_gradient(int i, VectorCRef x, double scale, VectorRef out) const;

 protected:
  void check_index(int i, int j) const;

  SmoothnessInfo info_;

 private:
  int nodes_;
  int components_;
  int dim_;
};

/// grad F(x): block i = grad F_i(x_i).
NodeVector full_gradient(const FiniteSumObjective& obj, const NodeVector& x);
Vector local_gradient(const FiniteSumObjective& obj, int node, VectorCRef x);
/// sum_i F_i(x_i).
double total_value(const FiniteSumObjective& obj, const NodeVector& x);
/// (1/m) sum_i F_i(w) and its gradient at a common point w.
double average_value(const FiniteSumObjective& obj, VectorCRef w);
Vector average_gradient(const FiniteSumObjective& obj, VectorCRef w);

/// sum_k weights[k] * grad f_{node, indices[k]}(x).
Vector batch_gradient(const FiniteSumObjective& obj, int node, std::span<const int> indices,
                      std::span<const double> weights, VectorCRef x);

struct FiniteDifferenceReport {
  double max_relative_error = 0.0;
  bool passed = false;
};

/// Central differences of every component gradient at the node blocks of x.
/// The relative error of a component is ||fd - g|| / max(||g||, 1e-3).
FiniteDifferenceReport finite_difference_check(const FiniteSumObjective& obj, const NodeVector& x,
                                               double h, double tolerance);

/// Largest observed ratios over random pairs (x, y): x uniform in a ball of
/// the given radius, y = x + delta with log-uniform ||delta|| in
/// [1e-3 radius, radius].
struct SmoothnessProbe {
  double local_ratio = 0.0;    // max_i ||grad F_i(y) - grad F_i(x)|| / ||y - x||
  double average_ratio = 0.0;  // max_i sqrt((1/n) sum_j ||...||^2) / ||y - x||
};
SmoothnessProbe probe_smoothness(const FiniteSumObjective& obj, int pairs, double radius,
                                 std::uint64_t seed);

/// Rows of a data block: features is rows x d, labels has one entry per row.
struct DataBlock {
  Matrix features;
  Vector labels;
};

/// The data held by one node, grouped into its n components.
struct DatasetShard {
  int node = 0;
  std::vector<DataBlock> blocks;
};

/// f_ij(w) = mean over block rows of log(1 + exp(-y <a, w>)) + lambda/2 ||w||^2.
class LogisticObjective final : public FiniteSumObjective {
 public:
  LogisticObjective(std::vector<DatasetShard> shards, double lambda);

  std::string name() const override { return "logistic"; }
  double component_value(int i, int j, VectorCRef x) const override;
  void add_component_gradient(int i, int j, VectorCRef x, double scale,
                              VectorRef out) const override;
  double lambda() const { return lambda_; }

 private:
  std::vector<DatasetShard> shards_;
  double lambda_;
};

struct NllsOptions {
  int probe_pairs = 1000;
  double probe_radius = 10.0;
  double safety_factor = 1.2;
  std::uint64_t probe_seed = 0x6e6c6c73;
};

/// f_ij(w) = mean over block rows of (y - sigmoid(<a, w>))^2.
class NllsObjective final : public FiniteSumObjective {
 public:
  NllsObjective(std::vector<DatasetShard> shards, const NllsOptions& options = {});

  std::string name() const override { return "nlls"; }
  double component_value(int i, int j, VectorCRef x) const override;
  void add_component_gradient(int i, int j, VectorCRef x, double scale,
                              VectorRef out) const override;

 private:
  std::vector<DatasetShard> shards_;
};

/// f_ij(x) = 1/2 x^T A_ij x - b_ij^T x with symmetric positive semidefinite A_ij.
class QuadraticObjective final : public FiniteSumObjective {
 public:
  /// hessians[i][j] and linear[i][j] describe f_ij.
  QuadraticObjective(std::vector<std::vector<Matrix>> hessians,
                     std::vector<std::vector<Vector>> linear);

  std::string name() const override { return "quadratic"; }
  double component_value(int i, int j, VectorCRef x) const override;
  void add_component_gradient(int i, int j, VectorCRef x, double scale,
                              VectorRef out) const override;

  const Matrix& hessian(int i, int j) const { return hessians_[i][j]; }
  const Vector& linear(int i, int j) const { return linear_[i][j]; }

 private:
  std::vector<std::vector<Matrix>> hessians_;
  std::vector<std::vector<Vector>> linear_;
};

/// Forwards to another objective and counts oracle calls per node: a
/// component gradient or difference costs one call, a local gradient n.
class CountingObjective final : public FiniteSumObjective {
 public:
  explicit CountingObjective(const FiniteSumObjective& inner);

  std::string name() const override { return inner_.name(); }
  double component_value(int i, int j, VectorCRef x) const override;
  void add_component_gradient(int i, int j, VectorCRef x, double scale,
                              VectorRef out) const override;
  void add_component_difference(int i, int j, VectorCRef x, VectorCRef y, double scale,
                                VectorRef out) const override;
  double local_value(int i, VectorCRef x) const override;
  void add_local_gradient(int i, VectorCRef x, double scale, VectorRef out) const override;

  std::int64_t calls(int node) const { return calls_[node]; }
  std::int64_t max_calls() const;
  void reset();

 private:
  const FiniteSumObjective& inner_;
  mutable std::vector<std::int64_t> calls_;
};

}  // namespace decopt
