#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "decopt/errors.hpp"
#include "decopt/objectives.hpp"

namespace decopt {

namespace {

// max_t |sigmoid''(t)| = 1 / (6 sqrt(3)).
const double kSigmoidCurvature = 1.0 / (6.0 * std::sqrt(3.0));

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double top_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return std::max(0.0, solver.eigenvalues().maxCoeff());
}

Matrix block_gram(const DataBlock& block) {
  return block.features.transpose() * block.features / static_cast<double>(block.features.rows());
}

int validate_shards(const std::vector<DatasetShard>& shards, int& dim) {
  if (shards.empty()) throw InvalidArgument("objective needs at least one shard");
  const int n = static_cast<int>(shards.front().blocks.size());
  if (n < 1) throw InvalidArgument("shard without components");
  dim = -1;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const auto& shard = shards[i];
    if (shard.node != static_cast<int>(i)) {
      throw InvalidArgument("shards must be ordered by node id");
    }
    if (static_cast<int>(shard.blocks.size()) != n) {
      throw InvalidArgument("every node needs the same number of components");
    }
    for (std::size_t j = 0; j < shard.blocks.size(); ++j) {
      const auto& block = shard.blocks[j];
      if (block.features.rows() == 0) {
        throw InvalidArgument("empty block (" + std::to_string(i) + ", " + std::to_string(j) +
                              ")");
      }
      if (block.labels.size() != block.features.rows()) {
        throw InvalidArgument("label count does not match row count");
      }
      if (dim < 0) dim = static_cast<int>(block.features.cols());
      if (block.features.cols() != dim) throw InvalidArgument("inconsistent feature dimension");
    }
  }
  if (dim < 1) throw InvalidArgument("features need at least one dimension");
  return n;
}

int shard_count(const std::vector<DatasetShard>& shards) {
  return static_cast<int>(shards.size());
}

int shard_components(const std::vector<DatasetShard>& shards) {
  int dim = 0;
  return validate_shards(shards, dim);
}

int shard_dim(const std::vector<DatasetShard>& shards) {
  int dim = 0;
  validate_shards(shards, dim);
  return dim;
}

}  // namespace

LogisticObjective::LogisticObjective(std::vector<DatasetShard> shards, double lambda)
    : FiniteSumObjective(shard_count(shards), shard_components(shards), shard_dim(shards)),
      shards_(std::move(shards)),
      lambda_(lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("regularization must be nonnegative");
  const int m = nodes();
  const int n = components();
  info_.L_ij.resize(m, n);
  info_.L = 0.0;
  info_.Lhat = 0.0;
  for (int i = 0; i < m; ++i) {
    Matrix local = Matrix::Zero(dim(), dim());
    for (int j = 0; j < n; ++j) {
      const auto& block = shards_[i].blocks[j];
      for (Eigen::Index r = 0; r < block.labels.size(); ++r) {
        if (block.labels[r] != 1.0 && block.labels[r] != -1.0) {
          throw InvalidArgument("logistic labels must be -1 or +1");
        }
      }
      const Matrix gram = block_gram(block);
      local += gram / n;
      const double row_bound = block.features.rowwise().squaredNorm().maxCoeff() / 4.0;
      info_.L_ij(i, j) = std::min(row_bound, top_eigenvalue(gram) / 4.0) + lambda_;
    }
    info_.L = std::max(info_.L, top_eigenvalue(local) / 4.0 + lambda_);
    info_.Lhat = std::max(info_.Lhat, std::sqrt(info_.L_ij.row(i).squaredNorm() / n));
  }
  info_.mu = lambda_;
  info_.method = "logistic: exact local Hessian bound, per-block spectral bounds";
  info_.finalize();
}

double LogisticObjective::component_value(int i, int j, VectorCRef x) const {
  check_index(i, j);
  const auto& block = shards_[i].blocks[j];
  const Vector margins = (block.features * x).cwiseProduct(block.labels);
  double sum = 0.0;
  for (Eigen::Index r = 0; r < margins.size(); ++r) sum += softplus(-margins[r]);
  return sum / static_cast<double>(margins.size()) + 0.5 * lambda_ * x.squaredNorm();
}

void LogisticObjective::add_component_gradient(int i, int j, VectorCRef x, double scale,
                                               VectorRef out) const {
  check_index(i, j);
  const auto& block = shards_[i].blocks[j];
  const Vector margins = (block.features * x).cwiseProduct(block.labels);
  Vector weights(margins.size());
  for (Eigen::Index r = 0; r < margins.size(); ++r) {
    weights[r] = -block.labels[r] * sigmoid(-margins[r]);
  }
  const double rows = static_cast<double>(margins.size());
  out.noalias() += (scale / rows) * (block.features.transpose() * weights);
  out += (scale * lambda_) * x;
}

NllsObjective::NllsObjective(std::vector<DatasetShard> shards, const NllsOptions& options)
    : FiniteSumObjective(shard_count(shards), shard_components(shards), shard_dim(shards)),
      shards_(std::move(shards)) {
  const int m = nodes();
  const int n = components();
  info_.L_ij.resize(m, n);
  double analytic_L = 0.0;
  for (int i = 0; i < m; ++i) {
    Matrix local = Matrix::Zero(dim(), dim());
    double node_curvature = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto& block = shards_[i].blocks[j];
      const double y_max = block.labels.cwiseAbs().maxCoeff();
      // |d^2/dt^2 (y - sigmoid(t))^2| <= 2 (1/16 + (|y| + 1) max|sigmoid''|).
      const double curvature = 2.0 * (1.0 / 16.0 + (y_max + 1.0) * kSigmoidCurvature);
      const Matrix gram = block_gram(block);
      local += gram / n;
      node_curvature = std::max(node_curvature, curvature);
      info_.L_ij(i, j) = curvature * top_eigenvalue(gram);
    }
    analytic_L = std::max(analytic_L, node_curvature * top_eigenvalue(local));
  }
  const SmoothnessProbe probe =
      probe_smoothness(*this, options.probe_pairs, options.probe_radius, options.probe_seed);
  info_.L = std::min(options.safety_factor * probe.local_ratio, analytic_L);
  info_.Lhat = options.safety_factor * probe.average_ratio;
  info_.mu = 0.0;
  info_.method = "nlls: L and Lhat = " + std::to_string(options.safety_factor) +
                 " x max observed gradient-difference ratio over " +
                 std::to_string(options.probe_pairs) + " random pairs (radius " +
                 std::to_string(options.probe_radius) + "), L capped by the analytic bound";
  info_.finalize();
}

double NllsObjective::component_value(int i, int j, VectorCRef x) const {
  check_index(i, j);
  const auto& block = shards_[i].blocks[j];
  const Vector t = block.features * x;
  double sum = 0.0;
  for (Eigen::Index r = 0; r < t.size(); ++r) {
    const double residual = block.labels[r] - sigmoid(t[r]);
    sum += residual * residual;
  }
  return sum / static_cast<double>(t.size());
}

void NllsObjective::add_component_gradient(int i, int j, VectorCRef x, double scale,
                                           VectorRef out) const {
  check_index(i, j);
  const auto& block = shards_[i].blocks[j];
  const Vector t = block.features * x;
  Vector weights(t.size());
  for (Eigen::Index r = 0; r < t.size(); ++r) {
    const double s = sigmoid(t[r]);
    weights[r] = 2.0 * (s - block.labels[r]) * s * (1.0 - s);
  }
  const double rows = static_cast<double>(t.size());
  out.noalias() += (scale / rows) * (block.features.transpose() * weights);
}

}  // namespace decopt
