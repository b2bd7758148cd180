#pragma once

#include <Eigen/Dense>

namespace decopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<Vector>;
using VectorCRef = Eigen::Ref<const Vector>;

/// Stacked per-node iterate: m blocks of dimension d.
///
/// Stored as a d x m column-major matrix so block i is the contiguous
/// column i. Arithmetic goes through mat(); the stacked vector of the
/// analysis is the column-major flattening.
class NodeVector {
 public:
  NodeVector() = default;
  NodeVector(int nodes, int dim);
  explicit NodeVector(Matrix blocks);

  static NodeVector replicate(int nodes, const Vector& block);

  int nodes() const { return static_cast<int>(data_.cols()); }
  int dim() const { return static_cast<int>(data_.rows()); }

  VectorRef block(int i) {
    auto col = data_.col(i);
    return VectorRef(col);
  }
  VectorCRef block(int i) const { return VectorCRef(data_.col(i)); }

  Matrix& mat() { return data_; }
  const Matrix& mat() const { return data_; }

  /// (1/m) sum_i x_i.
  Vector mean() const;
  double squared_norm() const { return data_.squaredNorm(); }
  /// sum_i ||x_i - mean||^2.
  double consensus_error() const;
  /// ||sum_i x_i||.
  double sum_norm() const;
  bool all_finite() const { return data_.allFinite(); }
  bool same_shape(const NodeVector& other) const {
    return nodes() == other.nodes() && dim() == other.dim();
  }
  void set_zero() { data_.setZero(); }

  NodeVector& operator+=(const NodeVector& o) { data_ += o.data_; return *this; }
  NodeVector& operator-=(const NodeVector& o) { data_ -= o.data_; return *this; }
  NodeVector& operator*=(double s) { data_ *= s; return *this; }

  friend NodeVector operator+(NodeVector a, const NodeVector& b) { return a += b; }
  friend NodeVector operator-(NodeVector a, const NodeVector& b) { return a -= b; }
  friend NodeVector operator*(double s, NodeVector a) { return a *= s; }

 private:
  Matrix data_;
};

}  // namespace decopt
