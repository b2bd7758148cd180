#include "decopt/node_vector.hpp"

#include "decopt/errors.hpp"

namespace decopt {

NodeVector::NodeVector(int nodes, int dim) {
  if (nodes < 1 || dim < 1) {
    throw InvalidArgument("NodeVector needs at least one node and one dimension");
  }
  data_ = Matrix::Zero(dim, nodes);
}

NodeVector::NodeVector(Matrix blocks) : data_(std::move(blocks)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidArgument("NodeVector needs at least one node and one dimension");
  }
}

NodeVector NodeVector::replicate(int nodes, const Vector& block) {
  NodeVector out(nodes, static_cast<int>(block.size()));
  out.data_.colwise() = block;
  return out;
}

Vector NodeVector::mean() const { return data_.rowwise().mean(); }

double NodeVector::consensus_error() const {
  return (data_.colwise() - mean()).squaredNorm();
}

double NodeVector::sum_norm() const { return data_.rowwise().sum().norm(); }

}  // namespace decopt
