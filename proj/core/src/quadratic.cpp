#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "decopt/errors.hpp"
#include "decopt/objectives.hpp"

namespace decopt {

namespace {

int outer_size(const std::vector<std::vector<Matrix>>& h) { return static_cast<int>(h.size()); }
int inner_size(const std::vector<std::vector<Matrix>>& h) {
  return h.empty() ? 0 : static_cast<int>(h.front().size());
}
int matrix_dim(const std::vector<std::vector<Matrix>>& h) {
  return h.empty() || h.front().empty() ? 0 : static_cast<int>(h.front().front().rows());
}

}  // namespace

QuadraticObjective::QuadraticObjective(std::vector<std::vector<Matrix>> hessians,
                                       std::vector<std::vector<Vector>> linear)
    : FiniteSumObjective(outer_size(hessians), inner_size(hessians), matrix_dim(hessians)),
      hessians_(std::move(hessians)),
      linear_(std::move(linear)) {
  const int m = nodes();
  const int n = components();
  const int d = dim();
  if (static_cast<int>(linear_.size()) != m) throw InvalidArgument("linear terms: wrong m");
  info_.L_ij.resize(m, n);
  info_.L = 0.0;
  info_.mu = std::numeric_limits<double>::infinity();
  info_.Lhat = 0.0;
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(hessians_[i].size()) != n || static_cast<int>(linear_[i].size()) != n) {
      throw InvalidArgument("quadratic: every node needs n components");
    }
    Matrix local = Matrix::Zero(d, d);
    for (int j = 0; j < n; ++j) {
      const Matrix& a = hessians_[i][j];
      if (a.rows() != d || a.cols() != d || linear_[i][j].size() != d) {
        throw InvalidArgument("quadratic: inconsistent dimensions");
      }
      if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("quadratic: Hessian must be symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, solver.eigenvalues().maxCoeff())) {
        throw InvalidArgument("quadratic: Hessian must be positive semidefinite");
      }
      info_.L_ij(i, j) = std::max(0.0, solver.eigenvalues().maxCoeff());
      local += a / n;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(local, Eigen::EigenvaluesOnly);
    info_.L = std::max(info_.L, solver.eigenvalues().maxCoeff());
    info_.mu = std::min(info_.mu, std::max(0.0, solver.eigenvalues().minCoeff()));
    info_.Lhat = std::max(info_.Lhat, std::sqrt(info_.L_ij.row(i).squaredNorm() / n));
  }
  info_.method = "quadratic: exact eigenvalues";
  info_.finalize();
}

double QuadraticObjective::component_value(int i, int j, VectorCRef x) const {
  check_index(i, j);
  return 0.5 * x.dot(hessians_[i][j] * x) - linear_[i][j].dot(x);
}

void QuadraticObjective::add_component_gradient(int i, int j, VectorCRef x, double scale,
                                                VectorRef out) const {
  check_index(i, j);
  out.noalias() += scale * (hessians_[i][j] * x);
  out -= scale * linear_[i][j];
}

}  // namespace decopt
