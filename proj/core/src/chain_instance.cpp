#include <cmath>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"

namespace decopt {

double chain_q(double kappa) {
  if (!(kappa >= 1.0)) throw InvalidArgument("condition number must be at least 1");
  const double s = std::sqrt(2.0 * kappa / 3.0 + 1.0 / 3.0);
  return (s - 1.0) / (s + 1.0);
}

int chain_dimension_for_tail(double q, double tail) {
  if (!(q > 0.0 && q < 1.0) || !(tail > 0.0)) throw InvalidArgument("need 0 < q < 1, tail > 0");
  int dim = 1;
  while (std::pow(q, 2.0 * dim) / (1.0 - q * q) >= tail) ++dim;
  return dim;
}

ChainInstance::ChainInstance(int nodes, int components, double L, double mu, int slot_dim)
    : FiniteSumObjective(nodes, components, components * slot_dim),
      L_(L),
      mu_(mu),
      slot_dim_(slot_dim),
      q_(0.0) {
  if (nodes < 3) throw InvalidArgument("chain instance needs m >= 3");
  if (!(L > mu && mu > 0.0)) throw InvalidArgument("chain instance needs L > mu > 0");
  q_ = chain_q(L / mu);
  const double n = components;
  info_.L = L / n;
  info_.mu = mu / ((nodes - 2) * n);
  info_.L_ij = Matrix::Constant(nodes, components, mu / (nodes - 2));
  info_.L_ij.row(kLeftCenter).setConstant(L);
  info_.L_ij.row(kRightCenter).setConstant(L);
  info_.Lhat = L / std::sqrt(n);
  info_.method = "chain: exact constants of the quadratic links";
  info_.finalize();
}

double ChainInstance::slot_value(int node, VectorCRef y) const {
  const double c = 0.25 * (L_ - mu_);
  const int d = slot_dim_;
  if (node == kLeftCenter) {
    double sum = (y[0] - 1.0) * (y[0] - 1.0);
    // 1-based pairs (2k, 2k+1) are 0-based (2k-1, 2k).
    for (int a = 1; a + 1 < d; a += 2) sum += (y[a] - y[a + 1]) * (y[a] - y[a + 1]);
    return 0.5 * mu_ * y.squaredNorm() + c * sum;
  }
  if (node == kRightCenter) {
    double sum = 0.0;
    for (int a = 0; a + 1 < d; a += 2) sum += (y[a] - y[a + 1]) * (y[a] - y[a + 1]);
    return 0.5 * mu_ * y.squaredNorm() + c * sum;
  }
  return 0.5 * mu_ / (nodes() - 2) * y.squaredNorm();
}

void ChainInstance::add_slot_gradient(int node, VectorCRef y, double scale, VectorRef out) const {
  const double c = 0.5 * (L_ - mu_) * scale;
  const int d = slot_dim_;
  if (node == kLeftCenter || node == kRightCenter) {
    out += (scale * mu_) * y;
    int first = 0;
    if (node == kLeftCenter) {
      out[0] += c * (y[0] - 1.0);
      first = 1;
    }
    for (int a = first; a + 1 < d; a += 2) {
      const double diff = y[a] - y[a + 1];
      out[a] += c * diff;
      out[a + 1] -= c * diff;
    }
    return;
  }
  out += (scale * mu_ / (nodes() - 2)) * y;
}

double ChainInstance::component_value(int i, int j, VectorCRef x) const {
  check_index(i, j);
  return slot_value(i, x.segment(j * slot_dim_, slot_dim_));
}

void ChainInstance::add_component_gradient(int i, int j, VectorCRef x, double scale,
                                           VectorRef out) const {
  check_index(i, j);
  auto slot = out.segment(j * slot_dim_, slot_dim_);
  add_slot_gradient(i, x.segment(j * slot_dim_, slot_dim_), scale, slot);
}

Vector ChainInstance::x_star() const {
  Vector slot(slot_dim_);
  double power = 1.0;
  for (int a = 0; a < slot_dim_; ++a) {
    power *= q_;
    slot[a] = power;
  }
  return slot.replicate(components(), 1);
}

double ChainInstance::tail_bound() const {
  return std::pow(q_, 2.0 * slot_dim_) / (1.0 - q_ * q_);
}

}  // namespace decopt
