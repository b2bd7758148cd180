#include <cmath>
#include <numbers>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"

namespace decopt {

namespace {

const double kSqrtE = std::sqrt(std::numbers::e);

}  // namespace

double psi(double z) {
  if (z <= 0.5) return 0.0;
  const double s = 2.0 * z - 1.0;
  return std::exp(1.0 - 1.0 / (s * s));
}

double psi_derivative(double z) {
  const double value = psi(z);
  if (value == 0.0) return 0.0;
  const double s = 2.0 * z - 1.0;
  return 4.0 * value / (s * s * s);
}

double phi(double z) {
  return kSqrtE * std::sqrt(std::numbers::pi / 2.0) * (1.0 + std::erf(z / std::numbers::sqrt2));
}

double phi_derivative(double z) { return kSqrtE * std::exp(-0.5 * z * z); }

int prog(VectorCRef x) {
  for (Eigen::Index j = x.size(); j > 0; --j) {
    if (x[j - 1] != 0.0) return static_cast<int>(j);
  }
  return 0;
}

double zero_chain_link(int j, VectorCRef x) {
  if (j < 1 || j > x.size()) throw InvalidArgument("zero-chain link out of range");
  if (j == 1) return -psi(1.0) * phi(x[0]);
  const double prev = x[j - 2];
  const double cur = x[j - 1];
  return psi(-prev) * phi(-cur) - psi(prev) * phi(cur);
}

void add_zero_chain_link_gradient(int j, VectorCRef x, double scale, VectorRef grad) {
  if (j < 1 || j > x.size()) throw InvalidArgument("zero-chain link out of range");
  if (j == 1) {
    grad[0] -= scale * psi(1.0) * phi_derivative(x[0]);
    return;
  }
  const double prev = x[j - 2];
  const double cur = x[j - 1];
  grad[j - 2] += scale * (-psi_derivative(-prev) * phi(-cur) - psi_derivative(prev) * phi(cur));
  grad[j - 1] += scale * (-psi(-prev) * phi_derivative(-cur) - psi(prev) * phi_derivative(cur));
}

ZeroChainEvaluation zero_chain_l(VectorCRef x) {
  ZeroChainEvaluation out;
  out.gradient = Vector::Zero(x.size());
  const int d = static_cast<int>(x.size());
  for (int j = 1; j <= d; ++j) {
    out.value += zero_chain_link(j, x);
    add_zero_chain_link_gradient(j, x, 1.0, out.gradient);
  }
  return out;
}

}  // namespace decopt
