#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "decopt/errors.hpp"
#include "decopt/objectives.hpp"
#include "decopt/rng.hpp"

namespace decopt {

void SmoothnessInfo::finalize() {
  const double n = static_cast<double>(L_ij.cols());
  Lbar_i = L_ij.rowwise().mean();
  Lbar = Lbar_i.size() > 0 ? Lbar_i.maxCoeff() : L;
  Lbar = std::clamp(Lbar, L, n * L);
  Lhat = std::clamp(Lhat, L, std::sqrt(n) * L);
}

bool SmoothnessInfo::ordered() const {
  const double n = static_cast<double>(L_ij.cols());
  const double slack = 1e-12 * std::max(1.0, L);
  return mu >= 0.0 && mu <= L + slack && L <= Lbar + slack && Lbar <= n * L + n * slack &&
         L <= Lhat + slack && Lhat <= std::sqrt(n) * L + n * slack;
}

FiniteSumObjective::FiniteSumObjective(int nodes, int components, int dim)
    : nodes_(nodes), components_(components), dim_(dim) {
  if (nodes < 1 || components < 1 || dim < 1) {
    throw InvalidArgument("objective needs m, n, d >= 1");
  }
}

void FiniteSumObjective::check_index(int i, int j) const {
  if (i < 0 || i >= nodes_ || j < 0 || j >= components_) {
    throw InvalidArgument("component index (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") out of range");
  }
}

void FiniteSumObjective::add_component_difference(int i, int j, VectorCRef x, VectorCRef y,
                                                  double scale, VectorRef out) const {
  add_component_gradient(i, j, x, scale, out);
  add_component_gradient(i, j, y, -scale, out);
}

double FiniteSumObjective::local_value(int i, VectorCRef x) const {
  double sum = 0.0;
  for (int j = 0; j < components_; ++j) sum += component_value(i, j, x);
  return sum / components_;
}

void FiniteSumObjective::add_local_gradient(int i, VectorCRef x, double scale,
                                            VectorRef out) const {
  const double w = scale / components_;
  for (int j = 0; j < components_; ++j) add_component_gradient(i, j, x, w, out);
}

NodeVector full_gradient(const FiniteSumObjective& obj, const NodeVector& x) {
  if (x.nodes() != obj.nodes() || x.dim() != obj.dim()) {
    throw InvalidArgument("iterate shape does not match objective");
  }
  NodeVector g(obj.nodes(), obj.dim());
  for (int i = 0; i < obj.nodes(); ++i) obj.add_local_gradient(i, x.block(i), 1.0, g.block(i));
  return g;
}

Vector local_gradient(const FiniteSumObjective& obj, int node, VectorCRef x) {
  Vector g = Vector::Zero(obj.dim());
  obj.add_local_gradient(node, x, 1.0, g);
  return g;
}

double total_value(const FiniteSumObjective& obj, const NodeVector& x) {
  double sum = 0.0;
  for (int i = 0; i < obj.nodes(); ++i) sum += obj.local_value(i, x.block(i));
  return sum;
}

double average_value(const FiniteSumObjective& obj, VectorCRef w) {
  double sum = 0.0;
  for (int i = 0; i < obj.nodes(); ++i) sum += obj.local_value(i, w);
  return sum / obj.nodes();
}

Vector average_gradient(const FiniteSumObjective& obj, VectorCRef w) {
  Vector g = Vector::Zero(obj.dim());
  for (int i = 0; i < obj.nodes(); ++i) obj.add_local_gradient(i, w, 1.0 / obj.nodes(), g);
  return g;
}

Vector batch_gradient(const FiniteSumObjective& obj, int node, std::span<const int> indices,
                      std::span<const double> weights, VectorCRef x) {
  if (indices.size() != weights.size()) {
    throw InvalidArgument("batch indices and weights differ in length");
  }
  Vector g = Vector::Zero(obj.dim());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    obj.add_component_gradient(node, indices[k], x, weights[k], g);
  }
  return g;
}

FiniteDifferenceReport finite_difference_check(const FiniteSumObjective& obj, const NodeVector& x,
                                               double h, double tolerance) {
  if (!(h > 0.0)) throw InvalidArgument("finite difference step must be positive");
  FiniteDifferenceReport report;
  const int d = obj.dim();
  Vector point(d), fd(d), analytic(d);
  for (int i = 0; i < obj.nodes(); ++i) {
    for (int j = 0; j < obj.components(); ++j) {
      point = x.block(i);
      for (int c = 0; c < d; ++c) {
        const double saved = point[c];
        point[c] = saved + h;
        const double up = obj.component_value(i, j, point);
        point[c] = saved - h;
        const double down = obj.component_value(i, j, point);
        point[c] = saved;
        fd[c] = (up - down) / (2.0 * h);
      }
      analytic.setZero();
      obj.add_component_gradient(i, j, point, 1.0, analytic);
      const double err = (fd - analytic).norm() / std::max(analytic.norm(), 1e-3);
      report.max_relative_error = std::max(report.max_relative_error, err);
    }
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

SmoothnessProbe probe_smoothness(const FiniteSumObjective& obj, int pairs, double radius,
                                 std::uint64_t seed) {
  if (pairs < 1 || !(radius > 0.0)) throw InvalidArgument("bad smoothness probe settings");
  const int d = obj.dim();
  const int n = obj.components();
  SmoothnessProbe probe;
  std::normal_distribution<double> normal;
  Vector x(d), y(d), dir(d), gx(d), gy(d);
  for (int t = 0; t < pairs; ++t) {
    auto gen = substream(seed, static_cast<std::uint64_t>(t), kSharedNode, StreamPurpose::kProbe);
    normal.reset();
    for (int c = 0; c < d; ++c) dir[c] = normal(gen);
    x = dir.normalized() * radius * std::pow(uniform01(gen), 1.0 / d);
    for (int c = 0; c < d; ++c) dir[c] = normal(gen);
    const double step = radius * std::pow(10.0, -3.0 * uniform01(gen));
    y = x + dir.normalized() * step;
    const double dist = (y - x).norm();
    for (int i = 0; i < obj.nodes(); ++i) {
      Vector local = Vector::Zero(d);
      double sq = 0.0;
      for (int j = 0; j < n; ++j) {
        gx.setZero();
        obj.add_component_difference(i, j, y, x, 1.0, gx);
        local += gx / n;
        sq += gx.squaredNorm();
      }
      probe.local_ratio = std::max(probe.local_ratio, local.norm() / dist);
      probe.average_ratio = std::max(probe.average_ratio, std::sqrt(sq / n) / dist);
    }
  }
  return probe;
}

CountingObjective::CountingObjective(const FiniteSumObjective& inner)
    : FiniteSumObjective(inner.nodes(), inner.components(), inner.dim()),
      inner_(inner),
      calls_(inner.nodes(), 0) {
  info_ = inner.smoothness();
}

double CountingObjective::component_value(int i, int j, VectorCRef x) const {
  return inner_.component_value(i, j, x);
}

void CountingObjective::add_component_gradient(int i, int j, VectorCRef x, double scale,
                                               VectorRef out) const {
  ++calls_[i];
  inner_.add_component_gradient(i, j, x, scale, out);
}

void CountingObjective::add_component_difference(int i, int j, VectorCRef x, VectorCRef y,
                                                 double scale, VectorRef out) const {
  ++calls_[i];
  inner_.add_component_difference(i, j, x, y, scale, out);
}

double CountingObjective::local_value(int i, VectorCRef x) const {
  return inner_.local_value(i, x);
}

void CountingObjective::add_local_gradient(int i, VectorCRef x, double scale,
                                           VectorRef out) const {
  calls_[i] += components();
  inner_.add_local_gradient(i, x, scale, out);
}

std::int64_t CountingObjective::max_calls() const {
  return *std::max_element(calls_.begin(), calls_.end());
}

void CountingObjective::reset() { std::fill(calls_.begin(), calls_.end(), 0); }

}  // namespace decopt
