#include <algorithm>
#include <cmath>
#include <string>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"

namespace decopt {

namespace {

int chain_length(int nodes, int components, std::int64_t comm_budget, std::int64_t oracle_budget) {
  if (nodes < 3) throw InvalidArgument("hard instance needs m >= 3");
  if (components < 1) throw InvalidArgument("hard instance needs n >= 1");
  if (4 * comm_budget < nodes) throw InvalidArgument("hard instance needs N >= m/4");
  if (oracle_budget < components) throw InvalidArgument("hard instance needs K >= n");
  return 2 + static_cast<int>(std::min(4 * comm_budget / nodes, oracle_budget / components));
}

}  // namespace

ZeroChainInstance::ZeroChainInstance(int nodes, int components, double L, double delta,
                                     std::int64_t comm_budget, std::int64_t oracle_budget)
    : FiniteSumObjective(nodes, components,
                         chain_length(nodes, components, comm_budget, oracle_budget)) {
  if (!(L > 0.0) || !(delta > 0.0)) throw InvalidArgument("hard instance needs L, Delta > 0");
  const int part = (nodes + 2) / 3;
  for (int v = 0; v < nodes; ++v) sets_[v < part ? 0 : (v < 2 * part ? 1 : 2)].push_back(v);

  const double budget_term = std::min(16.0 * static_cast<double>(comm_budget) / nodes,
                                      4.0 * static_cast<double>(oracle_budget) / components);
  scale_ = std::sqrt(3.0 * kChainL0 * delta / (L * kChainDelta0 * budget_term));
  const double ratio = static_cast<double>(nodes) / part;
  amplitude_ = L * scale_ * scale_ / (3.0 * kChainL0) * ratio;

  const int d = dim();
  const int period = 2 * components;
  for (auto& role_links : links_) role_links.assign(components, {});
  links_[0][0].push_back(1);
  for (int j = 2; j <= d; ++j) {
    const int residue = j % period;
    if (j % 2 == 1) {
      links_[0][(residue + 1) / 2 - 1].push_back(j);
    } else {
      links_[1][(residue == 0 ? period : residue) / 2 - 1].push_back(j);
    }
  }

  const double n = components;
  const double node_smoothness = L * ratio / 3.0;
  info_.L = L;
  info_.mu = 0.0;
  info_.L_ij = Matrix::Zero(nodes, components);
  for (int v : sets_[0]) info_.L_ij.row(v).setConstant(n * node_smoothness);
  for (int v : sets_[1]) info_.L_ij.row(v).setConstant(n * node_smoothness);
  info_.Lhat = std::sqrt(n) * node_smoothness;
  info_.method = "zero_chain: L0 = 152 scaled by L C^2 / (3 L0), n-block splitting";
  info_.finalize();
}

int ZeroChainInstance::role(int node) const {
  if (node < 0 || node >= nodes()) throw InvalidArgument("node out of range");
  const int part = (nodes() + 2) / 3;
  return node < part ? 1 : (node < 2 * part ? 2 : 3);
}

const std::vector<int>& ZeroChainInstance::links(int role, int component) const {
  if (role < 1 || role > 2) throw InvalidArgument("only S1 and S2 nodes hold links");
  return links_[role - 1].at(component);
}

double ZeroChainInstance::component_value(int i, int j, VectorCRef x) const {
  check_index(i, j);
  const int r = role(i);
  if (r == 3) return 0.0;
  const Vector scaled = x / scale_;
  double sum = 0.0;
  for (int link : links_[r - 1][j]) sum += zero_chain_link(link, scaled);
  return components() * amplitude_ * sum;
}

void ZeroChainInstance::add_component_gradient(int i, int j, VectorCRef x, double scale,
                                               VectorRef out) const {
  check_index(i, j);
  const int r = role(i);
  if (r == 3) return;
  const Vector scaled = x / scale_;
  const double factor = scale * components() * amplitude_ / scale_;
  for (int link : links_[r - 1][j]) add_zero_chain_link_gradient(link, scaled, factor, out);
}

HardInstance nonconvex_hard_objective(int nodes, int components, double L, double delta,
                                      std::int64_t comm_budget, std::int64_t oracle_budget) {
  auto objective = std::make_unique<ZeroChainInstance>(nodes, components, L, delta, comm_budget,
                                                       oracle_budget);
  GraphSequence sequence =
      rotating_star_sequence(nodes, objective->set(1), objective->set(2));
  return HardInstance{std::move(objective), std::move(sequence)};
}

}  // namespace decopt
