#include <algorithm>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"

namespace decopt {

std::int64_t progress_bound(int nodes, int components, std::int64_t comms,
                            std::int64_t oracle_calls) {
  return std::min(4 * comms / nodes + 1, oracle_calls / components + 1);
}

ProgressAuditor::ProgressAuditor(int nodes, int components)
    : nodes_(nodes), components_(components), node_progress_(nodes, 0) {
  if (nodes < 1 || components < 1) throw InvalidArgument("auditor needs m, n >= 1");
}

void ProgressAuditor::record(std::int64_t iteration, std::int64_t comms,
                             std::int64_t oracle_calls, const NodeVector& x) {
  if (x.nodes() != nodes_) throw InvalidArgument("iterate has the wrong number of nodes");
  for (int i = 0; i < nodes_; ++i) {
    node_progress_[i] = std::max(node_progress_[i], prog(x.block(i)));
  }
  ProgressPoint point;
  point.iteration = iteration;
  point.communications = comms;
  point.oracle_calls = oracle_calls;
  point.progress = global_progress();
  point.bound = progress_bound(nodes_, components_, comms, oracle_calls);
  points_.push_back(point);
}

int ProgressAuditor::global_progress() const {
  return *std::max_element(node_progress_.begin(), node_progress_.end());
}

bool ProgressAuditor::within_bound() const {
  return std::all_of(points_.begin(), points_.end(),
                     [](const ProgressPoint& p) { return p.progress <= p.bound; });
}

}  // namespace decopt
