#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "decopt/errors.hpp"
#include "decopt/network.hpp"

namespace decopt {

void write_graph_sequence(std::ostream& out, const GraphSequence& seq,
                          std::optional<std::int64_t> steps) {
  const std::int64_t count = steps.value_or(seq.period());
  if (count < 1) throw InvalidArgument("need at least one step to write");
  out << "m " << seq.nodes() << '\n';
  out << std::setprecision(17);
  for (std::int64_t k = 0; k < count; ++k) {
    out << "step " << k << '\n';
    for (const auto& e : seq.graph(k).edges()) {
      out << "edge " << e.u << ' ' << e.v << ' ' << e.weight << '\n';
    }
  }
}

GraphSequence read_graph_sequence(std::istream& in) {
  std::string line;
  int line_no = 0;
  int nodes = -1;
  std::vector<WeightedGraph> cycle;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag[0] == '#') continue;
    try {
      if (tag == "m") {
        if (nodes >= 0) throw ParseError(line_no, "duplicate node count");
        if (!(fields >> nodes) || nodes < 1) throw ParseError(line_no, "bad node count");
      } else if (tag == "step") {
        if (nodes < 0) throw ParseError(line_no, "step before node count");
        std::int64_t k = 0;
        if (!(fields >> k) || k != static_cast<std::int64_t>(cycle.size())) {
          throw ParseError(line_no, "steps must be numbered 0, 1, 2, ...");
        }
        cycle.emplace_back(nodes);
      } else if (tag == "edge") {
        if (cycle.empty()) throw ParseError(line_no, "edge before first step");
        int u = 0, v = 0;
        double w = 1.0;
        if (!(fields >> u >> v >> w)) throw ParseError(line_no, "edge needs 'u v weight'");
        cycle.back().add_edge(u, v, w);
      } else {
        throw ParseError(line_no, "unknown record '" + tag + "'");
      }
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (cycle.empty()) throw ParseError(line_no, "graph sequence has no steps");
  return GraphSequence(TopologyKind::kRecorded, std::move(cycle));
}

}  // namespace decopt
