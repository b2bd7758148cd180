#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "decopt/errors.hpp"
#include "decopt/harness.hpp"

namespace decopt {
namespace {

struct SparseRow {
  double label = 0.0;
  std::vector<std::pair<int, double>> entries;
};

double parse_number(const std::string& token, std::size_t line, const char* what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value)) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" + token + "'");
  }
  return value;
}

int parse_index(const std::string& token, std::size_t line) {
  long long index = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(line, "malformed index '" + token + "'");
  }
  if (index < 1) throw ParseError(line, "index must be >= 1, got " + token);
  if (index > (1LL << 30)) throw ParseError(line, "index too large: " + token);
  return static_cast<int>(index);
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  std::vector<SparseRow> rows;
  int max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token) || token[0] == '#') continue;

    SparseRow row;
    row.label = parse_number(token, line_no, "label");
    int previous = 0;
    while (tokens >> token) {
      if (token[0] == '#') break;
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "malformed pair '" + token + "'");
      const int index = parse_index(token.substr(0, colon), line_no);
      const double value = parse_number(token.substr(colon + 1), line_no, "value");
      if (index <= previous) throw ParseError(line_no, "indices must be increasing");
      if (options.dim && index > *options.dim) {
        throw ParseError(line_no, "index " + std::to_string(index) + " exceeds dimension " +
                                      std::to_string(*options.dim));
      }
      previous = index;
      max_index = std::max(max_index, index);
      row.entries.emplace_back(index, value);
    }
    rows.push_back(std::move(row));
  }

  const int dim = options.dim.value_or(max_index);
  Dataset data;
  data.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  data.labels.resize(static_cast<Eigen::Index>(rows.size()));
  bool zero_one = !rows.empty();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto idx = static_cast<Eigen::Index>(r);
    data.labels(idx) = rows[r].label;
    if (rows[r].label != 0.0 && rows[r].label != 1.0) zero_one = false;
    for (const auto& [index, value] : rows[r].entries) data.features(idx, index - 1) = value;
  }
  if (options.map_binary_zero && zero_one) {
    for (auto& y : data.labels) {
      if (y == 0.0) y = -1.0;
    }
  }
  return data;
}

Dataset parse_libsvm(const std::string& path, const LibsvmOptions& options) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dataset '" + path + "'");
  return parse_libsvm(in, options);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  char buffer[64];
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    std::snprintf(buffer, sizeof buffer, "%.17g", data.labels(r));
    out << buffer;
    for (Eigen::Index c = 0; c < data.dim(); ++c) {
      const double value = data.features(r, c);
      if (value == 0.0) continue;
      std::snprintf(buffer, sizeof buffer, " %lld:%.17g", static_cast<long long>(c + 1), value);
      out << buffer;
    }
    out << '\n';
  }
}

Dataset to_unit_labels(Dataset data) {
  for (auto& y : data.labels) {
    if (y == -1.0) {
      y = 0.0;
    } else if (y != 1.0) {
      throw InvalidArgument("labels must be -1 or +1");
    }
  }
  return data;
}

}  // namespace decopt
