#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decopt/errors.hpp"
#include "decopt/harness.hpp"

namespace decopt {
namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Value parsing and formatting

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value)) {
    throw InvalidArgument("setting '" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

std::int64_t parse_int64(const std::string& key, const std::string& text) {
  long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw InvalidArgument("setting '" + key + "' expects an integer, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::int64_t v = parse_int64(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw InvalidArgument("setting '" + key + "' is out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  unsigned long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw InvalidArgument("setting '" + key + "' expects a nonnegative integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument("setting '" + key + "' expects true or false, got '" + text + "'");
}

std::int64_t parse_budget(const std::string& key, const std::string& text) {
  if (text == "unlimited") return kUnlimited;
  const std::int64_t v = parse_int64(key, text);
  if (v < 0) throw InvalidArgument("setting '" + key + "' must be nonnegative");
  return v;
}

std::string format_budget(std::int64_t v) {
  return v == kUnlimited ? "unlimited" : std::to_string(v);
}

template <class T, class Parse>
std::optional<T> parse_optional(const std::string& text, Parse parse) {
  if (text == "auto") return std::nullopt;
  return parse(text);
}

template <class T, class Format>
std::string format_optional(const std::optional<T>& v, Format format) {
  return v ? format(*v) : std::string("auto");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string to_string(SnapshotRefresh refresh) {
  return refresh == SnapshotRefresh::kEager ? "eager" : "lazy";
}

// ---------------------------------------------------------------------------
// Settings table

struct Setting {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<Setting>& settings() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<Setting> table = {
      {"method", [](C& c, S v) { c.method = parse_method(v); },
       [](const C& c) { return to_string(c.method); }},
      {"objective", [](C& c, S v) { c.objective = parse_objective_kind(v); },
       [](const C& c) { return to_string(c.objective); }},
      {"dataset", [](C& c, S v) { c.dataset = v; }, [](const C& c) { return c.dataset; }},
      {"m", [](C& c, S v) { c.m = parse_int("m", v); },
       [](const C& c) { return std::to_string(c.m); }},
      {"n", [](C& c, S v) { c.n = parse_int("n", v); },
       [](const C& c) { return std::to_string(c.n); }},
      {"b",
       [](C& c, S v) { c.b = parse_optional<int>(v, [](S t) { return parse_int("b", t); }); },
       [](const C& c) { return format_optional(c.b, [](int x) { return std::to_string(x); }); }},
      {"seed", [](C& c, S v) { c.seed = parse_seed("seed", v); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"lambda", [](C& c, S v) { c.lambda = parse_double("lambda", v); },
       [](const C& c) { return format_double(c.lambda); }},
      {"topology",
       [](C& c, S v) { c.topology = v == "auto" ? std::nullopt : std::optional<std::string>(v); },
       [](const C& c) { return c.topology.value_or("auto"); }},
      {"radius", [](C& c, S v) { c.radius = parse_double("radius", v); },
       [](const C& c) { return format_double(c.radius); }},
      {"horizon", [](C& c, S v) { c.horizon = parse_int64("horizon", v); },
       [](const C& c) { return std::to_string(c.horizon); }},
      {"graph_file", [](C& c, S v) { c.graph_file = v; }, [](const C& c) { return c.graph_file; }},
      {"chi",
       [](C& c, S v) {
         c.chi = parse_optional<double>(v, [](S t) { return parse_double("chi", t); });
       },
       [](const C& c) { return format_optional(c.chi, format_double); }},
      {"chi_trials", [](C& c, S v) { c.chi_trials = parse_int("chi_trials", v); },
       [](const C& c) { return std::to_string(c.chi_trials); }},
      {"mixing",
       [](C& c, S v) { c.mixing = v == "auto" ? std::nullopt : std::optional<std::string>(v); },
       [](const C& c) { return c.mixing.value_or("auto"); }},
      {"rounds",
       [](C& c, S v) {
         c.rounds = parse_optional<int>(v, [](S t) { return parse_int("rounds", t); });
       },
       [](const C& c) {
         return format_optional(c.rounds, [](int x) { return std::to_string(x); });
       }},
      {"step",
       [](C& c, S v) {
         c.step = parse_optional<double>(v, [](S t) { return parse_double("step", t); });
       },
       [](const C& c) { return format_optional(c.step, format_double); }},
      {"p",
       [](C& c, S v) { c.p = parse_optional<double>(v, [](S t) { return parse_double("p", t); }); },
       [](const C& c) { return format_optional(c.p, format_double); }},
      {"per_node_coins", [](C& c, S v) { c.per_node_coins = parse_bool("per_node_coins", v); },
       [](const C& c) { return std::string(c.per_node_coins ? "true" : "false"); }},
      {"refresh",
       [](C& c, S v) {
         if (v == "eager") {
           c.refresh = SnapshotRefresh::kEager;
         } else if (v == "lazy") {
           c.refresh = SnapshotRefresh::kLazy;
         } else {
           throw InvalidArgument("unknown refresh '" + v + "'; valid: eager, lazy");
         }
       },
       [](const C& c) { return to_string(c.refresh); }},
      {"L", [](C& c, S v) { c.L = parse_double("L", v); },
       [](const C& c) { return format_double(c.L); }},
      {"mu", [](C& c, S v) { c.mu = parse_double("mu", v); },
       [](const C& c) { return format_double(c.mu); }},
      {"chain_dim", [](C& c, S v) { c.chain_dim = parse_int("chain_dim", v); },
       [](const C& c) { return std::to_string(c.chain_dim); }},
      {"delta", [](C& c, S v) { c.delta = parse_double("delta", v); },
       [](const C& c) { return format_double(c.delta); }},
      {"hard_comm_budget",
       [](C& c, S v) { c.hard_comm_budget = parse_int64("hard_comm_budget", v); },
       [](const C& c) { return std::to_string(c.hard_comm_budget); }},
      {"hard_oracle_budget",
       [](C& c, S v) { c.hard_oracle_budget = parse_int64("hard_oracle_budget", v); },
       [](const C& c) { return std::to_string(c.hard_oracle_budget); }},
      {"budget_iterations",
       [](C& c, S v) { c.budgets.max_iterations = parse_budget("budget_iterations", v); },
       [](const C& c) { return format_budget(c.budgets.max_iterations); }},
      {"budget_comms",
       [](C& c, S v) { c.budgets.max_communications = parse_budget("budget_comms", v); },
       [](const C& c) { return format_budget(c.budgets.max_communications); }},
      {"budget_oracle",
       [](C& c, S v) { c.budgets.max_oracle_calls = parse_budget("budget_oracle", v); },
       [](const C& c) { return format_budget(c.budgets.max_oracle_calls); }},
      {"cadence", [](C& c, S v) { c.cadence = parse_int64("cadence", v); },
       [](const C& c) { return std::to_string(c.cadence); }},
      {"target_dist_sq",
       [](C& c, S v) {
         c.target_dist_sq =
             parse_optional<double>(v, [](S t) { return parse_double("target_dist_sq", t); });
       },
       [](const C& c) { return format_optional(c.target_dist_sq, format_double); }},
      {"out", [](C& c, S v) { c.out = v; }, [](const C& c) { return c.out; }},
  };
  return table;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buffer[20];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(v));
  return buffer;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Wiring

GraphSequence build_sequence(const ExperimentConfig& c, const std::string& topology) {
  if (c.m == 1) return single_node_sequence();
  if (topology == "complete") return static_sequence(complete_graph(c.m));
  if (topology == "ring") return static_sequence(ring_graph(c.m));
  if (topology == "star") return static_sequence(star_graph(c.m));
  if (topology == "random_geometric") {
    return random_geometric_sequence(c.m, c.radius, c.seed, c.horizon);
  }
  if (topology == "two_star_hop") return two_star_hop_sequence(c.m);
  if (topology == "rotating_star") return rotating_star_sequence(c.m);
  if (topology == "file") {
    std::ifstream in(c.graph_file);
    if (!in) throw InvalidArgument("cannot open graph_file '" + c.graph_file + "'");
    GraphSequence seq = read_graph_sequence(in);
    if (seq.nodes() != c.m) throw InvalidArgument("graph_file node count differs from m");
    return seq;
  }
  throw InvalidArgument("unknown topology '" + topology +
                        "'; valid: complete, ring, star, random_geometric, two_star_hop, "
                        "rotating_star, file");
}

MixingSpec build_mixing(const std::string& name, std::optional<int> rounds, double chi) {
  MixingSpec spec;
  if (name == "plain") {
    spec.scheme = MixingScheme::kPlain;
    spec.rounds = rounds.value_or(1);
  } else if (name == "multi_stage") {
    spec.scheme = MixingScheme::kMultiStage;
    spec.rounds = rounds.value_or(static_cast<int>(std::ceil(chi * (1 - 1e-12))));
  } else if (name == "chebyshev") {
    spec.scheme = MixingScheme::kChebyshev;
    spec.rounds = rounds.value_or(static_cast<int>(std::ceil(std::sqrt(chi) * (1 - 1e-12))));
  } else {
    throw InvalidArgument("unknown mixing '" + name + "'; valid: plain, multi_stage, chebyshev");
  }
  if (spec.rounds < 1) throw InvalidArgument("rounds must be positive");
  return spec;
}

Dataset load_dataset(const ExperimentConfig& c) {
  if (c.dataset.empty()) {
    throw InvalidArgument("objective '" + to_string(c.objective) + "' needs a dataset");
  }
  return parse_libsvm(c.dataset);
}

json smoothness_json(const SmoothnessInfo& info) {
  return json{{"L", info.L},       {"mu", info.mu},         {"Lbar", info.Lbar},
              {"Lhat", info.Lhat}, {"method", info.method}};
}

json adom_json(const AdomVrParams& p, const MixingSpec& mixing) {
  return json{{"b", p.b},           {"n", p.n},           {"chi", p.chi},
              {"mixing", to_string(mixing.scheme)},       {"rounds", mixing.rounds},
              {"tau0", p.tau0},     {"tau1", p.tau1},     {"tau2", p.tau2},
              {"eta", p.eta},       {"alpha", p.alpha},   {"nu", p.nu},
              {"beta", p.beta},     {"sigma1", p.sigma1}, {"sigma2", p.sigma2},
              {"theta", p.theta},   {"gamma", p.gamma},   {"delta", p.delta},
              {"zeta", p.zeta},     {"lambda", p.lambda}, {"p1", p.p1},
              {"p2", p.p2}};
}

json page_json(const GtPageParams& p) {
  return json{{"eta", p.eta},
              {"eta_from_theory", p.eta_from_theory},
              {"p", p.p},
              {"b", p.b},
              {"n", p.n},
              {"mixing", to_string(p.mixing.scheme)},
              {"rounds", p.mixing.rounds},
              {"chi", p.chi},
              {"rho", p.rho},
              {"c_tilde", p.c_tilde},
              {"bound2", p.bound2},
              {"bound3", p.bound3},
              {"bound4", p.bound4},
              {"per_node_coins", p.per_node_coins}};
}

}  // namespace

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kLogistic:
      return "logistic";
    case ObjectiveKind::kNlls:
      return "nlls";
    case ObjectiveKind::kChain:
      return "chain";
    case ObjectiveKind::kZeroChain:
      return "zero_chain";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(const std::string& name) {
  if (name == "logistic") return ObjectiveKind::kLogistic;
  if (name == "nlls") return ObjectiveKind::kNlls;
  if (name == "chain") return ObjectiveKind::kChain;
  if (name == "zero_chain") return ObjectiveKind::kZeroChain;
  throw InvalidArgument("unknown objective '" + name + "'; valid: logistic, nlls, chain, zero_chain");
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& s : settings()) {
    if (key == s.key) {
      s.set(config, value);
      return;
    }
  }
  std::string valid;
  for (const auto& s : settings()) valid += (valid.empty() ? "" : ", ") + std::string(s.key);
  throw InvalidArgument("unknown setting '" + key + "'; valid: " + valid);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    try {
      apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  return parse_config(in);
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& config) {
  std::map<std::string, std::string> entries;
  for (const auto& s : settings()) entries[s.key] = s.get(config);
  return entries;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "iter,comms,oracle_calls,dist_sq,grad_norm_sq,consensus_err\n";
  auto num = [](double v) { return std::isnan(v) ? std::string("NaN") : format_double(v); };
  for (const auto& r : trace.records) {
    out += std::to_string(r.iteration) + ',' + std::to_string(r.communications) + ',' +
           std::to_string(r.oracle_calls) + ',' + num(r.dist_sq) + ',' + num(r.grad_norm_sq) +
           ',' + num(r.consensus_error) + '\n';
  }
  return out;
}

ExperimentResult execute_experiment(const ExperimentConfig& c) {
  if (c.m < 1 || c.n < 1) throw InvalidArgument("m and n must be positive");

  json meta;
  json entries(json::value_t::object);
  std::string canonical;
  for (const auto& [key, value] : config_entries(c)) {
    entries[key] = value;
    canonical += key + '=' + value + '\n';
  }
  meta["config"] = entries;
  meta["config_hash"] = hex64(fnv1a(canonical));
  meta["seed"] = c.seed;

  // Objective and topology.
  std::unique_ptr<FiniteSumObjective> objective;
  std::optional<GraphSequence> sequence;
  std::optional<Vector> x_star;
  std::string topology;
  switch (c.objective) {
    case ObjectiveKind::kLogistic: {
      auto shards = partition_dataset(load_dataset(c), c.m, c.n, c.seed);
      objective = std::make_unique<LogisticObjective>(std::move(shards), c.lambda);
      const ReferenceSolution ref = reference_solution(*objective);
      x_star = ref.x;
      meta["reference"] = {{"value", ref.value},
                           {"grad_norm", ref.grad_norm},
                           {"iterations", ref.iterations}};
      topology = c.topology.value_or("random_geometric");
      break;
    }
    case ObjectiveKind::kNlls: {
      auto shards = partition_dataset(to_unit_labels(load_dataset(c)), c.m, c.n, c.seed);
      objective = std::make_unique<NllsObjective>(std::move(shards));
      topology = c.topology.value_or("random_geometric");
      break;
    }
    case ObjectiveKind::kChain: {
      auto chain = std::make_unique<ChainInstance>(c.m, c.n, c.L, c.mu, c.chain_dim);
      x_star = chain->x_star();
      meta["chain"] = {{"q", chain->q()}, {"tail_bound", chain->tail_bound()}};
      objective = std::move(chain);
      topology = c.topology.value_or("two_star_hop");
      break;
    }
    case ObjectiveKind::kZeroChain: {
      if (c.topology && *c.topology != "rotating_star") {
        throw InvalidArgument("zero_chain runs on the rotating_star topology only");
      }
      const std::int64_t comm_budget =
          c.hard_comm_budget > 0 ? c.hard_comm_budget : c.budgets.max_communications;
      const std::int64_t oracle_budget =
          c.hard_oracle_budget > 0 ? c.hard_oracle_budget : c.budgets.max_oracle_calls;
      if (comm_budget == kUnlimited || oracle_budget == kUnlimited) {
        throw InvalidArgument("zero_chain needs finite communication and oracle budgets");
      }
      HardInstance hard =
          nonconvex_hard_objective(c.m, c.n, c.L, c.delta, comm_budget, oracle_budget);
      meta["zero_chain"] = {{"dim", hard.objective->dim()},
                            {"scale", hard.objective->scale()},
                            {"amplitude", hard.objective->amplitude()},
                            {"comm_budget", comm_budget},
                            {"oracle_budget", oracle_budget}};
      objective = std::move(hard.objective);
      sequence.emplace(std::move(hard.sequence));
      topology = "rotating_star";
      break;
    }
  }
  if (!sequence) sequence.emplace(build_sequence(c, topology));
  meta["topology"] = {{"name", topology},
                      {"kind", to_string(sequence->kind())},
                      {"period", sequence->period()}};

  const double measured_chi = measure_chi(*sequence, c.chi_trials, c.seed);
  const double chi = c.chi.value_or(measured_chi);
  meta["measured_chi"] = measured_chi;
  meta["chi"] = chi;

  const SmoothnessInfo& info = objective->smoothness();
  meta["smoothness"] = smoothness_json(info);

  RunConfig rc;
  rc.method = c.method;
  rc.budgets = c.budgets;
  rc.cadence = c.cadence;
  rc.seed = c.seed;
  rc.x_star = x_star;
  if (c.target_dist_sq) {
    if (!x_star) throw InvalidArgument("target_dist_sq needs a known minimizer");
    rc.stop_dist_sq = *c.target_dist_sq * c.m * x_star->squaredNorm();
  }

  switch (c.method) {
    case Method::kAdomVr: {
      const MixingSpec mixing = build_mixing(c.mixing.value_or("plain"), c.rounds, chi);
      const double chi_eff = effective_chi(mixing, chi);
      const int b = c.b.value_or(adom_vr_batch_size(info.mu, info.L, info.Lbar, c.n));
      rc.adom = adom_vr_params(info.mu, info.L, info.Lbar, chi_eff, c.n, b);
      rc.adom_options.mixing = mixing;
      rc.adom_options.refresh = c.refresh;
      meta["params"] = adom_json(rc.adom, mixing);
      break;
    }
    case Method::kGtPage: {
      std::optional<MixingSpec> mixing;
      if (c.mixing || c.rounds) mixing = build_mixing(c.mixing.value_or("multi_stage"), c.rounds, chi);
      rc.page = gt_page_params(info.L, info.Lhat, chi, c.n, c.b, c.p, mixing);
      if (c.step) rc.page = with_step_size(rc.page, *c.step);
      rc.page.per_node_coins = c.per_node_coins;
      meta["params"] = page_json(rc.page);
      break;
    }
    case Method::kGtBaseline: {
      rc.baseline_mixing = build_mixing(c.mixing.value_or("plain"), c.rounds, chi);
      const double chi_eff = effective_chi(rc.baseline_mixing, chi);
      rc.baseline_eta = c.step.value_or(1.0 / (4.0 * info.L * chi_eff));
      meta["params"] = {{"eta", rc.baseline_eta},
                        {"mixing", to_string(rc.baseline_mixing.scheme)},
                        {"rounds", rc.baseline_mixing.rounds},
                        {"chi", chi_eff}};
      break;
    }
  }

  std::optional<ProgressAuditor> auditor;
  if (c.objective == ObjectiveKind::kZeroChain) {
    auditor.emplace(c.m, c.n);
    rc.observer = [&auditor](std::int64_t iter, std::int64_t comms, std::int64_t calls,
                             const NodeVector& x) { auditor->record(iter, comms, calls, x); };
  }

  ExperimentResult result;
  result.trace = run(*objective, *sequence, rc);
  result.csv = trace_csv(result.trace);

  const TraceRecord& last = result.trace.records.back();
  meta["final"] = {{"iteration", last.iteration},
                   {"communications", last.communications},
                   {"oracle_calls", last.oracle_calls},
                   {"dist_sq", number_or_null(last.dist_sq)},
                   {"grad_norm_sq", last.grad_norm_sq},
                   {"consensus_error", last.consensus_error},
                   {"value", last.value}};
  if (!x_star) {
    // Best observed value: F(x0) - best is an upper bound on F(x0) - F*.
    double best = result.trace.records.front().value;
    for (const auto& r : result.trace.records) best = std::min(best, r.value);
    meta["best_value"] = best;
    meta["delta_observed"] = result.trace.records.front().value - best;
  }
  if (auditor) {
    meta["progress"] = {{"global", auditor->global_progress()},
                        {"within_bound", auditor->within_bound()},
                        {"bound_at_end", auditor->points().back().bound}};
  }
  meta["records"] = result.trace.records.size();
  result.metadata_json = meta.dump(2) + "\n";
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result = execute_experiment(config);
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
  };
  write(config.out + ".csv", result.csv);
  write(config.out + ".json", result.metadata_json);
  return result;
}

}  // namespace decopt
