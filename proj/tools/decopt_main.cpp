#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"
#include "decopt/harness.hpp"
#include "decopt/network.hpp"

namespace {

using decopt::ExperimentConfig;

void report_error(const std::exception& e) {
  nlohmann::ordered_json err;
  err["error"] = e.what();
  if (dynamic_cast<const decopt::ParseError*>(&e)) {
    err["kind"] = "parse";
  } else if (dynamic_cast<const decopt::InvalidArgument*>(&e)) {
    err["kind"] = "invalid_argument";
  } else if (auto* run = dynamic_cast<const decopt::RunError*>(&e)) {
    err["kind"] = "run";
    err["step"] = run->step();
  } else {
    err["kind"] = "error";
  }
  std::cerr << err.dump() << '\n';
}

int run_command(const std::string& config_path, const std::vector<std::string>& settings,
                const std::map<std::string, std::string>& flags,
                const std::vector<std::uint64_t>& seeds, int jobs) {
  ExperimentConfig base;
  if (!config_path.empty()) base = decopt::load_config(config_path);
  for (const auto& kv : flags) decopt::apply_setting(base, kv.first, kv.second);
  for (const auto& s : settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw decopt::InvalidArgument("--set expects key=value");
    decopt::apply_setting(base, s.substr(0, eq), s.substr(eq + 1));
  }

  std::vector<ExperimentConfig> configs;
  if (seeds.empty()) {
    configs.push_back(base);
  } else {
    for (auto seed : seeds) {
      ExperimentConfig c = base;
      c.seed = seed;
      c.out = base.out + "_seed" + std::to_string(seed);
      configs.push_back(c);
    }
  }

  std::mutex mutex;
  int failures = 0;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t index;
      {
        std::lock_guard<std::mutex> lock(mutex);
        if (next >= configs.size()) return;
        index = next++;
      }
      try {
        const auto result = decopt::run_experiment(configs[index]);
        std::lock_guard<std::mutex> lock(mutex);
        std::cout << configs[index].out << ".csv: " << result.trace.records.size()
                  << " records\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mutex);
        report_error(e);
        ++failures;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized finite-sum optimization simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one experiment (or one per seed) and write CSV + JSON");
  std::string config_path;
  std::vector<std::string> settings;
  std::map<std::string, std::string> flags;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  run->add_option("--config", config_path, "key=value configuration file")
      ->check(CLI::ExistingFile);
  run->add_option("--set", settings, "Override any setting as key=value");
  for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
           {"--method", "method"},
           {"--objective", "objective"},
           {"--dataset", "dataset"},
           {"--topology", "topology"},
           {"--m", "m"},
           {"--n", "n"},
           {"--b", "b"},
           {"--seed", "seed"},
           {"--budget-comms", "budget_comms"},
           {"--budget-oracle", "budget_oracle"},
           {"--budget-iterations", "budget_iterations"},
           {"--out", "out"}}) {
    run->add_option_function<std::string>(
        flag, [&flags, key = key](const std::string& v) { flags[key] = v; },
        "Sets " + key);
  }
  run->add_option("--seeds", seeds, "Run one experiment per seed (output suffix _seed<s>)");
  run->add_option("--jobs", jobs, "Parallel experiments for --seeds")->check(CLI::PositiveNumber);

  // dump-graphs
  auto* dump = app.add_subcommand("dump-graphs", "Write a graph sequence in the line format");
  std::string topology = "random_geometric";
  int m = 10;
  double radius = 0.5;
  std::uint64_t seed = 0;
  std::int64_t horizon = 200;
  std::int64_t steps = 0;
  std::string dump_out;
  dump->add_option("--topology", topology,
                   "complete, ring, star, random_geometric, two_star_hop or rotating_star");
  dump->add_option("--m", m, "Number of nodes");
  dump->add_option("--radius", radius, "Random geometric radius");
  dump->add_option("--seed", seed, "Seed");
  dump->add_option("--horizon", horizon, "Random geometric period");
  dump->add_option("--steps", steps, "Steps to write (default: one period)");
  dump->add_option("--out", dump_out, "Output file (default: stdout)");

  // lower-bound
  auto* lb = app.add_subcommand("lower-bound", "Evaluate the strongly convex lower bound");
  double kappa_b = 1, kappa_s = 1, chi = 1, comm_rounds = 1, local_steps = 1;
  int n = 1;
  lb->add_option("--kappa-b", kappa_b, "Batch condition number")->required();
  lb->add_option("--kappa-s", kappa_s, "Sum condition number")->required();
  lb->add_option("--chi", chi, "Graph parameter chi")->required();
  lb->add_option("--n", n, "Local components")->required();
  lb->add_option("--comm-rounds", comm_rounds, "Communication rounds per iteration");
  lb->add_option("--local-steps", local_steps, "Local steps per iteration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, settings, flags, seeds, jobs);

    if (*dump) {
      decopt::GraphSequence seq = [&] {
        if (topology == "complete") return decopt::static_sequence(decopt::complete_graph(m));
        if (topology == "ring") return decopt::static_sequence(decopt::ring_graph(m));
        if (topology == "star") return decopt::static_sequence(decopt::star_graph(m));
        if (topology == "random_geometric") {
          return decopt::random_geometric_sequence(m, radius, seed, horizon);
        }
        if (topology == "two_star_hop") return decopt::two_star_hop_sequence(m);
        if (topology == "rotating_star") return decopt::rotating_star_sequence(m);
        throw decopt::InvalidArgument("unknown topology '" + topology + "'");
      }();
      std::optional<std::int64_t> count;
      if (steps > 0) count = steps;
      if (dump_out.empty()) {
        decopt::write_graph_sequence(std::cout, seq, count);
      } else {
        std::ofstream out(dump_out);
        if (!out) throw decopt::InvalidArgument("cannot write '" + dump_out + "'");
        decopt::write_graph_sequence(out, seq, count);
      }
      return 0;
    }

    if (*lb) {
      const auto v = decopt::lower_bound_value(kappa_b, kappa_s, chi, n, comm_rounds, local_steps);
      nlohmann::ordered_json out;
      out["t1"] = v.t1 ? nlohmann::ordered_json(*v.t1) : nlohmann::ordered_json(nullptr);
      out["t2"] = v.t2 ? nlohmann::ordered_json(*v.t2) : nlohmann::ordered_json(nullptr);
      out["value"] = v.value;
      std::cout << out.dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    report_error(e);
    return 1;
  }
  return 0;
}
