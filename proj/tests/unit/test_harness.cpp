#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "decopt/errors.hpp"
#include "decopt/harness.hpp"
#include "test_support.hpp"

namespace decopt {
namespace {

Dataset parse(const std::string& text, const LibsvmOptions& options = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, options);
}

TEST(Libsvm, ParsesSparseRows) {
  const Dataset d = parse("+1 1:0.5 3:2\n-1\n");
  ASSERT_EQ(d.rows(), 2);
  ASSERT_EQ(d.dim(), 3);
  EXPECT_DOUBLE_EQ(d.labels[0], 1.0);
  EXPECT_DOUBLE_EQ(d.labels[1], -1.0);
  EXPECT_DOUBLE_EQ(d.features(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.features(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(d.features(0, 2), 2.0);
  EXPECT_EQ(d.features.row(1).squaredNorm(), 0.0);
}

TEST(Libsvm, SkipsCommentsAndHonoursDim) {
  LibsvmOptions options;
  options.dim = 5;
  const Dataset d = parse("# header\n\n-1 2:1\n", options);
  EXPECT_EQ(d.rows(), 1);
  EXPECT_EQ(d.dim(), 5);
  options.dim = 1;
  EXPECT_THROW(parse("-1 2:1\n", options), ParseError);
}

TEST(Libsvm, ReportsLineOfMalformedInput) {
  const std::pair<const char*, std::size_t> cases[] = {
      {"+1 1:1\n1 0:3\n", 2},         {"+1 1:1\n\n+1 a:3\n", 3},
      {"+1 2:1 1:1\n", 1},            {"+1 1:x\n", 1},
      {"+1 1:1\n-1 1:2\nfoo 1:1\n", 3}, {"+1 1-2\n", 1},
  };
  for (const auto& [text, line] : cases) {
    try {
      parse(text);
      ADD_FAILURE() << "no error for " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(Libsvm, MapsZeroOneLabels) {
  EXPECT_EQ(parse("0 1:1\n1 1:2\n").labels, (Vector(2) << -1, 1).finished());
  LibsvmOptions keep;
  keep.map_binary_zero = false;
  EXPECT_EQ(parse("0 1:1\n1 1:2\n", keep).labels, (Vector(2) << 0, 1).finished());
  const Dataset unit = to_unit_labels(parse("-1 1:1\n+1 1:2\n"));
  EXPECT_EQ(unit.labels, (Vector(2) << 0, 1).finished());
  EXPECT_THROW(to_unit_labels(parse("2 1:1\n")), InvalidArgument);
}

TEST(Libsvm, RoundTrip) {
  std::mt19937_64 gen(1);
  Dataset d;
  d.features = Matrix::Zero(7, 4);
  d.labels.resize(7);
  for (int r = 0; r < 7; ++r) {
    d.labels[r] = r % 2 ? 1.0 : -1.0;
    for (int c = 0; c < 4; ++c) {
      if ((r + c) % 3 != 0) d.features(r, c) = testing::random_vector(gen, 1)[0] / 3.0;
    }
  }
  std::ostringstream out;
  write_libsvm(out, d);
  LibsvmOptions options;
  options.dim = 4;
  const Dataset back = parse(out.str(), options);
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(Libsvm, Fixture) {
  const Dataset d = parse_libsvm(testing::data_path("fixture.libsvm"));
  EXPECT_EQ(d.rows(), 500);
  EXPECT_EQ(d.dim(), 16);
  EXPECT_EQ((d.labels.array() == 1.0).count() + (d.labels.array() == -1.0).count(), 500);
}

Dataset numbered_rows(int rows) {
  Dataset d;
  d.features.resize(rows, 1);
  d.labels = Vector::Ones(rows);
  for (int r = 0; r < rows; ++r) d.features(r, 0) = r;
  return d;
}

TEST(Partition, SixRowsTwoNodesThreeComponents) {
  const auto shards = partition_dataset(numbered_rows(6), 2, 3, 5);
  ASSERT_EQ(shards.size(), 2u);
  std::multiset<double> seen;
  for (const auto& shard : shards) {
    ASSERT_EQ(shard.blocks.size(), 3u);
    for (const auto& block : shard.blocks) {
      ASSERT_EQ(block.features.rows(), 1);
      seen.insert(block.features(0, 0));
    }
  }
  EXPECT_EQ(seen, (std::multiset<double>{0, 1, 2, 3, 4, 5}));
}

TEST(Partition, UnevenSplitAndDeterminism) {
  const auto shards = partition_dataset(numbered_rows(7), 2, 1, 3);
  EXPECT_EQ(shards[0].blocks[0].features.rows(), 4);
  EXPECT_EQ(shards[1].blocks[0].features.rows(), 3);
  const auto again = partition_dataset(numbered_rows(7), 2, 1, 3);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(shards[i].blocks[0].features, again[i].blocks[0].features);
  }
  const auto other = partition_dataset(numbered_rows(40), 2, 2, 4);
  const auto base = partition_dataset(numbered_rows(40), 2, 2, 3);
  EXPECT_NE(other[0].blocks[0].features, base[0].blocks[0].features);
}

TEST(Partition, RoundRobinComponentSizes) {
  const auto shards = partition_dataset(numbered_rows(23), 3, 4, 9);
  // Nodes hold 8, 8, 7 rows; components of a node differ by at most one row.
  const int expected[3][4] = {{2, 2, 2, 2}, {2, 2, 2, 2}, {2, 2, 2, 1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(shards[i].blocks[j].features.rows(), expected[i][j]);
  }
}

TEST(Partition, TooFewRows) {
  EXPECT_THROW(partition_dataset(numbered_rows(5), 2, 3, 0), InvalidArgument);
  const auto shards = partition_dataset(numbered_rows(5), 2, 3, 0, true);
  EXPECT_EQ(shards[1].blocks[2].features.rows(), 0);
}

TEST(ReferenceSolution, ScalarQuadratic) {
  // f(w) = (w - 3)^2 on a single component.
  const QuadraticObjective obj({{Matrix::Constant(1, 1, 2.0)}}, {{Vector::Constant(1, 6.0)}});
  const ReferenceSolution ref = reference_solution(obj);
  EXPECT_NEAR(ref.x[0], 3.0, 1e-10);
  EXPECT_LE(ref.grad_norm, 1e-11);
  const QuadraticObjective flat({{Matrix::Zero(1, 1)}}, {{Vector::Zero(1)}});
  EXPECT_THROW(reference_solution(flat), InvalidArgument);
}

TEST(ReferenceSolution, LogisticFixture) {
  const Dataset d = parse_libsvm(testing::data_path("fixture.libsvm"));
  const LogisticObjective obj(partition_dataset(d, 10, 10, 0), 0.1);
  const ReferenceSolution ref = reference_solution(obj);
  EXPECT_LT(average_gradient(obj, ref.x).norm(), 1e-10);
  EXPECT_NEAR(ref.value, average_value(obj, ref.x), 1e-14);
}

TEST(Config, ParsesAndRejects) {
  std::istringstream in("method = gt_page  # comment\nobjective=chain\n\nm=5\nbudget_comms=30\n");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.method, Method::kGtPage);
  EXPECT_EQ(c.objective, ObjectiveKind::kChain);
  EXPECT_EQ(c.m, 5);
  EXPECT_EQ(c.budgets.max_communications, 30);
  EXPECT_EQ(c.budgets.max_oracle_calls, kUnlimited);

  ExperimentConfig config;
  try {
    apply_setting(config, "method", "sgd");
    FAIL();
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    for (const char* name : {"adom_vr", "gt_page", "gt_baseline"}) {
      EXPECT_NE(what.find(name), std::string::npos);
    }
  }
  EXPECT_THROW(apply_setting(config, "no_such_key", "1"), InvalidArgument);
  EXPECT_THROW(apply_setting(config, "m", "three"), InvalidArgument);
  std::istringstream bad("m=3\njunk\n");
  try {
    parse_config(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Config, EntriesRoundTrip) {
  ExperimentConfig c;
  apply_setting(c, "method", "gt_baseline");
  apply_setting(c, "step", "0.125");
  apply_setting(c, "budget_oracle", "400");
  apply_setting(c, "topology", "ring");
  ExperimentConfig back;
  for (const auto& [key, value] : config_entries(c)) apply_setting(back, key, value);
  EXPECT_EQ(config_entries(back), config_entries(c));
  EXPECT_EQ(back.step, 0.125);
  EXPECT_EQ(back.topology, std::optional<std::string>("ring"));
}

ExperimentConfig tiny_chain() {
  ExperimentConfig c;
  c.method = Method::kAdomVr;
  c.objective = ObjectiveKind::kChain;
  c.m = 6;
  c.n = 3;
  c.mu = 0.25;
  c.chain_dim = 6;
  c.budgets.max_communications = 10;
  c.seed = 4;
  c.chi_trials = 50;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Experiment, WritesCsvAndMetadata) {
  ExperimentConfig c = tiny_chain();
  const auto dir = std::filesystem::temp_directory_path() / "decopt_harness_test";
  std::filesystem::create_directories(dir);
  c.out = (dir / "run").string();
  const ExperimentResult result = run_experiment(c);
  std::ifstream csv(c.out + ".csv");
  std::stringstream buffer;
  buffer << csv.rdbuf();
  EXPECT_EQ(buffer.str(), result.csv);
  const auto rows = lines(result.csv);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], "iter,comms,oracle_calls,dist_sq,grad_norm_sq,consensus_err");
  EXPECT_TRUE(std::filesystem::exists(c.out + ".json"));
  EXPECT_NE(result.metadata_json.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(result.metadata_json.find("\"measured_chi\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, RerunIsByteIdentical) {
  for (Method method : {Method::kAdomVr, Method::kGtPage, Method::kGtBaseline}) {
    ExperimentConfig c = tiny_chain();
    c.method = method;
    c.budgets.max_communications = 60;
    const ExperimentResult a = execute_experiment(c);
    const ExperimentResult b = execute_experiment(c);
    EXPECT_EQ(a.csv, b.csv);
    EXPECT_EQ(a.metadata_json, b.metadata_json);
  }
}

TEST(Experiment, CountersAreMonotone) {
  ExperimentConfig c = tiny_chain();
  c.method = Method::kGtPage;
  c.budgets.max_communications = 200;
  const ExperimentResult result = execute_experiment(c);
  const auto& records = result.trace.records;
  ASSERT_GT(records.size(), 2u);
  for (std::size_t r = 1; r < records.size(); ++r) {
    EXPECT_GT(records[r].iteration, records[r - 1].iteration);
    EXPECT_GE(records[r].communications, records[r - 1].communications);
    EXPECT_GE(records[r].oracle_calls, records[r - 1].oracle_calls);
  }
}

TEST(Experiment, ZeroChainReportsProgress) {
  ExperimentConfig c;
  c.method = Method::kGtPage;
  c.objective = ObjectiveKind::kZeroChain;
  c.m = 9;
  c.n = 2;
  c.budgets.max_communications = 36;
  c.budgets.max_oracle_calls = 40;
  c.step = 0.5;
  c.chi_trials = 20;
  const ExperimentResult result = execute_experiment(c);
  EXPECT_NE(result.metadata_json.find("\"progress\""), std::string::npos);
  EXPECT_NE(result.metadata_json.find("\"within_bound\": true"), std::string::npos);
  const auto rows = lines(result.csv);
  EXPECT_NE(rows[1].find("NaN"), std::string::npos);
}

TEST(Experiment, MissingDatasetIsAnError) {
  ExperimentConfig c;
  c.objective = ObjectiveKind::kLogistic;
  EXPECT_THROW(execute_experiment(c), InvalidArgument);
}

}  // namespace
}  // namespace decopt
