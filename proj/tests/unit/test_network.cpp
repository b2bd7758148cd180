#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "decopt/errors.hpp"
#include "decopt/network.hpp"
#include "test_support.hpp"

namespace decopt {
namespace {

using testing::random_node_vector;
using testing::random_zero_mean;

// Dense (I - W) as an m x m matrix, applied to X = [x_1 ... x_m] from the right.
Matrix residual_operator(const GossipMatrix& w) {
  return Matrix::Identity(w.nodes(), w.nodes()) - w.entries;
}

std::set<std::pair<int, int>> edge_set(const WeightedGraph& g) {
  std::set<std::pair<int, int>> out;
  for (const auto& e : g.edges()) out.insert({e.u, e.v});
  return out;
}

TEST(WeightedGraph, RejectsInvalidEdges) {
  WeightedGraph g(3);
  EXPECT_THROW(g.add_edge(0, 0), InvalidArgument);
  EXPECT_THROW(g.add_edge(0, 3), InvalidArgument);
  EXPECT_THROW(g.add_edge(0, 1, 0.0), InvalidArgument);
  g.add_edge(0, 1);
  EXPECT_THROW(g.add_edge(1, 0), InvalidArgument);
  EXPECT_TRUE(g.has_edge(1, 0));
  g.remove_edge(1, 0);
  EXPECT_FALSE(g.has_edge(0, 1));
  EXPECT_THROW(g.remove_edge(0, 1), InvalidArgument);
}

TEST(Gossip, TwoNodeCompleteGraph) {
  const GossipMatrix w = gossip_from_laplacian(complete_graph(2));
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LT((w.entries - expected).norm(), 1e-15);
  EXPECT_NEAR(w.chi, 1.0, 1e-12);
}

TEST(Gossip, StarChiMatchesLaplacianSpectrum) {
  // Star on m nodes: Laplacian spectrum {0, 1 (m-2 times), m}.
  for (int m : {3, 4, 7, 16}) {
    const GossipMatrix w = gossip_from_laplacian(star_graph(m));
    EXPECT_NEAR(w.lambda_max, m, 1e-10);
    EXPECT_NEAR(w.lambda_min_positive, 1.0, 1e-10);
    EXPECT_NEAR(w.chi, m, 1e-9);
  }
}

TEST(Gossip, CompleteAndRingChi) {
  // Complete graph: spectrum {0, m (m-1 times)}; ring: 2 - 2 cos(2 pi k / m).
  EXPECT_NEAR(gossip_from_laplacian(complete_graph(8)).chi, 1.0, 1e-10);
  const int m = 10;
  const double lmax = 4.0;
  const double lmin = 2.0 - 2.0 * std::cos(2.0 * M_PI / m);
  EXPECT_NEAR(gossip_from_laplacian(ring_graph(m)).chi, lmax / lmin, 1e-8);
}

TEST(Gossip, RejectsDisconnectedAndTinyGraphs) {
  WeightedGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  EXPECT_THROW(gossip_from_laplacian(g), DisconnectedGraph);
  EXPECT_THROW(gossip_from_laplacian(WeightedGraph(1)), InvalidArgument);
}

TEST(Gossip, SymmetricZeroRowSumsAndSparsity) {
  std::mt19937_64 gen(3);
  const GraphSequence seq = random_geometric_sequence(12, 0.5, 11, 20);
  for (std::int64_t k = 0; k < seq.period(); ++k) {
    const auto& g = seq.graph(k);
    const Matrix& w = seq.gossip(k).entries;
    EXPECT_LT((w - w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(w.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        if (i != j && !g.has_edge(i, j)) EXPECT_EQ(w(i, j), 0.0);
      }
    }
  }
}

TEST(Gossip, ContractionBoundOnRandomZeroMeanVectors) {
  std::mt19937_64 gen(5);
  std::vector<WeightedGraph> graphs = {star_graph(4), complete_graph(8), ring_graph(9)};
  const GraphSequence rg = random_geometric_sequence(15, 0.45, 2, 5);
  for (std::int64_t k = 0; k < rg.period(); ++k) graphs.push_back(rg.graph(k));
  for (const auto& g : graphs) {
    const GossipMatrix w = gossip_from_laplacian(g);
    for (int t = 0; t < 100; ++t) {
      const NodeVector x = random_zero_mean(gen, g.nodes(), 3);
      const NodeVector wx = apply_mixing(w, x);
      const double lhs = (wx - x).squared_norm();
      EXPECT_LE(lhs, (1.0 - 1.0 / w.chi) * x.squared_norm() + 1e-10);
      // Output blocks sum to zero.
      EXPECT_LT(wx.sum_norm(), 1e-12 * (1.0 + x.squared_norm()));
    }
  }
}

TEST(ApplyMixing, Examples) {
  const GossipMatrix w = gossip_from_laplacian(complete_graph(2));
  Vector u(3);
  u << 1.0, -2.0, 0.5;
  const NodeVector consensus = NodeVector::replicate(2, u);
  EXPECT_LT(apply_mixing(w, consensus).squared_norm(), 1e-30);

  NodeVector opposite(2, 3);
  opposite.block(0) = u;
  opposite.block(1) = -u;
  EXPECT_LT((apply_mixing(w, opposite) - opposite).squared_norm(), 1e-30);

  EXPECT_EQ(apply_mixing(w, NodeVector(2, 3)).squared_norm(), 0.0);
  EXPECT_THROW(apply_mixing(w, NodeVector(3, 3)), InvalidArgument);
}

TEST(MeasureChi, Examples) {
  EXPECT_NEAR(measure_chi(static_sequence(complete_graph(2)), 10, 1), 1.0, 1e-9);
  EXPECT_NEAR(measure_chi(static_sequence(star_graph(4)), 10, 1), 4.0, 0.2);
  EXPECT_LE(measure_chi(two_star_hop_sequence(12), 1000, 1), 96.0);
}

TEST(MeasureChi, DeterministicAndSampled) {
  const GraphSequence seq = random_geometric_sequence(10, 0.5, 4, 50);
  const double a = measure_chi(seq, 10, 9);
  EXPECT_EQ(a, measure_chi(seq, 10, 9));
  // Sampling a subset never exceeds the full-period value.
  EXPECT_LE(a, measure_chi(seq, 1000, 9) + 1e-12);
  EXPECT_NEAR(measure_chi(seq, 1000, 9), seq.max_chi(), 1e-6);
}

TEST(RandomGeometric, TwoNodesLargeRadiusIsComplete) {
  const GraphSequence seq = random_geometric_sequence(2, 2.0, 1, 10);
  for (std::int64_t k = 0; k < 10; ++k) EXPECT_TRUE(seq.graph(k).has_edge(0, 1));
}

TEST(RandomGeometric, ConnectedOverLongHorizon) {
  const GraphSequence seq = random_geometric_sequence(50, 0.3, 7, 1000);
  EXPECT_EQ(seq.period(), 1000);
  for (std::int64_t k = 0; k < seq.period(); ++k) ASSERT_TRUE(seq.graph(k).is_connected());
}

TEST(RandomGeometric, DeterministicGivenSeedAndPeriodic) {
  const GraphSequence a = random_geometric_sequence(8, 0.5, 3, 7);
  const GraphSequence b = random_geometric_sequence(8, 0.5, 3, 7);
  for (std::int64_t k = 0; k < 7; ++k) EXPECT_TRUE(a.graph(k) == b.graph(k));
  EXPECT_TRUE(a.graph(2) == a.graph(9));
}

TEST(RandomGeometric, TinyRadiusFails) {
  EXPECT_THROW(random_geometric_sequence(50, 1e-6, 1, 1), DisconnectedGraph);
}

TEST(TwoStarHop, SmallestCycle) {
  const GraphSequence seq = two_star_hop_sequence(4);
  EXPECT_EQ(seq.period(), 2);
  EXPECT_TRUE(seq.graph(0) == two_star_graph(4, 0));
  EXPECT_TRUE(seq.graph(1) == two_star_graph(4, 1));
  EXPECT_THROW(two_star_hop_sequence(3), InvalidArgument);
}

TEST(TwoStarHop, SevenNodes) {
  const GraphSequence seq = two_star_hop_sequence(7);
  EXPECT_EQ(seq.period(), 8);
  // T_{0,4}: v_l alone (size 1), v_r with four leaves (size 5), bridged by
  // the middle vertex.
  const WeightedGraph& g = seq.graph(0);
  int left = 0, right = 0;
  for (int v = 2; v < 7; ++v) {
    left += g.has_edge(v, kLeftCenter) && !g.has_edge(v, kRightCenter);
    right += g.has_edge(v, kRightCenter) && !g.has_edge(v, kLeftCenter);
  }
  EXPECT_EQ(left, 0);
  EXPECT_EQ(right, 4);
  EXPECT_FALSE(g.has_edge(kLeftCenter, kRightCenter));
  EXPECT_TRUE(seq.graph(4) == two_star_graph(7, 4));
}

TEST(TwoStarHop, TreesDifferingByOneHop) {
  for (int m : {4, 5, 8, 12}) {
    const GraphSequence seq = two_star_hop_sequence(m);
    for (std::int64_t k = 0; k < seq.period(); ++k) {
      const auto& g = seq.graph(k);
      EXPECT_EQ(static_cast<int>(g.edges().size()), m - 1);
      EXPECT_TRUE(g.is_connected());
      const auto a = edge_set(g);
      const auto b = edge_set(seq.graph(k + 1));
      int removed = 0, added = 0;
      for (const auto& e : a) removed += !b.count(e);
      for (const auto& e : b) added += !a.count(e);
      EXPECT_EQ(removed, 1);
      EXPECT_EQ(added, 1);
    }
  }
}

TEST(RotatingStar, SpectralGapIsOneOverM) {
  for (int m : {3, 9, 10}) {
    const GraphSequence seq = rotating_star_sequence(m);
    for (std::int64_t k = 0; k < seq.period(); ++k) {
      const GossipMatrix& w = seq.gossip(k);
      // Every graph is a star: m - 1 edges sharing one center.
      EXPECT_EQ(static_cast<int>(seq.graph(k).edges().size()), m - 1);
      Eigen::SelfAdjointEigenSolver<Matrix> solver(Matrix::Identity(m, m) - w.entries);
      const auto ev = solver.eigenvalues();  // ascending; top one is the consensus 1
      EXPECT_NEAR(1.0 - ev(m - 2), 1.0 / m, 1e-9);
    }
  }
}

TEST(RotatingStar, CentersVisitS3ThenAnExchangeVertex) {
  const int m = 9;  // S1 = {0,1,2}, S2 = {3,4,5}, S3 = {6,7,8}
  const GraphSequence seq = rotating_star_sequence(m);
  auto center = [&](std::int64_t k) {
    std::vector<int> degree(m, 0);
    for (const auto& e : seq.graph(k).edges()) {
      ++degree[e.u];
      ++degree[e.v];
    }
    return static_cast<int>(std::max_element(degree.begin(), degree.end()) - degree.begin());
  };
  EXPECT_EQ(center(0), 6);
  EXPECT_EQ(center(1), 7);
  EXPECT_EQ(center(2), 8);
  const int exchange = center(3);
  EXPECT_LT(exchange, 6);
  EXPECT_EQ(center(4), 6);
}

TEST(RotatingStar, RejectsBadSets) {
  EXPECT_THROW(rotating_star_sequence(9, {0, 1}, {3, 4, 5}), InvalidArgument);
  EXPECT_THROW(rotating_star_sequence(9, {0, 1, 2}, {2, 4, 5}), InvalidArgument);
  EXPECT_THROW(rotating_star_sequence(2), InvalidArgument);
}

TEST(MultiStage, SingleStageEqualsPlainMixing) {
  std::mt19937_64 gen(1);
  const GraphSequence seq = random_geometric_sequence(6, 0.6, 2, 4);
  const NodeVector x = random_node_vector(gen, 6, 2);
  for (std::int64_t k = 0; k < 4; ++k) {
    EXPECT_LT((multi_stage_mix(seq, k, 1, x) - apply_mixing(seq.gossip(k), x)).squared_norm(),
              1e-28);
  }
}

TEST(MultiStage, MatchesBruteForceProducts) {
  std::mt19937_64 gen(2);
  for (int m : {3, 5, 8}) {
    const GraphSequence seq = random_geometric_sequence(m, 0.6, 10 + m, 6);
    const NodeVector x = random_node_vector(gen, m, 3);
    for (int stages : {1, 2, 5}) {
      Matrix product = Matrix::Identity(m, m);
      for (int q = 0; q < stages; ++q) product = product * residual_operator(seq.gossip(2 + q));
      const Matrix expected = x.mat() - x.mat() * product;
      EXPECT_LT((multi_stage_mix(seq, 2, stages, x).mat() - expected).norm(), 1e-12);
    }
  }
}

TEST(MultiStage, StarContractsByInverseE) {
  std::mt19937_64 gen(4);
  const GraphSequence seq = static_sequence(star_graph(4));
  for (int t = 0; t < 100; ++t) {
    const NodeVector x = random_zero_mean(gen, 4, 2);
    const NodeVector r = x - multi_stage_mix(seq, 0, 4, x);
    EXPECT_LE(r.squared_norm(), std::exp(-1.0) * x.squared_norm());
  }
  const NodeVector consensus = NodeVector::replicate(4, Vector::Ones(2));
  EXPECT_LT(multi_stage_mix(seq, 0, 4, consensus).squared_norm(), 1e-28);
}

TEST(Chebyshev, DegreeOneIsAffineInW) {
  std::mt19937_64 gen(6);
  const GossipMatrix w = gossip_from_laplacian(star_graph(5));
  const NodeVector x = random_zero_mean(gen, 5, 2);
  // Degree 1 residual polynomial: 1 - 2 l / (1 + 1/chi).
  const double scale = 2.0 / (1.0 + 1.0 / w.chi);
  const NodeVector expected = scale * apply_mixing(w, x);
  EXPECT_LT((chebyshev_mix(w, 1, x) - expected).squared_norm(), 1e-26);
}

TEST(Chebyshev, BeatsPlainStepsOnStar16) {
  const GossipMatrix w = gossip_from_laplacian(star_graph(16));
  ASSERT_NEAR(w.chi, 16.0, 1e-9);
  // Spectral oracle: max |residual| over the zero-mean eigenvalues of W.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w.entries);
  const Matrix& v = solver.eigenvectors();
  double cheb = 0.0, plain = 0.0;
  for (int k = 1; k < 16; ++k) {
    NodeVector e(Matrix(v.col(k).transpose()));
    const NodeVector r = e - chebyshev_mix(w, 8, e);
    cheb = std::max(cheb, std::sqrt(r.squared_norm()));
    plain = std::max(plain, std::pow(1.0 - solver.eigenvalues()(k), 8));
  }
  EXPECT_LT(cheb, plain);
  EXPECT_NEAR(cheb, chebyshev_contraction(16.0, 8), 1e-9);
}

TEST(Chebyshev, HalfContractionAtTwiceSqrtChiAndConsensusKernel) {
  std::mt19937_64 gen(7);
  for (const auto& g : {star_graph(16), ring_graph(12), star_graph(7)}) {
    const GossipMatrix w = gossip_from_laplacian(g);
    const int degree = 2 * static_cast<int>(std::ceil(std::sqrt(w.chi)));
    for (int t = 0; t < 50; ++t) {
      const NodeVector x = random_zero_mean(gen, g.nodes(), 2);
      const NodeVector r = x - chebyshev_mix(w, degree, x);
      EXPECT_LE(std::sqrt(r.squared_norm()), 0.5 * std::sqrt(x.squared_norm()));
    }
    const NodeVector consensus = NodeVector::replicate(g.nodes(), Vector::Ones(2));
    EXPECT_LT(chebyshev_mix(w, degree, consensus).squared_norm(), 1e-24);
  }
}

TEST(Chebyshev, RejectsTimeVaryingSequences) {
  const GraphSequence seq = two_star_hop_sequence(5);
  EXPECT_THROW(chebyshev_mix(seq, 2, NodeVector(5, 1)), InvalidArgument);
}

TEST(SequenceIo, RoundTrip) {
  const GraphSequence seq = random_geometric_sequence(6, 0.7, 5, 3);
  std::stringstream buffer;
  write_graph_sequence(buffer, seq);
  const GraphSequence back = read_graph_sequence(buffer);
  ASSERT_EQ(back.period(), 3);
  ASSERT_EQ(back.nodes(), 6);
  for (std::int64_t k = 0; k < 3; ++k) EXPECT_TRUE(back.graph(k) == seq.graph(k));
}

TEST(SequenceIo, ReportsLineOfBadInput) {
  std::stringstream in("m 3\nstep 0\nedge 0 1 1\nedge 1 x 1\n");
  try {
    read_graph_sequence(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

}  // namespace
}  // namespace decopt
