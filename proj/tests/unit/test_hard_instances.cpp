#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"
#include "decopt/harness.hpp"
#include "decopt/optimizers.hpp"
#include "test_support.hpp"

namespace decopt {
namespace {

using testing::random_node_vector;
using testing::random_vector;

// Composite Simpson quadrature of sqrt(e) exp(-t^2/2) over [-40, z].
double phi_quadrature(double z) {
  const int steps = 200000;
  const double a = -40.0;
  const double h = (z - a) / steps;
  auto f = [](double t) { return std::exp(-0.5 * t * t); };
  double sum = f(a) + f(z);
  for (int k = 1; k < steps; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return std::sqrt(std::exp(1.0)) * sum * h / 3.0;
}

Vector uniform_box(std::mt19937_64& gen, int d, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  Vector v(d);
  for (auto& e : v) e = u(gen);
  return v;
}

TEST(Bump, PsiValues) {
  EXPECT_EQ(psi(0.5), 0.0);
  EXPECT_EQ(psi(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(psi(1.0), 1.0);
  EXPECT_GT(psi(0.6), 0.0);
  EXPECT_LT(psi(10.0), std::exp(1.0));
}

TEST(Bump, PhiMatchesQuadrature) {
  EXPECT_NEAR(phi(0.0), std::sqrt(std::exp(1.0)) * std::sqrt(2.0 * M_PI) / 2.0, 1e-14);
  EXPECT_NEAR(phi(0.0), 2.0664, 1e-4);
  for (double z : {-3.0, -0.7, 0.0, 0.4, 1.9, 5.0}) EXPECT_NEAR(phi(z), phi_quadrature(z), 1e-10);
}

TEST(Bump, DerivativesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (double z : {0.55, 0.7, 1.0, 1.8, 4.0}) {
    EXPECT_NEAR(psi_derivative(z), (psi(z + h) - psi(z - h)) / (2 * h), 1e-6);
  }
  EXPECT_EQ(psi_derivative(0.2), 0.0);
  for (double z : {-2.0, 0.0, 0.5, 3.0}) {
    EXPECT_NEAR(phi_derivative(z), (phi(z + h) - phi(z - h)) / (2 * h), 1e-8);
  }
}

TEST(Prog, Examples) {
  EXPECT_EQ(prog(Vector::Zero(3)), 0);
  Vector a(3);
  a << 1, 0, 0;
  EXPECT_EQ(prog(a), 1);
  Vector b(5);
  b << 0, 2, 0, 3, 0;
  EXPECT_EQ(prog(b), 4);
}

TEST(ZeroChain, OriginActivatesOnlyFirstCoordinate) {
  const auto eval = zero_chain_l(Vector::Zero(6));
  EXPECT_LE(prog(eval.gradient), 1);
  EXPECT_NE(eval.gradient[0], 0.0);
}

TEST(ZeroChain, GradientBoundsAndChainProperty) {
  std::mt19937_64 gen(1);
  const int d = 8;
  for (int t = 0; t < 1000; ++t) {
    Vector x = uniform_box(gen, d, 5.0);
    const int keep = t % (d + 1);
    x.tail(d - keep).setZero();
    const auto eval = zero_chain_l(x);
    EXPECT_LE(eval.gradient.cwiseAbs().maxCoeff(), kChainG0);
    EXPECT_LE(prog(eval.gradient), prog(x) + 1);
    if (x[d - 1] == 0.0) EXPECT_GE(eval.gradient.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(ZeroChain, FiniteDifferences) {
  std::mt19937_64 gen(2);
  const int d = 7;
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    Vector x = uniform_box(gen, d, 3.0);
    const Vector g = zero_chain_l(x).gradient;
    Vector fd(d);
    for (int c = 0; c < d; ++c) {
      Vector up = x, down = x;
      up[c] += h;
      down[c] -= h;
      fd[c] = (zero_chain_l(up).value - zero_chain_l(down).value) / (2 * h);
    }
    EXPECT_LT((fd - g).norm() / std::max(g.norm(), 1e-3), 1e-4);
  }
}

TEST(ZeroChain, GradientDescentGainsAtMostOneCoordinatePerCall) {
  Vector x = Vector::Zero(10);
  for (int k = 0; k < 30; ++k) {
    const int before = prog(x);
    x -= 0.01 * zero_chain_l(x).gradient;
    EXPECT_LE(prog(x), before + 1);
  }
}

TEST(Chain, QForConditionNumberFour) {
  EXPECT_NEAR(chain_q(4.0), (std::sqrt(3.0) - 1) / (std::sqrt(3.0) + 1), 1e-15);
  EXPECT_NEAR(chain_q(4.0), 0.2679, 1e-4);
  EXPECT_EQ(chain_q(1.0), 0.0);
  const double q = chain_q(4.0);
  const int dim = chain_dimension_for_tail(q, 1e-10);
  EXPECT_LT(std::pow(q, 2.0 * dim) / (1 - q * q), 1e-10);
  EXPECT_GE(std::pow(q, 2.0 * (dim - 1)) / (1 - q * q), 1e-10);
}

TEST(Chain, QuadraticNodeGradient) {
  const ChainInstance obj(5, 2, 4.0, 1.0, 6);
  std::mt19937_64 gen(3);
  const Vector x = random_vector(gen, obj.dim());
  for (int i = 2; i < 5; ++i) {
    for (int j = 0; j < 2; ++j) {
      Vector g = Vector::Zero(obj.dim());
      obj.add_component_gradient(i, j, x, 1.0, g);
      Vector expected = Vector::Zero(obj.dim());
      expected.segment(6 * j, 6) = x.segment(6 * j, 6) / 3.0;
      EXPECT_LT((g - expected).norm(), 1e-15);
    }
  }
  EXPECT_THROW(ChainInstance(2, 1, 4.0, 1.0, 5), InvalidArgument);
}

TEST(Chain, ConstantsAndFiniteDifferences) {
  const ChainInstance obj(6, 3, 4.0, 1.0, 7);
  const auto& info = obj.smoothness();
  EXPECT_TRUE(info.ordered());
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    const NodeVector x = random_node_vector(gen, 6, obj.dim());
    EXPECT_LT(finite_difference_check(obj, x, 1e-5, 1e-4).max_relative_error, 1e-6);
  }
  // Exact Hessians: each F_i is at most L-smooth; the average is mu-strongly convex.
  Matrix avg = Matrix::Zero(obj.dim(), obj.dim());
  for (int i = 0; i < 6; ++i) {
    Matrix hess(obj.dim(), obj.dim());
    for (int c = 0; c < obj.dim(); ++c) {
      hess.col(c) = local_gradient(obj, i, Vector::Unit(obj.dim(), c)) -
                    local_gradient(obj, i, Vector::Zero(obj.dim()));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hess);
    EXPECT_LE(solver.eigenvalues().maxCoeff(), info.L * (1 + 1e-12));
    avg += hess / 6;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(avg);
  EXPECT_GE(solver.eigenvalues().minCoeff(), info.mu * (1 - 1e-12));
}

TEST(Chain, ReferenceSolutionMatchesGeometricSeries) {
  const double q = chain_q(4.0);
  const int dim = 2 * chain_dimension_for_tail(q, 1e-10);
  const ChainInstance obj(5, 2, 4.0, 1.0, dim);
  const ReferenceSolution ref = reference_solution(obj);
  const Vector expected = obj.x_star();
  for (int j = 0; j < 2; ++j) {
    for (int a = 0; a < dim; ++a) {
      EXPECT_NEAR(ref.x[j * dim + a], std::pow(q, a + 1), 1e-6);
    }
  }
  EXPECT_LT((ref.x - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(LowerBound, Examples) {
  const auto unit = lower_bound_value(1.0, 100.0, 30.0, 4, 5.0, 5.0);
  ASSERT_TRUE(unit.t1.has_value());
  EXPECT_EQ(*unit.t1, 0.0);

  const auto base = lower_bound_value(4.0, 1.0, 100.0, 4, 0.0, 0.0);
  ASSERT_TRUE(base.t1.has_value());
  EXPECT_FALSE(base.t2.has_value());
  const double b = 1.0 - 2.0 / (std::sqrt(3.0) + 1.0);
  EXPECT_NEAR(*base.t1, b * b, 1e-15);
  EXPECT_NEAR(*base.t1, 0.0718, 1e-4);

  double previous = 1.0;
  for (double ns : {0.0, 10.0, 100.0, 1000.0, 1e5}) {
    const auto v = lower_bound_value(1.0, 50.0, 2.0, 5, 0.0, ns);
    ASSERT_TRUE(v.t2.has_value());
    EXPECT_LE(*v.t2, previous);
    previous = *v.t2;
  }
  EXPECT_LT(previous, 1e-10);

  EXPECT_THROW(lower_bound_value(2.0, 1.0, 10.0, 4, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(lower_bound_value(0.5, 100.0, 30.0, 4, 1.0, 1.0), InvalidArgument);
}

TEST(LowerBound, MonotoneInBudgets) {
  for (double nc = 0; nc < 10; ++nc) {
    for (double ns = 0; ns < 10; ++ns) {
      const double v = lower_bound_value(9.0, 40.0, 60.0, 4, nc, ns).value;
      EXPECT_LE(lower_bound_value(9.0, 40.0, 60.0, 4, nc + 1, ns).value, v);
      EXPECT_LE(lower_bound_value(9.0, 40.0, 60.0, 4, nc, ns + 1).value, v);
    }
  }
}

// grad of the role function (l_1 or l_2 of the unsplit chain) at x, scaled as F_i.
Vector role_gradient(const ZeroChainInstance& obj, int role, const Vector& x) {
  const Vector scaled = x / obj.scale();
  Vector g = Vector::Zero(obj.dim());
  for (int j = 1; j <= obj.dim(); ++j) {
    const bool odd_role = (j == 1) || (j % 2 == 1);
    if ((role == 1) == odd_role) {
      add_zero_chain_link_gradient(j, scaled, obj.amplitude() / obj.scale(), g);
    }
  }
  return g;
}

TEST(HardInstance, ThreeNodesThirdIsZero) {
  const HardInstance hard = nonconvex_hard_objective(3, 2, 1.0, 1.0, 3, 10);
  std::mt19937_64 gen(5);
  const Vector x = random_vector(gen, hard.objective->dim(), 3.0);
  EXPECT_EQ(hard.objective->role(2), 3);
  EXPECT_EQ(local_gradient(*hard.objective, 2, x).norm(), 0.0);
  EXPECT_EQ(hard.objective->local_value(2, x), 0.0);
}

TEST(HardInstance, DimensionScaleAndPreconditions) {
  const HardInstance hard = nonconvex_hard_objective(9, 4, 2.0, 0.5, 18, 40);
  // d = 2 + min(floor(4*18/9), floor(40/4)) = 10.
  EXPECT_EQ(hard.objective->dim(), 10);
  const double c = std::sqrt(3 * 152.0 * 0.5 / (2.0 * 12.0 * std::min(16.0 * 18 / 9, 4.0 * 40 / 4)));
  EXPECT_NEAR(hard.objective->scale(), c, 1e-14);
  EXPECT_EQ(hard.sequence.kind(), TopologyKind::kRotatingStar);
  EXPECT_THROW(nonconvex_hard_objective(9, 4, 1.0, 1.0, 2, 40), InvalidArgument);
  EXPECT_THROW(nonconvex_hard_objective(9, 4, 1.0, 1.0, 18, 3), InvalidArgument);
}

TEST(HardInstance, SplittingSumsToRoleFunction) {
  std::mt19937_64 gen(6);
  for (int n : {1, 2, 3, 5}) {
    const HardInstance hard = nonconvex_hard_objective(9, n, 1.0, 1.0, 30, 20 * n);
    const auto& obj = *hard.objective;
    for (int t = 0; t < 20; ++t) {
      const Vector x = obj.scale() * uniform_box(gen, obj.dim(), 3.0);
      for (int i = 0; i < 9; ++i) {
        const int role = obj.role(i);
        const Vector g = local_gradient(obj, i, x);
        if (role == 3) {
          EXPECT_EQ(g.norm(), 0.0);
        } else {
          EXPECT_LT((g - role_gradient(obj, role, x)).norm(), 1e-12 * (1 + g.norm()));
        }
      }
    }
  }
}

TEST(HardInstance, SmoothnessAndAverageSmoothness) {
  std::mt19937_64 gen(7);
  const int n = 4;
  const HardInstance hard = nonconvex_hard_objective(9, n, 1.0, 1.0, 30, 40);
  const auto& obj = *hard.objective;
  const double L = obj.smoothness().L;
  const double node_base = obj.amplitude() * kChainL0 / (obj.scale() * obj.scale());
  EXPECT_LE(node_base, L * (1 + 1e-12));
  for (int t = 0; t < 200; ++t) {
    const Vector x = obj.scale() * uniform_box(gen, obj.dim(), 2.0);
    const Vector y = x + obj.scale() * uniform_box(gen, obj.dim(), t % 2 ? 0.01 : 1.0);
    const double dist = (x - y).norm();
    for (int i : {0, 3}) {
      EXPECT_LE((local_gradient(obj, i, x) - local_gradient(obj, i, y)).norm(), L * dist);
      double avg = 0;
      for (int k = 0; k < n; ++k) {
        Vector diff = Vector::Zero(obj.dim());
        obj.add_component_gradient(i, k, x, 1.0, diff);
        obj.add_component_gradient(i, k, y, -1.0, diff);
        avg += diff.squaredNorm() / n;
      }
      EXPECT_LE(std::sqrt(avg), 1.01 * std::sqrt(n) * node_base * dist);
    }
  }
}

TEST(HardInstance, InitialGapAtMostDelta) {
  const double delta = 0.7;
  const HardInstance hard = nonconvex_hard_objective(9, 3, 2.0, delta, 20, 30);
  const auto& obj = *hard.objective;
  const Vector zero = Vector::Zero(obj.dim());
  const double f0 = average_value(obj, zero);
  std::mt19937_64 gen(8);
  for (double level : {1.0, 5.0, 50.0}) {
    const Vector far = obj.scale() * level * Vector::Ones(obj.dim());
    EXPECT_LE(f0 - average_value(obj, far), delta);
  }
  for (int t = 0; t < 200; ++t) {
    const Vector x = obj.scale() * uniform_box(gen, obj.dim(), 10.0);
    EXPECT_LE(f0 - average_value(obj, x), delta);
  }
}

TEST(HardInstance, RoleParityOfNewCoordinates) {
  std::mt19937_64 gen(9);
  const HardInstance hard = nonconvex_hard_objective(9, 3, 1.0, 1.0, 30, 30);
  const auto& obj = *hard.objective;
  const int d = obj.dim();
  for (int t = 0; t < 200; ++t) {
    Vector x = obj.scale() * uniform_box(gen, d, 3.0);
    x.tail(d - t % (d + 1)).setZero();
    const int p = prog(x);
    for (int i = 0; i < 9; ++i) {
      for (int k = 0; k < 3; ++k) {
        Vector g = Vector::Zero(d);
        obj.add_component_gradient(i, k, x, 1.0, g);
        const int role = obj.role(i);
        const int gain = role == 1 ? (p % 2 == 0) : (role == 2 ? (p % 2 == 1) : 0);
        EXPECT_LE(prog(g), role == 3 ? 0 : p + gain);
      }
    }
  }
}

TEST(ProgressAudit, ZeroIterations) {
  ProgressAuditor audit(9, 4);
  audit.record(0, 0, 0, NodeVector(9, 5));
  EXPECT_EQ(audit.global_progress(), 0);
  EXPECT_TRUE(audit.within_bound());
  EXPECT_EQ(progress_bound(9, 4, 18, 1000), 9);
  EXPECT_EQ(progress_bound(9, 4, 1000, 7), 2);
}

TEST(ProgressAudit, GtPageWithinBoundAfterEighteenCommunications) {
  const HardInstance hard = nonconvex_hard_objective(9, 4, 1.0, 1.0, 18, 400);
  ProgressAuditor audit(9, 4);
  RunConfig config;
  config.method = Method::kGtPage;
  const auto& info = hard.objective->smoothness();
  config.page = gt_page_params(info.L, info.Lhat, measure_chi(hard.sequence, 100, 0), 4);
  config.page = with_step_size(config.page, 0.5 / info.L);
  config.budgets.max_communications = 18;
  config.seed = 3;
  config.observer = [&](std::int64_t it, std::int64_t comms, std::int64_t calls,
                        const NodeVector& x) { audit.record(it, comms, calls, x); };
  run(*hard.objective, hard.sequence, config);
  EXPECT_LE(audit.global_progress(), 9);
  EXPECT_TRUE(audit.within_bound());
}

}  // namespace
}  // namespace decopt
