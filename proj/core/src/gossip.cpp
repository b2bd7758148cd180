#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "decopt/errors.hpp"
#include "decopt/network.hpp"

namespace decopt {

LaplacianSpectrum laplacian_spectrum(const WeightedGraph& graph) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(graph.laplacian(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("Laplacian eigensolver did not converge");
  const Vector& ev = solver.eigenvalues();
  LaplacianSpectrum out;
  out.lambda_max = ev(ev.size() - 1);
  const double cutoff = 1e-8 * out.lambda_max;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) {
      if (out.lambda_min_positive == 0.0) out.lambda_min_positive = ev(i);
    } else {
      ++out.zero_eigenvalues;
    }
  }
  return out;
}

GossipMatrix GossipMatrix::trivial(int nodes) {
  GossipMatrix w;
  w.entries = Matrix::Zero(nodes, nodes);
  w.chi = 1.0;
  return w;
}

GossipMatrix gossip_from_laplacian(const WeightedGraph& graph) {
  if (graph.nodes() < 2) throw InvalidArgument("gossip matrix needs at least two nodes");
  if (!graph.is_connected()) {
    throw DisconnectedGraph("graph with " + std::to_string(graph.nodes()) +
                            " nodes is disconnected; chi would be infinite");
  }
  const auto spectrum = laplacian_spectrum(graph);
  if (spectrum.zero_eigenvalues != 1) {
    throw DisconnectedGraph("Laplacian has " + std::to_string(spectrum.zero_eigenvalues) +
                            " zero eigenvalues");
  }
  GossipMatrix w;
  w.entries = graph.laplacian() / spectrum.lambda_max;
  w.lambda_max = spectrum.lambda_max;
  w.lambda_min_positive = spectrum.lambda_min_positive;
  w.chi = spectrum.lambda_max / spectrum.lambda_min_positive;
  return w;
}

NodeVector apply_mixing(const GossipMatrix& w, const NodeVector& x) {
  if (w.nodes() != x.nodes()) {
    throw InvalidArgument("gossip matrix is " + std::to_string(w.nodes()) +
                          "x" + std::to_string(w.nodes()) + " but NodeVector has " +
                          std::to_string(x.nodes()) + " blocks");
  }
  // W is symmetric: (W kron I_d) x corresponds to X W for X = [x_1 ... x_m].
  return NodeVector(Matrix(x.mat() * w.entries));
}

double zero_mean_contraction(const GossipMatrix& w) {
  const int m = w.nodes();
  if (m < 2) return 0.0;
  const Matrix centering = Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / m);
  const Matrix op = centering * (Matrix::Identity(m, m) - w.entries) * centering;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double chebyshev_contraction(double chi, int degree) {
  if (degree < 1) throw InvalidArgument("Chebyshev degree must be at least 1");
  if (chi <= 1.0 + 1e-12) return 0.0;
  const double a = 1.0 / chi;
  const double c0 = (1.0 + a) / (1.0 - a);
  return 1.0 / std::cosh(degree * std::acosh(c0));
}

NodeVector chebyshev_mix(const GossipMatrix& w, int degree, const NodeVector& x) {
  if (degree < 1) throw InvalidArgument("Chebyshev degree must be at least 1");
  if (w.nodes() != x.nodes()) throw InvalidArgument("dimension mismatch in chebyshev_mix");
  const Matrix& X = x.mat();
  if (w.chi <= 1.0 + 1e-12) {
    // Every zero-mean eigenvalue equals 1, so (I - W)^k already vanishes there.
    Matrix r = X;
    for (int j = 0; j < degree; ++j) r -= r * w.entries;
    return NodeVector(Matrix(X - r));
  }
  // Residual polynomial Q_k(W) = T_k(t(W)) / T_k(c0) with
  // t(l) = (1 + a - 2 l) / (1 - a) on the spectrum interval [a, 1].
  const double a = 1.0 / w.chi;
  const double c0 = (1.0 + a) / (1.0 - a);
  auto t_apply = [&](const Matrix& v) -> Matrix {
    return ((1.0 + a) * v - 2.0 * (v * w.entries)) / (1.0 - a);
  };
  Matrix r_prev = X;
  Matrix r_cur = t_apply(X) / c0;
  double ratio = 1.0 / c0;  // T_{j-1}(c0) / T_j(c0)
  for (int j = 1; j < degree; ++j) {
    const double next_ratio = 1.0 / (2.0 * c0 - ratio);
    Matrix r_next = next_ratio * (2.0 * t_apply(r_cur) - ratio * r_prev);
    r_prev = std::move(r_cur);
    r_cur = std::move(r_next);
    ratio = next_ratio;
  }
  return NodeVector(Matrix(X - r_cur));
}

NodeVector chebyshev_mix(const GraphSequence& seq, int degree, const NodeVector& x) {
  if (seq.kind() != TopologyKind::kStatic || seq.period() != 1) {
    throw InvalidArgument("Chebyshev acceleration is valid for static graphs only, got " +
                          to_string(seq.kind()));
  }
  return chebyshev_mix(seq.gossip(0), degree, x);
}

NodeVector multi_stage_mix(const GraphSequence& seq, std::int64_t start_step, int stages,
                           const NodeVector& x) {
  if (stages < 1) throw InvalidArgument("multi-stage consensus needs T >= 1");
  if (seq.nodes() != x.nodes()) throw InvalidArgument("dimension mismatch in multi_stage_mix");
  Matrix residual = x.mat();
  for (int q = 0; q < stages; ++q) {
    residual -= residual * seq.gossip(start_step + q).entries;
  }
  return NodeVector(Matrix(x.mat() - residual));
}

}  // namespace decopt
