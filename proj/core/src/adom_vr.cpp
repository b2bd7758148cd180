#include <algorithm>
#include <cmath>
#include <sstream>

#include "decopt/errors.hpp"
#include "decopt/optimizers.hpp"
#include "decopt/rng.hpp"

namespace decopt {

namespace {

constexpr double kRelSlack = 1e-12;

void refresh_snapshot(AdomVrState& state, const FiniteSumObjective& obj, int node) {
  const int n = obj.components();
  Matrix& cache = state.snapshot_components[node];
  cache.setZero(obj.dim(), n);
  const Vector omega = state.omega.block(node);
  for (int j = 0; j < n; ++j) {
    auto col = cache.col(j);
    obj.add_component_gradient(node, j, omega, 1.0, col);
  }
  state.snapshot_gradient.block(node) = cache.rowwise().mean();
  state.oracle_calls[node] += n;
  state.snapshot_stale[node] = 0;
}

void check_finite(const AdomVrState& s) {
  const NodeVector* buffers[] = {&s.x, &s.x_f, &s.omega, &s.y, &s.y_f, &s.z, &s.z_f, &s.momentum};
  for (const NodeVector* b : buffers) {
    if (!b->all_finite()) {
      throw DivergenceError(s.step, "non-finite value in an ADOM+VR buffer");
    }
  }
}

}  // namespace

AdomVrParams adom_vr_params(double mu, double L, double Lbar, double chi, int n, int b) {
  if (!(mu > 0.0) || !(mu <= L * (1 + kRelSlack))) throw InvalidArgument("need 0 < mu <= L");
  if (!(L <= Lbar * (1 + kRelSlack)) || !(Lbar <= n * L * (1 + kRelSlack))) {
    throw InvalidArgument("need L <= Lbar <= nL");
  }
  if (!(chi >= 1.0)) throw InvalidArgument("chi must be at least 1");
  if (n < 1 || b < 1) throw InvalidArgument("n and b must be positive");
  if (b < Lbar / L * (1 - kRelSlack)) {
    std::ostringstream msg;
    msg << "batch size b = " << b << " violates the requirement b >= Lbar/L = " << Lbar / L;
    throw InvalidArgument(msg.str());
  }
  AdomVrParams p;
  p.b = b;
  p.n = n;
  p.chi = chi;
  p.mu = mu;
  p.L = L;
  p.Lbar = Lbar;
  const double nn = n;
  const double bb = b;
  p.tau2 = std::min(0.5, std::max(1.0, std::sqrt(nn) / bb) * std::sqrt(mu / L));
  p.tau0 = Lbar / (2.0 * L * bb);
  p.tau1 = (1.0 - p.tau0) / (1.0 / p.tau2 + 0.5);
  p.eta = 1.0 / (L * (p.tau2 + 2.0 * p.tau1 / (1.0 - p.tau1)));
  p.alpha = mu / 2.0;
  p.nu = mu / 2.0;
  p.beta = 1.0 / (2.0 * L);
  p.sigma2 = std::sqrt(mu) / (16.0 * chi * std::sqrt(L));
  p.sigma1 = 1.0 / (1.0 / p.sigma2 + 0.5);
  p.delta = 1.0 / (17.0 * L);
  p.gamma = p.nu / (14.0 * p.sigma2 * chi * chi);
  p.theta = p.nu / (4.0 * p.sigma2);
  p.zeta = 0.5;
  p.lambda = nn / bb * (0.5 + Lbar / (L * bb * p.tau1));
  p.p1 = 1.0 / (2.0 * p.lambda);
  p.p2 = Lbar / (p.lambda * L * bb * p.tau1);
  if (p.p1 + p.p2 > 1.0 + kRelSlack) {
    std::ostringstream msg;
    msg << "snapshot probabilities p1 + p2 = " << p.p1 + p.p2 << " exceed 1 (b > n?)";
    throw InvalidArgument(msg.str());
  }
  return p;
}

int adom_vr_batch_size(double mu, double L, double Lbar, int n) {
  if (!(L > 0.0) || n < 1) throw InvalidArgument("need L > 0 and n >= 1");
  const double target = std::max(std::sqrt(n * Lbar / L), n * std::sqrt(mu / L));
  int b = static_cast<int>(std::ceil(target * (1 - kRelSlack)));
  b = std::max(b, static_cast<int>(std::ceil(Lbar / L * (1 - kRelSlack))));
  return std::clamp(b, 1, n);
}

double adom_vr_iteration_bound(const AdomVrParams& p, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("need 0 < epsilon < 1");
  const double root_kappa = std::sqrt(p.L / p.mu);
  const double nn = p.n;
  const double bb = p.b;
  const double rate = std::max({nn / bb, std::sqrt(nn) / bb * root_kappa,
                                nn * p.Lbar / (bb * bb * p.L) * root_kappa, p.chi * root_kappa});
  return 32.0 * rate * std::log(1.0 / epsilon);
}

ImportanceSampler::ImportanceSampler(const SmoothnessInfo& info) {
  const int m = static_cast<int>(info.L_ij.rows());
  const int n = static_cast<int>(info.L_ij.cols());
  prob_.resize(n, m);
  cdf_.resize(n, m);
  last_positive_.assign(m, n - 1);
  for (int i = 0; i < m; ++i) {
    const double total = info.L_ij.row(i).sum();
    for (int j = 0; j < n; ++j) {
      prob_(j, i) = total > 0.0 ? info.L_ij(i, j) / total : 1.0 / n;
    }
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += prob_(j, i);
      cdf_(j, i) = acc;
      if (prob_(j, i) > 0.0) last_positive_[i] = j;
    }
  }
}

int ImportanceSampler::draw(int node, std::mt19937_64& gen) const {
  const double u = uniform01(gen);
  const auto col = cdf_.col(node);
  const double* begin = col.data();
  const double* end = begin + col.size();
  const int j = static_cast<int>(std::upper_bound(begin, end, u) - begin);
  return std::min(j, last_positive_[node]);
}

AdomVrState adom_vr_init(const FiniteSumObjective& obj, const Vector& x0) {
  const int m = obj.nodes();
  const int d = obj.dim();
  if (x0.size() != d) throw InvalidArgument("initial point has the wrong dimension");
  AdomVrState s;
  s.x = NodeVector::replicate(m, x0);
  s.x_f = s.x;
  s.omega = s.x;
  s.y = NodeVector(m, d);
  s.y_f = s.y;
  s.z = s.y;
  s.z_f = s.y;
  s.momentum = s.y;
  s.oracle_calls.assign(m, 0);
  s.snapshot_components.assign(m, Matrix());
  s.snapshot_gradient = NodeVector(m, d);
  s.snapshot_stale.assign(m, 1);
  for (int i = 0; i < m; ++i) refresh_snapshot(s, obj, i);
  return s;
}

Vector adom_vr_estimator(const FiniteSumObjective& obj, const AdomVrState& state,
                         const ImportanceSampler& sampler, int node, VectorCRef x_g,
                         std::span<const int> batch) {
  Vector est = state.snapshot_gradient.block(node);
  if (batch.empty()) return est;
  const Matrix& cache = state.snapshot_components[node];
  const double n = obj.components();
  const double b = static_cast<double>(batch.size());
  for (int j : batch) {
    const double w = 1.0 / (b * n * sampler.probability(node, j));
    obj.add_component_gradient(node, j, x_g, w, est);
    est -= w * cache.col(j);
  }
  return est;
}

void adom_vr_step(AdomVrState& s, const AdomVrParams& p, const FiniteSumObjective& obj,
                  const GraphSequence& seq, std::uint64_t seed, const AdomVrOptions& options) {
  const int m = obj.nodes();
  const std::int64_t k = s.step;
  const auto ku = static_cast<std::uint64_t>(k);
  if (seq.nodes() != m) throw InvalidArgument("graph sequence and objective disagree on m");
  const IterationGossip gossip(seq, options.mixing, k);
  const ImportanceSampler sampler(obj.smoothness());

  for (int i = 0; i < m; ++i) {
    if (s.snapshot_stale[i]) refresh_snapshot(s, obj, i);
  }

  const NodeVector x_g =
      p.tau1 * s.x + p.tau0 * s.omega + (1.0 - p.tau1 - p.tau0) * s.x_f;

  NodeVector estimator(m, obj.dim());
  std::vector<int> batch(p.b);
  for (int i = 0; i < m; ++i) {
    auto gen = substream(seed, ku, static_cast<std::uint64_t>(i), StreamPurpose::kBatch);
    for (int& j : batch) j = sampler.draw(i, gen);
    estimator.block(i) = adom_vr_estimator(obj, s, sampler, i, x_g.block(i), batch);
    s.oracle_calls[i] += p.b;
  }

  const NodeVector y_g = p.sigma1 * s.y + (1.0 - p.sigma1) * s.y_f;
  const NodeVector z_g = p.sigma1 * s.z + (1.0 - p.sigma1) * s.z_f;
  const NodeVector yz = y_g + z_g;

  // Lines for x^{k+1} and y^{k+1} reference each other; solve the 2x2 system
  //   (1 + eta alpha) x' - eta y' = r_x,  theta x' + (1 + theta beta) y' = r_y.
  const NodeVector g = estimator - p.nu * x_g;
  const NodeVector r_x = s.x + (p.eta * p.alpha) * x_g - p.eta * g;
  const NodeVector r_y = s.y + (p.theta * p.beta) * g - (p.theta / p.nu) * yz;
  const double a = 1.0 + p.eta * p.alpha;
  const double c = 1.0 + p.theta * p.beta;
  const double det = a * c + p.eta * p.theta;
  NodeVector x_next = (1.0 / det) * (c * r_x + p.eta * r_y);
  NodeVector y_next = (1.0 / det) * (a * r_y - p.theta * r_x);

  NodeVector x_f_next = x_g + p.tau2 * (x_next - s.x);

  for (int i = 0; i < m; ++i) {
    auto gen = substream(seed, ku, static_cast<std::uint64_t>(i), StreamPurpose::kSnapshotCoin);
    const double u = uniform01(gen);
    bool reset = false;
    if (u < p.p1) {
      s.omega.mat().col(i) = s.x_f.mat().col(i);
      reset = true;
    } else if (u < p.p1 + p.p2) {
      s.omega.block(i) = x_g.block(i);
      reset = true;
    }
    if (reset) {
      ++s.snapshot_resets;
      s.snapshot_stale[i] = 1;
      if (options.refresh == SnapshotRefresh::kEager) refresh_snapshot(s, obj, i);
    }
  }

  NodeVector y_f_next = y_g + p.sigma2 * (y_next - s.y);

  const NodeVector shared = (p.gamma / p.nu) * yz + s.momentum;
  const NodeVector w_shared = gossip.apply(shared);
  NodeVector z_next = s.z + (p.gamma * p.delta) * (z_g - s.z) - w_shared;
  NodeVector momentum_next = shared - w_shared;
  NodeVector z_f_next = z_g - p.zeta * gossip.apply(yz);

  s.x = std::move(x_next);
  s.x_f = std::move(x_f_next);
  s.y = std::move(y_next);
  s.y_f = std::move(y_f_next);
  s.z = std::move(z_next);
  s.z_f = std::move(z_f_next);
  s.momentum = std::move(momentum_next);
  s.communications += gossip.rounds();
  ++s.step;
  check_finite(s);
}

}  // namespace decopt
