#include <algorithm>
#include <cmath>
#include <sstream>

#include "decopt/errors.hpp"
#include "decopt/optimizers.hpp"
#include "decopt/rng.hpp"

namespace decopt {

GtPageParams gt_page_params(double L, double Lhat, double chi, int n, std::optional<int> b,
                            std::optional<double> p, std::optional<MixingSpec> mixing) {
  if (!(L > 0.0) || n < 1) throw InvalidArgument("need L > 0 and n >= 1");
  if (!(Lhat >= L * (1 - 1e-12)) || !(Lhat <= std::sqrt(static_cast<double>(n)) * L * (1 + 1e-12))) {
    throw InvalidArgument("need L <= Lhat <= sqrt(n) L");
  }
  if (!(chi >= 1.0)) throw InvalidArgument("chi must be at least 1");
  GtPageParams out;
  out.n = n;
  out.L = L;
  out.Lhat = Lhat;
  out.chi = chi;
  if (b) {
    if (*b > n) throw InvalidArgument("batch size exceeds n");
    if (*b < 1) throw InvalidArgument("batch size must be positive");
    out.b = *b;
  } else {
    const double target = std::sqrt(static_cast<double>(n)) * Lhat / L;
    out.b = std::clamp(static_cast<int>(std::ceil(target * (1 - 1e-12))), 1, n);
  }
  out.p = p.value_or(static_cast<double>(out.b) / (n + out.b));
  if (!(out.p > 0.0 && out.p <= 1.0)) throw InvalidArgument("restart probability must be in (0, 1]");
  out.mixing = mixing.value_or(
      MixingSpec{MixingScheme::kMultiStage, static_cast<int>(std::ceil(chi * (1 - 1e-12)))});
  out.rho = std::min(1.0, effective_rho(out.mixing, chi));

  const double ct = out.c_tilde;
  const double rho = out.rho;
  const double s2 = (1.0 - out.p) * Lhat * Lhat / (out.b * out.p * L * L);
  const double s = std::sqrt(s2);
  out.bound2 = 2.0 / (L * ((1.0 + 2.0 / ct) + std::sqrt(2.0 + 8.0 / (ct * ct) + 16.0 * s2)));
  out.bound3 = (2.0 * rho * rho + 2.0 * ct * (rho * rho + rho) * s) / (L * (1.0 + 2.0 * ct * s2));
  out.bound4 = rho * rho * rho /
               (18.0 * ct * L *
                (12.0 + 1.0 / ct + 12.0 * ct * s +
                 std::sqrt(288.0 + 2.0 / (ct * ct) + 288.0 * ct * ct * s2 + 2.0 * s2 / (9.0 * ct))));
  out.eta = std::min({out.bound2, out.bound3, out.bound4, rho / L});
  out.eta_from_theory = true;
  return out;
}

GtPageParams with_step_size(GtPageParams params, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("step size must be positive");
  params.eta = eta;
  params.eta_from_theory = false;
  return params;
}

Vector gt_page_estimator(const FiniteSumObjective& obj, int node, VectorCRef y, VectorCRef x_next,
                         VectorCRef x, std::span<const int> batch) {
  Vector out = y;
  if (batch.empty()) return out;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (int j : batch) obj.add_component_difference(node, j, x_next, x, w, out);
  return out;
}

GtPageState gt_page_init(const FiniteSumObjective& obj, const Vector& x0) {
  const int m = obj.nodes();
  if (x0.size() != obj.dim()) throw InvalidArgument("initial point has the wrong dimension");
  GtPageState s;
  s.x = NodeVector::replicate(m, x0);
  s.y = full_gradient(obj, s.x);
  s.v = NodeVector::replicate(m, s.y.mean());
  s.oracle_calls.assign(m, obj.components());
  s.last_full_gradient = true;
  return s;
}

void gt_page_step(GtPageState& s, const GtPageParams& p, const FiniteSumObjective& obj,
                  const GraphSequence& seq, std::uint64_t seed) {
  const int m = obj.nodes();
  const int n = obj.components();
  const std::int64_t k = s.step;
  const auto ku = static_cast<std::uint64_t>(k);
  if (seq.nodes() != m) throw InvalidArgument("graph sequence and objective disagree on m");
  const IterationGossip gossip(seq, p.mixing, k);

  NodeVector x_next = gossip.mix(s.x) - p.eta * s.v;

  std::vector<char> full(m, 0);
  if (p.per_node_coins) {
    for (int i = 0; i < m; ++i) {
      auto gen = substream(seed, ku, static_cast<std::uint64_t>(i), StreamPurpose::kRestartCoin);
      full[i] = uniform01(gen) < p.p;
    }
  } else {
    auto gen = substream(seed, ku, kSharedNode, StreamPurpose::kRestartCoin);
    std::fill(full.begin(), full.end(), uniform01(gen) < p.p);
  }

  NodeVector y_next(m, obj.dim());
  std::vector<int> batch(p.b);
  for (int i = 0; i < m; ++i) {
    if (full[i]) {
      auto out = y_next.block(i);
      obj.add_local_gradient(i, x_next.block(i), 1.0, out);
      s.oracle_calls[i] += n;
    } else {
      auto gen = substream(seed, ku, static_cast<std::uint64_t>(i), StreamPurpose::kBatch);
      for (int& j : batch) j = std::min(static_cast<int>(uniform01(gen) * n), n - 1);
      y_next.mat().col(i) =
          gt_page_estimator(obj, i, s.y.block(i), x_next.block(i), s.x.block(i), batch);
      s.oracle_calls[i] += p.b;
    }
  }

  NodeVector v_next = gossip.mix(s.v) + y_next - s.y;

  s.x = std::move(x_next);
  s.v = std::move(v_next);
  s.y = std::move(y_next);
  s.last_full_gradient = std::all_of(full.begin(), full.end(), [](char f) { return f != 0; });
  s.communications += gossip.rounds();
  ++s.step;
  if (!s.x.all_finite() || !s.y.all_finite() || !s.v.all_finite()) {
    throw DivergenceError(s.step, "non-finite value in a GT-PAGE buffer");
  }
}

}  // namespace decopt
