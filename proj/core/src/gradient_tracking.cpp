#include "decopt/errors.hpp"
#include "decopt/optimizers.hpp"

namespace decopt {

GradientTrackingState gradient_tracking_init(const FiniteSumObjective& obj, const Vector& x0) {
  if (x0.size() != obj.dim()) throw InvalidArgument("initial point has the wrong dimension");
  GradientTrackingState s;
  s.x = NodeVector::replicate(obj.nodes(), x0);
  s.gradient = full_gradient(obj, s.x);
  s.y = s.gradient;
  s.oracle_calls.assign(obj.nodes(), obj.components());
  return s;
}

void gradient_tracking_step(GradientTrackingState& s, double eta, const FiniteSumObjective& obj,
                            const GraphSequence& seq, const MixingSpec& mixing) {
  if (seq.nodes() != obj.nodes()) {
    throw InvalidArgument("graph sequence and objective disagree on m");
  }
  const IterationGossip gossip(seq, mixing, s.step);
  NodeVector x_next = gossip.mix(s.x) - eta * s.y;
  NodeVector g_next = full_gradient(obj, x_next);
  for (auto& calls : s.oracle_calls) calls += obj.components();
  NodeVector y_next = gossip.mix(s.y) + g_next - s.gradient;
  s.x = std::move(x_next);
  s.y = std::move(y_next);
  s.gradient = std::move(g_next);
  s.communications += gossip.rounds();
  ++s.step;
  if (!s.x.all_finite() || !s.y.all_finite()) {
    throw DivergenceError(s.step, "non-finite value in a gradient-tracking buffer");
  }
}

}  // namespace decopt
