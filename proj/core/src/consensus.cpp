#include <cmath>

#include "decopt/errors.hpp"
#include "decopt/optimizers.hpp"

namespace decopt {

std::string to_string(MixingScheme scheme) {
  switch (scheme) {
    case MixingScheme::kPlain:
      return "plain";
    case MixingScheme::kMultiStage:
      return "multi_stage";
    case MixingScheme::kChebyshev:
      return "chebyshev";
  }
  return "unknown";
}

IterationGossip::IterationGossip(const GraphSequence& seq, const MixingSpec& spec,
                                 std::int64_t iteration)
    : seq_(seq), spec_(spec), first_step_(0) {
  if (spec.rounds < 1) throw InvalidArgument("mixing needs at least one round per iteration");
  if (spec.scheme == MixingScheme::kPlain && spec.rounds != 1) {
    throw InvalidArgument("plain mixing uses exactly one round per iteration");
  }
  if (spec.scheme == MixingScheme::kChebyshev && seq.kind() != TopologyKind::kStatic) {
    throw InvalidArgument("Chebyshev mixing requires a static graph");
  }
  first_step_ = spec.scheme == MixingScheme::kChebyshev ? 0 : iteration * spec.rounds;
}

NodeVector IterationGossip::apply(const NodeVector& x) const {
  switch (spec_.scheme) {
    case MixingScheme::kPlain:
      return apply_mixing(seq_.gossip(first_step_), x);
    case MixingScheme::kMultiStage:
      return multi_stage_mix(seq_, first_step_, spec_.rounds, x);
    case MixingScheme::kChebyshev:
      return chebyshev_mix(seq_, spec_.rounds, x);
  }
  throw InvalidArgument("unknown mixing scheme");
}

NodeVector IterationGossip::mix(const NodeVector& x) const {
  if (spec_.scheme == MixingScheme::kMultiStage) {
    Matrix residual = x.mat();
    for (int q = 0; q < spec_.rounds; ++q) {
      residual -= residual * seq_.gossip(first_step_ + q).entries;
    }
    return NodeVector(std::move(residual));
  }
  return x - apply(x);
}

double effective_chi(const MixingSpec& spec, double chi) {
  if (!(chi >= 1.0)) throw InvalidArgument("chi must be at least 1");
  switch (spec.scheme) {
    case MixingScheme::kPlain:
      return chi;
    case MixingScheme::kMultiStage:
      return 1.0 / (1.0 - std::pow(1.0 - 1.0 / chi, spec.rounds));
    case MixingScheme::kChebyshev:
      return 1.0 / (1.0 - chebyshev_contraction(chi, spec.rounds));
  }
  throw InvalidArgument("unknown mixing scheme");
}

double effective_rho(const MixingSpec& spec, double chi) {
  if (!(chi >= 1.0)) throw InvalidArgument("chi must be at least 1");
  switch (spec.scheme) {
    case MixingScheme::kPlain:
      return 1.0 / chi;
    case MixingScheme::kMultiStage:
      return 1.0 - std::exp(-spec.rounds / chi);
    case MixingScheme::kChebyshev: {
      const double c = chebyshev_contraction(chi, spec.rounds);
      return 1.0 - c * c;
    }
  }
  throw InvalidArgument("unknown mixing scheme");
}

}  // namespace decopt
