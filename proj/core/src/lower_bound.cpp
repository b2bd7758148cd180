#include <algorithm>
#include <cmath>

#include "decopt/errors.hpp"
#include "decopt/hard_instances.hpp"

namespace decopt {

LowerBoundValue lower_bound_value(double kappa_b, double kappa_s, double chi, int n,
                                  double comm_rounds, double local_steps) {
  if (!(kappa_b >= 1.0)) throw InvalidArgument("kappa_b must be at least 1");
  if (n < 1) throw InvalidArgument("n must be positive");
  if (comm_rounds < 0.0 || local_steps < 0.0) throw InvalidArgument("budgets must be nonnegative");
  LowerBoundValue out;
  if (chi > 24.0) {
    const double base = 1.0 - 2.0 / (std::sqrt(2.0 * kappa_b / 3.0 + 1.0 / 3.0) + 1.0);
    out.t1 = std::pow(base, 2.0 + 16.0 * comm_rounds / (chi - 24.0));
  }
  const double nn = n;
  if (kappa_s >= nn) {
    const double base =
        1.0 - 2.0 * nn / (std::sqrt(nn) * std::sqrt(2.0 * kappa_s / 3.0 + nn / 3.0) + nn);
    out.t2 = std::pow(std::max(base, 0.0), 4.0 * local_steps / nn);
  }
  if (!out.t1 && !out.t2) {
    throw InvalidArgument("lower bound inapplicable: need chi > 24 or kappa_s >= n");
  }
  out.value = std::max(out.t1.value_or(0.0), out.t2.value_or(0.0));
  return out;
}

}  // namespace decopt
