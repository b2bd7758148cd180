#include <algorithm>
#include <cmath>
#include <string>

#include "decopt/errors.hpp"
#include "decopt/harness.hpp"

namespace decopt {

ReferenceSolution reference_solution(const FiniteSumObjective& obj, double tolerance,
                                     std::int64_t max_iterations) {
  const auto& info = obj.smoothness();
  if (!(info.mu > 0.0)) {
    throw InvalidArgument("reference solution needs a strongly convex objective (mu > 0)");
  }
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  const double step = 1.0 / info.L;

  Vector x = Vector::Zero(obj.dim());
  Vector grad_x = average_gradient(obj, x);
  const double threshold = tolerance * std::max(1.0, grad_x.norm());

  ReferenceSolution result;
  Vector y = x;
  Vector grad_y = grad_x;
  double t = 1.0;
  for (std::int64_t k = 0; k < max_iterations; ++k) {
    if (grad_x.norm() <= threshold) {
      result.x = x;
      result.value = average_value(obj, x);
      result.grad_norm = grad_x.norm();
      result.iterations = k;
      return result;
    }
    Vector x_next = y - step * grad_y;
    const Vector direction = x_next - x;
    grad_x = average_gradient(obj, x_next);
    // Gradient-based adaptive restart.
    if (grad_y.dot(direction) > 0.0) {
      t = 1.0;
      y = x_next;
      grad_y = grad_x;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_next + ((t - 1.0) / t_next) * direction;
      t = t_next;
      grad_y = average_gradient(obj, y);
    }
    x = std::move(x_next);
  }
  throw Error("reference solution did not reach tolerance within " +
              std::to_string(max_iterations) + " iterations (gradient norm " +
              std::to_string(grad_x.norm()) + ")");
}

}  // namespace decopt
