#include <algorithm>
#include <cmath>
#include <limits>

#include "decopt/errors.hpp"
#include "decopt/optimizers.hpp"

namespace decopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::int64_t max_calls(const std::vector<std::int64_t>& calls) {
  return *std::max_element(calls.begin(), calls.end());
}

double stacked_dist_sq(const NodeVector& x, const Vector& x_star) {
  return (x.mat().colwise() - x_star).squaredNorm();
}

template <class State, class Step>
RunTrace drive(const FiniteSumObjective& obj, const RunConfig& cfg, State& st, int rounds,
               Step step) {
  if (cfg.cadence < 1) throw InvalidArgument("metric cadence must be positive");
  if (cfg.budgets.max_iterations < 0 || cfg.budgets.max_communications < 0 ||
      cfg.budgets.max_oracle_calls < 0) {
    throw InvalidArgument("budgets must be nonnegative");
  }
  if (cfg.stop_dist_sq && !cfg.x_star) throw InvalidArgument("stop_dist_sq needs x_star");

  RunTrace trace;
  auto emit = [&](const NodeVector& x) {
    TraceRecord r = measure(obj, x, cfg.x_star);
    r.iteration = st.step;
    r.communications = st.communications;
    r.oracle_calls = max_calls(st.oracle_calls);
    trace.records.push_back(r);
  };
  emit(st.x);
  if (cfg.observer) cfg.observer(st.step, st.communications, max_calls(st.oracle_calls), st.x);

  const double limit_sq = cfg.divergence_limit * cfg.divergence_limit;
  while (st.step < cfg.budgets.max_iterations &&
         st.communications <= cfg.budgets.max_communications - rounds &&
         max_calls(st.oracle_calls) < cfg.budgets.max_oracle_calls) {
    if (cfg.stop_dist_sq && stacked_dist_sq(st.x, *cfg.x_star) <= *cfg.stop_dist_sq) break;
    NodeVector last_good = st.x;
    try {
      step(st);
      if (!(st.x.squared_norm() <= limit_sq)) {
        throw DivergenceError(st.step, "iterate norm exceeded the divergence guard");
      }
    } catch (const DivergenceError& e) {
      trace.final_iterate = std::move(last_good);
      throw RunError(e.what(), e.step(), std::move(trace));
    }
    if (cfg.observer) {
      cfg.observer(st.step, st.communications, max_calls(st.oracle_calls), st.x);
    }
    if (st.step % cfg.cadence == 0) emit(st.x);
  }
  if (trace.records.back().iteration != st.step) emit(st.x);
  trace.final_iterate = st.x;
  return trace;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kAdomVr:
      return "adom_vr";
    case Method::kGtPage:
      return "gt_page";
    case Method::kGtBaseline:
      return "gt_baseline";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "adom_vr") return Method::kAdomVr;
  if (name == "gt_page") return Method::kGtPage;
  if (name == "gt_baseline") return Method::kGtBaseline;
  throw InvalidArgument("unknown method '" + name + "'; valid: adom_vr, gt_page, gt_baseline");
}

TraceRecord measure(const FiniteSumObjective& obj, const NodeVector& x,
                    const std::optional<Vector>& x_star) {
  TraceRecord r;
  const Vector mean = x.mean();
  r.grad_norm_sq = average_gradient(obj, mean).squaredNorm();
  r.value = average_value(obj, mean);
  r.consensus_error = x.consensus_error();
  if (x_star) {
    r.dist_sq = stacked_dist_sq(x, *x_star);
    r.mean_dist_sq = (mean - *x_star).squaredNorm();
  } else {
    r.dist_sq = kNaN;
    r.mean_dist_sq = kNaN;
  }
  return r;
}

RunTrace run(const FiniteSumObjective& obj, const GraphSequence& seq, const RunConfig& cfg) {
  if (seq.nodes() != obj.nodes()) {
    throw InvalidArgument("graph sequence and objective disagree on m");
  }
  const Vector x0 = cfg.x0.value_or(Vector::Zero(obj.dim()));
  if (cfg.x_star && cfg.x_star->size() != obj.dim()) {
    throw InvalidArgument("x_star has the wrong dimension");
  }
  switch (cfg.method) {
    case Method::kAdomVr: {
      AdomVrState st = adom_vr_init(obj, x0);
      return drive(obj, cfg, st, cfg.adom_options.mixing.rounds, [&](AdomVrState& s) {
        adom_vr_step(s, cfg.adom, obj, seq, cfg.seed, cfg.adom_options);
      });
    }
    case Method::kGtPage: {
      GtPageState st = gt_page_init(obj, x0);
      return drive(obj, cfg, st, cfg.page.mixing.rounds,
                   [&](GtPageState& s) { gt_page_step(s, cfg.page, obj, seq, cfg.seed); });
    }
    case Method::kGtBaseline: {
      GradientTrackingState st = gradient_tracking_init(obj, x0);
      return drive(obj, cfg, st, cfg.baseline_mixing.rounds, [&](GradientTrackingState& s) {
        gradient_tracking_step(s, cfg.baseline_eta, obj, seq, cfg.baseline_mixing);
      });
    }
  }
  throw InvalidArgument("unknown method");
}

}  // namespace decopt
