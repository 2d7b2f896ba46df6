#include "cagekit/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cagekit/random.hpp"

namespace cagekit::estimators {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

planners::RrtResult run_real_backend(const planners::PlanningProblem& problem, double e_sublevel,
                                     const planners::PlannerParams& params) {
  return planners::rrt_search(problem, e_sublevel, params);
}

const RrtBackend& resolve_backend(const RrtBackend& backend) {
  static const RrtBackend real = &run_real_backend;
  return backend ? backend : real;
}

planners::PlannerParams call_params(const planners::PlannerParams& params, std::uint64_t call_index,
                                    double budget_s) {
  planners::PlannerParams out = params;
  out.seed = mix_seed(params.seed, call_index);
  out.time_budget = budget_s;
  return out;
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::Conservative: return "conservative";
    case Algo::Binary: return "binary";
    case Algo::Optimal: return "optimal";
  }
  throw std::logic_error("estimators: unknown algorithm");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Budget: return "budget";
    case StopReason::Converged: return "converged";
    case StopReason::IntervalCollapsed: return "interval_collapsed";
  }
  throw std::logic_error("estimators: unknown stop reason");
}

std::optional<Algo> parse_algo(const std::string& name) {
  if (name == "conservative") return Algo::Conservative;
  if (name == "binary") return Algo::Binary;
  if (name == "optimal") return Algo::Optimal;
  return std::nullopt;
}

double SearchSchedule::effective_per_call() const {
  return per_call > 0.0 ? per_call : t_max / 20.0;
}

void SearchSchedule::validate() const {
  if (!(t_max > 0.0)) throw std::invalid_argument("schedule: t_max must be positive");
  if (per_call < 0.0) throw std::invalid_argument("schedule: per_call must be nonnegative");
  if (!(e_eps > 0.0)) throw std::invalid_argument("schedule: e_eps must be positive");
  if (!(e_zero_tol > 0.0)) throw std::invalid_argument("schedule: e_zero_tol must be positive");
  if (initial_upper && !(*initial_upper > 0.0)) {
    throw std::invalid_argument("schedule: initial_upper must be positive");
  }
  if (max_iterations < 0) {
    throw std::invalid_argument("schedule: max_iterations must be nonnegative");
  }
}

EscapeEstimate conservative_search(const planners::PlanningProblem& problem,
                                   const SearchSchedule& schedule,
                                   const planners::PlannerParams& params,
                                   const RrtBackend& backend) {
  schedule.validate();
  params.validate();
  const RrtBackend& search = resolve_backend(backend);
  const auto start = Clock::now();

  EscapeEstimate est;
  while (true) {
    if (schedule.max_iterations > 0 && est.iterations >= schedule.max_iterations) break;
    const double remaining = schedule.t_max - seconds_since(start);
    if (remaining <= 0.0) break;

    const double budget = std::min(schedule.effective_per_call(), remaining);
    const auto call =
        call_params(params, static_cast<std::uint64_t>(est.iterations), budget);
    const auto result = search(problem, est.e_upper, call);
    ++est.iterations;

    if (result.path && result.path->cost < est.e_upper) {
      est.e_upper = result.path->cost;
      est.witness = result.path;
    }
    est.trace.push_back({seconds_since(start), est.e_upper, est.e_lower});
    if (est.e_upper <= schedule.e_zero_tol) {
      est.reason = StopReason::Converged;
      return est;
    }
  }
  est.reason = StopReason::Budget;
  return est;
}

EscapeEstimate binary_search(const planners::PlanningProblem& problem,
                             const SearchSchedule& schedule,
                             const planners::PlannerParams& params, const RrtBackend& backend) {
  schedule.validate();
  params.validate();
  const RrtBackend& search = resolve_backend(backend);
  const auto start = Clock::now();

  EscapeEstimate est;
  // Working ceiling of the bisection interval. Only witness-backed values are
  // reported as e_upper; a user-supplied ceiling merely shapes the interval.
  double working_upper = kInf;
  bool certified = false;

  const auto out_of_budget = [&](double* remaining) {
    *remaining = schedule.t_max - seconds_since(start);
    if (*remaining <= 0.0) return true;
    return schedule.max_iterations > 0 && est.iterations >= schedule.max_iterations;
  };

  if (schedule.initial_upper) {
    working_upper = *schedule.initial_upper;
  } else {
    // Self-calibration: unconstrained searches until one escape certifies a
    // finite ceiling.
    while (!certified) {
      double remaining = 0.0;
      if (out_of_budget(&remaining)) {
        est.reason = StopReason::Budget;
        return est;
      }
      const double budget = std::min(schedule.effective_per_call(), remaining);
      const auto call =
          call_params(params, static_cast<std::uint64_t>(est.iterations), budget);
      const auto result = search(problem, kInf, call);
      ++est.iterations;
      if (result.path) {
        working_upper = result.path->cost;
        certified = true;
        est.e_upper = working_upper;
        est.witness = result.path;
      }
      est.trace.push_back({seconds_since(start), est.e_upper, est.e_lower});
      if (certified && est.e_upper <= schedule.e_zero_tol) {
        est.reason = StopReason::Converged;
        return est;
      }
    }
  }

  while (true) {
    double remaining = 0.0;
    if (out_of_budget(&remaining)) {
      est.reason = StopReason::Budget;
      return est;
    }
    if (certified && working_upper <= schedule.e_zero_tol) {
      est.reason = StopReason::Converged;
      return est;
    }
    if (working_upper - est.e_lower < schedule.e_eps) {
      est.reason = StopReason::IntervalCollapsed;
      return est;
    }

    const double midpoint = 0.5 * (working_upper + est.e_lower);
    const double budget = std::min(schedule.effective_per_call(), remaining);
    const auto call = call_params(params, static_cast<std::uint64_t>(est.iterations), budget);
    const auto result = search(problem, midpoint, call);
    ++est.iterations;

    if (result.path) {
      if (result.path->cost < est.e_lower) est.e_lower = 0.0;
      working_upper = result.path->cost;
      certified = true;
      est.e_upper = working_upper;
      est.witness = result.path;
    } else {
      est.e_lower = midpoint;
    }
    est.trace.push_back({seconds_since(start), est.e_upper, est.e_lower});
  }
}

EscapeEstimate optimal_estimate(const planners::PlanningProblem& problem,
                                const SearchSchedule& schedule,
                                const planners::PlannerParams& params) {
  schedule.validate();
  params.validate();

  planners::PlannerParams run = params;
  run.time_budget = schedule.t_max;

  EscapeEstimate est;
  bool converged = false;
  const auto on_improvement = [&](const planners::Improvement& imp) {
    // The hybrid objective may trade energy for length, so filter to the
    // nonincreasing energy envelope here.
    if (imp.cost_energy < est.e_upper) {
      est.e_upper = imp.cost_energy;
      est.witness = imp.path;
      est.trace.push_back({imp.time_s, est.e_upper, est.e_lower});
      if (est.e_upper <= schedule.e_zero_tol) {
        converged = true;
        return false;
      }
    }
    return true;
  };

  const auto result = planners::optimal_search(problem, run, on_improvement);
  est.iterations = static_cast<int>(result.improvements.size());
  est.reason = converged ? StopReason::Converged : StopReason::Budget;
  return est;
}

EscapeEstimate estimate(Algo algo, const planners::PlanningProblem& problem,
                        const SearchSchedule& schedule, const planners::PlannerParams& params) {
  switch (algo) {
    case Algo::Conservative: return conservative_search(problem, schedule, params);
    case Algo::Binary: return binary_search(problem, schedule, params);
    case Algo::Optimal: return optimal_estimate(problem, schedule, params);
  }
  throw std::logic_error("estimators: unknown algorithm");
}

std::vector<FrameResult> analyze_sequence(const std::vector<world::Scene>& frames, Algo algo,
                                          const SearchSchedule& schedule,
                                          const planners::PlannerParams& params,
                                          int runs_per_frame) {
  if (frames.empty()) throw std::invalid_argument("sequence: needs at least one frame");
  if (runs_per_frame < 1) throw std::invalid_argument("sequence: runs_per_frame must be positive");
  schedule.validate();
  params.validate();

  std::vector<FrameResult> results;
  results.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    planners::PlanningProblem problem;
    try {
      problem = planners::PlanningProblem::from_scene(frames[f]);
    } catch (const std::exception& e) {
      throw std::invalid_argument("sequence: frame " + std::to_string(f) + ": " + e.what());
    }

    FrameResult frame;
    frame.runs.reserve(static_cast<std::size_t>(runs_per_frame));
    std::vector<double> finite;
    const std::uint64_t frame_seed = mix_seed(params.seed, static_cast<std::uint64_t>(f));
    for (int r = 0; r < runs_per_frame; ++r) {
      planners::PlannerParams run = params;
      run.seed = mix_seed(frame_seed, static_cast<std::uint64_t>(r));
      auto est = estimate(algo, problem, schedule, run);
      if (std::isfinite(est.e_upper)) {
        finite.push_back(est.e_upper);
      } else {
        ++frame.n_infinite;
      }
      frame.runs.push_back(std::move(est));
    }
    frame.n_finite = static_cast<int>(finite.size());
    if (finite.empty()) {
      frame.mean = kInf;
      frame.std_dev = 0.0;
    } else {
      double sum = 0.0;
      for (double v : finite) sum += v;
      frame.mean = sum / static_cast<double>(finite.size());
      frame.std_dev = sample_std(finite, frame.mean);
    }
    results.push_back(std::move(frame));
  }
  return results;
}

}  // namespace cagekit::estimators
