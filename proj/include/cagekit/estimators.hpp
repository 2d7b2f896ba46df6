#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cagekit/planners.hpp"

namespace cagekit::estimators {

enum class Algo { Conservative, Binary, Optimal };
enum class StopReason { Budget, Converged, IntervalCollapsed };

std::string to_string(Algo algo);
std::string to_string(StopReason reason);
std::optional<Algo> parse_algo(const std::string& name);

struct TraceRow {
  double time_s = 0.0;
  double e_upper = 0.0;
  double e_lower = 0.0;
};

struct SearchSchedule {
  double t_max = 30.0;       // total wall budget, seconds
  double per_call = 0.0;     // budget of one inner search; 0 derives t_max/20
  double e_eps = 0.01;       // binary-search interval tolerance, joules
  double e_zero_tol = 1e-4;  // "escapes for free" threshold, joules
  std::optional<double> initial_upper;  // binary-search ceiling when self-calibration is unwanted
  int max_iterations = 0;    // 0 means no iteration cap

  double effective_per_call() const;
  void validate() const;
};

// Certified upper bound on the escape energy plus the bookkeeping that
// produced it. e_upper stays infinite when no escape path was found; e_lower
// is advisory (binary search can overshoot it).
struct EscapeEstimate {
  double e_upper = std::numeric_limits<double>::infinity();
  double e_lower = 0.0;
  std::optional<energy::PathCandidate> witness;
  std::vector<TraceRow> trace;
  int iterations = 0;
  StopReason reason = StopReason::Budget;
};

// Inner-search hook; the default forwards to planners::rrt_search. Tests
// substitute scripted outcomes to pin down the update rules.
using RrtBackend = std::function<planners::RrtResult(
    const planners::PlanningProblem&, double, const planners::PlannerParams&)>;

// Repeated goal searches inside a shrinking sublevel set: every found path
// lowers the bound to its cost, failures retry with a fresh seed.
EscapeEstimate conservative_search(const planners::PlanningProblem& problem,
                                   const SearchSchedule& schedule,
                                   const planners::PlannerParams& params,
                                   const RrtBackend& backend = {});

// Bisection on the bound: the midpoint sublevel either yields a cheaper
// certified path (new upper bound) or becomes the advisory lower bound.
EscapeEstimate binary_search(const planners::PlanningProblem& problem,
                             const SearchSchedule& schedule,
                             const planners::PlannerParams& params,
                             const RrtBackend& backend = {});

// Anytime optimal search distilled to an estimate: the bound is the best
// energy cost among emitted paths.
EscapeEstimate optimal_estimate(const planners::PlanningProblem& problem,
                                const SearchSchedule& schedule,
                                const planners::PlannerParams& params);

EscapeEstimate estimate(Algo algo, const planners::PlanningProblem& problem,
                        const SearchSchedule& schedule, const planners::PlannerParams& params);

struct FrameResult {
  double mean = 0.0;     // over finite estimates; +infinity when none are finite
  double std_dev = 0.0;  // sample standard deviation of the finite estimates
  int n_finite = 0;
  int n_infinite = 0;
  std::vector<EscapeEstimate> runs;
};

// Independent seeded runs on every frame of a quasi-static sequence.
std::vector<FrameResult> analyze_sequence(const std::vector<world::Scene>& frames, Algo algo,
                                          const SearchSchedule& schedule,
                                          const planners::PlannerParams& params,
                                          int runs_per_frame);

}  // namespace cagekit::estimators
