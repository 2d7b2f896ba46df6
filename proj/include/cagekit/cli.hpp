#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cagekit/estimators.hpp"

namespace cagekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitScene = 3;
inline constexpr int kExitRuntime = 4;

// Shared fields: planner knobs plus the estimator schedule. The per-run seed
// field of params is overwritten by each command.
struct RunOptions {
  estimators::SearchSchedule schedule;
  planners::PlannerParams params;
};

struct EstimateOptions {
  std::string scene_path;
  std::string algo = "optimal";
  std::vector<std::uint64_t> seeds = {0};
  RunOptions run;
  bool trace = false;
  std::string out_path;
};

struct SequenceOptions {
  std::string frames_dir;
  std::string algo = "optimal";
  int runs_per_frame = 5;
  RunOptions run;
  std::string out_path;
};

struct GammaStudyOptions {
  std::vector<std::uint64_t> scene_seeds;
  int n_obstacles = 3;
  std::vector<double> gammas;
  int oracle_resolution = 400;
  RunOptions run;  // schedule.t_max is the per-run search budget
  std::string out_path;
};

struct OracleOptions {
  std::string scene_path;
  int resolution = 200;
  std::string dump_path;  // optional cell-energy CSV
};

// Each command returns a process exit code and reports failures on err.
int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err);
int cmd_sequence(const SequenceOptions& options, std::ostream& out, std::ostream& err);
int cmd_gamma_study(const GammaStudyOptions& options, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err);

}  // namespace cagekit::cli
