#include <cstdint>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "cagekit/cli.hpp"

namespace {

void add_schedule_flags(CLI::App* cmd, cagekit::cli::RunOptions& run) {
  cmd->add_option("--time-budget", run.schedule.t_max, "Total seconds per run");
  cmd->add_option("--per-call-budget", run.schedule.per_call,
                  "Seconds per inner search (0 derives time-budget/20)");
  cmd->add_option("--e-eps", run.schedule.e_eps, "Bisection interval tolerance, joules");
  cmd->add_option("--e-zero-tol", run.schedule.e_zero_tol, "Free-escape threshold, joules");
  cmd->add_option("--max-iterations", run.schedule.max_iterations,
                  "Cap on inner searches (0 = unbounded)");
  cmd->add_option("--max-nodes", run.params.max_nodes, "Tree size cap per search");
  cmd->add_option("--steer-step", run.params.steer_step, "Extension step in the space metric");
  cmd->add_option("--goal-bias", run.params.goal_bias, "Probability of sampling the goal region");
  cmd->add_option("--gamma", run.params.gamma, "Length weight in the hybrid objective");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape-energy estimation for caging and quasi-static manipulation"};
  app.require_subcommand(1);

  cagekit::cli::EstimateOptions estimate;
  std::uint64_t estimate_seed = 0;
  std::vector<std::uint64_t> estimate_seeds;
  double estimate_initial_upper = 0.0;
  auto* cmd_estimate = app.add_subcommand("estimate", "Bound the escape energy of one scene");
  cmd_estimate->add_option("--scene", estimate.scene_path, "Scene file")->required();
  cmd_estimate->add_option("--algo", estimate.algo, "conservative | binary | optimal");
  auto* est_seed = cmd_estimate->add_option("--seed", estimate_seed, "Single seed");
  auto* est_seeds =
      cmd_estimate->add_option("--seeds", estimate_seeds, "Comma-separated seed list")
          ->delimiter(',');
  est_seed->excludes(est_seeds);
  auto* est_iu = cmd_estimate->add_option("--initial-upper", estimate_initial_upper,
                                          "Bisection ceiling instead of self-calibration");
  add_schedule_flags(cmd_estimate, estimate.run);
  cmd_estimate->add_flag("--trace", estimate.trace, "Write a companion per-iteration trace CSV");
  cmd_estimate->add_option("--out", estimate.out_path, "Output CSV path")->required();

  cagekit::cli::SequenceOptions sequence;
  std::uint64_t sequence_seed = 0;
  auto* cmd_sequence = app.add_subcommand("sequence", "Per-frame estimates for a scene directory");
  cmd_sequence->add_option("--frames", sequence.frames_dir, "Directory of ordered scene files")
      ->required();
  cmd_sequence->add_option("--algo", sequence.algo, "conservative | binary | optimal");
  cmd_sequence->add_option("--runs", sequence.runs_per_frame, "Independent runs per frame");
  cmd_sequence->add_option("--seed", sequence_seed, "Base seed");
  add_schedule_flags(cmd_sequence, sequence.run);
  cmd_sequence->add_option("--out", sequence.out_path, "Output CSV path")->required();

  cagekit::cli::GammaStudyOptions gamma_study;
  std::uint64_t gamma_seed = 0;
  int gamma_n_scenes = 8;
  std::vector<std::uint64_t> gamma_seeds;
  auto* cmd_gamma = app.add_subcommand("gamma-study", "Normalized total cost across gamma values");
  auto* gs_seed = cmd_gamma->add_option("--seed", gamma_seed, "Base seed for scene generation");
  auto* gs_seeds = cmd_gamma->add_option("--seeds", gamma_seeds, "Explicit scene seed list")
                       ->delimiter(',');
  gs_seed->excludes(gs_seeds);
  cmd_gamma->add_option("--n-scenes", gamma_n_scenes, "Number of generated scenes");
  cmd_gamma->add_option("--n-obstacles", gamma_study.n_obstacles, "Obstacles per generated scene");
  cmd_gamma->add_option("--gammas", gamma_study.gammas, "Comma-separated gamma list")
      ->required()
      ->delimiter(',');
  cmd_gamma->add_option("--resolution", gamma_study.oracle_resolution,
                        "Grid oracle cells per axis");
  add_schedule_flags(cmd_gamma, gamma_study.run);
  cmd_gamma->add_option("--out", gamma_study.out_path, "Output CSV path")->required();

  cagekit::cli::OracleOptions oracle;
  auto* cmd_oracle = app.add_subcommand("oracle", "Grid-oracle escape energy of a scene");
  cmd_oracle->add_option("--scene", oracle.scene_path, "Scene file")->required();
  cmd_oracle->add_option("--resolution", oracle.resolution, "Cells per axis");
  cmd_oracle->add_option("--dump", oracle.dump_path, "Optional cell-energy CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cagekit::cli::kExitUsage;
  }

  if (cmd_estimate->parsed()) {
    estimate.seeds = est_seeds->count() > 0 ? estimate_seeds
                                            : std::vector<std::uint64_t>{estimate_seed};
    if (est_iu->count() > 0) estimate.run.schedule.initial_upper = estimate_initial_upper;
    return cagekit::cli::cmd_estimate(estimate, std::cout, std::cerr);
  }
  if (cmd_sequence->parsed()) {
    sequence.run.params.seed = sequence_seed;
    return cagekit::cli::cmd_sequence(sequence, std::cout, std::cerr);
  }
  if (cmd_gamma->parsed()) {
    if (gs_seeds->count() > 0) {
      gamma_study.scene_seeds = gamma_seeds;
    } else {
      for (int i = 0; i < gamma_n_scenes; ++i) {
        gamma_study.scene_seeds.push_back(gamma_seed + static_cast<std::uint64_t>(i));
      }
    }
    return cagekit::cli::cmd_gamma_study(gamma_study, std::cout, std::cerr);
  }
  return cagekit::cli::cmd_oracle(oracle, std::cout, std::cerr);
}
