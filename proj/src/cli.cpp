#include "cagekit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "cagekit/csv.hpp"
#include "cagekit/oracle.hpp"
#include "cagekit/random.hpp"
#include "cagekit/scene_io.hpp"

namespace cagekit::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::vector<std::string> standard_comments(const std::string& command) {
  return {"cagekit csv format_version=1", "command: " + command,
          "generated: " + utc_timestamp()};
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const scene_io::SceneError& e) {
    err << e.what() << "\n";
    return kExitScene;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitRuntime;
  }
}

estimators::Algo parse_algo_or_throw(const std::string& name) {
  const auto algo = estimators::parse_algo(name);
  if (!algo) {
    throw std::invalid_argument("unknown algorithm '" + name +
                                "' (expected conservative, binary, or optimal)");
  }
  return *algo;
}

// Bound column convention: empty cell plus escaped=false when the estimate
// stayed infinite.
std::string bound_cell(double e_upper) {
  return std::isinf(e_upper) ? std::string() : csv::format_double(e_upper);
}

// Whole seconds, so re-runs of budget-consuming commands stay byte-identical.
std::string wall_cell(double seconds) { return std::to_string(std::llround(seconds)); }

std::string trace_path_for(const std::string& out_path) {
  std::filesystem::path p(out_path);
  return (p.parent_path() / (p.stem().string() + ".trace.csv")).string();
}

bool same_shape_type(const geom::Shape& a, const geom::Shape& b) {
  return a.index() == b.index();
}

bool objects_match(const world::ObjectModel& a, const world::ObjectModel& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == world::ObjectModel::Kind::Band) {
    return a.band_points == b.band_points && a.band_radius == b.band_radius &&
           a.band_rest_length == b.band_rest_length && a.band_stiffness == b.band_stiffness;
  }
  if (a.links.size() != b.links.size() || a.joints.size() != b.joints.size()) return false;
  for (std::size_t i = 0; i < a.links.size(); ++i) {
    if (a.links[i].mass != b.links[i].mass) return false;
    if (a.links[i].com_offset != b.links[i].com_offset) return false;
    if (!same_shape_type(a.links[i].shape, b.links[i].shape)) return false;
  }
  for (std::size_t i = 0; i < a.joints.size(); ++i) {
    const auto& ja = a.joints[i];
    const auto& jb = b.joints[i];
    if (ja.axis != jb.axis || ja.pivot != jb.pivot) return false;
    if (ja.lower != jb.lower || ja.upper != jb.upper) return false;
    if (ja.stiffness != jb.stiffness) return false;
  }
  return true;
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err) {
  (void)out;
  return guarded(err, [&] {
    if (options.out_path.empty()) throw std::invalid_argument("estimate: an output path is required");
    if (options.seeds.empty()) throw std::invalid_argument("estimate: at least one seed is required");
    const auto algo = parse_algo_or_throw(options.algo);
    options.run.schedule.validate();
    options.run.params.validate();

    const auto loaded = scene_io::load_scene(options.scene_path);
    const auto problem = planners::PlanningProblem::from_scene(loaded.scene);

    auto seeds = options.seeds;
    std::sort(seeds.begin(), seeds.end());

    csv::Table table;
    table.comments = standard_comments("estimate");
    table.comments.push_back("scene: " + loaded.scene.name);
    table.comments.push_back("algorithm: " + estimators::to_string(algo));
    table.header = {"seed", "algorithm", "wall_s", "e_hat", "escaped",
                    "e_lower", "iterations", "reason"};

    csv::Table trace;
    trace.comments = table.comments;
    trace.comments.push_back("per-iteration wall-clock samples; times vary across runs");
    trace.header = {"seed", "iteration", "time_s", "e_hat", "e_lower"};

    for (const auto seed : seeds) {
      auto params = options.run.params;
      params.seed = seed;
      const auto start = Clock::now();
      const auto est = estimators::estimate(algo, problem, options.run.schedule, params);
      const double wall = std::chrono::duration<double>(Clock::now() - start).count();

      table.rows.push_back({std::to_string(seed), estimators::to_string(algo), wall_cell(wall),
                            bound_cell(est.e_upper), std::isinf(est.e_upper) ? "false" : "true",
                            csv::format_double(est.e_lower), std::to_string(est.iterations),
                            estimators::to_string(est.reason)});
      if (options.trace) {
        for (std::size_t i = 0; i < est.trace.size(); ++i) {
          const auto& row = est.trace[i];
          trace.rows.push_back({std::to_string(seed), std::to_string(i),
                                csv::format_double(row.time_s), bound_cell(row.e_upper),
                                csv::format_double(row.e_lower)});
        }
      }
    }

    csv::write_file(options.out_path, table);
    if (options.trace) csv::write_file(trace_path_for(options.out_path), trace);
    return kExitOk;
  });
}

int cmd_sequence(const SequenceOptions& options, std::ostream& out, std::ostream& err) {
  (void)out;
  return guarded(err, [&] {
    if (options.out_path.empty()) throw std::invalid_argument("sequence: an output path is required");
    const auto algo = parse_algo_or_throw(options.algo);
    if (options.runs_per_frame < 1) {
      throw std::invalid_argument("sequence: runs per frame must be positive");
    }

    const auto frames = scene_io::load_sequence(options.frames_dir);
    if (frames.empty()) {
      throw std::invalid_argument("sequence: no scene files in " + options.frames_dir);
    }
    std::vector<world::Scene> scenes;
    scenes.reserve(frames.size());
    for (const auto& frame : frames) scenes.push_back(frame.scene);
    for (std::size_t i = 1; i < scenes.size(); ++i) {
      if (!objects_match(scenes[0].object, scenes[i].object)) {
        throw scene_io::SceneError("sequence: frame " + scenes[i].name +
                                   " object definition differs from frame " + scenes[0].name);
      }
      if (scenes[i].obstacles.size() != scenes[0].obstacles.size()) {
        throw scene_io::SceneError("sequence: frame " + scenes[i].name +
                                   " obstacle count differs from frame " + scenes[0].name);
      }
    }

    const auto results = estimators::analyze_sequence(scenes, algo, options.run.schedule,
                                                      options.run.params, options.runs_per_frame);

    csv::Table table;
    table.comments = standard_comments("sequence");
    table.comments.push_back("algorithm: " + estimators::to_string(algo));
    table.comments.push_back("runs_per_frame: " + std::to_string(options.runs_per_frame));
    table.header = {"frame", "mean_e_hat", "std_e_hat", "n_finite", "n_infinite"};
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& frame = results[i];
      table.rows.push_back({scenes[i].name, bound_cell(frame.mean),
                            csv::format_double(frame.std_dev), std::to_string(frame.n_finite),
                            std::to_string(frame.n_infinite)});
    }
    csv::write_file(options.out_path, table);
    return kExitOk;
  });
}

int cmd_gamma_study(const GammaStudyOptions& options, std::ostream& out, std::ostream& err) {
  (void)out;
  return guarded(err, [&] {
    if (options.out_path.empty()) {
      throw std::invalid_argument("gamma-study: an output path is required");
    }
    if (options.scene_seeds.empty()) {
      throw std::invalid_argument("gamma-study: at least one scene seed is required");
    }
    if (options.gammas.empty()) {
      throw std::invalid_argument("gamma-study: at least one gamma value is required");
    }
    for (const double gamma : options.gammas) {
      if (!(gamma >= 0.0)) throw std::invalid_argument("gamma-study: gamma values must be >= 0");
    }
    if (options.n_obstacles < 1) {
      throw std::invalid_argument("gamma-study: scenes need at least one obstacle");
    }
    options.run.schedule.validate();
    options.run.params.validate();

    std::vector<world::Scene> scenes;
    std::vector<double> references;
    scenes.reserve(options.scene_seeds.size());
    for (const auto seed : options.scene_seeds) {
      scenes.push_back(oracle::generate_random_scene(seed, options.n_obstacles));
      const double e_star = oracle::grid_escape_energy(
          oracle::grid_from_scene(scenes.back(), options.oracle_resolution));
      if (!std::isfinite(e_star) || !(e_star > 0.0)) {
        throw std::runtime_error("gamma-study: scene seed " + std::to_string(seed) +
                                 " has no finite positive reference energy");
      }
      references.push_back(e_star);
    }
    std::vector<planners::PlanningProblem> problems;
    problems.reserve(scenes.size());
    for (const auto& scene : scenes) {
      problems.push_back(planners::PlanningProblem::from_scene(scene));
    }

    csv::Table table;
    table.comments = standard_comments("gamma-study");
    table.comments.push_back("scenes: " + std::to_string(scenes.size()));
    table.comments.push_back("oracle_resolution: " + std::to_string(options.oracle_resolution));
    table.header = {"gamma", "mean_cbar", "std_cbar"};

    for (std::size_t g = 0; g < options.gammas.size(); ++g) {
      const double gamma = options.gammas[g];
      std::vector<double> cbars;
      cbars.reserve(scenes.size());
      for (std::size_t s = 0; s < scenes.size(); ++s) {
        auto params = options.run.params;
        params.gamma = gamma;
        params.seed = mix_seed(options.scene_seeds[s], static_cast<std::uint64_t>(g));
        params.time_budget = options.run.schedule.t_max;
        const auto result = planners::optimal_search(problems[s], params);
        if (result.improvements.empty()) {
          throw std::runtime_error("gamma-study: no path found for scene seed " +
                                   std::to_string(options.scene_seeds[s]) + " at gamma " +
                                   csv::format_double(gamma));
        }
        cbars.push_back(oracle::normalized_total_cost(result.improvements.back().path,
                                                      references[s], gamma, scenes[s].space));
      }
      double mean = 0.0;
      for (const double c : cbars) mean += c;
      mean /= static_cast<double>(cbars.size());
      table.rows.push_back({csv::format_double(gamma), csv::format_double(mean),
                            csv::format_double(sample_std(cbars, mean))});
    }
    csv::write_file(options.out_path, table);
    return kExitOk;
  });
}

int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = scene_io::load_scene(options.scene_path);
    const auto grid = oracle::grid_from_scene(loaded.scene, options.resolution);
    const double e_star = oracle::grid_escape_energy(grid);
    out << csv::format_double(e_star) << "\n";

    if (!options.dump_path.empty()) {
      csv::Table table;
      table.comments = standard_comments("oracle");
      table.comments.push_back("scene: " + loaded.scene.name);
      table.comments.push_back("resolution: " + std::to_string(options.resolution));
      table.header = {"ix", "iy", "iz", "x", "y", "z", "energy"};
      const bool planar = grid.dims[1] == 1;
      for (int iz = 0; iz < grid.dims[2]; ++iz) {
        for (int iy = 0; iy < grid.dims[1]; ++iy) {
          for (int ix = 0; ix < grid.dims[0]; ++ix) {
            geom::Vec3 center = grid.origin;
            center.x() += (ix + 0.5) * grid.cell_size[0];
            if (!planar) center.y() += (iy + 0.5) * grid.cell_size[1];
            center.z() += (iz + 0.5) * grid.cell_size[2];
            table.rows.push_back({std::to_string(ix), std::to_string(iy), std::to_string(iz),
                                  csv::format_double(center.x()), csv::format_double(center.y()),
                                  csv::format_double(center.z()),
                                  csv::format_double(grid.energies[grid.index(ix, iy, iz)])});
          }
        }
      }
      csv::write_file(options.dump_path, table);
    }
    return kExitOk;
  });
}

}  // namespace cagekit::cli
