#include "cagekit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "cagekit/random.hpp"

namespace cagekit::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_point_mass(const world::Scene& scene) {
  require(scene.object.kind == world::ObjectModel::Kind::Articulated &&
              scene.object.links.size() == 1 && scene.object.joints.empty() &&
              std::holds_alternative<geom::Sphere>(scene.object.links[0].shape),
          "oracle grid: scene must carry a single sphere point mass");
}

}  // namespace

void GridProblem::validate() const {
  require(dimension == 2 || dimension == 3, "oracle grid: dimension must be 2 or 3");
  require(dims[0] >= 1 && dims[1] >= 1 && dims[2] >= 1, "oracle grid: empty axis");
  require(dimension == 3 || dims[1] == 1, "oracle grid: planar grids collapse the y axis");
  require(static_cast<int>(energies.size()) == cell_count(),
          "oracle grid: energy table size mismatch");
  require(static_cast<int>(goal.size()) == cell_count(), "oracle grid: goal mask size mismatch");
  require(init_cell >= 0 && init_cell < cell_count(), "oracle grid: initial cell out of range");
  require(std::isfinite(energies[init_cell]), "oracle grid: initial cell has infinite energy");
}

GridProblem grid_from_scene(const world::Scene& scene, int resolution) {
  require_point_mass(scene);
  require(resolution >= 2, "oracle grid: resolution must be at least 2");

  const bool planar = scene.space.planar;
  const auto& bounds = scene.space.position_bounds;

  GridProblem grid;
  grid.dimension = planar ? 2 : 3;
  grid.origin = bounds.min();
  for (int axis = 0; axis < 3; ++axis) {
    if (planar && axis == 1) {
      grid.dims[axis] = 1;
      grid.cell_size[axis] = 0.0;
      continue;
    }
    grid.dims[axis] = resolution;
    grid.cell_size[axis] = (bounds.max()[axis] - bounds.min()[axis]) / resolution;
  }

  const energy::EnergyModel model = energy::make_energy_model(scene);
  grid.energies.resize(grid.cell_count());
  grid.goal.resize(grid.cell_count());
  for (int iz = 0; iz < grid.dims[2]; ++iz) {
    for (int iy = 0; iy < grid.dims[1]; ++iy) {
      for (int ix = 0; ix < grid.dims[0]; ++ix) {
        Vec3 center = grid.origin;
        center.x() += (ix + 0.5) * grid.cell_size[0];
        if (!planar) center.y() += (iy + 0.5) * grid.cell_size[1];
        center.z() += (iz + 0.5) * grid.cell_size[2];
        const auto x = Configuration::articulated(center, geom::Quat::Identity());
        const int cell = grid.index(ix, iy, iz);
        grid.energies[cell] = energy::potential_energy(model, scene, x);
        grid.goal[cell] = world::in_goal(scene, x) ? 1 : 0;
      }
    }
  }

  std::array<int, 3> init_idx = {0, 0, 0};
  for (int axis = 0; axis < 3; ++axis) {
    if (planar && axis == 1) continue;
    const double t = (scene.init.position[axis] - grid.origin[axis]) / grid.cell_size[axis];
    init_idx[axis] = std::clamp(static_cast<int>(std::floor(t)), 0, grid.dims[axis] - 1);
  }
  grid.init_cell = grid.index(init_idx[0], init_idx[1], init_idx[2]);
  grid.validate();
  return grid;
}

double grid_escape_energy(const GridProblem& grid) {
  grid.validate();

  std::vector<double> best(grid.energies.size(), kInf);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> frontier;
  best[grid.init_cell] = grid.energies[grid.init_cell];
  frontier.emplace(best[grid.init_cell], grid.init_cell);

  const int nx = grid.dims[0];
  const int ny = grid.dims[1];
  const int nz = grid.dims[2];
  while (!frontier.empty()) {
    const auto [value, cell] = frontier.top();
    frontier.pop();
    if (value > best[cell]) continue;
    if (grid.goal[cell]) return value - grid.energies[grid.init_cell];

    const int ix = cell % nx;
    const int iy = (cell / nx) % ny;
    const int iz = cell / (nx * ny);
    const auto relax = [&](int jx, int jy, int jz) {
      if (jx < 0 || jx >= nx || jy < 0 || jy >= ny || jz < 0 || jz >= nz) return;
      const int neighbor = grid.index(jx, jy, jz);
      if (std::isinf(grid.energies[neighbor])) return;
      const double through = std::max(value, grid.energies[neighbor]);
      if (through < best[neighbor]) {
        best[neighbor] = through;
        frontier.emplace(through, neighbor);
      }
    };
    if (grid.dimension == 2) {
      for (int dx = -1; dx <= 1; ++dx)
        for (int dz = -1; dz <= 1; ++dz)
          if (dx != 0 || dz != 0) relax(ix + dx, iy, iz + dz);
    } else {
      relax(ix - 1, iy, iz);
      relax(ix + 1, iy, iz);
      relax(ix, iy - 1, iz);
      relax(ix, iy + 1, iz);
      relax(ix, iy, iz - 1);
      relax(ix, iy, iz + 1);
    }
  }
  return kInf;
}

double path_length_total_variation(const std::vector<Configuration>& waypoints,
                                   const SpaceDescriptor& space) {
  require(!waypoints.empty(), "total variation: at least one waypoint required");
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    total += cspace::distance(space, waypoints[i - 1], waypoints[i]);
  return total;
}

double normalized_total_cost(const energy::PathCandidate& path, double e_star, double gamma,
                             const SpaceDescriptor& space) {
  require(e_star > 0.0, "normalized total cost: reference energy must be positive");
  require(gamma >= 0.0, "normalized total cost: gamma must be nonnegative");
  return (path.cost + gamma * path_length_total_variation(path.waypoints, space)) / e_star;
}

world::Scene generate_random_scene(std::uint64_t seed, int n_obstacles) {
  require(n_obstacles >= 0, "random scene: obstacle count must be nonnegative");

  constexpr int kMaxAttempts = 64;
  constexpr int kFeasibilityResolution = 64;
  constexpr double kMinEscapeEnergy = 0.15;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RandomStream rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));

    world::Scene scene;
    scene.name = "random-" + std::to_string(seed);
    scene.object.links.push_back(
        world::Link{1.0, Vec3::Zero(), geom::Sphere{Vec3::Zero(), 0.01}});
    scene.gravity = 1.0;
    scene.space = SpaceDescriptor::planar_point(
        Eigen::AlignedBox3d(Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 1.0)));
    scene.init = Configuration::articulated(Vec3::Zero(), geom::Quat::Identity());
    scene.goal.region = Eigen::AlignedBox3d(Vec3(0.9, -0.1, 0.0), Vec3(1.0, 0.1, 0.1));
    scene.check_resolution = 0.01;

    for (int i = 0; i < n_obstacles; ++i) {
      const double cx = rng.uniform(0.15, 0.85);
      const double cz = rng.uniform(0.15, 0.85);
      const double theta = rng.uniform(0.0, M_PI);
      const double semi_major = rng.uniform(0.08, 0.22);
      const double semi_minor = rng.uniform(0.035, std::min(0.6 * semi_major, 0.12));
      const Vec3 center(cx, 0.0, cz);
      const Vec3 axis(std::cos(theta), 0.0, std::sin(theta));
      const double half = semi_major - semi_minor;
      scene.obstacles.push_back(
          geom::Capsule{center - half * axis, center + half * axis, semi_minor});
    }

    try {
      world::validate_scene(scene);
      const double e_star = grid_escape_energy(grid_from_scene(scene, kFeasibilityResolution));
      if (!std::isfinite(e_star)) continue;
      if (n_obstacles > 0 && e_star < kMinEscapeEnergy) continue;
      return scene;
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  throw std::runtime_error("random scene: no feasible draw within the retry budget");
}

}  // namespace cagekit::oracle
