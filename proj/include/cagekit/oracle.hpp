#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cagekit/cspace.hpp"
#include "cagekit/energy.hpp"
#include "cagekit/world.hpp"

namespace cagekit::oracle {

using cspace::Configuration;
using cspace::SpaceDescriptor;
using geom::Vec3;

// Regular cell grid over the position bounds of a point-mass scene. Axes are
// x, y, z with the y axis collapsed to a single cell in planar scenes. Cell
// values are potential energies at cell centers, +infinity where the point
// collides.
struct GridProblem {
  int dimension = 2;
  std::array<int, 3> dims = {1, 1, 1};
  std::array<double, 3> cell_size = {0.0, 0.0, 0.0};
  Vec3 origin = Vec3::Zero();
  std::vector<double> energies;
  std::vector<std::uint8_t> goal;
  int init_cell = -1;

  int cell_count() const { return dims[0] * dims[1] * dims[2]; }
  int index(int ix, int iy, int iz) const { return ix + dims[0] * (iy + dims[1] * iz); }
  void validate() const;
};

// Discretizes a single-sphere point-mass scene at the given cells-per-axis
// resolution. Throws if the scene has joints, extra links, or an initial
// cell whose center collides.
GridProblem grid_from_scene(const world::Scene& scene, int resolution);

// Minimum over all grid paths from the initial cell to any goal cell of the
// maximum cell energy en route, minus the initial cell energy. Neighbors are
// 8-connected in 2D and 6-connected in 3D. +infinity when no goal is
// reachable through finite-energy cells.
double grid_escape_energy(const GridProblem& grid);

double path_length_total_variation(const std::vector<Configuration>& waypoints,
                                   const SpaceDescriptor& space);

// (energy cost + gamma * total variation) / e_star.
double normalized_total_cost(const energy::PathCandidate& path, double e_star, double gamma,
                             const SpaceDescriptor& space);

// Planar point-mass scene on the unit square: start at the origin, goal box
// in the lower-right corner, capsule obstacles drawn from the seed. Scenes
// are regenerated until the grid oracle certifies a finite escape energy
// (bounded away from zero when there are obstacles); deterministic per seed.
world::Scene generate_random_scene(std::uint64_t seed, int n_obstacles);

}  // namespace cagekit::oracle
