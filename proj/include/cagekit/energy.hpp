#pragma once

#include <vector>

#include "cagekit/cspace.hpp"
#include "cagekit/geometry.hpp"
#include "cagekit/world.hpp"

namespace cagekit::energy {

using cspace::Configuration;
using geom::Vec3;

// Potential is gravity plus joint springs for articulated objects, pure
// stretch for closed elastic bands. Colliding configurations evaluate to
// +infinity. e_init is the value at the scene's initial configuration and
// serves as the datum for cost and sublevel queries.
struct EnergyModel {
  enum class Kind { GravityElastic, BandElastic };

  Kind kind = Kind::GravityElastic;
  double e_init = 0.0;
};

EnergyModel make_energy_model(const world::Scene& scene);

double potential_energy(const EnergyModel& model, const world::Scene& scene,
                        const Configuration& x);

// Stretch energy of the closed band alone, no collision term.
double band_elastic_energy(const world::ObjectModel& object, const std::vector<Vec3>& points);

// A path stored at the same resolution at which it was certified feasible,
// so cost = max(energies) - energies[0] holds over every checked sample.
struct PathCandidate {
  std::vector<Configuration> waypoints;
  std::vector<double> energies;
  double cost = 0.0;
};

// Densifies the waypoint polyline at the scene's check resolution and
// evaluates every sample. Throws if any sample collides.
PathCandidate path_energy_cost(const EnergyModel& model, const world::Scene& scene,
                               const std::vector<Configuration>& waypoints);

// Mass-normalized escape energy, in meters of equivalent lift.
double normalized_escape_energy(double e_hat, double mass, double gravity);

}  // namespace cagekit::energy
