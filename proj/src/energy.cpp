#include "cagekit/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cagekit::energy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gravity_spring_energy(const world::Scene& scene, const Configuration& x,
                             const std::vector<world::LinkState>& states) {
  double e = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    e += scene.object.links[i].mass * scene.gravity * states[i].com.z();
  for (std::size_t j = 0; j < scene.object.joints.size(); ++j) {
    const double angle = x.joints[static_cast<int>(j)];
    e += 0.5 * scene.object.joints[j].stiffness * angle * angle;
  }
  return e;
}

}  // namespace

double band_elastic_energy(const world::ObjectModel& object, const std::vector<Vec3>& points) {
  const std::size_t n = points.size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = (points[(i + 1) % n] - points[i]).norm() - object.band_rest_length;
    if (gap > 0.0) e += 0.5 * object.band_stiffness[i] * gap * gap;
  }
  return e;
}

double potential_energy(const EnergyModel& model, const world::Scene& scene,
                        const Configuration& x) {
  if (model.kind == EnergyModel::Kind::BandElastic) {
    for (const geom::Shape& part : world::object_shapes(scene.object, x))
      for (const geom::Shape& obstacle : scene.obstacles)
        if (geom::shapes_overlap(part, obstacle)) return kInf;
    return band_elastic_energy(scene.object, x.points);
  }
  const std::vector<world::LinkState> states = world::forward_kinematics(scene.object, x);
  for (const world::LinkState& state : states)
    for (const geom::Shape& obstacle : scene.obstacles)
      if (geom::shapes_overlap(state.shape, obstacle)) return kInf;
  return gravity_spring_energy(scene, x, states);
}

EnergyModel make_energy_model(const world::Scene& scene) {
  EnergyModel model;
  model.kind = scene.object.kind == world::ObjectModel::Kind::Band
                   ? EnergyModel::Kind::BandElastic
                   : EnergyModel::Kind::GravityElastic;
  model.e_init = potential_energy(model, scene, scene.init);
  if (!std::isfinite(model.e_init))
    throw std::invalid_argument("energy model: initial configuration has infinite energy");
  return model;
}

PathCandidate path_energy_cost(const EnergyModel& model, const world::Scene& scene,
                               const std::vector<Configuration>& waypoints) {
  if (waypoints.empty()) throw std::invalid_argument("path_energy_cost: empty path");
  const double delta = scene.effective_check_resolution();

  PathCandidate path;
  const auto push = [&](const Configuration& x) {
    const double e = potential_energy(model, scene, x);
    if (std::isinf(e)) throw std::invalid_argument("path_energy_cost: path sample in collision");
    path.waypoints.push_back(x);
    path.energies.push_back(e);
  };
  push(waypoints.front());
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const int n = world::edge_sample_count(scene.space, waypoints[i], waypoints[i + 1], delta);
    for (int j = 1; j <= n; ++j)
      push(cspace::interpolate(scene.space, waypoints[i], waypoints[i + 1],
                               static_cast<double>(j) / n));
  }
  path.cost = *std::max_element(path.energies.begin(), path.energies.end()) -
              path.energies.front();
  return path;
}

double normalized_escape_energy(double e_hat, double mass, double gravity) {
  if (!(mass > 0.0)) throw std::invalid_argument("normalized escape energy: mass must be positive");
  if (!(gravity > 0.0))
    throw std::invalid_argument("normalized escape energy: gravity must be positive");
  if (e_hat < 0.0)
    throw std::invalid_argument("normalized escape energy: energy must be nonnegative");
  return e_hat / (mass * gravity);
}

}  // namespace cagekit::energy
