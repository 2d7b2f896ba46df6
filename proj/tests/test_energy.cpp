#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cagekit/energy.hpp"
#include "cagekit/world.hpp"
#include "doctest.h"

using namespace cagekit;
using cspace::Configuration;
using cspace::SpaceDescriptor;
using geom::Quat;
using geom::Sphere;
using geom::Vec3;
using world::Joint;
using world::Link;
using world::ObjectModel;
using world::Scene;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Scene point_scene(double mass, double gravity) {
  Scene scene;
  scene.object.links.push_back(Link{mass, Vec3::Zero(), Sphere{Vec3::Zero(), 0.01}});
  scene.gravity = gravity;
  scene.space = SpaceDescriptor::planar_point(
      Eigen::AlignedBox3d(Vec3(-1.0, 0.0, -1.0), Vec3(1.0, 0.0, 6.0)));
  scene.init = Configuration::articulated(Vec3::Zero(), Quat::Identity());
  scene.goal.region = Eigen::AlignedBox3d(Vec3(0.8, -0.1, 5.0), Vec3(0.9, 0.1, 5.5));
  scene.check_resolution = 0.05;
  return scene;
}

Scene chain_scene(double stiffness, double gravity = 9.81) {
  Scene scene;
  scene.object.links.push_back(Link{1.0, Vec3(0.0, 0.0, 0.1), Sphere{Vec3(0.0, 0.0, 0.1), 0.02}});
  scene.object.links.push_back(Link{1.0, Vec3(0.0, 0.0, 0.2), Sphere{Vec3(0.0, 0.0, 0.2), 0.02}});
  Joint joint;
  joint.axis = Vec3::UnitZ();
  joint.stiffness = stiffness;
  joint.lower = -M_PI;
  joint.upper = M_PI;
  scene.object.joints.push_back(joint);
  scene.gravity = gravity;
  scene.space = SpaceDescriptor::spatial(
      Eigen::AlignedBox3d(Vec3(-2.0, -2.0, -2.0), Vec3(2.0, 2.0, 2.0)),
      {cspace::JointLimit{-M_PI, M_PI}});
  scene.init = Configuration::articulated(Vec3::Zero(), Quat::Identity(),
                                          Eigen::VectorXd::Zero(1));
  scene.goal.region = Eigen::AlignedBox3d(Vec3(1.5, 1.5, 1.5), Vec3(1.9, 1.9, 1.9));
  scene.check_resolution = 0.05;
  return scene;
}

Scene band_scene(double rest_length, double stiffness) {
  Scene scene;
  scene.object.kind = ObjectModel::Kind::Band;
  scene.object.band_points = 3;
  scene.object.band_radius = 0.01;
  scene.object.band_rest_length = rest_length;
  scene.object.band_stiffness = {stiffness, stiffness, stiffness};
  scene.space = SpaceDescriptor::band(
      Eigen::AlignedBox3d(Vec3(-2.0, -2.0, -2.0), Vec3(2.0, 2.0, 2.0)), 3);
  scene.init = Configuration::band(
      {Vec3(0.0, 0.0, 0.0), Vec3(0.3, 0.0, 0.0), Vec3(0.0, 0.3, 0.0)});
  scene.goal.region = Eigen::AlignedBox3d(Vec3(1.5, 1.5, 1.5), Vec3(1.9, 1.9, 1.9));
  scene.check_resolution = 0.05;
  return scene;
}

Configuration at_height(double z) {
  return Configuration::articulated(Vec3(0.0, 0.0, z), Quat::Identity());
}

}  // namespace

TEST_CASE("single hovering link weighs in at mgz") {
  Scene scene = point_scene(1.0, 9.81);
  const auto model = energy::make_energy_model(scene);
  CHECK(energy::potential_energy(model, scene, at_height(0.5)) == doctest::Approx(4.905));
  CHECK(model.e_init == doctest::Approx(0.0));
}

TEST_CASE("two link chain adds gravity and spring terms") {
  Scene scene = chain_scene(2.0);
  const auto model = energy::make_energy_model(scene);
  Eigen::VectorXd alpha(1);
  alpha << 0.5;
  const auto x = Configuration::articulated(Vec3::Zero(), Quat::Identity(), alpha);
  CHECK(energy::potential_energy(model, scene, x) ==
        doctest::Approx(9.81 * 0.3 + 0.5 * 2.0 * 0.25));
}

TEST_CASE("band pays only for stretched segments") {
  Scene scene = band_scene(0.5, 10.0);
  const auto model = energy::make_energy_model(scene);
  const auto x = Configuration::band(
      {Vec3(0.0, 0.0, 0.0), Vec3(0.6, 0.0, 0.0), Vec3(0.3, 0.3, 0.0)});
  CHECK(energy::potential_energy(model, scene, x) == doctest::Approx(0.05));
}

TEST_CASE("slack bands store no energy") {
  Scene scene = band_scene(0.5, 25.0);
  const auto model = energy::make_energy_model(scene);
  std::mt19937_64 engine(11);
  std::uniform_real_distribution<double> coord(-0.1, 0.1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = Configuration::band({Vec3(coord(engine), coord(engine), coord(engine)),
                                        Vec3(coord(engine), coord(engine), coord(engine)),
                                        Vec3(coord(engine), coord(engine), coord(engine))});
    CHECK(energy::potential_energy(model, scene, x) == 0.0);
  }
}

TEST_CASE("contact means infinite energy") {
  Scene scene = point_scene(1.0, 9.81);
  scene.obstacles.push_back(Sphere{Vec3(0.0, 0.0, 0.5), 0.1});
  const auto model = energy::make_energy_model(scene);
  CHECK(energy::potential_energy(model, scene, at_height(0.5)) == kInf);
  CHECK(std::isfinite(energy::potential_energy(model, scene, at_height(0.0))));
}

TEST_CASE("model construction rejects a colliding start") {
  Scene scene = point_scene(1.0, 9.81);
  scene.obstacles.push_back(Sphere{Vec3(0.0, 0.0, 0.0), 0.1});
  CHECK_THROWS_AS(energy::make_energy_model(scene), std::invalid_argument);
}

TEST_CASE("gravity term scales linearly when springs are off") {
  Scene base = chain_scene(0.0, 9.81);
  Scene doubled = chain_scene(0.0, 19.62);
  const auto model_g = energy::make_energy_model(base);
  const auto model_2g = energy::make_energy_model(doubled);
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd alpha(1);
    alpha << coord(engine) * M_PI;
    const auto x = Configuration::articulated(
        Vec3(coord(engine), coord(engine), coord(engine)),
        Quat(coord(engine), coord(engine), coord(engine), coord(engine)).normalized(), alpha);
    const double e1 = energy::potential_energy(model_g, base, x);
    const double e2 = energy::potential_energy(model_2g, doubled, x);
    CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));
  }
}

TEST_CASE("path cost is peak minus start") {
  Scene scene = point_scene(1.0, 1.0);
  const auto model = energy::make_energy_model(scene);

  const auto rises = energy::path_energy_cost(
      model, scene, {at_height(2.0), at_height(5.0), at_height(3.0)});
  CHECK(rises.cost == doctest::Approx(3.0));
  CHECK(rises.energies.front() == doctest::Approx(2.0));

  const auto descends = energy::path_energy_cost(
      model, scene, {at_height(4.0), at_height(3.0), at_height(1.0)});
  CHECK(descends.cost == 0.0);

  const auto still = energy::path_energy_cost(model, scene, {at_height(4.0)});
  CHECK(still.cost == 0.0);
  CHECK(still.waypoints.size() == 1);
}

TEST_CASE("densification catches a peak between waypoints") {
  Scene scene = point_scene(1.0, 1.0);
  const auto model = energy::make_energy_model(scene);
  const auto path = energy::path_energy_cost(
      model, scene, {at_height(1.0), at_height(4.0), at_height(1.0)});
  CHECK(path.cost == doctest::Approx(3.0));
  CHECK(path.waypoints.size() >= 100);
  double peak = 0.0;
  for (double e : path.energies) peak = std::max(peak, e);
  CHECK(peak == doctest::Approx(4.0));
}

TEST_CASE("reversing a path shifts cost by the endpoint gap") {
  Scene scene = point_scene(1.0, 1.0);
  const auto model = energy::make_energy_model(scene);
  std::mt19937_64 engine(19);
  std::uniform_real_distribution<double> height(0.0, 5.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Configuration> waypoints;
    for (int i = 0; i < 5; ++i) waypoints.push_back(at_height(height(engine)));
    std::vector<Configuration> reversed(waypoints.rbegin(), waypoints.rend());

    const auto forward = energy::path_energy_cost(model, scene, waypoints);
    const auto backward = energy::path_energy_cost(model, scene, reversed);
    CHECK(forward.cost >= 0.0);
    CHECK(backward.cost >= 0.0);
    const double e_first = forward.energies.front();
    const double e_last = forward.energies.back();
    CHECK(backward.cost - forward.cost == doctest::Approx(e_first - e_last).epsilon(1e-12));
  }
}

TEST_CASE("paths through contact are refused") {
  Scene scene = point_scene(1.0, 9.81);
  scene.obstacles.push_back(Sphere{Vec3(0.0, 0.0, 0.5), 0.05});
  const auto model = energy::make_energy_model(scene);
  CHECK_THROWS_AS(energy::path_energy_cost(model, scene, {at_height(0.2), at_height(0.8)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(energy::path_energy_cost(model, scene, {}), std::invalid_argument);
}

TEST_CASE("mass normalization turns joules into meters") {
  CHECK(energy::normalized_escape_energy(0.981, 0.1, 9.81) == doctest::Approx(1.0));
  CHECK(energy::normalized_escape_energy(0.0, 2.0, 9.81) == 0.0);
  CHECK(energy::normalized_escape_energy(kInf, 2.0, 9.81) == kInf);
  CHECK_THROWS_AS(energy::normalized_escape_energy(1.0, 0.0, 9.81), std::invalid_argument);
  CHECK_THROWS_AS(energy::normalized_escape_energy(1.0, -1.0, 9.81), std::invalid_argument);
  CHECK_THROWS_AS(energy::normalized_escape_energy(-1.0, 1.0, 9.81), std::invalid_argument);
}
