#include <cmath>
#include <random>
#include <vector>

#include "cagekit/energy.hpp"
#include "cagekit/world.hpp"
#include "doctest.h"

using namespace cagekit;
using cspace::Configuration;
using cspace::SpaceDescriptor;
using geom::Box;
using geom::Capsule;
using geom::Pose;
using geom::Quat;
using geom::Sphere;
using geom::Vec3;
using world::Joint;
using world::Link;
using world::ObjectModel;
using world::Scene;

namespace {

ObjectModel point_object(double mass, double radius) {
  ObjectModel object;
  object.links.push_back(Link{mass, Vec3::Zero(), Sphere{Vec3::Zero(), radius}});
  return object;
}

Scene planar_point_scene(double mass = 1.0, double radius = 0.01) {
  Scene scene;
  scene.name = "test";
  scene.object = point_object(mass, radius);
  scene.gravity = 9.81;
  scene.space = SpaceDescriptor::planar_point(
      Eigen::AlignedBox3d(Vec3(-1.0, 0.0, -1.0), Vec3(1.0, 0.0, 1.0)));
  scene.init = Configuration::articulated(Vec3::Zero(), Quat::Identity());
  scene.goal.region = Eigen::AlignedBox3d(Vec3(0.8, -0.1, -0.1), Vec3(0.95, 0.1, 0.1));
  scene.check_resolution = 0.01;
  return scene;
}

ObjectModel two_link_chain() {
  ObjectModel object;
  object.links.push_back(Link{1.0, Vec3::Zero(), Sphere{Vec3::Zero(), 0.05}});
  object.links.push_back(Link{1.0, Vec3(1.0, 0.0, 0.0), Sphere{Vec3(1.0, 0.0, 0.0), 0.05}});
  Joint joint;
  joint.axis = Vec3::UnitZ();
  joint.pivot = Vec3::Zero();
  joint.lower = -M_PI;
  joint.upper = M_PI;
  object.joints.push_back(joint);
  return object;
}

}  // namespace

TEST_CASE("single link rests at its declared offset") {
  ObjectModel object;
  object.links.push_back(Link{2.0, Vec3(0.1, 0.2, 0.3), Sphere{Vec3(0.1, 0.2, 0.3), 0.05}});
  const auto states = world::forward_kinematics(
      object, Configuration::articulated(Vec3::Zero(), Quat::Identity()));
  REQUIRE(states.size() == 1);
  CHECK(states[0].com.isApprox(Vec3(0.1, 0.2, 0.3), 1e-15));
}

TEST_CASE("translating the base translates every center") {
  ObjectModel object = two_link_chain();
  Eigen::VectorXd alpha(1);
  alpha << 0.7;
  const auto at_origin = world::forward_kinematics(
      object, Configuration::articulated(Vec3::Zero(), Quat::Identity(), alpha));
  const auto shifted = world::forward_kinematics(
      object, Configuration::articulated(Vec3(0.0, 0.0, 1.0), Quat::Identity(), alpha));
  REQUIRE(at_origin.size() == shifted.size());
  for (std::size_t i = 0; i < at_origin.size(); ++i)
    CHECK((shifted[i].com - at_origin[i].com).isApprox(Vec3(0.0, 0.0, 1.0), 1e-12));
}

TEST_CASE("quarter turn about z swings the second link onto the y axis") {
  Eigen::VectorXd alpha(1);
  alpha << M_PI / 2.0;
  const auto states = world::forward_kinematics(
      two_link_chain(), Configuration::articulated(Vec3::Zero(), Quat::Identity(), alpha));
  REQUIRE(states.size() == 2);
  CHECK(states[1].com.isApprox(Vec3(0.0, 1.0, 0.0), 1e-12));
}

TEST_CASE("zero configuration composes declared offsets exactly") {
  ObjectModel object = two_link_chain();
  object.joints[0].pivot = Vec3(0.5, 0.0, 0.25);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(1);
  const auto states = world::forward_kinematics(
      object, Configuration::articulated(Vec3::Zero(), Quat::Identity(), alpha));
  CHECK(states[0].com == Vec3(0.0, 0.0, 0.0));
  CHECK(states[1].com == Vec3(1.5, 0.0, 0.25));
}

TEST_CASE("sphere pair collision follows the radius sum") {
  Scene scene = planar_point_scene(1.0, 0.1);
  scene.obstacles.push_back(Sphere{Vec3(0.15, 0.0, 0.0), 0.1});
  CHECK(world::in_collision(scene, Configuration::articulated(Vec3::Zero(), Quat::Identity())));
  scene.obstacles[0] = Sphere{Vec3(0.25, 0.0, 0.0), 0.1};
  CHECK_FALSE(
      world::in_collision(scene, Configuration::articulated(Vec3::Zero(), Quat::Identity())));
}

TEST_CASE("band segment through a box collides") {
  ObjectModel object;
  object.kind = ObjectModel::Kind::Band;
  object.band_points = 3;
  object.band_radius = 0.02;
  object.band_rest_length = 0.5;
  object.band_stiffness = {10.0, 10.0, 10.0};

  Scene scene;
  scene.object = object;
  scene.space = SpaceDescriptor::band(
      Eigen::AlignedBox3d(Vec3(-2.0, -2.0, -2.0), Vec3(2.0, 2.0, 2.0)), 3);
  scene.obstacles.push_back(
      Box{Pose{Quat::Identity(), Vec3(0.0, 0.0, 0.0)}, Vec3(0.1, 0.1, 0.1)});
  scene.goal.region = Eigen::AlignedBox3d(Vec3(1.5, 1.5, 1.5), Vec3(1.9, 1.9, 1.9));
  scene.check_resolution = 0.01;

  const auto through = Configuration::band(
      {Vec3(-1.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)});
  CHECK(world::in_collision(scene, through));
  const auto clear = Configuration::band(
      {Vec3(-1.0, 0.0, 1.0), Vec3(1.0, 0.0, 1.0), Vec3(0.0, 1.0, 1.0)});
  CHECK_FALSE(world::in_collision(scene, clear));
}

TEST_CASE("collision is invariant under a shared rigid transform") {
  Scene scene = planar_point_scene(1.0, 0.05);
  scene.space = SpaceDescriptor::spatial(
      Eigen::AlignedBox3d(Vec3(-2.0, -2.0, -2.0), Vec3(2.0, 2.0, 2.0)));
  scene.obstacles.push_back(Sphere{Vec3(0.3, 0.1, 0.0), 0.12});
  scene.obstacles.push_back(
      Box{Pose{Quat::Identity(), Vec3(-0.2, 0.0, 0.3)}, Vec3(0.1, 0.2, 0.05)});
  scene.obstacles.push_back(Capsule{Vec3(0.0, -0.4, 0.0), Vec3(0.0, -0.1, 0.2), 0.06});

  std::mt19937_64 engine(2024);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Quat rot = Quat(unit(engine), unit(engine), unit(engine), unit(engine)).normalized();
    const Pose transform{rot, Vec3(unit(engine), unit(engine), unit(engine))};

    Scene moved = scene;
    for (auto& obstacle : moved.obstacles) obstacle = geom::transformed(obstacle, transform);

    const Vec3 r(unit(engine) * 0.5, unit(engine) * 0.5, unit(engine) * 0.5);
    const auto x = Configuration::articulated(r, Quat::Identity());
    const auto moved_x = Configuration::articulated(transform.apply(r), transform.rotation);
    CHECK(world::in_collision(scene, x) == world::in_collision(moved, moved_x));
  }
}

TEST_CASE("degenerate motion at a valid point is valid") {
  Scene scene = planar_point_scene();
  const auto model = energy::make_energy_model(scene);
  const auto a = Configuration::articulated(Vec3(0.2, 0.0, 0.1), Quat::Identity());
  CHECK(world::motion_valid(scene, model, a, a,
                            std::numeric_limits<double>::infinity()));
}

TEST_CASE("motion through an obstacle is rejected") {
  Scene scene = planar_point_scene(1.0, 0.01);
  scene.obstacles.push_back(Sphere{Vec3(0.0, 0.0, 0.5), 0.08});
  const auto model = energy::make_energy_model(scene);
  const auto a = Configuration::articulated(Vec3(-0.3, 0.0, 0.5), Quat::Identity());
  const auto b = Configuration::articulated(Vec3(0.3, 0.0, 0.5), Quat::Identity());
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_FALSE(world::motion_valid(scene, model, a, b, inf));
  CHECK(world::motion_valid(scene, model, a, a, inf));
}

TEST_CASE("motion that climbs past the energy bound is rejected") {
  Scene scene = planar_point_scene();
  const auto model = energy::make_energy_model(scene);
  const auto a = Configuration::articulated(Vec3(-0.4, 0.0, 0.0), Quat::Identity());
  const auto apex = Configuration::articulated(Vec3(0.0, 0.0, 0.6), Quat::Identity());
  const auto b = Configuration::articulated(Vec3(0.4, 0.0, 0.0), Quat::Identity());

  const double e_abs = 9.81 * 0.5;
  CHECK(world::motion_valid(scene, model, a, b, e_abs));
  CHECK_FALSE(world::motion_valid(scene, model, a, apex, e_abs));
  CHECK(world::motion_valid(scene, model, a, apex, 9.81 * 0.6 + 1e-9));
}

TEST_CASE("motion validity is symmetric") {
  Scene scene = planar_point_scene(1.0, 0.01);
  scene.obstacles.push_back(Sphere{Vec3(0.1, 0.0, 0.3), 0.05});
  const auto model = energy::make_energy_model(scene);
  std::mt19937_64 engine(7);
  std::uniform_real_distribution<double> coord(-0.9, 0.9);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = Configuration::articulated(Vec3(coord(engine), 0.0, coord(engine)),
                                              Quat::Identity());
    const auto b = Configuration::articulated(Vec3(coord(engine), 0.0, coord(engine)),
                                              Quat::Identity());
    const double e_abs = 9.81 * 0.4;
    CHECK(world::motion_valid(scene, model, a, b, e_abs) ==
          world::motion_valid(scene, model, b, a, e_abs));
  }
}

TEST_CASE("goal membership checks region and joint tolerance") {
  Scene scene = planar_point_scene();
  scene.object = two_link_chain();
  scene.space = SpaceDescriptor::spatial(
      Eigen::AlignedBox3d(Vec3(-2.0, -2.0, -2.0), Vec3(2.0, 2.0, 2.0)),
      {cspace::JointLimit{-M_PI, M_PI}});
  scene.goal.region = Eigen::AlignedBox3d(Vec3(0.5, -0.2, -0.2), Vec3(1.0, 0.2, 0.2));
  scene.goal.joint_tolerance = 0.05;

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(world::in_goal(scene,
                       Configuration::articulated(Vec3(0.75, 0.0, 0.0), Quat::Identity(), zero)));
  CHECK_FALSE(world::in_goal(
      scene, Configuration::articulated(Vec3(0.2, 0.0, 0.0), Quat::Identity(), zero)));

  Eigen::VectorXd bent(1);
  bent << 0.06;
  CHECK_FALSE(world::in_goal(
      scene, Configuration::articulated(Vec3(0.75, 0.0, 0.0), Quat::Identity(), bent)));
  bent << 0.05;
  CHECK(world::in_goal(
      scene, Configuration::articulated(Vec3(0.75, 0.0, 0.0), Quat::Identity(), bent)));
}

TEST_CASE("band goal needs every point inside and low stretch") {
  ObjectModel object;
  object.kind = ObjectModel::Kind::Band;
  object.band_points = 3;
  object.band_radius = 0.01;
  object.band_rest_length = 0.4;
  object.band_stiffness = {10.0, 10.0, 10.0};

  Scene scene;
  scene.object = object;
  scene.space = SpaceDescriptor::band(
      Eigen::AlignedBox3d(Vec3(-1.0, -1.0, -1.0), Vec3(1.0, 1.0, 1.0)), 3);
  scene.goal.region = Eigen::AlignedBox3d(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
  scene.goal.energy_tolerance = 1e-3;
  scene.check_resolution = 0.01;

  CHECK(world::in_goal(scene, Configuration::band({Vec3(0.0, 0.0, 0.0), Vec3(0.25, 0.0, 0.0),
                                                   Vec3(0.0, 0.25, 0.0)})));
  CHECK_FALSE(world::in_goal(scene, Configuration::band({Vec3(0.0, 0.0, 0.0),
                                                         Vec3(0.3, 0.0, 0.0),
                                                         Vec3(0.0, 0.9, 0.0)})));
  CHECK_FALSE(world::in_goal(scene, Configuration::band({Vec3(-0.45, 0.0, 0.0),
                                                         Vec3(0.45, 0.0, 0.0),
                                                         Vec3(0.0, 0.45, 0.0)})));
}

TEST_CASE("scene validation names the broken part") {
  Scene scene = planar_point_scene(1.0, 0.05);
  scene.obstacles.push_back(Sphere{Vec3(0.0, 0.0, 0.0), 0.2});
  CHECK_THROWS_WITH_AS(world::validate_scene(scene),
                       "scene: initial configuration must be collision free",
                       std::invalid_argument);

  Scene overlap = planar_point_scene();
  overlap.obstacles.push_back(Sphere{Vec3(0.85, 0.0, 0.0), 0.05});
  CHECK_THROWS_WITH_AS(world::validate_scene(overlap),
                       "scene: goal region must be disjoint from obstacle bounds",
                       std::invalid_argument);

  Scene good = planar_point_scene();
  good.obstacles.push_back(Sphere{Vec3(0.0, 0.0, -0.6), 0.2});
  CHECK_NOTHROW(world::validate_scene(good));

  Scene bad_object = planar_point_scene();
  bad_object.object.links[0].mass = -1.0;
  CHECK_THROWS_AS(world::validate_scene(bad_object), std::invalid_argument);
}

TEST_CASE("check resolution derives from the smallest obstacle feature") {
  Scene scene = planar_point_scene();
  scene.check_resolution = 0.0;
  CHECK(scene.effective_check_resolution() == doctest::Approx(0.05));
  scene.obstacles.push_back(Sphere{Vec3(0.0, 0.0, -0.6), 0.2});
  scene.obstacles.push_back(Capsule{Vec3(0.0, 0.0, -1.0), Vec3(0.5, 0.0, -1.0), 0.08});
  CHECK(scene.effective_check_resolution() == doctest::Approx(0.04));
  scene.check_resolution = 0.015;
  CHECK(scene.effective_check_resolution() == doctest::Approx(0.015));
}
