#pragma once

#include <string>
#include <vector>

#include "cagekit/cspace.hpp"
#include "cagekit/geometry.hpp"

namespace cagekit::energy {
struct EnergyModel;
}

namespace cagekit::world {

using cspace::Configuration;
using cspace::SpaceDescriptor;
using geom::Capsule;
using geom::Pose;
using geom::Quat;
using geom::Shape;
using geom::Vec3;

// Shape and center of mass are fixed offsets in the frame of the link's
// inboard joint (the base frame for link 0).
struct Link {
  double mass = 0.0;
  Vec3 com_offset = Vec3::Zero();
  Shape shape;
};

struct Joint {
  Vec3 axis = Vec3::UnitZ();   // in parent link frame
  Vec3 pivot = Vec3::Zero();   // in parent link frame
  double lower = 0.0;
  double upper = 0.0;
  double stiffness = 0.0;      // N*m/rad, spring centered at 0
};

struct ObjectModel {
  enum class Kind { Articulated, Band };

  Kind kind = Kind::Articulated;
  std::vector<Link> links;   // serial chain, joints.size() == links.size() - 1
  std::vector<Joint> joints;

  int band_points = 0;
  double band_radius = 0.0;       // collision radius of each segment
  double band_rest_length = 0.0;  // per segment
  std::vector<double> band_stiffness;  // N/m, one per segment

  void validate() const;
};

// Position box; joint_tolerance gates articulated goals, energy_tolerance
// gates band goals.
struct GoalSpec {
  Eigen::AlignedBox3d region;
  double joint_tolerance = 0.05;
  double energy_tolerance = 1e-3;
};

struct Scene {
  std::string name;
  ObjectModel object;
  std::vector<Shape> obstacles;
  double gravity = 9.81;
  Configuration init;
  GoalSpec goal;
  SpaceDescriptor space;
  double check_resolution = 0.0;  // 0 means derive from smallest obstacle feature

  double effective_check_resolution() const;
};

struct LinkState {
  Vec3 com = Vec3::Zero();
  Shape shape;  // world frame
};

std::vector<LinkState> forward_kinematics(const ObjectModel& object, const Configuration& x);

// World-frame collision shapes of the object at x (band segments included).
std::vector<Shape> object_shapes(const ObjectModel& object, const Configuration& x);

bool in_collision(const Scene& scene, const Configuration& x);

bool in_goal(const Scene& scene, const Configuration& x);

// Straight-line local motion check: interior sampled at the scene's check
// resolution, every sample collision-free with energy <= e_abs.
bool motion_valid(const Scene& scene, const energy::EnergyModel& model, const Configuration& a,
                  const Configuration& b, double e_abs);

// Sample count for an edge so consecutive samples are closer than delta.
int edge_sample_count(const SpaceDescriptor& space, const Configuration& a, const Configuration& b,
                      double delta);

// Consistency checks on a fully assembled scene; throws std::invalid_argument
// naming the offending part.
void validate_scene(const Scene& scene);

}  // namespace cagekit::world
