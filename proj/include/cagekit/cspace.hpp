#pragma once

#include <vector>

#include "cagekit/geometry.hpp"
#include "cagekit/random.hpp"

namespace cagekit::cspace {

using geom::Quat;
using geom::Vec3;

struct Configuration {
  enum class Kind { Articulated, Band };

  Kind kind = Kind::Articulated;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Eigen::VectorXd joints;
  std::vector<Vec3> points;

  static Configuration articulated(const Vec3& r, const Quat& q,
                                   Eigen::VectorXd alpha = Eigen::VectorXd());
  static Configuration band(std::vector<Vec3> pts);
};

struct JointLimit {
  double lower = 0.0;
  double upper = 0.0;
};

struct SpaceDescriptor {
  enum class Kind { Articulated, Band };
  enum class RotationMode { Free, PlanarY, Fixed };

  Kind kind = Kind::Articulated;
  bool planar = false;  // position y locked to 0
  RotationMode rotation = RotationMode::Free;
  Eigen::AlignedBox3d position_bounds;  // base position, or every band point
  std::vector<JointLimit> joint_limits;
  int band_points = 0;
  double w_pos = 1.0;
  double w_rot = 1.0;
  double w_joint = 1.0;

  int dimension() const;
  void validate() const;  // throws std::invalid_argument

  static SpaceDescriptor planar_point(const Eigen::AlignedBox3d& bounds);
  static SpaceDescriptor planar_rigid(const Eigen::AlignedBox3d& bounds,
                                      std::vector<JointLimit> limits = {});
  static SpaceDescriptor spatial(const Eigen::AlignedBox3d& bounds,
                                 std::vector<JointLimit> limits = {});
  static SpaceDescriptor band(const Eigen::AlignedBox3d& bounds, int n_points);
};

Configuration sample_uniform(const SpaceDescriptor& space, RandomStream& rng);

// t=0 gives a, t=1 gives b; rotations move along the shorter arc.
Configuration interpolate(const SpaceDescriptor& space, const Configuration& a,
                          const Configuration& b, double t);

double distance(const SpaceDescriptor& space, const Configuration& a, const Configuration& b);

}  // namespace cagekit::cspace
