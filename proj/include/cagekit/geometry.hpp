#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <variant>

namespace cagekit::geom {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Rigid transform, rotation then translation.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose compose(const Pose& local) const {
    return Pose{rotation * local.rotation, rotation * local.translation + translation};
  }
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

// Oriented box, half_extents along the local axes of pose.
struct Box {
  Pose pose;
  Vec3 half_extents = Vec3::Zero();
};

struct Capsule {
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
  double radius = 0.0;
};

using Shape = std::variant<Sphere, Box, Capsule>;

Shape transformed(const Shape& s, const Pose& pose);

double dist_point_segment(const Vec3& p, const Vec3& a, const Vec3& b);
double dist_segment_segment(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
// Distance from a world point to an oriented box (0 inside).
double dist_point_box(const Vec3& p, const Box& box);
// Distance from a segment to an oriented box, convex minimization over the segment.
double dist_segment_box(const Vec3& a, const Vec3& b, const Box& box);
// Separating-axis overlap test for two oriented boxes.
bool boxes_overlap(const Box& a, const Box& b);

bool shapes_overlap(const Shape& a, const Shape& b);

// Conservative axis-aligned bound, used for goal-region validation.
Eigen::AlignedBox3d bounding_box(const Shape& s);

}  // namespace cagekit::geom
