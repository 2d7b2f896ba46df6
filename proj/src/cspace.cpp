#include "cagekit/cspace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cagekit::cspace {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_same_kind(const Configuration& a, const Configuration& b) {
  require(a.kind == b.kind, "configuration kinds differ");
}

Quat uniform_quaternion(RandomStream& rng) {
  // Shoemake subgroup method.
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double u3 = rng.uniform01();
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  Quat q(b * std::cos(two_pi * u3), a * std::sin(two_pi * u2), a * std::cos(two_pi * u2),
         b * std::sin(two_pi * u3));
  q.normalize();
  return q;
}

}  // namespace

Configuration Configuration::articulated(const Vec3& r, const Quat& q, Eigen::VectorXd alpha) {
  Configuration c;
  c.kind = Kind::Articulated;
  c.position = r;
  c.orientation = q.normalized();
  c.joints = std::move(alpha);
  return c;
}

Configuration Configuration::band(std::vector<Vec3> pts) {
  Configuration c;
  c.kind = Kind::Band;
  c.points = std::move(pts);
  return c;
}

int SpaceDescriptor::dimension() const {
  if (kind == Kind::Band) return 3 * band_points;
  int d = planar ? 2 : 3;
  switch (rotation) {
    case RotationMode::Free: d += 3; break;
    case RotationMode::PlanarY: d += 1; break;
    case RotationMode::Fixed: break;
  }
  return d + static_cast<int>(joint_limits.size());
}

void SpaceDescriptor::validate() const {
  require(w_pos > 0.0 && w_rot > 0.0 && w_joint > 0.0, "metric weights must be positive");
  const Vec3 ext = position_bounds.max() - position_bounds.min();
  require(ext.x() > 0.0 && ext.z() > 0.0, "position bounds need positive extent");
  if (!planar) require(ext.y() > 0.0, "position bounds need positive extent on y");
  for (const auto& jl : joint_limits) {
    require(jl.lower <= jl.upper, "joint limit interval inverted");
    require(jl.lower >= -std::numbers::pi && jl.upper <= std::numbers::pi,
            "joint limits must lie within [-pi, pi]");
  }
  if (kind == Kind::Band) require(band_points >= 3, "band needs at least 3 points");
}

SpaceDescriptor SpaceDescriptor::planar_point(const Eigen::AlignedBox3d& bounds) {
  SpaceDescriptor s;
  s.kind = Kind::Articulated;
  s.planar = true;
  s.rotation = RotationMode::Fixed;
  s.position_bounds = bounds;
  return s;
}

SpaceDescriptor SpaceDescriptor::planar_rigid(const Eigen::AlignedBox3d& bounds,
                                              std::vector<JointLimit> limits) {
  SpaceDescriptor s;
  s.kind = Kind::Articulated;
  s.planar = true;
  s.rotation = RotationMode::PlanarY;
  s.position_bounds = bounds;
  s.joint_limits = std::move(limits);
  return s;
}

SpaceDescriptor SpaceDescriptor::spatial(const Eigen::AlignedBox3d& bounds,
                                         std::vector<JointLimit> limits) {
  SpaceDescriptor s;
  s.kind = Kind::Articulated;
  s.position_bounds = bounds;
  s.joint_limits = std::move(limits);
  return s;
}

SpaceDescriptor SpaceDescriptor::band(const Eigen::AlignedBox3d& bounds, int n_points) {
  SpaceDescriptor s;
  s.kind = Kind::Band;
  s.position_bounds = bounds;
  s.band_points = n_points;
  return s;
}

Configuration sample_uniform(const SpaceDescriptor& space, RandomStream& rng) {
  const Vec3 lo = space.position_bounds.min();
  const Vec3 hi = space.position_bounds.max();
  auto sample_point = [&]() {
    Vec3 p(rng.uniform(lo.x(), hi.x()),
           space.planar ? 0.0 : rng.uniform(lo.y(), hi.y()),
           rng.uniform(lo.z(), hi.z()));
    return p;
  };

  if (space.kind == SpaceDescriptor::Kind::Band) {
    std::vector<Vec3> pts(space.band_points);
    for (auto& p : pts) p = sample_point();
    return Configuration::band(std::move(pts));
  }

  const Vec3 r = sample_point();
  Quat q = Quat::Identity();
  switch (space.rotation) {
    case SpaceDescriptor::RotationMode::Free:
      q = uniform_quaternion(rng);
      break;
    case SpaceDescriptor::RotationMode::PlanarY: {
      const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
      q = Quat(Eigen::AngleAxisd(angle, Vec3::UnitY()));
      break;
    }
    case SpaceDescriptor::RotationMode::Fixed:
      break;
  }
  Eigen::VectorXd alpha(space.joint_limits.size());
  for (int i = 0; i < alpha.size(); ++i) {
    const auto& jl = space.joint_limits[static_cast<size_t>(i)];
    alpha[i] = rng.uniform(jl.lower, jl.upper);
  }
  return Configuration::articulated(r, q, std::move(alpha));
}

Configuration interpolate(const SpaceDescriptor& space, const Configuration& a,
                          const Configuration& b, double t) {
  check_same_kind(a, b);
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  if (a.kind == Configuration::Kind::Band) {
    require(a.points.size() == b.points.size(), "band point counts differ");
    std::vector<Vec3> pts(a.points.size());
    for (size_t i = 0; i < pts.size(); ++i) pts[i] = a.points[i] + t * (b.points[i] - a.points[i]);
    return Configuration::band(std::move(pts));
  }
  require(a.joints.size() == b.joints.size(), "joint vector sizes differ");
  Configuration out;
  out.kind = Configuration::Kind::Articulated;
  out.position = a.position + t * (b.position - a.position);
  if (space.rotation == SpaceDescriptor::RotationMode::Fixed) {
    out.orientation = a.orientation;
  } else {
    out.orientation = a.orientation.slerp(t, b.orientation);
    out.orientation.normalize();
  }
  out.joints = a.joints + t * (b.joints - a.joints);
  return out;
}

double distance(const SpaceDescriptor& space, const Configuration& a, const Configuration& b) {
  check_same_kind(a, b);
  if (a.kind == Configuration::Kind::Band) {
    require(a.points.size() == b.points.size(), "band point counts differ");
    double sum2 = 0.0;
    for (size_t i = 0; i < a.points.size(); ++i) sum2 += (a.points[i] - b.points[i]).squaredNorm();
    return std::sqrt(sum2);
  }
  require(a.joints.size() == b.joints.size(), "joint vector sizes differ");
  double d = space.w_pos * (a.position - b.position).norm();
  if (space.rotation != SpaceDescriptor::RotationMode::Fixed) {
    d += space.w_rot * a.orientation.angularDistance(b.orientation);
  }
  if (a.joints.size() > 0) d += space.w_joint * (a.joints - b.joints).norm();
  return d;
}

}  // namespace cagekit::cspace
