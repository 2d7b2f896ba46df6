#include "cagekit/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cagekit/energy.hpp"

namespace cagekit::world {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double feature_radius(const Shape& shape) {
  struct Visitor {
    double operator()(const geom::Sphere& s) const { return s.radius; }
    double operator()(const geom::Box& b) const { return b.half_extents.minCoeff(); }
    double operator()(const geom::Capsule& c) const { return c.radius; }
  };
  return std::visit(Visitor{}, shape);
}

void validate_shape(const Shape& shape, const std::string& what) {
  struct Visitor {
    const std::string& what;
    void operator()(const geom::Sphere& s) const {
      require(s.radius > 0.0, what + ": sphere radius must be positive");
    }
    void operator()(const geom::Box& b) const {
      require(b.half_extents.minCoeff() > 0.0, what + ": box half extents must be positive");
    }
    void operator()(const geom::Capsule& c) const {
      require(c.radius > 0.0, what + ": capsule radius must be positive");
    }
  };
  std::visit(Visitor{what}, shape);
}

}  // namespace

void ObjectModel::validate() const {
  if (kind == Kind::Articulated) {
    require(!links.empty(), "object: articulated model needs at least one link");
    require(joints.size() + 1 == links.size(),
            "object: serial chain needs exactly links-1 joints");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const std::string what = "object link " + std::to_string(i);
      require(links[i].mass >= 0.0, what + ": mass must be nonnegative");
      validate_shape(links[i].shape, what);
    }
    for (std::size_t j = 0; j < joints.size(); ++j) {
      const std::string what = "object joint " + std::to_string(j);
      require(joints[j].axis.norm() > 1e-12, what + ": axis must be nonzero");
      require(joints[j].lower <= joints[j].upper, what + ": limits must be ordered");
      require(joints[j].lower >= -M_PI - 1e-12 && joints[j].upper <= M_PI + 1e-12,
              what + ": limits must lie within [-pi, pi]");
      require(joints[j].stiffness >= 0.0, what + ": stiffness must be nonnegative");
    }
  } else {
    require(band_points >= 3, "object: band needs at least 3 points");
    require(band_radius > 0.0, "object: band radius must be positive");
    require(band_rest_length > 0.0, "object: band rest length must be positive");
    require(static_cast<int>(band_stiffness.size()) == band_points,
            "object: band needs one stiffness per segment");
    for (double k : band_stiffness)
      require(k >= 0.0, "object: band stiffness must be nonnegative");
  }
}

double Scene::effective_check_resolution() const {
  if (check_resolution > 0.0) return check_resolution;
  double smallest = std::numeric_limits<double>::infinity();
  for (const Shape& s : obstacles) smallest = std::min(smallest, feature_radius(s));
  if (!std::isfinite(smallest)) return 0.05;
  return 0.5 * smallest;
}

std::vector<LinkState> forward_kinematics(const ObjectModel& object, const Configuration& x) {
  if (object.kind != ObjectModel::Kind::Articulated || x.kind != Configuration::Kind::Articulated)
    throw std::invalid_argument("forward_kinematics: articulated object and configuration required");
  if (static_cast<std::size_t>(x.joints.size()) != object.joints.size())
    throw std::invalid_argument("forward_kinematics: joint angle count mismatch");

  std::vector<LinkState> states;
  states.reserve(object.links.size());
  Pose frame{x.orientation, x.position};
  for (std::size_t i = 0; i < object.links.size(); ++i) {
    if (i > 0) {
      const Joint& joint = object.joints[i - 1];
      const Quat rot(Eigen::AngleAxisd(x.joints[static_cast<int>(i) - 1], joint.axis.normalized()));
      frame = frame.compose(Pose{rot, joint.pivot});
    }
    LinkState state;
    state.com = frame.apply(object.links[i].com_offset);
    state.shape = geom::transformed(object.links[i].shape, frame);
    states.push_back(std::move(state));
  }
  return states;
}

std::vector<Shape> object_shapes(const ObjectModel& object, const Configuration& x) {
  if (object.kind == ObjectModel::Kind::Band) {
    if (x.kind != Configuration::Kind::Band)
      throw std::invalid_argument("object_shapes: band configuration required");
    const std::size_t n = x.points.size();
    std::vector<Shape> shapes;
    shapes.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      shapes.push_back(Capsule{x.points[i], x.points[(i + 1) % n], object.band_radius});
    return shapes;
  }
  std::vector<Shape> shapes;
  for (const LinkState& state : forward_kinematics(object, x)) shapes.push_back(state.shape);
  return shapes;
}

bool in_collision(const Scene& scene, const Configuration& x) {
  const std::vector<Shape> shapes = object_shapes(scene.object, x);
  for (const Shape& part : shapes)
    for (const Shape& obstacle : scene.obstacles)
      if (geom::shapes_overlap(part, obstacle)) return true;
  return false;
}

bool in_goal(const Scene& scene, const Configuration& x) {
  if (x.kind == Configuration::Kind::Band) {
    for (const Vec3& p : x.points)
      if (!scene.goal.region.contains(p)) return false;
    return energy::band_elastic_energy(scene.object, x.points) <=
           scene.goal.energy_tolerance;
  }
  if (!scene.goal.region.contains(x.position)) return false;
  return x.joints.size() == 0 ||
         x.joints.cwiseAbs().maxCoeff() <= scene.goal.joint_tolerance;
}

int edge_sample_count(const SpaceDescriptor& space, const Configuration& a, const Configuration& b,
                      double delta) {
  const double dist = cspace::distance(space, a, b);
  if (!(delta > 0.0)) throw std::invalid_argument("edge_sample_count: delta must be positive");
  return std::max(1, static_cast<int>(std::ceil(dist / delta)));
}

bool motion_valid(const Scene& scene, const energy::EnergyModel& model, const Configuration& a,
                  const Configuration& b, double e_abs) {
  const int n = edge_sample_count(scene.space, a, b, scene.effective_check_resolution());
  for (int i = 0; i <= n; ++i) {
    const Configuration x =
        cspace::interpolate(scene.space, a, b, static_cast<double>(i) / n);
    const double e = energy::potential_energy(model, scene, x);
    if (std::isinf(e) || e > e_abs) return false;
  }
  return true;
}

void validate_scene(const Scene& scene) {
  scene.object.validate();
  scene.space.validate();
  require(scene.gravity >= 0.0, "scene: gravity must be nonnegative");
  require(scene.check_resolution >= 0.0, "scene: check resolution must be nonnegative");
  require(!scene.goal.region.isEmpty(), "scene: goal region must be nonempty");
  require(scene.goal.joint_tolerance >= 0.0, "scene: goal joint tolerance must be nonnegative");
  require(scene.goal.energy_tolerance >= 0.0, "scene: goal energy tolerance must be nonnegative");

  const bool band_object = scene.object.kind == ObjectModel::Kind::Band;
  require(band_object == (scene.space.kind == SpaceDescriptor::Kind::Band),
          "scene: object and space variants must agree");
  require(band_object == (scene.init.kind == Configuration::Kind::Band),
          "scene: object and initial configuration variants must agree");
  if (band_object) {
    require(static_cast<int>(scene.init.points.size()) == scene.object.band_points,
            "scene: initial band point count mismatch");
    require(scene.space.band_points == scene.object.band_points,
            "scene: space band point count mismatch");
  } else {
    require(scene.init.joints.size() == static_cast<int>(scene.object.joints.size()),
            "scene: initial joint angle count mismatch");
    require(scene.space.joint_limits.size() == scene.object.joints.size(),
            "scene: space joint limit count mismatch");
  }

  for (std::size_t i = 0; i < scene.obstacles.size(); ++i)
    validate_shape(scene.obstacles[i], "obstacle " + std::to_string(i));
  for (const Shape& s : scene.obstacles)
    require(!scene.goal.region.intersects(geom::bounding_box(s)),
            "scene: goal region must be disjoint from obstacle bounds");
  require(!in_collision(scene, scene.init),
          "scene: initial configuration must be collision free");
}

}  // namespace cagekit::world
