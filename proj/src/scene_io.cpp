#include "cagekit/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace cagekit::scene_io {
namespace {

using geom::Box;
using geom::Capsule;
using geom::Pose;
using geom::Quat;
using geom::Shape;
using geom::Sphere;
using geom::Vec3;
using nlohmann::json;

// Half thickness given to goal boxes authored with 2-component corners in
// planar scenes, so the y=0 plane lies strictly inside.
constexpr double kPlanarGoalHalfWidth = 0.1;

[[noreturn]] void fail(const std::string& message) { throw SceneError("scene file: " + message); }

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path.empty() ? "document must be an object" : path + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail("missing field " + join(path, key));
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  if (!obj.is_object()) fail(path.empty() ? "document must be an object" : path + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&key](const char* k) { return key == k; }) == allowed.end()) {
      fail("unknown field " + join(path, key));
    }
  }
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path + " must be a number");
  return v.get<double>();
}

int as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path + " must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path + " must be a string");
  return v.get<std::string>();
}

// Points may be written [x, z] in planar scenes; y is then 0.
Vec3 as_point(const json& v, bool planar, const std::string& path) {
  if (!v.is_array()) fail(path + " must be an array");
  if (planar && v.size() == 2) {
    return Vec3(as_number(v[0], path + "[0]"), 0.0, as_number(v[1], path + "[1]"));
  }
  if (v.size() == 3) {
    return Vec3(as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
                as_number(v[2], path + "[2]"));
  }
  fail(path + (planar ? " must have 2 or 3 components" : " must have 3 components"));
}

Vec3 as_box_corner(const json& v, bool planar, bool lower, const std::string& path) {
  if (planar && v.is_array() && v.size() == 2) {
    const double y = lower ? -kPlanarGoalHalfWidth : kPlanarGoalHalfWidth;
    return Vec3(as_number(v[0], path + "[0]"), y, as_number(v[1], path + "[1]"));
  }
  return as_point(v, planar, path);
}

Quat as_quaternion(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) fail(path + " must be [w, x, y, z]");
  Quat q(as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
         as_number(v[2], path + "[2]"), as_number(v[3], path + "[3]"));
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    fail(path + " must be a unit quaternion (norm " + std::to_string(q.norm()) + ")");
  }
  q.normalize();
  return q;
}

Shape parse_single_shape(const json& v, bool planar, const std::string& path) {
  const std::string type = as_string(require_field(v, "type", path), join(path, "type"));
  if (type == "sphere") {
    check_keys(v, {"type", "center", "radius"}, path);
    Sphere s;
    s.center = as_point(require_field(v, "center", path), planar, join(path, "center"));
    s.radius = as_number(require_field(v, "radius", path), join(path, "radius"));
    return s;
  }
  if (type == "capsule") {
    check_keys(v, {"type", "p0", "p1", "radius"}, path);
    Capsule c;
    c.p0 = as_point(require_field(v, "p0", path), planar, join(path, "p0"));
    c.p1 = as_point(require_field(v, "p1", path), planar, join(path, "p1"));
    c.radius = as_number(require_field(v, "radius", path), join(path, "radius"));
    return c;
  }
  if (type == "box") {
    check_keys(v, {"type", "center", "half_extents", "rotation"}, path);
    Box b;
    b.pose.translation = as_point(require_field(v, "center", path), planar, join(path, "center"));
    const auto& he = require_field(v, "half_extents", path);
    if (!he.is_array() || he.size() != 3) fail(join(path, "half_extents") + " must have 3 components");
    b.half_extents = as_point(he, false, join(path, "half_extents"));
    if (const json* rot = optional_field(v, "rotation")) {
      b.pose.rotation = as_quaternion(*rot, join(path, "rotation"));
    }
    return b;
  }
  fail(join(path, "type") + " must be sphere, capsule, box, or capsule_ring");
}

// capsule_ring is authoring shorthand: a regular polygon of capsules around
// an axis, used for rims and ring stacks.
void append_shapes(std::vector<Shape>& out, const json& v, bool planar, const std::string& path) {
  const std::string type = as_string(require_field(v, "type", path), join(path, "type"));
  if (type != "capsule_ring") {
    out.push_back(parse_single_shape(v, planar, path));
    return;
  }
  check_keys(v, {"type", "center", "radius", "segments", "tube_radius", "axis"}, path);
  const Vec3 center = as_point(require_field(v, "center", path), planar, join(path, "center"));
  const double radius = as_number(require_field(v, "radius", path), join(path, "radius"));
  const int segments = as_integer(require_field(v, "segments", path), join(path, "segments"));
  const double tube = as_number(require_field(v, "tube_radius", path), join(path, "tube_radius"));
  if (segments < 3) fail(join(path, "segments") + " must be at least 3");
  if (!(radius > 0.0)) fail(join(path, "radius") + " must be positive");
  Vec3 axis = Vec3::UnitZ();
  if (const json* a = optional_field(v, "axis")) {
    axis = as_point(*a, false, join(path, "axis"));
    if (axis.norm() < 1e-12) fail(join(path, "axis") + " must be nonzero");
    axis.normalize();
  }
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = axis.cross(helper).normalized();
  const Vec3 w = axis.cross(u);
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(segments));
  for (int i = 0; i < segments; ++i) {
    const double theta = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(segments);
    vertices.push_back(center + radius * (std::cos(theta) * u + std::sin(theta) * w));
  }
  for (int i = 0; i < segments; ++i) {
    out.push_back(Capsule{vertices[static_cast<std::size_t>(i)],
                          vertices[static_cast<std::size_t>((i + 1) % segments)], tube});
  }
}

Eigen::AlignedBox3d parse_bounds(const json& v, bool planar, const std::string& path) {
  check_keys(v, {"min", "max"}, path);
  const Vec3 lo = as_point(require_field(v, "min", path), planar, join(path, "min"));
  const Vec3 hi = as_point(require_field(v, "max", path), planar, join(path, "max"));
  return Eigen::AlignedBox3d(lo, hi);
}

world::ObjectModel parse_object(const json& v) {
  check_keys(v, {"type", "links", "joints", "points", "radius", "rest_length", "stiffness"},
             "object");
  world::ObjectModel object;
  const std::string type = as_string(require_field(v, "type", "object"), "object.type");
  if (type == "articulated") {
    object.kind = world::ObjectModel::Kind::Articulated;
    const auto& links = require_field(v, "links", "object");
    if (!links.is_array() || links.empty()) fail("object.links must be a nonempty array");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const std::string path = "object.links[" + std::to_string(i) + "]";
      const auto& lv = links[i];
      check_keys(lv, {"mass", "com", "shape"}, path);
      world::Link link;
      link.mass = as_number(require_field(lv, "mass", path), join(path, "mass"));
      if (const json* com = optional_field(lv, "com")) {
        link.com_offset = as_point(*com, false, join(path, "com"));
      }
      link.shape = parse_single_shape(require_field(lv, "shape", path), false, join(path, "shape"));
      object.links.push_back(link);
    }
    if (const json* joints = optional_field(v, "joints")) {
      if (!joints->is_array()) fail("object.joints must be an array");
      for (std::size_t i = 0; i < joints->size(); ++i) {
        const std::string path = "object.joints[" + std::to_string(i) + "]";
        const auto& jv = (*joints)[i];
        check_keys(jv, {"axis", "pivot", "limits", "stiffness"}, path);
        world::Joint joint;
        joint.axis = as_point(require_field(jv, "axis", path), false, join(path, "axis"));
        if (const json* pivot = optional_field(jv, "pivot")) {
          joint.pivot = as_point(*pivot, false, join(path, "pivot"));
        }
        const auto& limits = require_field(jv, "limits", path);
        if (!limits.is_array() || limits.size() != 2) {
          fail(join(path, "limits") + " must be [lower, upper]");
        }
        joint.lower = as_number(limits[0], join(path, "limits") + "[0]");
        joint.upper = as_number(limits[1], join(path, "limits") + "[1]");
        if (const json* k = optional_field(jv, "stiffness")) {
          joint.stiffness = as_number(*k, join(path, "stiffness"));
        }
        object.joints.push_back(joint);
      }
    }
    return object;
  }
  if (type == "band") {
    object.kind = world::ObjectModel::Kind::Band;
    object.band_points = as_integer(require_field(v, "points", "object"), "object.points");
    object.band_radius = as_number(require_field(v, "radius", "object"), "object.radius");
    object.band_rest_length =
        as_number(require_field(v, "rest_length", "object"), "object.rest_length");
    const auto& stiffness = require_field(v, "stiffness", "object");
    if (stiffness.is_number()) {
      object.band_stiffness.assign(static_cast<std::size_t>(std::max(object.band_points, 0)),
                                   stiffness.get<double>());
    } else if (stiffness.is_array()) {
      for (std::size_t i = 0; i < stiffness.size(); ++i) {
        object.band_stiffness.push_back(
            as_number(stiffness[i], "object.stiffness[" + std::to_string(i) + "]"));
      }
    } else {
      fail("object.stiffness must be a number or an array");
    }
    return object;
  }
  fail("object.type must be articulated or band");
}

cspace::SpaceDescriptor parse_space(const json& v, const world::ObjectModel& object) {
  check_keys(v, {"type", "bounds", "weights"}, "space");
  const std::string type = as_string(require_field(v, "type", "space"), "space.type");
  const bool planar = type == "planar_point" || type == "planar_rigid";
  const auto bounds = parse_bounds(require_field(v, "bounds", "space"), planar, "space.bounds");

  std::vector<cspace::JointLimit> limits;
  for (const auto& joint : object.joints) limits.push_back({joint.lower, joint.upper});

  cspace::SpaceDescriptor space;
  if (type == "planar_point") {
    if (!object.joints.empty()) fail("space.type planar_point requires a jointless object");
    space = cspace::SpaceDescriptor::planar_point(bounds);
  } else if (type == "planar_rigid") {
    space = cspace::SpaceDescriptor::planar_rigid(bounds, std::move(limits));
  } else if (type == "spatial") {
    space = cspace::SpaceDescriptor::spatial(bounds, std::move(limits));
  } else if (type == "band") {
    if (object.kind != world::ObjectModel::Kind::Band) {
      fail("space.type band requires object.type band");
    }
    space = cspace::SpaceDescriptor::band(bounds, object.band_points);
  } else {
    fail("space.type must be planar_point, planar_rigid, spatial, or band");
  }
  if (object.kind == world::ObjectModel::Kind::Band && type != "band") {
    fail("object.type band requires space.type band");
  }

  if (const json* weights = optional_field(v, "weights")) {
    check_keys(*weights, {"position", "rotation", "joint"}, "space.weights");
    if (const json* wp = optional_field(*weights, "position")) {
      space.w_pos = as_number(*wp, "space.weights.position");
    }
    if (const json* wr = optional_field(*weights, "rotation")) {
      space.w_rot = as_number(*wr, "space.weights.rotation");
    }
    if (const json* wj = optional_field(*weights, "joint")) {
      space.w_joint = as_number(*wj, "space.weights.joint");
    }
  }
  return space;
}

cspace::Configuration parse_init(const json& v, const world::ObjectModel& object, bool planar) {
  if (object.kind == world::ObjectModel::Kind::Band) {
    check_keys(v, {"points"}, "init");
    const auto& points = require_field(v, "points", "init");
    if (!points.is_array() || static_cast<int>(points.size()) != object.band_points) {
      fail("init.points must have " + std::to_string(object.band_points) + " entries");
    }
    std::vector<Vec3> pts;
    pts.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      pts.push_back(as_point(points[i], false, "init.points[" + std::to_string(i) + "]"));
    }
    return cspace::Configuration::band(std::move(pts));
  }

  check_keys(v, {"position", "orientation", "joints"}, "init");
  const Vec3 position =
      as_point(require_field(v, "position", "init"), planar, "init.position");
  Quat orientation = Quat::Identity();
  if (const json* q = optional_field(v, "orientation")) {
    orientation = as_quaternion(*q, "init.orientation");
  }
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(object.joints.size()));
  if (const json* joints = optional_field(v, "joints")) {
    if (!joints->is_array() || joints->size() != object.joints.size()) {
      fail("init.joints must have " + std::to_string(object.joints.size()) + " entries");
    }
    for (std::size_t i = 0; i < joints->size(); ++i) {
      alpha[static_cast<Eigen::Index>(i)] =
          as_number((*joints)[i], "init.joints[" + std::to_string(i) + "]");
    }
  }
  return cspace::Configuration::articulated(position, orientation, std::move(alpha));
}

world::GoalSpec parse_goal(const json& v, bool planar) {
  check_keys(v, {"min", "max", "joint_tolerance", "energy_tolerance"}, "goal");
  world::GoalSpec goal;
  goal.region = Eigen::AlignedBox3d(
      as_box_corner(require_field(v, "min", "goal"), planar, true, "goal.min"),
      as_box_corner(require_field(v, "max", "goal"), planar, false, "goal.max"));
  if (const json* jt = optional_field(v, "joint_tolerance")) {
    goal.joint_tolerance = as_number(*jt, "goal.joint_tolerance");
  }
  if (const json* et = optional_field(v, "energy_tolerance")) {
    goal.energy_tolerance = as_number(*et, "goal.energy_tolerance");
  }
  return goal;
}

References parse_references(const json& v) {
  check_keys(v, {"escape_energy", "derivation"}, "references");
  References refs;
  if (const json* e = optional_field(v, "escape_energy")) {
    if (e->is_string()) {
      if (e->get<std::string>() != "inf") {
        fail("references.escape_energy must be a number or \"inf\"");
      }
      refs.escape_energy = std::numeric_limits<double>::infinity();
    } else {
      refs.escape_energy = as_number(*e, "references.escape_energy");
    }
  }
  if (const json* d = optional_field(v, "derivation")) {
    refs.derivation = as_string(*d, "references.derivation");
  }
  return refs;
}

}  // namespace

LoadedScene parse_scene(const std::string& json_text, const std::string& name_hint) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("scene file: ") + e.what());
  }

  check_keys(doc,
             {"format_version", "name", "gravity", "space", "object", "obstacles", "init", "goal",
              "check_resolution", "references"},
             "");
  const int version =
      as_integer(require_field(doc, "format_version", ""), "format_version");
  if (version != kFormatVersion) {
    fail("unsupported format_version " + std::to_string(version) + " (expected " +
         std::to_string(kFormatVersion) + ")");
  }

  LoadedScene loaded;
  world::Scene& scene = loaded.scene;
  scene.name = name_hint;
  if (const json* name = optional_field(doc, "name")) {
    scene.name = as_string(*name, "name");
  }

  scene.object = parse_object(require_field(doc, "object", ""));
  scene.space = parse_space(require_field(doc, "space", ""), scene.object);
  const bool planar = scene.space.planar;

  scene.gravity = as_number(require_field(doc, "gravity", ""), "gravity");
  if (const json* obstacles = optional_field(doc, "obstacles")) {
    if (!obstacles->is_array()) fail("obstacles must be an array");
    for (std::size_t i = 0; i < obstacles->size(); ++i) {
      append_shapes(scene.obstacles, (*obstacles)[i], planar,
                    "obstacles[" + std::to_string(i) + "]");
    }
  }
  scene.init = parse_init(require_field(doc, "init", ""), scene.object, planar);
  scene.goal = parse_goal(require_field(doc, "goal", ""), planar);
  if (const json* res = optional_field(doc, "check_resolution")) {
    scene.check_resolution = as_number(*res, "check_resolution");
  }
  if (const json* refs = optional_field(doc, "references")) {
    loaded.references = parse_references(*refs);
  }

  try {
    world::validate_scene(scene);
  } catch (const std::invalid_argument& e) {
    throw SceneError(e.what());
  }
  return loaded;
}

LoadedScene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError("scene file: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scene(buffer.str(), std::filesystem::path(path).stem().string());
  } catch (const SceneError& e) {
    throw SceneError(path + ": " + e.what());
  }
}

std::vector<LoadedScene> load_sequence(const std::string& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw SceneError("sequence: not a directory: " + directory);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<LoadedScene> frames;
  frames.reserve(files.size());
  for (const auto& file : files) frames.push_back(load_scene(file.string()));
  return frames;
}

}  // namespace cagekit::scene_io
