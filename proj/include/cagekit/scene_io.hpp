#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cagekit/world.hpp"

namespace cagekit::scene_io {

inline constexpr int kFormatVersion = 1;

// Anything wrong with a scene file: unreadable, malformed JSON, missing or
// ill-typed fields, or a scene that fails validation.
struct SceneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optional analytic annotations shipped with a scene.
struct References {
  std::optional<double> escape_energy;
  std::string derivation;
};

struct LoadedScene {
  world::Scene scene;
  References references;
};

LoadedScene parse_scene(const std::string& json_text, const std::string& name_hint = "");
LoadedScene load_scene(const std::string& path);

// All *.json files in a directory, sorted by filename. May be empty.
std::vector<LoadedScene> load_sequence(const std::string& directory);

}  // namespace cagekit::scene_io
