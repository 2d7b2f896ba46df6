#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cagekit/oracle.hpp"
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
using oracle::GridProblem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridProblem planar_grid(int nx, int nz, std::vector<double> energies, std::vector<int> goals,
                        int init = 0) {
  GridProblem grid;
  grid.dimension = 2;
  grid.dims = {nx, 1, nz};
  grid.cell_size = {1.0, 0.0, 1.0};
  grid.energies = std::move(energies);
  grid.goal.assign(grid.energies.size(), 0);
  for (int g : goals) grid.goal[g] = 1;
  grid.init_cell = init;
  return grid;
}

// Reference bottleneck value by exhaustive search over simple paths.
struct Enumerator {
  const GridProblem& grid;
  std::vector<char> visited;
  double best = kInf;

  explicit Enumerator(const GridProblem& g) : grid(g), visited(g.energies.size(), 0) {}

  void walk(int ix, int iz, double peak) {
    const int cell = grid.index(ix, 0, iz);
    peak = std::max(peak, grid.energies[cell]);
    if (peak >= best) return;
    if (grid.goal[cell]) {
      best = peak;
      return;
    }
    visited[cell] = 1;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dz = -1; dz <= 1; ++dz) {
        if (dx == 0 && dz == 0) continue;
        const int jx = ix + dx;
        const int jz = iz + dz;
        if (jx < 0 || jx >= grid.dims[0] || jz < 0 || jz >= grid.dims[2]) continue;
        const int next = grid.index(jx, 0, jz);
        if (visited[next] || std::isinf(grid.energies[next])) continue;
        walk(jx, jz, peak);
      }
    }
    visited[cell] = 0;
  }

  double run() {
    if (std::isinf(grid.energies[grid.init_cell])) return kInf;
    walk(grid.init_cell % grid.dims[0], grid.init_cell / grid.dims[0], -kInf);
    return best == kInf ? kInf : best - grid.energies[grid.init_cell];
  }
};

world::Scene step_wall_scene() {
  world::Scene scene;
  scene.object.links.push_back(world::Link{1.0, Vec3::Zero(), Sphere{Vec3::Zero(), 0.01}});
  scene.gravity = 1.0;
  scene.space = SpaceDescriptor::planar_point(
      Eigen::AlignedBox3d(Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 1.0)));
  scene.init = Configuration::articulated(Vec3(0.2, 0.0, 0.05), Quat::Identity());
  scene.goal.region = Eigen::AlignedBox3d(Vec3(0.8, -0.1, 0.0), Vec3(0.95, 0.1, 0.2));
  scene.obstacles.push_back(
      Box{Pose{Quat::Identity(), Vec3(0.5, 0.0, 0.25)}, Vec3(0.05, 0.1, 0.25)});
  scene.check_resolution = 0.01;
  return scene;
}

}  // namespace

TEST_CASE("corridor bottleneck is the tallest cell on the only route") {
  const auto grid = planar_grid(5, 1, {0.0, 2.0, 5.0, 1.0, 0.0}, {4});
  CHECK(oracle::grid_escape_energy(grid) == 5.0);
}

TEST_CASE("the cheaper of two routes wins") {
  const auto grid = planar_grid(3, 3,
                                {0.0, 4.0, 0.0,
                                 7.0, kInf, 4.0,
                                 7.0, 7.0, 0.0},
                                {8});
  CHECK(oracle::grid_escape_energy(grid) == 4.0);
}

TEST_CASE("adjacent goal at equal energy costs nothing") {
  const auto grid = planar_grid(2, 1, {3.0, 3.0}, {1});
  CHECK(oracle::grid_escape_energy(grid) == 0.0);
}

TEST_CASE("a sealed grid reports infinite escape energy") {
  const auto grid = planar_grid(3, 3,
                                {0.0, kInf, 1.0,
                                 kInf, kInf, 1.0,
                                 1.0, 1.0, 1.0},
                                {8});
  CHECK(oracle::grid_escape_energy(grid) == kInf);
}

TEST_CASE("best-first search matches exhaustive enumeration on small grids") {
  std::mt19937_64 engine(99);
  std::uniform_int_distribution<int> dim(2, 4);
  std::uniform_int_distribution<int> level(0, 7);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int nx = dim(engine);
    const int nz = dim(engine);
    std::vector<double> energies(static_cast<std::size_t>(nx) * nz);
    for (auto& e : energies) e = coin(engine) < 0.15 ? kInf : static_cast<double>(level(engine));
    energies[0] = static_cast<double>(level(engine));
    const int goal = 1 + static_cast<int>(coin(engine) * (nx * nz - 1));
    auto grid = planar_grid(nx, nz, energies, {goal});

    Enumerator reference(grid);
    const double expected = reference.run();
    const double actual = oracle::grid_escape_energy(grid);
    if (std::isinf(expected)) {
      CHECK(std::isinf(actual));
    } else {
      CHECK(actual == expected);
    }
  }
}

TEST_CASE("constant energy offsets cancel exactly") {
  std::mt19937_64 engine(123);
  std::uniform_int_distribution<int> level(0, 7);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> energies(16);
    for (auto& e : energies) e = coin(engine) < 0.2 ? kInf : static_cast<double>(level(engine));
    energies[0] = static_cast<double>(level(engine));
    auto grid = planar_grid(4, 4, energies, {15});
    const double base = oracle::grid_escape_energy(grid);

    auto shifted = grid;
    const double offset = 0.25 * (1 + trial % 8);
    for (auto& e : shifted.energies)
      if (std::isfinite(e)) e += offset;
    const double after = oracle::grid_escape_energy(shifted);
    if (std::isinf(base)) {
      CHECK(std::isinf(after));
    } else {
      CHECK(after == base);
    }
  }
}

TEST_CASE("grid discretization of a wall scene converges") {
  const auto scene = step_wall_scene();
  const auto coarse = oracle::grid_from_scene(scene, 100);
  const auto fine = oracle::grid_from_scene(scene, 200);
  const double e_coarse = oracle::grid_escape_energy(coarse);
  const double e_fine = oracle::grid_escape_energy(fine);

  CHECK(e_coarse == doctest::Approx(0.46).epsilon(1e-9));
  CHECK(e_fine == doctest::Approx(0.46).epsilon(1e-9));
  const double lipschitz = 1.0 * 1.0 * coarse.cell_size[2];
  CHECK(std::abs(e_fine - e_coarse) <= lipschitz + 1e-12);
}

TEST_CASE("grid construction rejects unsupported scenes") {
  auto scene = step_wall_scene();
  scene.obstacles.push_back(Sphere{Vec3(0.2, 0.0, 0.06), 0.03});
  CHECK_THROWS_AS(oracle::grid_from_scene(scene, 50), std::invalid_argument);

  auto chain = step_wall_scene();
  chain.object.links.push_back(
      world::Link{1.0, Vec3(0.1, 0.0, 0.0), Sphere{Vec3(0.1, 0.0, 0.0), 0.01}});
  chain.object.joints.push_back(world::Joint{});
  CHECK_THROWS_AS(oracle::grid_from_scene(chain, 50), std::invalid_argument);
}

TEST_CASE("total variation sums consecutive metric distances") {
  const auto space = SpaceDescriptor::planar_point(
      Eigen::AlignedBox3d(Vec3(-5.0, 0.0, -5.0), Vec3(5.0, 0.0, 5.0)));
  const auto p = [](double x, double z) {
    return Configuration::articulated(Vec3(x, 0.0, z), Quat::Identity());
  };
  CHECK(oracle::path_length_total_variation({p(0.3, 0.7)}, space) == 0.0);
  CHECK(oracle::path_length_total_variation({p(0, 0), p(1, 0), p(2, 0)}, space) ==
        doctest::Approx(2.0));
  CHECK(oracle::path_length_total_variation({p(0, 0), p(1, 0), p(1, 1)}, space) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(oracle::path_length_total_variation({}, space), std::invalid_argument);
}

TEST_CASE("normalized cost mixes energy and length") {
  const auto space = SpaceDescriptor::planar_point(
      Eigen::AlignedBox3d(Vec3(-5.0, 0.0, -5.0), Vec3(5.0, 0.0, 5.0)));
  energy::PathCandidate path;
  path.waypoints = {Configuration::articulated(Vec3(0, 0, 0), Quat::Identity()),
                    Configuration::articulated(Vec3(1, 0, 0), Quat::Identity()),
                    Configuration::articulated(Vec3(1, 0, 1), Quat::Identity())};
  path.energies = {0.0, 0.52, 1.02};
  path.cost = 1.02;
  CHECK(oracle::normalized_total_cost(path, 1.0, 0.0, space) == doctest::Approx(1.02));
  CHECK(oracle::normalized_total_cost(path, 1.0, 0.5, space) == doctest::Approx(2.02));
  CHECK(oracle::normalized_total_cost(path, 2.0, 0.0, space) == doctest::Approx(0.51));
  CHECK_THROWS_AS(oracle::normalized_total_cost(path, 0.0, 0.0, space), std::invalid_argument);
}

TEST_CASE("random scenes are deterministic and traversable") {
  const auto a = oracle::generate_random_scene(7, 6);
  const auto b = oracle::generate_random_scene(7, 6);
  REQUIRE(a.obstacles.size() == b.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    const auto& ca = std::get<Capsule>(a.obstacles[i]);
    const auto& cb = std::get<Capsule>(b.obstacles[i]);
    CHECK(ca.p0 == cb.p0);
    CHECK(ca.p1 == cb.p1);
    CHECK(ca.radius == cb.radius);
  }

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scene = oracle::generate_random_scene(seed, 6);
    CHECK_NOTHROW(world::validate_scene(scene));
    const double e_star = oracle::grid_escape_energy(oracle::grid_from_scene(scene, 64));
    CHECK(std::isfinite(e_star));
    CHECK(e_star >= 0.15);
  }
}

TEST_CASE("an empty workspace needs no lift") {
  const auto scene = oracle::generate_random_scene(3, 0);
  CHECK(scene.obstacles.empty());
  const double e_star = oracle::grid_escape_energy(oracle::grid_from_scene(scene, 64));
  CHECK(e_star == 0.0);
}
