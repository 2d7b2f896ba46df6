#include "cagekit/planners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cagekit/random.hpp"

namespace cagekit::planners {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Regular polygon with random center, axis, phase, and a radius spanning the
// slack-to-stretched range. Loop spaces concentrate their reachable low-energy
// shapes near such polygons, which independent per-point draws almost never
// produce.
Configuration sample_polygon(const world::Scene& scene, RandomStream& rng) {
  const int n = scene.object.band_points;
  const double base = scene.object.band_rest_length / (2.0 * std::sin(M_PI / n));
  const geom::Vec3 lo = scene.space.position_bounds.min();
  const geom::Vec3 hi = scene.space.position_bounds.max();
  const geom::Vec3 c(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()),
                     rng.uniform(lo.z(), hi.z()));
  const double u = rng.uniform(-1.0, 1.0);
  const double az = rng.uniform(0.0, 2.0 * M_PI);
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  const geom::Vec3 axis(s * std::cos(az), s * std::sin(az), u);
  geom::Vec3 seed = std::abs(axis.z()) < 0.9 ? geom::Vec3::UnitZ() : geom::Vec3::UnitX();
  const geom::Vec3 e1 = axis.cross(seed).normalized();
  const geom::Vec3 e2 = axis.cross(e1);
  // Half the draws stay near the slack radius; the rest sweep out to the scene
  // scale so wide crossings around large obstacles are reachable.
  const double span = 0.5 * std::min(hi.x() - lo.x(), hi.y() - lo.y());
  const double r_hi = std::max(2.5 * base, 0.9 * span);
  const double radius = rng.uniform01() < 0.5 ? base * rng.uniform(0.5, 2.5)
                                              : rng.uniform(0.5 * base, r_hi);
  const double phase = rng.uniform(0.0, 2.0 * M_PI);
  std::vector<geom::Vec3> pts(n);
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * M_PI * i / n;
    pts[i] = c + radius * (std::cos(a) * e1 + std::sin(a) * e2);
    pts[i] = pts[i].cwiseMax(lo).cwiseMin(hi);
  }
  return Configuration::band(std::move(pts));
}

Configuration sample_goal(const world::Scene& scene, RandomStream& rng) {
  const auto& region = scene.goal.region;
  if (scene.object.kind == world::ObjectModel::Kind::Band) {
    const int n = scene.object.band_points;
    const double base = scene.object.band_rest_length / (2.0 * std::sin(M_PI / n));
    // Slack loops only: stretched goal shapes fail the goal energy tolerance.
    const double radius = base * rng.uniform(0.6, 1.0);
    const double margin_x = region.max().x() - region.min().x();
    const double margin_y = region.max().y() - region.min().y();
    if (rng.uniform01() < 0.7 && margin_x > 2.0 * radius && margin_y > 2.0 * radius) {
      // horizontal relaxed loop fully inside the region
      const geom::Vec3 c(rng.uniform(region.min().x() + radius, region.max().x() - radius),
                         rng.uniform(region.min().y() + radius, region.max().y() - radius),
                         rng.uniform(region.min().z(), region.max().z()));
      const double phase = rng.uniform(0.0, 2.0 * M_PI);
      std::vector<geom::Vec3> pts(n);
      for (int i = 0; i < n; ++i) {
        const double a = phase + 2.0 * M_PI * i / n;
        pts[i] = c + radius * geom::Vec3(std::cos(a), std::sin(a), 0.0);
      }
      return Configuration::band(std::move(pts));
    }
    const geom::Vec3 p(rng.uniform(region.min().x(), region.max().x()),
                       rng.uniform(region.min().y(), region.max().y()),
                       rng.uniform(region.min().z(), region.max().z()));
    return Configuration::band(std::vector<geom::Vec3>(scene.object.band_points, p));
  }

  geom::Vec3 r;
  r.x() = rng.uniform(region.min().x(), region.max().x());
  r.y() = scene.space.planar ? 0.0 : rng.uniform(region.min().y(), region.max().y());
  r.z() = rng.uniform(region.min().z(), region.max().z());

  geom::Quat q = geom::Quat::Identity();
  switch (scene.space.rotation) {
    case SpaceDescriptor::RotationMode::Fixed:
      break;
    case SpaceDescriptor::RotationMode::PlanarY:
      q = geom::Quat(Eigen::AngleAxisd(rng.uniform(-M_PI, M_PI), geom::Vec3::UnitY()));
      break;
    case SpaceDescriptor::RotationMode::Free: {
      Configuration probe = cspace::sample_uniform(scene.space, rng);
      q = probe.orientation;
      break;
    }
  }

  Eigen::VectorXd alpha(static_cast<int>(scene.space.joint_limits.size()));
  for (int j = 0; j < alpha.size(); ++j)
    alpha[j] = std::clamp(0.0, scene.space.joint_limits[j].lower,
                          scene.space.joint_limits[j].upper);
  return Configuration::articulated(r, q, std::move(alpha));
}

Configuration sample_target(const world::Scene& scene, RandomStream& rng, double goal_bias) {
  if (rng.uniform01() < goal_bias) return sample_goal(scene, rng);
  if (scene.object.kind == world::ObjectModel::Kind::Band && rng.uniform01() < 0.45)
    return sample_polygon(scene, rng);
  return cspace::sample_uniform(scene.space, rng);
}

Configuration steer(const SpaceDescriptor& space, const Configuration& from,
                    const Configuration& to, double step) {
  const double dist = cspace::distance(space, from, to);
  if (dist <= step) return to;
  return cspace::interpolate(space, from, to, step / dist);
}

int nearest_node(const std::vector<TreeNode>& nodes, const SpaceDescriptor& space,
                 const Configuration& target) {
  int best = 0;
  double best_dist = kInf;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = cspace::distance(space, nodes[i].config, target);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<Configuration> branch_waypoints(const std::vector<TreeNode>& nodes, int leaf) {
  std::vector<Configuration> waypoints;
  for (int v = leaf; v >= 0; v = nodes[v].parent) waypoints.push_back(nodes[v].config);
  std::reverse(waypoints.begin(), waypoints.end());
  return waypoints;
}

void clamp_into_bounds(const SpaceDescriptor& space, Configuration& q) {
  const geom::Vec3 lo = space.position_bounds.min();
  const geom::Vec3 hi = space.position_bounds.max();
  if (q.kind == Configuration::Kind::Band) {
    for (auto& p : q.points) p = p.cwiseMax(lo).cwiseMin(hi);
  } else {
    q.position = q.position.cwiseMax(lo).cwiseMin(hi);
  }
}

struct EdgeStat {
  double peak = kInf;
  double length = 0.0;
};

// Peak potential over the edge sampled exactly like the validity checker, so
// an edge that measures finite also certifies.
EdgeStat measure_edge(const PlanningProblem& problem, const Configuration& a,
                      const Configuration& b) {
  const world::Scene& scene = *problem.scene;
  EdgeStat stat;
  stat.length = cspace::distance(scene.space, a, b);
  const double delta = scene.effective_check_resolution();
  const int n = world::edge_sample_count(scene.space, a, b, delta);
  stat.peak = energy::potential_energy(problem.model, scene, a);
  for (int j = 1; j <= n; ++j) {
    const auto q = cspace::interpolate(scene.space, a, b, static_cast<double>(j) / n);
    stat.peak = std::max(stat.peak, energy::potential_energy(problem.model, scene, q));
    if (std::isinf(stat.peak)) break;
  }
  return stat;
}

// One normalized downhill step on the translational coordinates. Falls back to
// the input when the config sits against the clearance boundary.
Configuration descend_energy(const PlanningProblem& problem, const Configuration& q, double step) {
  const world::Scene& scene = *problem.scene;
  Configuration g = q;
  std::vector<double*> coords;
  if (g.kind == Configuration::Kind::Band) {
    for (auto& p : g.points)
      for (int c = 0; c < 3; ++c) coords.push_back(p.data() + c);
  } else {
    for (int c = 0; c < 3; ++c) coords.push_back(g.position.data() + c);
  }
  const double h = 1e-5;
  std::vector<double> grad(coords.size(), 0.0);
  for (std::size_t c = 0; c < coords.size(); ++c) {
    const double saved = *coords[c];
    *coords[c] = saved + h;
    const double ep = energy::potential_energy(problem.model, scene, g);
    *coords[c] = saved - h;
    const double em = energy::potential_energy(problem.model, scene, g);
    *coords[c] = saved;
    if (!std::isfinite(ep) || !std::isfinite(em)) return q;
    grad[c] = (ep - em) / (2.0 * h);
  }
  double norm = 0.0;
  for (double v : grad) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-12) return q;
  for (std::size_t c = 0; c < coords.size(); ++c) *coords[c] -= step * grad[c] / norm;
  clamp_into_bounds(scene.space, g);
  return g;
}

// Pulls a loop toward the regular polygon fitted to its own plane: centroid,
// area-vector normal, mean in-plane radius, equal angular spacing with the
// original winding. Coordinated moves like this untwist crossings that
// single-point steps cannot.
Configuration regularize_band(const SpaceDescriptor& space, const Configuration& q, double s,
                              const geom::Vec3* axis_override = nullptr,
                              double radius_lerp = 0.0, double rest_radius = 0.0) {
  if (q.kind != Configuration::Kind::Band || q.points.size() < 3) return q;
  const int n = static_cast<int>(q.points.size());
  geom::Vec3 c = geom::Vec3::Zero();
  for (const auto& p : q.points) c += p;
  c /= n;
  geom::Vec3 area = geom::Vec3::Zero();
  for (int i = 0; i < n; ++i)
    area += (q.points[i] - c).cross(q.points[(i + 1) % n] - c);
  if (area.norm() < 1e-9) return q;
  geom::Vec3 nv = area.normalized();
  if (axis_override) nv = nv.dot(*axis_override) < 0.0 ? -*axis_override : *axis_override;
  geom::Vec3 r0 = q.points[0] - c;
  r0 -= r0.dot(nv) * nv;
  if (r0.norm() < 1e-9) return q;
  const geom::Vec3 e1 = r0.normalized();
  const geom::Vec3 e2 = nv.cross(e1);
  double rbar = 0.0;
  for (const auto& p : q.points) {
    geom::Vec3 d = p - c;
    d -= d.dot(nv) * nv;
    rbar += d.norm();
  }
  rbar /= n;
  const double rtar = rbar + radius_lerp * (rest_radius - rbar);
  Configuration out = q;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    const geom::Vec3 target = c + rtar * (std::cos(a) * e1 + std::sin(a) * e2);
    out.points[i] = q.points[i] + s * (target - q.points[i]);
  }
  clamp_into_bounds(space, out);
  return out;
}

// Local descent on a goal-reaching chain: lowers the running max of potential
// (plus the gamma-weighted length) by moving one waypoint at a time, with
// shortcut splices between sweeps. Deterministic given the stream.
void refine_path(const PlanningProblem& problem, const PlannerParams& params, RandomStream& rng,
                 std::vector<Configuration>& waypoints) {
  const world::Scene& scene = *problem.scene;
  const double e_init = problem.model.e_init;
  if (waypoints.size() < 2) return;

  std::vector<Configuration> dense;
  dense.push_back(waypoints.front());
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double len = cspace::distance(scene.space, waypoints[i], waypoints[i + 1]);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / params.steer_step)));
    for (int j = 1; j <= pieces; ++j)
      dense.push_back(cspace::interpolate(scene.space, waypoints[i], waypoints[i + 1],
                                          static_cast<double>(j) / pieces));
  }
  waypoints = std::move(dense);

  std::vector<EdgeStat> edges(waypoints.size() - 1);
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
    edges[i] = measure_edge(problem, waypoints[i], waypoints[i + 1]);

  const auto global_score = [&]() {
    double peak = -kInf;
    double total = 0.0;
    for (const auto& e : edges) {
      peak = std::max(peak, e.peak);
      total += e.length;
    }
    return hybrid_cost(peak - e_init, total, params.gamma);
  };

  double current = global_score();
  if (std::isinf(current)) return;

  constexpr int kMaxSweeps = 64;
  constexpr int kMaxStalledSweeps = 4;
  int splits = 0;
  double best_current = current;
  int stall = 0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool improved = false;

    // Split the bottleneck edge at its interior peak so descent can move the
    // limiting configuration directly instead of through its endpoints.
    if (splits < 24) {
      std::size_t worst = 0;
      for (std::size_t k = 1; k < edges.size(); ++k)
        if (edges[k].peak > edges[worst].peak) worst = k;
      const Configuration& wa = waypoints[worst];
      const Configuration& wb = waypoints[worst + 1];
      const int nsmp = world::edge_sample_count(scene.space, wa, wb,
                                                scene.effective_check_resolution());
      double best_p = -kInf;
      double best_t = -1.0;
      for (int j = 1; j < nsmp; ++j) {
        const double t = static_cast<double>(j) / nsmp;
        const double p = energy::potential_energy(
            problem.model, scene, cspace::interpolate(scene.space, wa, wb, t));
        if (p > best_p) {
          best_p = p;
          best_t = t;
        }
      }
      if (best_t > 0.0 && best_p >= edges[worst].peak - 1e-12) {
        const Configuration mid = cspace::interpolate(scene.space, wa, wb, best_t);
        const EdgeStat left = measure_edge(problem, wa, mid);
        const EdgeStat right = measure_edge(problem, mid, wb);
        if (!std::isinf(left.peak) && !std::isinf(right.peak)) {
          waypoints.insert(waypoints.begin() + worst + 1, mid);
          edges[worst] = left;
          edges.insert(edges.begin() + worst + 1, right);
          ++splits;
        }
      }
    }

    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      const bool last = i + 1 == waypoints.size();
      const std::size_t lo = i - 1;
      double rest_peak = -kInf;
      double rest_len = 0.0;
      for (std::size_t k = 0; k < edges.size(); ++k) {
        if (k == lo || (!last && k == i)) continue;
        rest_peak = std::max(rest_peak, edges[k].peak);
        rest_len += edges[k].length;
      }
      const double local_peak =
          last ? edges[lo].peak : std::max(edges[lo].peak, edges[i].peak);
      const double local_len = edges[lo].length + (last ? 0.0 : edges[i].length);
      const double local_before = hybrid_cost(local_peak - e_init, local_len, params.gamma);

      std::vector<Configuration> proposals;
      if (waypoints[i].kind == Configuration::Kind::Band) {
        // canonical loop shapes: regular polygon in the fitted plane, leveled
        // to the vertical axis, and contracted toward the slack radius
        static const geom::Vec3 kUp = geom::Vec3::UnitZ();
        const double rest = scene.object.band_rest_length /
                            (2.0 * std::sin(M_PI / scene.object.band_points));
        proposals.push_back(regularize_band(scene.space, waypoints[i], 1.0, &kUp, 0.3, rest));
        proposals.push_back(regularize_band(scene.space, waypoints[i], 1.0, &kUp, 0.12, rest));
        proposals.push_back(regularize_band(scene.space, waypoints[i], 1.0, nullptr, 0.2, rest));
        proposals.push_back(regularize_band(scene.space, waypoints[i], 1.0));
        proposals.push_back(regularize_band(scene.space, waypoints[i], 0.4, &kUp));
      }
      proposals.push_back(descend_energy(problem, waypoints[i], 0.4 * params.steer_step));
      proposals.push_back(descend_energy(problem, waypoints[i], 0.12 * params.steer_step));
      if (!last) {
        const auto mid =
            cspace::interpolate(scene.space, waypoints[i - 1], waypoints[i + 1], 0.5);
        proposals.push_back(cspace::interpolate(scene.space, waypoints[i], mid, 0.5));
        proposals.push_back(mid);
      } else {
        proposals.push_back(
            steer(scene.space, waypoints[i], sample_goal(scene, rng), 0.5 * params.steer_step));
      }
      proposals.push_back(
          steer(scene.space, waypoints[i], cspace::sample_uniform(scene.space, rng),
                0.3 * params.steer_step));
      proposals.push_back(
          steer(scene.space, waypoints[i], cspace::sample_uniform(scene.space, rng),
                0.1 * params.steer_step));

      for (auto& q : proposals) {
        if (cspace::distance(scene.space, waypoints[i], q) <= 0.0) continue;
        // With no length term a proposal whose own excess already meets the
        // score cannot be accepted; skip it before paying for edge sweeps.
        if (params.gamma == 0.0 &&
            energy::potential_energy(problem.model, scene, q) - e_init >= current)
          continue;
        const EdgeStat a = measure_edge(problem, waypoints[i - 1], q);
        if (std::isinf(a.peak)) continue;
        EdgeStat b;
        if (!last) {
          b = measure_edge(problem, q, waypoints[i + 1]);
          if (std::isinf(b.peak)) continue;
        } else {
          b.peak = -kInf;
          b.length = 0.0;
        }
        const double peak_all = std::max({rest_peak, a.peak, b.peak});
        const double len_all = rest_len + a.length + b.length;
        const double global_after = hybrid_cost(peak_all - e_init, len_all, params.gamma);
        const double local_after = hybrid_cost(std::max(a.peak, b.peak) - e_init,
                                               a.length + b.length, params.gamma);
        const bool primary = global_after < current - 1e-12;
        bool plateau = false;
        if (!primary && global_after < current + 1e-12) {
          if (local_after < local_before - 1e-9) {
            plateau = true;
          } else if (local_after < local_before + 1e-9) {
            // neighbor-dominated edges hide pointwise progress; let a waypoint
            // lower its own potential so the chain can descend in cascade
            const double ew_before =
                energy::potential_energy(problem.model, scene, waypoints[i]);
            const double ew_after = energy::potential_energy(problem.model, scene, q);
            plateau = ew_after < ew_before - 1e-9;
          }
        }
        if (!primary && !plateau) continue;
        if (last && !world::in_goal(scene, q)) continue;
        // finite measured peaks already certify both edges: the measurement
        // samples the same lattice as the validity check and potentials embed
        // collision as infinity
        waypoints[i] = q;
        edges[lo] = a;
        if (!last) edges[i] = b;
        current = global_score();
        improved = true;
        break;
      }
    }

    const int tries = static_cast<int>(waypoints.size());
    for (int t = 0; t < tries; ++t) {
      const std::size_t m = waypoints.size() - 1;
      if (m < 3) break;
      const std::size_t i =
          std::min<std::size_t>(static_cast<std::size_t>(rng.uniform01() * (m - 1)), m - 2);
      const std::size_t span =
          2 + std::min<std::size_t>(static_cast<std::size_t>(rng.uniform01() * (m - i - 1)),
                                    m - i - 2);
      const std::size_t j = i + span;
      double rest_peak = -kInf;
      double rest_len = 0.0;
      double cut_len = 0.0;
      for (std::size_t k = 0; k < edges.size(); ++k) {
        if (k >= i && k < j) {
          cut_len += edges[k].length;
          continue;
        }
        rest_peak = std::max(rest_peak, edges[k].peak);
        rest_len += edges[k].length;
      }
      const EdgeStat d = measure_edge(problem, waypoints[i], waypoints[j]);
      if (std::isinf(d.peak)) continue;
      const double global_after =
          hybrid_cost(std::max(rest_peak, d.peak) - e_init, rest_len + d.length, params.gamma);
      const bool primary = global_after < current - 1e-12;
      const bool tie = global_after < current + 1e-12 && d.length < cut_len - 1e-9;
      if (!primary && !tie) continue;
      waypoints.erase(waypoints.begin() + i + 1, waypoints.begin() + j);
      edges.erase(edges.begin() + i, edges.begin() + j);
      edges.insert(edges.begin() + i, d);
      current = global_score();
      improved = true;
    }

    if (!improved) break;
    // plateau and tie moves can keep reporting progress without lowering the
    // score; stop once several sweeps pass with no real gain
    if (current < best_current - 1e-12) {
      best_current = current;
      stall = 0;
    } else if (++stall >= kMaxStalledSweeps) {
      break;
    }
  }
}

}  // namespace

PlanningProblem PlanningProblem::from_scene(const world::Scene& scene) {
  return PlanningProblem{&scene, energy::make_energy_model(scene)};
}

void PlannerParams::validate() const {
  if (!(steer_step > 0.0)) throw std::invalid_argument("planner: step size must be positive");
  if (!(goal_bias >= 0.0 && goal_bias < 1.0))
    throw std::invalid_argument("planner: goal bias must lie in [0, 1)");
  if (max_nodes < 1) throw std::invalid_argument("planner: node budget must be positive");
  if (!(time_budget > 0.0)) throw std::invalid_argument("planner: time budget must be positive");
  if (!(gamma_rrt > 0.0)) throw std::invalid_argument("planner: gamma_rrt must be positive");
  if (!(eta_radius > 0.0)) throw std::invalid_argument("planner: eta_radius must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("planner: gamma must be nonnegative");
}

double combine_energy_cost(double c_parent, double e_child, double e_init) {
  return std::max(c_parent, e_child - e_init);
}

double hybrid_cost(double cost_energy, double cost_length, double gamma) {
  return cost_energy + gamma * cost_length;
}

double rewire_radius(int n_vertices, const SpaceDescriptor& space, const PlannerParams& params) {
  if (n_vertices < 1) throw std::invalid_argument("rewire radius: vertex count must be positive");
  const double d = static_cast<double>(space.dimension());
  const double n = static_cast<double>(n_vertices);
  const double shrink = params.gamma_rrt * std::pow(std::log(n) / n, 1.0 / d);
  return std::min(shrink, params.eta_radius);
}

RrtResult rrt_search(const PlanningProblem& problem, double e_sublevel,
                     const PlannerParams& params) {
  params.validate();
  if (!(e_sublevel >= 0.0)) throw std::invalid_argument("rrt search: sublevel must be nonnegative");
  const world::Scene& scene = *problem.scene;
  const double e_abs = problem.model.e_init + e_sublevel;
  RandomStream rng(params.seed);
  const auto start = Clock::now();

  std::vector<TreeNode> nodes;
  nodes.push_back(TreeNode{scene.init, problem.model.e_init, -1, 0.0, 0.0, 0.0});

  RrtResult result;
  const auto finish = [&](std::optional<energy::PathCandidate> path) {
    result.path = std::move(path);
    result.elapsed_s = seconds_since(start);
    result.nodes = static_cast<int>(nodes.size());
    return result;
  };

  if (world::in_goal(scene, scene.init))
    return finish(energy::path_energy_cost(problem.model, scene, {scene.init}));

  while (static_cast<int>(nodes.size()) < params.max_nodes &&
         seconds_since(start) < params.time_budget) {
    const Configuration target = sample_target(scene, rng, params.goal_bias);
    const int near = nearest_node(nodes, scene.space, target);
    const Configuration fresh = steer(scene.space, nodes[near].config, target, params.steer_step);
    if (cspace::distance(scene.space, nodes[near].config, fresh) <= 0.0) continue;

    const double e_fresh = energy::potential_energy(problem.model, scene, fresh);
    if (std::isinf(e_fresh) || e_fresh > e_abs) continue;
    if (!world::motion_valid(scene, problem.model, nodes[near].config, fresh, e_abs)) continue;

    nodes.push_back(TreeNode{fresh, e_fresh, near, 0.0, 0.0, 0.0});
    if (world::in_goal(scene, fresh)) {
      const auto waypoints = branch_waypoints(nodes, static_cast<int>(nodes.size()) - 1);
      return finish(energy::path_energy_cost(problem.model, scene, waypoints));
    }
  }
  return finish(std::nullopt);
}

OptimalResult optimal_search(const PlanningProblem& problem, const PlannerParams& params,
                             const std::function<bool(const Improvement&)>& on_improvement) {
  params.validate();
  const world::Scene& scene = *problem.scene;
  const double e_init = problem.model.e_init;
  RandomStream rng(params.seed);
  const auto start = Clock::now();

  OptimalResult result;
  auto& nodes = result.tree.nodes;
  nodes.push_back(TreeNode{scene.init, e_init, -1, 0.0, 0.0, 0.0});
  std::vector<std::vector<int>> children(1);

  std::vector<int> goal_vertices;
  if (world::in_goal(scene, scene.init)) goal_vertices.push_back(0);
  double best_hybrid = kInf;
  int best_goal_vertex = -1;
  bool stopped = false;

  const auto node_hybrid = [&](int v) {
    return hybrid_cost(nodes[v].cost_energy, nodes[v].cost_length, params.gamma);
  };

  const auto propagate_costs = [&](int root_vertex) {
    std::vector<int> stack = {root_vertex};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int ch : children[v]) {
        nodes[ch].cost_energy =
            combine_energy_cost(nodes[v].cost_energy, nodes[ch].energy, e_init);
        nodes[ch].cost_length = nodes[v].cost_length + nodes[ch].edge_length;
        stack.push_back(ch);
      }
    }
  };

  const auto emit_if_improved = [&]() -> int {
    if (goal_vertices.empty() || stopped) return -1;
    int best_vertex = -1;
    double best_cost = best_hybrid;
    for (int v : goal_vertices) {
      const double c = node_hybrid(v);
      if (c < best_cost) {
        best_cost = c;
        best_vertex = v;
      }
    }
    if (best_vertex < 0) return -1;
    best_hybrid = best_cost;
    best_goal_vertex = best_vertex;

    Improvement record;
    record.time_s = seconds_since(start);
    record.cost_energy = nodes[best_vertex].cost_energy;
    record.cost_length = nodes[best_vertex].cost_length;
    record.hybrid = best_cost;
    record.path =
        energy::path_energy_cost(problem.model, scene, branch_waypoints(nodes, best_vertex));
    result.improvements.push_back(record);
    if (on_improvement && !on_improvement(result.improvements.back())) stopped = true;
    return best_vertex;
  };

  // Polish a freshly emitted witness, then graft the polished chain back into
  // the tree so the tightened incumbent prunes future expansions.
  const auto refine_and_graft = [&](int goal_vertex) {
    std::vector<Configuration> wp = branch_waypoints(nodes, goal_vertex);
    if (wp.size() < 2) return;
    refine_path(problem, params, rng, wp);
    if (!world::in_goal(scene, wp.back())) return;

    std::vector<double> evals(wp.size());
    evals[0] = e_init;
    double ce = 0.0;
    double cl = 0.0;
    for (std::size_t i = 1; i < wp.size(); ++i) {
      evals[i] = energy::potential_energy(problem.model, scene, wp[i]);
      if (std::isinf(evals[i])) return;
      ce = combine_energy_cost(ce, evals[i], e_init);
      cl += cspace::distance(scene.space, wp[i - 1], wp[i]);
    }
    if (hybrid_cost(ce, cl, params.gamma) >= best_hybrid) return;

    int parent = 0;
    for (std::size_t i = 1; i < wp.size(); ++i) {
      const int idx = static_cast<int>(nodes.size());
      TreeNode node;
      node.config = wp[i];
      node.energy = evals[i];
      node.parent = parent;
      node.edge_length = cspace::distance(scene.space, wp[i - 1], wp[i]);
      node.cost_energy = combine_energy_cost(nodes[parent].cost_energy, evals[i], e_init);
      node.cost_length = nodes[parent].cost_length + node.edge_length;
      nodes.push_back(node);
      children.emplace_back();
      children[parent].push_back(idx);
      parent = idx;
    }
    goal_vertices.push_back(parent);
    emit_if_improved();
  };

  emit_if_improved();

  // Exploration goes quiet once pruning bites, so re-polish the incumbent on a
  // fixed iteration cadence; the early cutoff leaves room for a polish to end
  // inside the time budget.
  constexpr std::int64_t kPolishPeriod = 1500;
  std::int64_t iter = 0;
  std::int64_t next_polish = kPolishPeriod;

  while (!stopped && static_cast<int>(nodes.size()) < params.max_nodes &&
         seconds_since(start) < params.time_budget) {
    if (++iter >= next_polish) {
      next_polish = iter + kPolishPeriod;
      if (best_goal_vertex >= 0 && seconds_since(start) < 0.8 * params.time_budget)
        refine_and_graft(best_goal_vertex);
      if (stopped) break;
    }
    const Configuration target = sample_target(scene, rng, params.goal_bias);
    const int near = nearest_node(nodes, scene.space, target);
    const Configuration fresh = steer(scene.space, nodes[near].config, target, params.steer_step);
    if (cspace::distance(scene.space, nodes[near].config, fresh) <= 0.0) continue;

    const double e_fresh = energy::potential_energy(problem.model, scene, fresh);
    if (std::isinf(e_fresh)) continue;
    // A vertex whose excess alone matches the incumbent can never lie on a
    // strictly better path, so skip it before paying for collision checks.
    if (e_fresh - e_init >= best_hybrid) continue;

    const double radius =
        rewire_radius(static_cast<int>(nodes.size()), scene.space, params);

    std::vector<std::pair<double, int>> candidates;  // (prospective hybrid cost, vertex)
    std::vector<double> spans(nodes.size(), 0.0);
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const double span = cspace::distance(scene.space, nodes[v].config, fresh);
      spans[v] = span;
      if (span <= radius || static_cast<int>(v) == near) {
        const double ce = combine_energy_cost(nodes[v].cost_energy, e_fresh, e_init);
        const double cl = nodes[v].cost_length + span;
        candidates.emplace_back(hybrid_cost(ce, cl, params.gamma), static_cast<int>(v));
      }
    }
    std::sort(candidates.begin(), candidates.end());
    if (!candidates.empty() && candidates.front().first >= best_hybrid) continue;

    int parent = -1;
    for (const auto& [cost, v] : candidates) {
      if (world::motion_valid(scene, problem.model, nodes[v].config, fresh, kInf)) {
        parent = v;
        break;
      }
    }
    if (parent < 0) continue;

    const int fresh_idx = static_cast<int>(nodes.size());
    TreeNode node;
    node.config = fresh;
    node.energy = e_fresh;
    node.parent = parent;
    node.edge_length = spans[parent];
    node.cost_energy = combine_energy_cost(nodes[parent].cost_energy, e_fresh, e_init);
    node.cost_length = nodes[parent].cost_length + spans[parent];
    nodes.push_back(node);
    children.emplace_back();
    children[parent].push_back(fresh_idx);
    const bool fresh_in_goal = world::in_goal(scene, fresh);
    if (fresh_in_goal) goal_vertices.push_back(fresh_idx);

    for (std::size_t v = 0; v < spans.size(); ++v) {
      if (static_cast<int>(v) == parent || v == 0) continue;
      if (spans[v] > radius) continue;
      const double ce = combine_energy_cost(nodes[fresh_idx].cost_energy, nodes[v].energy, e_init);
      const double cl = nodes[fresh_idx].cost_length + spans[v];
      if (hybrid_cost(ce, cl, params.gamma) >= node_hybrid(static_cast<int>(v))) continue;
      if (!world::motion_valid(scene, problem.model, fresh, nodes[v].config, kInf)) continue;

      auto& old_siblings = children[nodes[v].parent];
      old_siblings.erase(std::find(old_siblings.begin(), old_siblings.end(), static_cast<int>(v)));
      nodes[v].parent = fresh_idx;
      nodes[v].edge_length = spans[v];
      nodes[v].cost_energy = ce;
      nodes[v].cost_length = cl;
      children[fresh_idx].push_back(static_cast<int>(v));
      propagate_costs(static_cast<int>(v));
    }

    const int emitted = emit_if_improved();
    if (!stopped) {
      // Polish every freshly reached goal chain, not just raw incumbents:
      // a raw-worse connection in a better corridor often refines below the
      // best polished one.
      if (emitted >= 0) refine_and_graft(emitted);
      else if (fresh_in_goal) refine_and_graft(fresh_idx);
    }
  }

  result.elapsed_s = seconds_since(start);
  return result;
}

}  // namespace cagekit::planners
