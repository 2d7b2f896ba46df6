#include "cagekit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace cagekit::geom {

Shape transformed(const Shape& s, const Pose& pose) {
  if (const auto* sp = std::get_if<Sphere>(&s)) {
    return Sphere{pose.apply(sp->center), sp->radius};
  }
  if (const auto* bx = std::get_if<Box>(&s)) {
    return Box{pose.compose(bx->pose), bx->half_extents};
  }
  const auto& c = std::get<Capsule>(s);
  return Capsule{pose.apply(c.p0), pose.apply(c.p1), c.radius};
}

double dist_point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest approach of two segments, clamped projections (Ericson 5.1.9).
double dist_segment_segment(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  constexpr double kEps = 1e-14;

  if (a <= kEps && e <= kEps) {
    return r.norm();
  }
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > kEps) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 c1 = p0 + s * d1;
  const Vec3 c2 = q0 + t * d2;
  return (c1 - c2).norm();
}

double dist_point_box(const Vec3& p, const Box& box) {
  const Vec3 local = box.pose.rotation.conjugate() * (p - box.pose.translation);
  const Vec3 excess = (local.cwiseAbs() - box.half_extents).cwiseMax(0.0);
  return excess.norm();
}

double dist_segment_box(const Vec3& a, const Vec3& b, const Box& box) {
  // dist(p(t), box) is convex in t, shrink the bracket around its minimum.
  double lo = 0.0, hi = 1.0;
  auto f = [&](double t) { return dist_point_box(a + t * (b - a), box); };
  double flo = f(lo), fhi = f(hi);
  for (int i = 0; i < 90 && hi - lo > 1e-13; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double f1 = f(m1), f2 = f(m2);
    if (f1 < f2) {
      hi = m2; fhi = f2;
    } else if (f2 < f1) {
      lo = m1; flo = f1;
    } else {
      lo = m1; flo = f1;
      hi = m2; fhi = f2;
    }
    if (std::min(f1, f2) == 0.0) return 0.0;
  }
  return std::min(std::min(flo, fhi), f(0.5 * (lo + hi)));
}

bool boxes_overlap(const Box& a, const Box& b) {
  // 15-axis separating axis test in a's frame.
  const Eigen::Matrix3d ra = a.pose.rotation.toRotationMatrix();
  const Eigen::Matrix3d rb = b.pose.rotation.toRotationMatrix();
  const Eigen::Matrix3d r = ra.transpose() * rb;
  Eigen::Matrix3d abs_r;
  constexpr double kEps = 1e-12;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) abs_r(i, j) = std::abs(r(i, j)) + kEps;

  const Vec3 t = ra.transpose() * (b.pose.translation - a.pose.translation);
  const Vec3& ea = a.half_extents;
  const Vec3& eb = b.half_extents;

  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > ea[i] + abs_r.row(i).dot(eb)) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(r.col(j))) > ea.dot(abs_r.col(j)) + eb[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      const double lhs = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
      const double rhs = ea[i1] * abs_r(i2, j) + ea[i2] * abs_r(i1, j) +
                         eb[j1] * abs_r(i, j2) + eb[j2] * abs_r(i, j1);
      if (lhs > rhs) return false;
    }
  }
  return true;
}

namespace {

bool overlap_sphere_sphere(const Sphere& a, const Sphere& b) {
  return (a.center - b.center).norm() <= a.radius + b.radius;
}
bool overlap_sphere_box(const Sphere& s, const Box& b) {
  return dist_point_box(s.center, b) <= s.radius;
}
bool overlap_sphere_capsule(const Sphere& s, const Capsule& c) {
  return dist_point_segment(s.center, c.p0, c.p1) <= s.radius + c.radius;
}
bool overlap_capsule_capsule(const Capsule& a, const Capsule& b) {
  return dist_segment_segment(a.p0, a.p1, b.p0, b.p1) <= a.radius + b.radius;
}
bool overlap_capsule_box(const Capsule& c, const Box& b) {
  return dist_segment_box(c.p0, c.p1, b) <= c.radius;
}

}  // namespace

bool shapes_overlap(const Shape& a, const Shape& b) {
  return std::visit(
      [](const auto& x, const auto& y) -> bool {
        using X = std::decay_t<decltype(x)>;
        using Y = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<X, Sphere> && std::is_same_v<Y, Sphere>)
          return overlap_sphere_sphere(x, y);
        else if constexpr (std::is_same_v<X, Sphere> && std::is_same_v<Y, Box>)
          return overlap_sphere_box(x, y);
        else if constexpr (std::is_same_v<X, Box> && std::is_same_v<Y, Sphere>)
          return overlap_sphere_box(y, x);
        else if constexpr (std::is_same_v<X, Sphere> && std::is_same_v<Y, Capsule>)
          return overlap_sphere_capsule(x, y);
        else if constexpr (std::is_same_v<X, Capsule> && std::is_same_v<Y, Sphere>)
          return overlap_sphere_capsule(y, x);
        else if constexpr (std::is_same_v<X, Box> && std::is_same_v<Y, Box>)
          return boxes_overlap(x, y);
        else if constexpr (std::is_same_v<X, Capsule> && std::is_same_v<Y, Box>)
          return overlap_capsule_box(x, y);
        else if constexpr (std::is_same_v<X, Box> && std::is_same_v<Y, Capsule>)
          return overlap_capsule_box(y, x);
        else
          return overlap_capsule_capsule(x, y);
      },
      a, b);
}

Eigen::AlignedBox3d bounding_box(const Shape& s) {
  Eigen::AlignedBox3d out;
  if (const auto* sp = std::get_if<Sphere>(&s)) {
    out.extend(sp->center - Vec3::Constant(sp->radius));
    out.extend(sp->center + Vec3::Constant(sp->radius));
    return out;
  }
  if (const auto* bx = std::get_if<Box>(&s)) {
    for (int i = 0; i < 8; ++i) {
      const Vec3 corner((i & 1) ? bx->half_extents.x() : -bx->half_extents.x(),
                        (i & 2) ? bx->half_extents.y() : -bx->half_extents.y(),
                        (i & 4) ? bx->half_extents.z() : -bx->half_extents.z());
      out.extend(bx->pose.apply(corner));
    }
    return out;
  }
  const auto& c = std::get<Capsule>(s);
  out.extend(c.p0 - Vec3::Constant(c.radius));
  out.extend(c.p0 + Vec3::Constant(c.radius));
  out.extend(c.p1 - Vec3::Constant(c.radius));
  out.extend(c.p1 + Vec3::Constant(c.radius));
  return out;
}

}  // namespace cagekit::geom
