#include "mim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mim/error.hpp"

namespace mim {

void validate(const Pose& pose) {
  require(pose.position.allFinite(), ErrorCode::InvalidArgument, "pose position must be finite");
  const double n = pose.orientation.coeffs().norm();
  require(std::isfinite(n) && std::abs(n - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "pose orientation must be a unit quaternion");
}

Pose Pose::make(const Vec3& position, const Quat& orientation) {
  Pose p{position, orientation};
  validate(p);
  return p;
}

Pose Pose::compose(const Pose& child) const {
  Pose out;
  out.position = apply(child.position);
  out.orientation = (orientation * child.orientation).normalized();
  return out;
}

Quat rotation_x(double angle_rad) { return Quat(Eigen::AngleAxisd(angle_rad, Vec3::UnitX())); }
Quat rotation_z(double angle_rad) { return Quat(Eigen::AngleAxisd(angle_rad, Vec3::UnitZ())); }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double intersect_ray_plane(const Vec3& origin, const Vec3& direction, const Vec3& plane_point,
                           const Vec3& plane_normal) {
  const double denom = direction.dot(plane_normal);
  if (std::abs(denom) < 1e-12) return -1.0;
  return (plane_point - origin).dot(plane_normal) / denom;
}

double polygon_area(std::span<const Vec2> polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) * 0.5;
}

namespace {
double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}
}  // namespace

bool point_in_convex_polygon(std::span<const Vec2> polygon, const Vec2& p) {
  if (polygon.size() < 3) return false;
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const double c = cross(polygon[i], polygon[(i + 1) % polygon.size()], p);
    if (c > 0) has_pos = true;
    if (c < 0) has_neg = true;
    if (has_pos && has_neg) return false;
  }
  return true;
}

Polygon clip_to_rectangle(std::span<const Vec2> polygon, double width, double height) {
  Polygon out(polygon.begin(), polygon.end());
  // Each edge is (axis, bound, keep_greater).
  const struct {
    int axis;
    double bound;
    bool keep_greater;
  } edges[] = {{0, 0.0, true}, {0, width, false}, {1, 0.0, true}, {1, height, false}};
  for (const auto& e : edges) {
    if (out.empty()) break;
    Polygon in = std::move(out);
    out.clear();
    auto inside = [&](const Vec2& p) { return e.keep_greater ? p[e.axis] >= e.bound : p[e.axis] <= e.bound; };
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2& cur = in[i];
      const Vec2& prev = in[(i + in.size() - 1) % in.size()];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in != prev_in) {
        const double t = (e.bound - prev[e.axis]) / (cur[e.axis] - prev[e.axis]);
        Vec2 hit = prev + t * (cur - prev);
        hit[e.axis] = e.bound;
        out.push_back(hit);
      }
      if (cur_in) out.push_back(cur);
    }
  }
  return out;
}

Polygon convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (points.size() < 3) return points;
  Polygon hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

Polygon rectangle(double u0, double v0, double u1, double v1) {
  return {Vec2(u0, v0), Vec2(u1, v0), Vec2(u1, v1), Vec2(u0, v1)};
}

}  // namespace mim
