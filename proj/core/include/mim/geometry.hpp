#pragma once

#include <Eigen/Geometry>

#include <span>
#include <vector>

namespace mim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform. Orientation is a unit quaternion (w, x, y, z).
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  /// Validates the invariants (finite position, |q| within 1e-9 of 1).
  /// Throws Error{InvalidArgument}.
  static Pose make(const Vec3& position, const Quat& orientation);

  Vec3 apply(const Vec3& local) const { return position + orientation * local; }
  Vec3 rotate(const Vec3& local) const { return orientation * local; }
  /// this ∘ child: child expressed in this frame, returned in the parent frame.
  Pose compose(const Pose& child) const;
};

void validate(const Pose& pose);

/// Rotation about the local x axis.
Quat rotation_x(double angle_rad);
Quat rotation_z(double angle_rad);
double deg_to_rad(double deg);

/// Ray/plane intersection parameter. Returns a negative value when the ray
/// is parallel to the plane or points away from it.
double intersect_ray_plane(const Vec3& origin, const Vec3& direction, const Vec3& plane_point,
                           const Vec3& plane_normal);

/// Convex polygon helpers in 2-D (counter-clockwise or clockwise accepted).
using Polygon = std::vector<Vec2>;

double polygon_area(std::span<const Vec2> polygon);
bool point_in_convex_polygon(std::span<const Vec2> polygon, const Vec2& p);
/// Sutherland-Hodgman clip of a convex polygon against [0,w]x[0,h].
Polygon clip_to_rectangle(std::span<const Vec2> polygon, double width, double height);
/// Andrew's monotone chain; result is counter-clockwise without collinear points.
Polygon convex_hull(std::vector<Vec2> points);
Polygon rectangle(double u0, double v0, double u1, double v1);

}  // namespace mim
