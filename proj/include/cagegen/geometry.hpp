#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <numbers>

namespace cagegen {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ideal tetrahedral angle, arccos(-1/3), in degrees.
inline const double kTetrahedralDeg = 109.47122063449069;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Angle a-b-c at vertex b, in degrees within [0, 180].
/// Throws GeometryError when a == b or c == b.
double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c);

/// Distance from point p to the closed segment [a, b].
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// Any unit vector orthogonal to the (nonzero) vector v.
Vec3 any_orthonormal(const Vec3& v);

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double theta);

}  // namespace cagegen
