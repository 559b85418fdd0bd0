#include "cagegen/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "cagegen/error.hpp"

namespace cagegen {

double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = a - b;
    const Vec3 v = c - b;
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw GeometryError("zero-length bond vector");
    const double cosine = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
    return rad_to_deg(std::acos(cosine));
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

Vec3 any_orthonormal(const Vec3& v) {
    // Cross with the coordinate axis least aligned with v.
    const Vec3 a = v.cwiseAbs();
    Vec3 axis = Vec3::UnitX();
    if (a.y() <= a.x() && a.y() <= a.z()) axis = Vec3::UnitY();
    else if (a.z() <= a.x() && a.z() <= a.y()) axis = Vec3::UnitZ();
    return v.cross(axis).normalized();
}

double wrap_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

}  // namespace cagegen
