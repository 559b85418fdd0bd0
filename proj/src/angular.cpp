#include "cagegen/angular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cagegen/error.hpp"

namespace cagegen {

// ---------------------------------------------------------------- intervals

AngularIntervalSet AngularIntervalSet::full() {
    AngularIntervalSet s;
    s.pieces_.push_back({0.0, kTwoPi});
    return s;
}

AngularIntervalSet AngularIntervalSet::arc(double lo, double hi) {
    AngularIntervalSet s;
    if (!(hi > lo)) return s;
    if (hi - lo >= kTwoPi) return full();
    const double start = wrap_angle(lo);
    const double end = start + (hi - lo);
    if (end <= kTwoPi) {
        s.pieces_.push_back({start, end});
    } else {
        s.pieces_.push_back({0.0, end - kTwoPi});
        s.pieces_.push_back({start, kTwoPi});
    }
    s.normalize();
    return s;
}

AngularIntervalSet AngularIntervalSet::from_intervals(std::vector<Interval> pieces) {
    AngularIntervalSet s;
    for (const Interval& iv : pieces) {
        const AngularIntervalSet a = arc(iv.lo, iv.hi);
        s.pieces_.insert(s.pieces_.end(), a.pieces_.begin(), a.pieces_.end());
    }
    s.normalize();
    return s;
}

void AngularIntervalSet::normalize() {
    std::erase_if(pieces_, [](const Interval& iv) { return !(iv.hi > iv.lo); });
    std::sort(pieces_.begin(), pieces_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const Interval& iv : pieces_) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    pieces_ = std::move(merged);
}

bool AngularIntervalSet::is_full() const {
    return pieces_.size() == 1 && pieces_[0].lo <= 0.0 && pieces_[0].hi >= kTwoPi;
}

double AngularIntervalSet::measure() const {
    double m = 0;
    for (const Interval& iv : pieces_) m += iv.length();
    return m;
}

bool AngularIntervalSet::contains(double theta) const {
    const double t = wrap_angle(theta);
    for (const Interval& iv : pieces_)
        if (t >= iv.lo && t < iv.hi) return true;
    return false;
}

std::vector<AngularIntervalSet::Interval> AngularIntervalSet::arcs() const {
    std::vector<Interval> out(pieces_.begin(), pieces_.end());
    if (out.size() >= 2 && out.front().lo <= 0.0 && out.back().hi >= kTwoPi) {
        out.back().hi = kTwoPi + out.front().hi;
        out.erase(out.begin());
    }
    return out;
}

AngularIntervalSet AngularIntervalSet::complement() const {
    AngularIntervalSet s;
    double cursor = 0.0;
    for (const Interval& iv : pieces_) {
        if (iv.lo > cursor) s.pieces_.push_back({cursor, iv.lo});
        cursor = std::max(cursor, iv.hi);
    }
    if (cursor < kTwoPi) s.pieces_.push_back({cursor, kTwoPi});
    return s;
}

AngularIntervalSet AngularIntervalSet::unite(const AngularIntervalSet& other) const {
    AngularIntervalSet s;
    s.pieces_ = pieces_;
    s.pieces_.insert(s.pieces_.end(), other.pieces_.begin(), other.pieces_.end());
    s.normalize();
    return s;
}

AngularIntervalSet AngularIntervalSet::intersect(const AngularIntervalSet& other) const {
    AngularIntervalSet s;
    std::size_t i = 0, j = 0;
    while (i < pieces_.size() && j < other.pieces_.size()) {
        const Interval& a = pieces_[i];
        const Interval& b = other.pieces_[j];
        const double lo = std::max(a.lo, b.lo);
        const double hi = std::min(a.hi, b.hi);
        if (hi > lo) s.pieces_.push_back({lo, hi});
        if (a.hi < b.hi) ++i;
        else ++j;
    }
    s.normalize();
    return s;
}

AngularIntervalSet AngularIntervalSet::shifted(double delta) const {
    if (is_full()) return full();
    std::vector<Interval> moved;
    for (const Interval& iv : arcs()) moved.push_back({iv.lo + delta, iv.hi + delta});
    return from_intervals(std::move(moved));
}

double AngularIntervalSet::distance_to_boundary(double theta) const {
    const double t = wrap_angle(theta);
    double best = std::numeric_limits<double>::infinity();
    for (const Interval& iv : arcs()) {
        for (double b : {iv.lo, iv.hi}) {
            const double bw = wrap_angle(b);
            double d = std::abs(t - bw);
            d = std::min(d, kTwoPi - d);
            best = std::min(best, d);
        }
    }
    return best;
}

// ---------------------------------------------------------------- circles

Vec3 PlacementCircle::point(double theta) const {
    return center + radius * (std::cos(theta) * vec1 + std::sin(theta) * vec2);
}

double PlacementCircle::angle_of(const Vec3& p) const {
    const Vec3 d = p - center;
    return wrap_angle(std::atan2(d.dot(vec2), d.dot(vec1)));
}

PlacementCircle placement_circle(const Vec3& prev, const Vec3& curr, double bond_len, double bond_angle_deg) {
    const Vec3 dir = curr - prev;
    const double n = dir.norm();
    if (n == 0.0) throw GeometryError("degenerate axis");
    if (!(bond_angle_deg > 0.0 && bond_angle_deg <= 180.0)) throw GeometryError("bond angle out of range");
    const Vec3 u = dir / n;
    const double cone = deg_to_rad(180.0 - bond_angle_deg);
    PlacementCircle c;
    c.center = curr + bond_len * std::cos(cone) * u;
    c.radius = bond_len * std::sin(cone);
    c.vec1 = any_orthonormal(u);
    c.vec2 = u.cross(c.vec1);
    c.axis = c.vec1.cross(c.vec2);
    return c;
}

HydrogenFrame hydrogen_frame(const Vec3& prev, const Vec3& curr, const ChemParams& params) {
    HydrogenFrame f;
    f.circle = placement_circle(prev, curr, params.cov_hydrogen, kTetrahedralDeg);
    // Both substituents sit on cones of half-angle beta around the prev->curr
    // axis; their mutual angle gamma obeys
    //   cos(gamma) = cos^2(beta) + sin^2(beta) cos(delta).
    const double beta = deg_to_rad(180.0 - kTetrahedralDeg);
    const double cos_gamma = std::cos(deg_to_rad(kTetrahedralDeg));
    const double c2 = std::cos(beta) * std::cos(beta);
    const double s2 = std::sin(beta) * std::sin(beta);
    f.delta = std::acos(std::clamp((cos_gamma - c2) / s2, -1.0, 1.0));
    return f;
}

AngularIntervalSet forbidden_interval(const PlacementCircle& circle, const Vec3& obstacle, double threshold) {
    // |C(theta) - o|^2 = |w|^2 + R^2 - 2 R rho cos(theta - phi), w = o - center.
    const Vec3 w = obstacle - circle.center;
    const double a = w.dot(circle.vec1);
    const double b = w.dot(circle.vec2);
    const double rho = std::hypot(a, b);
    const double base = w.squaredNorm() + circle.radius * circle.radius;
    const double t2 = threshold * threshold;
    if (rho * circle.radius == 0.0) return base < t2 ? AngularIntervalSet::full() : AngularIntervalSet();
    const double c = (base - t2) / (2.0 * circle.radius * rho);
    if (c >= 1.0) return {};
    if (c < -1.0) return AngularIntervalSet::full();
    const double phi = std::atan2(b, a);
    const double half = std::acos(c);
    return AngularIntervalSet::arc(phi - half, phi + half);
}

// ---------------------------------------------------------------- obstacles

ObstacleField::ObstacleField(const MolecularGraph& world, const ChemParams& params)
    : world_(&world), params_(params), index_(world, params.d_weak) {}

double ObstacleField::threshold_of(int id) const {
    return world_->atom(id).role == Role::substrate ? params_.d_weak : params_.col;
}

double ObstacleField::max_threshold() const { return std::max(params_.d_weak, params_.col); }

void ObstacleField::collect(const Vec3& center, double radius, std::vector<Obstacle>& out) const {
    for (int id : index_.range_query(center, radius + max_threshold())) {
        const double t = threshold_of(id);
        const Vec3& p = world_->atom(id).pos;
        if ((p - center).norm() <= radius + t) out.push_back({p, t});
    }
    for (const Vec3& p : transient_)
        if ((p - center).norm() <= radius + params_.col) out.push_back({p, params_.col});
}

bool ObstacleField::clear(const Vec3& p) const { return clear_except(p, {}); }

bool ObstacleField::clear_except(const Vec3& p, std::span<const AtomId> skip) const {
    for (int id : index_.range_query(p, max_threshold())) {
        if (std::find(skip.begin(), skip.end(), id) != skip.end()) continue;
        if ((world_->atom(id).pos - p).norm() < threshold_of(id)) return false;
    }
    for (const Vec3& q : transient_)
        if ((q - p).norm() < params_.col) return false;
    return true;
}

AngularIntervalSet valid_intervals(const PlacementCircle& carbon, const HydrogenFrame* hydrogens,
                                   const ObstacleField& field) {
    std::vector<Obstacle> near;
    field.collect(carbon.center, carbon.radius, near);
    AngularIntervalSet forbidden;
    for (const Obstacle& o : near) forbidden = forbidden.unite(forbidden_interval(carbon, o.pos, o.threshold));

    if (hydrogens) {
        near.clear();
        field.collect(hydrogens->circle.center, hydrogens->circle.radius, near);
        AngularIntervalSet h_forbidden;
        for (const Obstacle& o : near)
            h_forbidden = h_forbidden.unite(forbidden_interval(hydrogens->circle, o.pos, o.threshold));
        // Hydrogen at theta +/- delta is forbidden iff theta lies in F shifted by -/+ delta.
        forbidden = forbidden.unite(h_forbidden.shifted(-hydrogens->delta))
                        .unite(h_forbidden.shifted(hydrogens->delta));
    }
    return forbidden.complement();
}

AngularIntervalSet valid_intervals(const Vec3& prev, const Vec3& curr, const ObstacleField& field,
                                   const ChemParams& params, bool with_hydrogens) {
    const PlacementCircle circle = placement_circle(prev, curr, params.cov_heavy, kTetrahedralDeg);
    if (!with_hydrogens) return valid_intervals(circle, nullptr, field);
    const HydrogenFrame frame = hydrogen_frame(prev, curr, params);
    return valid_intervals(circle, &frame, field);
}

}  // namespace cagegen
