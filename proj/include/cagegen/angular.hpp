#pragma once

#include <span>
#include <vector>

#include "cagegen/chem.hpp"
#include "cagegen/geometry.hpp"
#include "cagegen/molecule.hpp"
#include "cagegen/spatial_index.hpp"

namespace cagegen {

/// Sorted, disjoint, non-empty half-open angle intervals [lo, hi) in [0, 2*pi].
/// An arc crossing 2*pi is stored as two pieces, [lo, 2*pi) and [0, hi).
class AngularIntervalSet {
public:
    struct Interval {
        double lo;
        double hi;
        double length() const { return hi - lo; }
    };

    AngularIntervalSet() = default;
    static AngularIntervalSet full();
    /// The arc from `lo` to `hi` (counter-clockwise, hi >= lo, any real values).
    static AngularIntervalSet arc(double lo, double hi);
    static AngularIntervalSet from_intervals(std::vector<Interval> pieces);

    bool empty() const { return pieces_.empty(); }
    bool is_full() const;
    std::size_t size() const { return pieces_.size(); }
    std::span<const Interval> intervals() const { return pieces_; }
    double measure() const;
    bool contains(double theta) const;

    /// Pieces with the wrap-around pair rejoined, so one arc may end past 2*pi.
    std::vector<Interval> arcs() const;

    AngularIntervalSet complement() const;
    AngularIntervalSet unite(const AngularIntervalSet& other) const;
    AngularIntervalSet intersect(const AngularIntervalSet& other) const;
    /// {theta + delta : theta in this}.
    AngularIntervalSet shifted(double delta) const;

    /// Distance to the nearest interval endpoint (ignoring the artificial 0/2*pi split).
    double distance_to_boundary(double theta) const;

private:
    void normalize();
    std::vector<Interval> pieces_;
};

/// Circle of admissible positions for the next atom given two bonded predecessors.
struct PlacementCircle {
    Vec3 center;
    double radius;
    Vec3 vec1;
    Vec3 vec2;
    Vec3 axis;

    Vec3 point(double theta) const;
    /// Angle whose point is nearest to the projection of p onto the circle plane.
    double angle_of(const Vec3& p) const;
};

/// Next atom at distance `bond_len` from `curr`, forming `bond_angle_deg` with `prev`.
/// Throws GeometryError if prev == curr.
PlacementCircle placement_circle(const Vec3& prev, const Vec3& curr, double bond_len, double bond_angle_deg);

/// The two hydrogens completing a tetrahedral carbon at `curr`, parameterised by
/// the next-carbon angle theta: hydrogen angles are theta + delta and theta - delta.
struct HydrogenFrame {
    PlacementCircle circle;
    double delta;

    Vec3 hydrogen(double theta, int side) const { return circle.point(theta + (side > 0 ? delta : -delta)); }
};

/// Hydrogen frame sharing the basis of placement_circle(prev, curr, ...).
HydrogenFrame hydrogen_frame(const Vec3& prev, const Vec3& curr, const ChemParams& params);

/// {theta : |circle.point(theta) - obstacle| < threshold}, in closed form.
AngularIntervalSet forbidden_interval(const PlacementCircle& circle, const Vec3& obstacle, double threshold);

struct Obstacle {
    Vec3 pos;
    double threshold;
};

/// Atoms a new path atom must avoid: the static world (substrate at d_weak,
/// everything else at col) behind a SpatialIndex, plus a stack of transient
/// atoms of the path under construction.
class ObstacleField {
public:
    ObstacleField(const MolecularGraph& world, const ChemParams& params);

    void push(const Vec3& pos) { transient_.push_back(pos); }
    void pop(std::size_t n = 1) { transient_.resize(transient_.size() - n); }
    std::size_t transient_size() const { return transient_.size(); }

    /// Obstacles whose exclusion sphere can reach within `radius` of `center`.
    void collect(const Vec3& center, double radius, std::vector<Obstacle>& out) const;
    /// True if `p` respects every obstacle threshold (distance >= threshold).
    bool clear(const Vec3& p) const;
    /// True if `p` respects every threshold except the world atoms listed in `skip`.
    bool clear_except(const Vec3& p, std::span<const AtomId> skip) const;

    double max_threshold() const;
    const MolecularGraph& world() const { return *world_; }
    const SpatialIndex& index() const { return index_; }
    const ChemParams& params() const { return params_; }

private:
    double threshold_of(int id) const;

    const MolecularGraph* world_;
    ChemParams params_;
    SpatialIndex index_;
    std::vector<Vec3> transient_;
};

/// Angles at which a tetrahedral carbon bonded to `curr` (and, if requested,
/// both induced hydrogens of `curr`) clears every obstacle.
AngularIntervalSet valid_intervals(const PlacementCircle& carbon, const HydrogenFrame* hydrogens,
                                   const ObstacleField& field);

/// Convenience form building the circle and frame from prev/curr.
AngularIntervalSet valid_intervals(const Vec3& prev, const Vec3& curr, const ObstacleField& field,
                                   const ChemParams& params, bool with_hydrogens = true);

}  // namespace cagegen
