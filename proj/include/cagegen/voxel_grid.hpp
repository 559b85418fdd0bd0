#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cagegen/chem.hpp"
#include "cagegen/geometry.hpp"
#include "cagegen/molecule.hpp"
#include "cagegen/spatial_index.hpp"

namespace cagegen {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Collision-aware lattice over a molecule's bounding box. Each lattice vertex
/// is a node; vertices closer than the blocking threshold to an atom are unusable.
class VoxelGrid {
public:
    VoxelGrid(Vec3 origin, double step, std::array<int, 3> dims);

    const Vec3& origin() const { return origin_; }
    double step() const { return step_; }
    const std::array<int, 3>& dims() const { return dims_; }
    std::size_t voxel_count() const { return blocked_.size(); }

    std::int64_t index(int i, int j, int k) const {
        return (static_cast<std::int64_t>(k) * dims_[1] + j) * dims_[0] + i;
    }
    std::array<int, 3> coords(std::int64_t idx) const;
    Vec3 position(std::int64_t idx) const;
    Vec3 position(int i, int j, int k) const { return origin_ + step_ * Vec3(i, j, k); }
    bool in_bounds(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims_[0] && j < dims_[1] && k < dims_[2];
    }

    bool blocked(std::int64_t idx) const { return blocked_[static_cast<std::size_t>(idx)] != 0; }
    void set_blocked(std::int64_t idx, bool b) { blocked_[static_cast<std::size_t>(idx)] = b ? 1 : 0; }
    std::size_t blocked_count() const;

    /// Unblocked voxels within one grid diagonal of p, with their distances.
    std::vector<std::pair<std::int64_t, double>> attachments(const Vec3& p) const;

private:
    Vec3 origin_;
    double step_;
    std::array<int, 3> dims_;
    std::vector<std::uint8_t> blocked_;
};

/// Grid over the bounding box of `atoms` expanded by `margin`, with vertices
/// closer than `block_threshold` to any atom blocked. Throws InputError when
/// `atoms` is empty ("empty bounding box").
VoxelGrid build_grid(std::span<const Vec3> atoms, double margin, double step, double block_threshold);

/// As above, but the box spans `extent` while only `atoms` block vertices.
VoxelGrid build_grid(std::span<const Vec3> extent, std::span<const Vec3> atoms, double margin, double step,
                     double block_threshold);

/// build_grid over all atoms of `graph` with margin d_weak.
VoxelGrid build_grid(const MolecularGraph& graph, const ChemParams& params, double block_threshold,
                     double step = 0.05);

/// Exact length of a lattice path: counts of axial, face-diagonal and body-diagonal
/// moves plus the two endpoint attachment legs. Evaluated by grid_cost_value only,
/// so equal paths always produce bitwise-equal lengths regardless of search order.
struct GridCost {
    double attach_a = 0.0;
    double attach_b = 0.0;
    int axial = 0;
    int planar = 0;
    int diagonal = 0;
};

double grid_cost_value(const GridCost& c, double step);

/// Shortest lattice distance between two points (26-neighbourhood, Euclidean
/// edge weights, endpoints attached to unblocked vertices within one grid
/// diagonal); kUnreachable if none.
double astar(const VoxelGrid& grid, const Vec3& from, const Vec3& to);

/// astar(grid, s, target) for every source s, from one search rooted at the target.
std::vector<double> ssmt_astar(const VoxelGrid& grid, std::span<const Vec3> sources, const Vec3& target);

/// True iff no atom of `graph` (other than `excluded`) lies strictly within
/// `clearance` of the segment a-b.
bool line_of_sight(const Vec3& a, const Vec3& b, const MolecularGraph& graph, const SpatialIndex& index,
                   double clearance, std::span<const AtomId> excluded = {});

}  // namespace cagegen
