#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cagegen/geometry.hpp"
#include "cagegen/molecule.hpp"

namespace cagegen {

/// Uniform hash grid over 3-space for fixed-radius neighbour queries.
///
/// Entries are (id, position) pairs. Queries visit every cell overlapping the
/// bounding cube of the query sphere and filter by exact distance, so results
/// never contain false negatives.
class SpatialIndex {
public:
    explicit SpatialIndex(double cell_size = 0.18);
    /// Indexes every atom of `graph` under its atom id.
    SpatialIndex(const MolecularGraph& graph, double cell_size);

    void insert(int id, const Vec3& pos);

    /// Ids with |pos - center| <= radius, ascending.
    std::vector<int> range_query(const Vec3& center, double radius) const;

    /// True if no entry lies strictly closer than `radius` to `center`.
    bool empty_within(const Vec3& center, double radius) const;

    double cell_size() const { return cell_; }
    std::size_t size() const { return positions_.size(); }
    const Vec3& position(int id) const { return positions_.at(id); }

private:
    using Key = std::int64_t;
    Key key(std::int64_t x, std::int64_t y, std::int64_t z) const;
    std::int64_t cell_coord(double v) const;

    template <class Fn>
    void for_each_near(const Vec3& center, double radius, Fn&& fn) const;

    double cell_;
    struct Entry {
        int id;
        Vec3 pos;
    };
    std::unordered_map<Key, std::vector<Entry>> cells_;
    std::unordered_map<int, Vec3> positions_;
};

}  // namespace cagegen
