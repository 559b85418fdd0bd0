#include "cagegen/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "cagegen/error.hpp"

namespace cagegen {

SpatialIndex::SpatialIndex(double cell_size) : cell_(cell_size) {
    if (!(cell_size > 0)) throw InputError("spatial index cell size must be positive");
}

SpatialIndex::SpatialIndex(const MolecularGraph& graph, double cell_size) : SpatialIndex(cell_size) {
    for (std::size_t i = 0; i < graph.size(); ++i) insert(static_cast<int>(i), graph.atoms()[i].pos);
}

SpatialIndex::Key SpatialIndex::key(std::int64_t x, std::int64_t y, std::int64_t z) const {
    // 21 bits per axis, offset to stay non-negative.
    constexpr std::int64_t off = 1 << 20;
    constexpr std::int64_t mask = (std::int64_t{1} << 21) - 1;
    return (((x + off) & mask) << 42) | (((y + off) & mask) << 21) | ((z + off) & mask);
}

std::int64_t SpatialIndex::cell_coord(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
}

void SpatialIndex::insert(int id, const Vec3& pos) {
    if (!positions_.emplace(id, pos).second) throw InputError("duplicate id in spatial index");
    cells_[key(cell_coord(pos.x()), cell_coord(pos.y()), cell_coord(pos.z()))].push_back({id, pos});
}

template <class Fn>
void SpatialIndex::for_each_near(const Vec3& center, double radius, Fn&& fn) const {
    const std::int64_t x0 = cell_coord(center.x() - radius), x1 = cell_coord(center.x() + radius);
    const std::int64_t y0 = cell_coord(center.y() - radius), y1 = cell_coord(center.y() + radius);
    const std::int64_t z0 = cell_coord(center.z() - radius), z1 = cell_coord(center.z() + radius);
    for (std::int64_t x = x0; x <= x1; ++x)
        for (std::int64_t y = y0; y <= y1; ++y)
            for (std::int64_t z = z0; z <= z1; ++z) {
                const auto it = cells_.find(key(x, y, z));
                if (it == cells_.end()) continue;
                for (const Entry& e : it->second)
                    if (!fn(e.id, e.pos)) return;
            }
}

std::vector<int> SpatialIndex::range_query(const Vec3& center, double radius) const {
    std::vector<int> out;
    if (radius < 0) return out;
    const double r2 = radius * radius;
    for_each_near(center, radius, [&](int id, const Vec3& p) {
        if ((p - center).squaredNorm() <= r2) out.push_back(id);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

bool SpatialIndex::empty_within(const Vec3& center, double radius) const {
    bool empty = true;
    const double r2 = radius * radius;
    for_each_near(center, radius, [&](int, const Vec3& p) {
        if ((p - center).squaredNorm() < r2) empty = false;
        return empty;
    });
    return empty;
}

}  // namespace cagegen
