#include "cagegen/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "cagegen/error.hpp"

namespace cagegen {
namespace {

struct Move {
    int di, dj, dk;
    int kind;  // number of non-zero components: 1 axial, 2 planar, 3 diagonal
};

const std::array<Move, 26>& moves() {
    static const std::array<Move, 26> table = [] {
        std::array<Move, 26> t{};
        std::size_t n = 0;
        for (int k = -1; k <= 1; ++k)
            for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i) {
                    const int kind = (i != 0) + (j != 0) + (k != 0);
                    if (kind) t[n++] = {i, j, k, kind};
                }
        return t;
    }();
    return table;
}

GridCost extended(GridCost c, int kind) {
    if (kind == 1) ++c.axial;
    else if (kind == 2) ++c.planar;
    else ++c.diagonal;
    return c;
}

/// Per-thread search buffers, reset in O(1) through generation stamps.
struct Scratch {
    std::vector<std::uint32_t> stamp;
    std::vector<std::uint32_t> goal_stamp;
    std::vector<GridCost> cost;
    std::vector<double> value;
    std::vector<double> goal_att;
    std::uint32_t gen = 0;

    void reset(std::size_t n) {
        if (stamp.size() < n) {
            stamp.assign(n, 0);
            goal_stamp.assign(n, 0);
            cost.resize(n);
            value.resize(n);
            goal_att.resize(n);
        }
        if (++gen == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            std::fill(goal_stamp.begin(), goal_stamp.end(), 0);
            gen = 1;
        }
    }
    bool seen(std::int64_t i) const { return stamp[static_cast<std::size_t>(i)] == gen; }
};

thread_local Scratch tls_scratch;

// (f, value, node); ordered by f then node for deterministic pops.
using QueueEntry = std::tuple<double, double, std::int64_t>;
struct QueueOrder {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        return std::get<2>(a) > std::get<2>(b);
    }
};
using OpenList = std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder>;

}  // namespace

VoxelGrid::VoxelGrid(Vec3 origin, double step, std::array<int, 3> dims)
    : origin_(std::move(origin)), step_(step), dims_(dims) {
    if (!(step > 0)) throw InputError("grid step must be positive");
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw InputError("grid dimensions must be positive");
    blocked_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0);
}

std::array<int, 3> VoxelGrid::coords(std::int64_t idx) const {
    const int i = static_cast<int>(idx % dims_[0]);
    const std::int64_t rest = idx / dims_[0];
    return {i, static_cast<int>(rest % dims_[1]), static_cast<int>(rest / dims_[1])};
}

Vec3 VoxelGrid::position(std::int64_t idx) const {
    const auto c = coords(idx);
    return position(c[0], c[1], c[2]);
}

std::size_t VoxelGrid::blocked_count() const {
    return static_cast<std::size_t>(std::count(blocked_.begin(), blocked_.end(), std::uint8_t{1}));
}

std::vector<std::pair<std::int64_t, double>> VoxelGrid::attachments(const Vec3& p) const {
    std::vector<std::pair<std::int64_t, double>> out;
    const double reach = step_ * std::sqrt(3.0);
    const Vec3 rel = (p - origin_) / step_;
    const int r = 2;
    const int ci = static_cast<int>(std::floor(rel.x()));
    const int cj = static_cast<int>(std::floor(rel.y()));
    const int ck = static_cast<int>(std::floor(rel.z()));
    for (int k = ck - r + 1; k <= ck + r; ++k)
        for (int j = cj - r + 1; j <= cj + r; ++j)
            for (int i = ci - r + 1; i <= ci + r; ++i) {
                if (!in_bounds(i, j, k)) continue;
                const std::int64_t idx = index(i, j, k);
                if (blocked(idx)) continue;
                const double d = (position(i, j, k) - p).norm();
                if (d <= reach) out.emplace_back(idx, d);
            }
    return out;
}

VoxelGrid build_grid(std::span<const Vec3> atoms, double margin, double step, double block_threshold) {
    return build_grid(atoms, atoms, margin, step, block_threshold);
}

VoxelGrid build_grid(std::span<const Vec3> extent, std::span<const Vec3> atoms, double margin, double step,
                     double block_threshold) {
    if (extent.empty()) throw InputError("empty bounding box");
    Vec3 lo = extent[0], hi = extent[0];
    for (const Vec3& p : extent) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    lo.array() -= margin;
    hi.array() += margin;
    std::array<int, 3> dims{};
    for (int a = 0; a < 3; ++a) dims[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / step)) + 1;
    VoxelGrid grid(lo, step, dims);

    const double t2 = block_threshold * block_threshold;
    const int reach = static_cast<int>(std::ceil(block_threshold / step)) + 1;
    for (const Vec3& p : atoms) {
        const Vec3 rel = (p - lo) / step;
        const int ci = static_cast<int>(std::floor(rel.x()));
        const int cj = static_cast<int>(std::floor(rel.y()));
        const int ck = static_cast<int>(std::floor(rel.z()));
        for (int k = ck - reach; k <= ck + reach; ++k)
            for (int j = cj - reach; j <= cj + reach; ++j)
                for (int i = ci - reach; i <= ci + reach; ++i) {
                    if (!grid.in_bounds(i, j, k)) continue;
                    if ((grid.position(i, j, k) - p).squaredNorm() < t2) grid.set_blocked(grid.index(i, j, k), true);
                }
    }
    return grid;
}

VoxelGrid build_grid(const MolecularGraph& graph, const ChemParams& params, double block_threshold, double step) {
    std::vector<Vec3> pts;
    pts.reserve(graph.size());
    for (const Atom& a : graph.atoms()) pts.push_back(a.pos);
    return build_grid(pts, params.d_weak, step, block_threshold);
}

double grid_cost_value(const GridCost& c, double step) {
    static const double kSqrt2 = std::sqrt(2.0);
    static const double kSqrt3 = std::sqrt(3.0);
    return step * (c.axial + c.planar * kSqrt2 + c.diagonal * kSqrt3) + (c.attach_a + c.attach_b);
}

double astar(const VoxelGrid& grid, const Vec3& from, const Vec3& to) {
    if ((from - to).norm() == 0.0) return 0.0;
    const auto starts = grid.attachments(from);
    const auto goals = grid.attachments(to);
    if (starts.empty() || goals.empty()) return kUnreachable;

    Scratch& s = tls_scratch;
    s.reset(grid.voxel_count());
    for (const auto& [idx, d] : goals) {
        s.goal_stamp[static_cast<std::size_t>(idx)] = s.gen;
        s.goal_att[static_cast<std::size_t>(idx)] = d;
    }

    constexpr std::int64_t kTarget = -1;
    GridCost target_cost;
    double target_value = kUnreachable;
    OpenList open;
    const double step = grid.step();

    for (const auto& [idx, d] : starts) {
        const auto u = static_cast<std::size_t>(idx);
        GridCost c;
        c.attach_a = d;
        const double v = grid_cost_value(c, step);
        if (!s.seen(idx) || v < s.value[u]) {
            s.stamp[u] = s.gen;
            s.cost[u] = c;
            s.value[u] = v;
            open.emplace(v + (grid.position(idx) - to).norm(), v, idx);
        }
    }

    while (!open.empty()) {
        const auto [f, v, node] = open.top();
        open.pop();
        if (node == kTarget) return grid_cost_value(target_cost, step);
        const auto u = static_cast<std::size_t>(node);
        if (v != s.value[u]) continue;

        if (s.goal_stamp[u] == s.gen) {
            GridCost c = s.cost[u];
            c.attach_b = s.goal_att[u];
            const double tv = grid_cost_value(c, step);
            if (tv < target_value) {
                target_value = tv;
                target_cost = c;
                open.emplace(tv, tv, kTarget);
            }
        }

        const auto [i, j, k] = grid.coords(node);
        for (const Move& m : moves()) {
            const int ni = i + m.di, nj = j + m.dj, nk = k + m.dk;
            if (!grid.in_bounds(ni, nj, nk)) continue;
            const std::int64_t nb = grid.index(ni, nj, nk);
            const auto w = static_cast<std::size_t>(nb);
            if (grid.blocked(nb)) continue;
            const GridCost c = extended(s.cost[u], m.kind);
            const double nv = grid_cost_value(c, step);
            if (!s.seen(nb) || nv < s.value[w]) {
                s.stamp[w] = s.gen;
                s.cost[w] = c;
                s.value[w] = nv;
                open.emplace(nv + (grid.position(ni, nj, nk) - to).norm(), nv, nb);
            }
        }
    }
    return kUnreachable;
}

std::vector<double> ssmt_astar(const VoxelGrid& grid, std::span<const Vec3> sources, const Vec3& target) {
    const std::size_t n = sources.size();
    std::vector<double> result(n, kUnreachable);
    std::vector<bool> settled(n, false);
    std::size_t remaining = 0;

    // voxel -> (source, attachment distance)
    std::vector<std::vector<std::pair<std::size_t, double>>> source_att;
    std::vector<std::int64_t> att_voxels;
    std::vector<std::pair<std::int64_t, std::size_t>> voxel_slot;
    for (std::size_t j = 0; j < n; ++j) {
        if ((sources[j] - target).norm() == 0.0) {
            result[j] = 0.0;
            settled[j] = true;
            continue;
        }
        const auto att = grid.attachments(sources[j]);
        if (att.empty()) {
            settled[j] = true;
            continue;
        }
        ++remaining;
        for (const auto& [idx, d] : att) {
            auto it = std::find_if(voxel_slot.begin(), voxel_slot.end(), [&](const auto& p) { return p.first == idx; });
            if (it == voxel_slot.end()) {
                voxel_slot.emplace_back(idx, source_att.size());
                source_att.emplace_back();
                it = voxel_slot.end() - 1;
            }
            source_att[it->second].emplace_back(j, d);
        }
    }
    if (remaining == 0) return result;
    const auto starts = grid.attachments(target);
    if (starts.empty()) return result;

    Scratch& s = tls_scratch;
    s.reset(grid.voxel_count());
    for (const auto& [idx, slot] : voxel_slot) {
        s.goal_stamp[static_cast<std::size_t>(idx)] = s.gen;
        s.goal_att[static_cast<std::size_t>(idx)] = static_cast<double>(slot);
    }

    std::vector<GridCost> best_cost(n);
    std::vector<double> best_value(n, kUnreachable);
    const double step = grid.step();
    auto heuristic = [&](const Vec3& p) {
        double h = kUnreachable;
        for (std::size_t j = 0; j < n; ++j)
            if (!settled[j]) h = std::min(h, (p - sources[j]).norm());
        return h == kUnreachable ? 0.0 : h;
    };
    auto source_node = [](std::size_t j) { return -static_cast<std::int64_t>(j) - 2; };

    OpenList open;
    for (const auto& [idx, d] : starts) {
        const auto u = static_cast<std::size_t>(idx);
        GridCost c;
        c.attach_a = d;
        const double v = grid_cost_value(c, step);
        if (!s.seen(idx) || v < s.value[u]) {
            s.stamp[u] = s.gen;
            s.cost[u] = c;
            s.value[u] = v;
            open.emplace(v + heuristic(grid.position(idx)), v, idx);
        }
    }

    // Settled sources raise the heuristic over time, so queued priorities are
    // stale lower bounds; improved nodes are re-expanded.
    while (!open.empty() && remaining > 0) {
        const auto [f, v, node] = open.top();
        open.pop();
        if (node < 0) {
            const auto j = static_cast<std::size_t>(-(node + 2));
            if (settled[j] || v != best_value[j]) continue;
            settled[j] = true;
            result[j] = v;
            --remaining;
            continue;
        }
        const auto u = static_cast<std::size_t>(node);
        if (v != s.value[u]) continue;

        if (s.goal_stamp[u] == s.gen) {
            for (const auto& [j, d] : source_att[static_cast<std::size_t>(s.goal_att[u])]) {
                if (settled[j]) continue;
                GridCost c = s.cost[u];
                c.attach_b = d;
                const double tv = grid_cost_value(c, step);
                if (tv < best_value[j]) {
                    best_value[j] = tv;
                    best_cost[j] = c;
                    open.emplace(tv, tv, source_node(j));
                }
            }
        }

        const auto [i, j, k] = grid.coords(node);
        for (const Move& m : moves()) {
            const int ni = i + m.di, nj = j + m.dj, nk = k + m.dk;
            if (!grid.in_bounds(ni, nj, nk)) continue;
            const std::int64_t nb = grid.index(ni, nj, nk);
            if (grid.blocked(nb)) continue;
            const auto w = static_cast<std::size_t>(nb);
            const GridCost c = extended(s.cost[u], m.kind);
            const double nv = grid_cost_value(c, step);
            if (!s.seen(nb) || nv < s.value[w]) {
                s.stamp[w] = s.gen;
                s.cost[w] = c;
                s.value[w] = nv;
                open.emplace(nv + heuristic(grid.position(ni, nj, nk)), nv, nb);
            }
        }
    }
    return result;
}

bool line_of_sight(const Vec3& a, const Vec3& b, const MolecularGraph& graph, const SpatialIndex& index,
                   double clearance, std::span<const AtomId> excluded) {
    const Vec3 mid = 0.5 * (a + b);
    const double radius = 0.5 * (b - a).norm() + clearance;
    for (int id : index.range_query(mid, radius)) {
        if (std::find(excluded.begin(), excluded.end(), id) != excluded.end()) continue;
        if (point_segment_distance(graph.atom(id).pos, a, b) < clearance) return false;
    }
    return true;
}

}  // namespace cagegen
