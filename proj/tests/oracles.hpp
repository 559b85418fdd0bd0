#pragma once

#include <algorithm>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "cagegen/ict.hpp"
#include "cagegen/voxel_grid.hpp"

namespace cagegen::oracle {

// Plain Dijkstra over the same lattice graph, no heuristic.
inline double dijkstra(const VoxelGrid& g, const Vec3& from, const Vec3& to) {
    if (from == to) return 0.0;
    const auto goals = g.attachments(to);
    std::vector<GridCost> cost(g.voxel_count());
    std::vector<double> val(g.voxel_count(), kUnreachable);
    using Item = std::pair<double, std::int64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const auto& [idx, d] : g.attachments(from)) {
        GridCost c;
        c.attach_a = d;
        const double v = grid_cost_value(c, g.step());
        if (v < val[static_cast<std::size_t>(idx)]) {
            val[static_cast<std::size_t>(idx)] = v;
            cost[static_cast<std::size_t>(idx)] = c;
            pq.emplace(v, idx);
        }
    }
    while (!pq.empty()) {
        const auto [v, u] = pq.top();
        pq.pop();
        if (v != val[static_cast<std::size_t>(u)]) continue;
        const auto [i, j, k] = g.coords(u);
        for (int dk = -1; dk <= 1; ++dk)
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int nz = (di != 0) + (dj != 0) + (dk != 0);
                    if (!nz || !g.in_bounds(i + di, j + dj, k + dk)) continue;
                    const std::int64_t w = g.index(i + di, j + dj, k + dk);
                    if (g.blocked(w)) continue;
                    GridCost c = cost[static_cast<std::size_t>(u)];
                    (nz == 1 ? c.axial : nz == 2 ? c.planar : c.diagonal)++;
                    const double nv = grid_cost_value(c, g.step());
                    if (nv < val[static_cast<std::size_t>(w)]) {
                        val[static_cast<std::size_t>(w)] = nv;
                        cost[static_cast<std::size_t>(w)] = c;
                        pq.emplace(nv, w);
                    }
                }
    }
    double best = kUnreachable;
    for (const auto& [idx, d] : goals) {
        if (val[static_cast<std::size_t>(idx)] == kUnreachable) continue;
        GridCost c = cost[static_cast<std::size_t>(idx)];
        c.attach_b = d;
        best = std::min(best, grid_cost_value(c, g.step()));
    }
    return best;
}

using EdgeList = std::vector<std::pair<int, int>>;

// Every set of k-1 cross-part edges that is a matching and joins all parts
// without a cycle, found by plain backtracking over the edge list in order.
inline std::vector<EdgeList> all_trees(const std::vector<int>& sizes) {
    std::vector<int> part;
    for (int p = 0; p < static_cast<int>(sizes.size()); ++p) part.insert(part.end(), sizes[p], p);
    const int n = static_cast<int>(part.size());
    const int k = static_cast<int>(sizes.size());
    EdgeList cross;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (part[u] != part[v]) cross.emplace_back(u, v);

    std::vector<EdgeList> out;
    EdgeList chosen;
    std::vector<char> used(n, 0);
    std::vector<int> comp(k);

    auto root = [&](int x) {
        while (comp[x] != x) x = comp[x];
        return x;
    };
    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (static_cast<int>(chosen.size()) == k - 1) {
            out.push_back(chosen);
            return;
        }
        const std::size_t need = static_cast<std::size_t>(k - 1) - chosen.size();
        for (std::size_t e = from; e + need <= cross.size(); ++e) {
            const auto [u, v] = cross[e];
            if (used[u] || used[v]) continue;
            const int a = root(part[u]), b = root(part[v]);
            if (a == b) continue;
            used[u] = used[v] = 1;
            comp[a] = b;
            chosen.push_back(cross[e]);
            self(self, e + 1);
            chosen.pop_back();
            comp[a] = a;
            used[u] = used[v] = 0;
        }
    };
    std::iota(comp.begin(), comp.end(), 0);
    rec(rec, 0);
    return out;
}

}  // namespace cagegen::oracle
