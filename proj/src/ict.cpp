#include "cagegen/ict.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "cagegen/error.hpp"

namespace cagegen {

MultipartiteGraph::MultipartiteGraph(std::vector<std::vector<VertexId>> parts, std::vector<Vec3> positions,
                                     std::vector<AtomId> atoms)
    : parts_(std::move(parts)), positions_(std::move(positions)), atoms_(std::move(atoms)) {
    if (parts_.empty()) throw InputError("multipartite graph needs at least one part");
    std::size_t n = 0;
    for (const auto& p : parts_) {
        if (p.empty()) throw InputError("multipartite graph parts must be non-empty");
        n += p.size();
    }
    part_of_.assign(n, -1);
    for (std::size_t i = 0; i < parts_.size(); ++i)
        for (VertexId v : parts_[i]) {
            if (v < 0 || static_cast<std::size_t>(v) >= n || part_of_[static_cast<std::size_t>(v)] != -1)
                throw InputError("multipartite parts must cover vertices 0..n-1 exactly once");
            part_of_[static_cast<std::size_t>(v)] = static_cast<int>(i);
        }
    if (positions_.empty()) positions_.assign(n, Vec3::Zero());
    if (atoms_.empty()) atoms_.assign(n, -1);
    if (positions_.size() != n || atoms_.size() != n) throw InputError("vertex payload size mismatch");
}

MultipartiteGraph MultipartiteGraph::from_sizes(std::span<const int> sizes) {
    std::vector<std::vector<VertexId>> parts;
    VertexId next = 0;
    for (int s : sizes) {
        std::vector<VertexId> p(static_cast<std::size_t>(std::max(s, 0)));
        std::iota(p.begin(), p.end(), next);
        next += static_cast<VertexId>(p.size());
        parts.push_back(std::move(p));
    }
    return MultipartiteGraph(std::move(parts));
}

double tree_weight(const MultipartiteGraph& g, std::span<const IctEdge> edges) {
    double w = 0.0;
    for (const IctEdge& e : edges) w += g.weight(e.u, e.v);
    return w;
}

bool has_ict(const MultipartiteGraph& g) { return g.vertex_count() >= 2 * (g.part_count() - 1); }

bool verify_ict(const MultipartiteGraph& g, std::span<const IctEdge> edges) {
    const int k = g.part_count();
    for (const IctEdge& e : edges)
        if (!g.contains(e.u) || !g.contains(e.v))
            throw InputError("unknown vertex id in edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    if (static_cast<int>(edges.size()) != k - 1) return false;

    std::vector<char> used(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<int> parent(static_cast<std::size_t>(k));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (const IctEdge& e : edges) {
        auto& uu = used[static_cast<std::size_t>(e.u)];
        auto& vv = used[static_cast<std::size_t>(e.v)];
        if (e.u == e.v || uu || vv) return false;
        uu = vv = 1;
        const int a = find(g.part_of(e.u));
        const int b = find(g.part_of(e.v));
        if (a == b) return false;  // same part, or closes a cycle in the quotient
        parent[static_cast<std::size_t>(a)] = b;
    }
    // k-1 acyclic quotient edges on k parts form a spanning tree.
    return true;
}

namespace {

/// Recursive enumeration over the decomposition
///   ICT(G) = disjoint union over (u, v), u in V1, of ICT((G / (u,v))_{>=u}) + (u, v).
///
/// Every part is a doubly linked list of its live vertices; the first part of
/// the current subproblem is a stack of original parts (`group_`), and the
/// remaining parts form a doubly linked list (`others`). All updates are undone
/// on return, so each recursive step costs O(1) besides the loops it drives.
template <class Visitor>
class Enumerator {
public:
    Enumerator(const MultipartiteGraph& g, Visitor& visit) : visit_(visit) {
        const int n = g.vertex_count();
        const int k = g.part_count();
        // Largest part first.
        std::vector<int> order(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return g.parts()[static_cast<std::size_t>(a)].size() >
                                                    g.parts()[static_cast<std::size_t>(b)].size(); });

        // Vertex nodes 0..n-1, part sentinels n..n+k-1.
        next_.assign(static_cast<std::size_t>(n + k), -1);
        prev_.assign(static_cast<std::size_t>(n + k), -1);
        for (int r = 0; r < k; ++r) {
            const int head = n + r;
            int last = head;
            for (VertexId v : g.parts()[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]) {
                link_after(last, v);
                last = v;
            }
        }
        n_ = n;
        // Part list: sentinel k, parts 0..k-1 (by rank).
        pnext_.assign(static_cast<std::size_t>(k + 1), -1);
        pprev_.assign(static_cast<std::size_t>(k + 1), -1);
        pnext_[static_cast<std::size_t>(k)] = pprev_[static_cast<std::size_t>(k)] = k;
        int last = k;
        for (int r = 1; r < k; ++r) {
            pnext_[static_cast<std::size_t>(r)] = pnext_[static_cast<std::size_t>(last)];
            pprev_[static_cast<std::size_t>(r)] = last;
            pprev_[static_cast<std::size_t>(pnext_[static_cast<std::size_t>(last)])] = r;
            pnext_[static_cast<std::size_t>(last)] = r;
            last = r;
        }
        psentinel_ = k;
        group_.push_back(0);
        // one scratch list per recursion depth; sized up front so references stay valid
        removed_.resize(static_cast<std::size_t>(k) + 1);
        tree_.reserve(static_cast<std::size_t>(k));
        margin_ = n - 2 * (k - 1);
    }

    std::uint64_t run() {
        if (margin_ >= 0) recurse(margin_);
        return count_;
    }

private:
    void link_after(int at, int x) {
        next_[static_cast<std::size_t>(x)] = next_[static_cast<std::size_t>(at)];
        prev_[static_cast<std::size_t>(x)] = at;
        if (next_[static_cast<std::size_t>(at)] >= 0) prev_[static_cast<std::size_t>(next_[static_cast<std::size_t>(at)])] = x;
        next_[static_cast<std::size_t>(at)] = x;
    }
    void unlink(int x) {
        const int p = prev_[static_cast<std::size_t>(x)];
        const int nx = next_[static_cast<std::size_t>(x)];
        next_[static_cast<std::size_t>(p)] = nx;
        if (nx >= 0) prev_[static_cast<std::size_t>(nx)] = p;
    }
    void relink(int x) {
        const int p = prev_[static_cast<std::size_t>(x)];
        const int nx = next_[static_cast<std::size_t>(x)];
        next_[static_cast<std::size_t>(p)] = x;
        if (nx >= 0) prev_[static_cast<std::size_t>(nx)] = x;
    }
    void unlink_part(int q) {
        pnext_[static_cast<std::size_t>(pprev_[static_cast<std::size_t>(q)])] = pnext_[static_cast<std::size_t>(q)];
        pprev_[static_cast<std::size_t>(pnext_[static_cast<std::size_t>(q)])] = pprev_[static_cast<std::size_t>(q)];
    }
    void relink_part(int q) {
        pnext_[static_cast<std::size_t>(pprev_[static_cast<std::size_t>(q)])] = q;
        pprev_[static_cast<std::size_t>(pnext_[static_cast<std::size_t>(q)])] = q;
    }
    int head(int part) const { return next_[static_cast<std::size_t>(n_ + part)]; }

    // Returns false once the visitor asked to stop; state is then left as is.
    bool recurse(int margin) {
        if (pnext_[static_cast<std::size_t>(psentinel_)] == psentinel_) {
            ++count_;
            return visit_(std::span<const IctEdge>(tree_));
        }
        std::vector<int>& removed = scratch_for_depth();
        const std::size_t removed_base = removed.size();
        bool keep_going = true;
        const std::size_t group_size = group_.size();
        for (std::size_t gi = 0; gi < group_size && keep_going; ++gi) {
            const int part = group_[gi];
            for (int u = head(part); u >= 0 && keep_going;) {
                const int after_u = next_[static_cast<std::size_t>(u)];
                unlink(u);
                for (int q = pnext_[static_cast<std::size_t>(psentinel_)]; q != psentinel_ && keep_going;
                     q = pnext_[static_cast<std::size_t>(q)]) {
                    unlink_part(q);
                    group_.push_back(q);
                    for (int v = head(q); v >= 0 && keep_going; v = next_[static_cast<std::size_t>(v)]) {
                        unlink(v);
                        tree_.push_back({u, v});
                        keep_going = recurse(margin);
                        tree_.pop_back();
                        relink(v);
                    }
                    group_.pop_back();
                    relink_part(q);
                }
                // u stays removed for the rest of this level: (G / (u', v))_{>=u'} for u' > u.
                removed.push_back(u);
                u = after_u;
                if (--margin < 0) break;
            }
            if (margin < 0) break;
        }
        while (removed.size() > removed_base) {
            relink(removed.back());
            removed.pop_back();
        }
        --depth_;
        return keep_going;
    }

    std::vector<int>& scratch_for_depth() {
        return removed_[static_cast<std::size_t>(depth_++)];
    }

    Visitor& visit_;
    int n_ = 0;
    std::vector<int> next_, prev_;
    std::vector<int> pnext_, pprev_;
    int psentinel_ = 0;
    std::vector<int> group_;
    std::vector<IctEdge> tree_;
    std::vector<std::vector<int>> removed_;
    int depth_ = 0;
    int margin_ = 0;
    std::uint64_t count_ = 0;
};

template <class Visitor>
std::uint64_t run_enumeration(const MultipartiteGraph& g, Visitor& visit) {
    Enumerator<Visitor> e(g, visit);
    return e.run();
}

}  // namespace

std::uint64_t enumerate_icts(const MultipartiteGraph& g, const IctVisitor& visit) {
    return run_enumeration(g, visit);
}

std::uint64_t count_icts(const MultipartiteGraph& g) {
    auto noop = [](std::span<const IctEdge>) { return true; };
    return run_enumeration(g, noop);
}

std::vector<InterconnectionTree> brute_force_icts(const MultipartiteGraph& g) {
    if (g.vertex_count() > 14) throw InputError("instance too large for oracle");
    const int k = g.part_count();
    const int n = g.vertex_count();
    std::vector<InterconnectionTree> out;
    if (k == 1) {
        out.push_back({});
        return out;
    }
    std::vector<IctEdge> all;
    for (VertexId a = 0; a < n; ++a)
        for (VertexId b = a + 1; b < n; ++b)
            if (g.part_of(a) != g.part_of(b)) all.push_back({a, b});

    // Every (k-1)-edge matching, edges in increasing index order; keep those passing verify_ict.
    std::vector<IctEdge> chosen;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    const std::size_t want = static_cast<std::size_t>(k - 1);
    std::function<void(std::size_t)> extend = [&](std::size_t from) {
        if (chosen.size() == want) {
            if (verify_ict(g, chosen)) out.push_back({chosen, tree_weight(g, chosen)});
            return;
        }
        for (std::size_t i = from; i < all.size(); ++i) {
            const IctEdge e = all[i];
            if (used[static_cast<std::size_t>(e.u)] || used[static_cast<std::size_t>(e.v)]) continue;
            used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 1;
            chosen.push_back(e);
            extend(i + 1);
            chosen.pop_back();
            used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 0;
        }
    };
    extend(0);
    return out;
}

std::span<const IctEdge> OrderedTrees::tree(std::size_t rank) const {
    const std::size_t base = static_cast<std::size_t>(order_[rank]) * static_cast<std::size_t>(edges_per_tree_);
    return {edges_.data() + base, static_cast<std::size_t>(edges_per_tree_)};
}

OrderedTrees collect_ordered_icts(const MultipartiteGraph& g, std::uint64_t cap) {
    OrderedTrees out;
    out.edges_per_tree_ = std::max(0, g.part_count() - 1);
    const std::uint64_t limit = std::min<std::uint64_t>(cap, 0xffffffffULL);
    std::uint64_t seen = 0;
    const IctVisitor store = [&](std::span<const IctEdge> edges) {
        if (++seen > limit) return false;
        out.edges_.insert(out.edges_.end(), edges.begin(), edges.end());
        out.weights_.push_back(tree_weight(g, edges));
        return true;
    };
    enumerate_icts(g, store);
    if (seen > limit)
        throw InputError("more than " + std::to_string(limit) +
                         " interconnection trees; use on-the-fly mode instead of ordered");

    out.order_.resize(out.weights_.size());
    std::iota(out.order_.begin(), out.order_.end(), 0u);
    const auto per = static_cast<std::size_t>(out.edges_per_tree_);
    auto sorted_edges = [&](std::uint32_t t) {
        std::vector<IctEdge> e(out.edges_.begin() + static_cast<std::ptrdiff_t>(t * per),
                               out.edges_.begin() + static_cast<std::ptrdiff_t>((t + 1) * per));
        for (auto& x : e) x = x.canonical();
        std::sort(e.begin(), e.end(), [](const IctEdge& a, const IctEdge& b) {
            return a.u != b.u ? a.u < b.u : a.v < b.v;
        });
        return e;
    };
    std::stable_sort(out.order_.begin(), out.order_.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (out.weights_[a] != out.weights_[b]) return out.weights_[a] < out.weights_[b];
        const auto ea = sorted_edges(a);
        const auto eb = sorted_edges(b);
        return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end(),
                                            [](const IctEdge& x, const IctEdge& y) {
                                                return x.u != y.u ? x.u < y.u : x.v < y.v;
                                            });
    });
    return out;
}

std::vector<InterconnectionTree> ordered_icts(const MultipartiteGraph& g, std::size_t limit, std::uint64_t cap) {
    const OrderedTrees all = collect_ordered_icts(g, cap);
    std::vector<InterconnectionTree> out;
    for (std::size_t r = 0; r < std::min(limit, all.size()); ++r) {
        const auto e = all.tree(r);
        out.push_back({{e.begin(), e.end()}, all.weight(r)});
    }
    return out;
}

IctBenchmark benchmark_icts(int k, int l, bool with_sort, std::uint64_t cap) {
    using Clock = std::chrono::steady_clock;
    IctBenchmark b;
    b.k = k;
    b.l = l;
    std::vector<std::vector<VertexId>> parts;
    std::vector<Vec3> pos;
    // Deterministic spread-out positions so the stored weights are non-trivial.
    for (int p = 0; p < k; ++p) {
        std::vector<VertexId> part;
        for (int i = 0; i < l; ++i) {
            part.push_back(static_cast<VertexId>(pos.size()));
            pos.emplace_back(p * 1.0 + 0.1 * i, 0.37 * ((p * 7 + i * 3) % 11), 0.21 * ((p * 5 + i) % 7));
        }
        parts.push_back(std::move(part));
    }
    const MultipartiteGraph g(std::move(parts), std::move(pos));

    const auto t0 = Clock::now();
    b.trees = count_icts(g);
    const double enum_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    b.enumerate_ms = enum_ms;
    b.delay_ns = b.trees ? enum_ms * 1e6 / static_cast<double>(b.trees) : 0.0;

    if (with_sort && b.trees <= cap && enum_ms > 0) {
        const auto t1 = Clock::now();
        {
            std::vector<IctEdge> store;
            std::vector<double> weights;
            const IctVisitor keep = [&](std::span<const IctEdge> e) {
                store.insert(store.end(), e.begin(), e.end());
                weights.push_back(tree_weight(g, e));
                return true;
            };
            enumerate_icts(g, keep);
        }
        const double store_ms = std::chrono::duration<double, std::milli>(Clock::now() - t1).count();
        const auto t2 = Clock::now();
        { const OrderedTrees sorted = collect_ordered_icts(g, cap); }
        const double sort_ms = std::chrono::duration<double, std::milli>(Clock::now() - t2).count();
        b.storage_overhead_pct = 100.0 * (store_ms - enum_ms) / enum_ms;
        b.sort_overhead_pct = 100.0 * (sort_ms - enum_ms) / enum_ms;
    }
    return b;
}

}  // namespace cagegen
