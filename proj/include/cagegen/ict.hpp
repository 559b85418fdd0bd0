#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cagegen/geometry.hpp"
#include "cagegen/molecule.hpp"

namespace cagegen {

using VertexId = int;

/// An edge of an interconnection tree, oriented as produced by the enumeration.
struct IctEdge {
    VertexId u;
    VertexId v;

    friend bool operator==(const IctEdge&, const IctEdge&) = default;
    /// The same edge with u < v.
    IctEdge canonical() const { return u < v ? *this : IctEdge{v, u}; }
};

/// Complete multipartite graph: vertices 0..n-1 split into non-empty disjoint
/// parts, with an implicit edge between every pair of vertices in different parts.
class MultipartiteGraph {
public:
    /// `parts` must cover 0..n-1 exactly once. Positions and atom ids are optional payloads.
    explicit MultipartiteGraph(std::vector<std::vector<VertexId>> parts, std::vector<Vec3> positions = {},
                               std::vector<AtomId> atoms = {});

    /// Parts of the given sizes over consecutive vertex ids, all at the origin.
    static MultipartiteGraph from_sizes(std::span<const int> sizes);

    int part_count() const { return static_cast<int>(parts_.size()); }
    int vertex_count() const { return static_cast<int>(part_of_.size()); }
    const std::vector<std::vector<VertexId>>& parts() const { return parts_; }
    int part_of(VertexId v) const { return part_of_.at(static_cast<std::size_t>(v)); }
    const Vec3& position(VertexId v) const { return positions_.at(static_cast<std::size_t>(v)); }
    AtomId atom(VertexId v) const { return atoms_.at(static_cast<std::size_t>(v)); }
    bool contains(VertexId v) const { return v >= 0 && v < vertex_count(); }

    /// Euclidean distance between the two vertex positions.
    double weight(VertexId u, VertexId v) const { return (position(u) - position(v)).norm(); }

private:
    std::vector<std::vector<VertexId>> parts_;
    std::vector<int> part_of_;
    std::vector<Vec3> positions_;
    std::vector<AtomId> atoms_;
};

struct InterconnectionTree {
    std::vector<IctEdge> edges;
    double weight = 0.0;
};

double tree_weight(const MultipartiteGraph& g, std::span<const IctEdge> edges);

/// |V| >= 2(k-1).
bool has_ict(const MultipartiteGraph& g);

/// Linear check that `edges` is a matching whose quotient over the parts is a
/// spanning tree. Throws InputError on unknown vertex ids.
bool verify_ict(const MultipartiteGraph& g, std::span<const IctEdge> edges);

/// Called once per tree; return false to stop the enumeration.
using IctVisitor = std::function<bool(std::span<const IctEdge>)>;

/// Visits every interconnection tree exactly once and returns the number visited.
std::uint64_t enumerate_icts(const MultipartiteGraph& g, const IctVisitor& visit);

/// Number of interconnection trees, by full enumeration.
std::uint64_t count_icts(const MultipartiteGraph& g);

/// Exhaustive generate-and-filter oracle for small graphs (|V| <= 14).
/// Throws InputError("instance too large for oracle") beyond the guard.
std::vector<InterconnectionTree> brute_force_icts(const MultipartiteGraph& g);

/// All trees stored flat, in ascending (weight, sorted edge list) order.
class OrderedTrees {
public:
    std::size_t size() const { return order_.size(); }
    std::span<const IctEdge> tree(std::size_t rank) const;
    double weight(std::size_t rank) const { return weights_[order_[rank]]; }

private:
    friend OrderedTrees collect_ordered_icts(const MultipartiteGraph&, std::uint64_t);
    int edges_per_tree_ = 0;
    std::vector<IctEdge> edges_;
    std::vector<double> weights_;
    std::vector<std::uint32_t> order_;
};

inline constexpr std::uint64_t kDefaultIctCap = 100'000'000;

/// Enumerates, stores and sorts every tree. Throws InputError when more than
/// `cap` trees exist (on-the-fly enumeration is required then).
OrderedTrees collect_ordered_icts(const MultipartiteGraph& g, std::uint64_t cap = kDefaultIctCap);

/// The `limit` lightest trees.
std::vector<InterconnectionTree> ordered_icts(const MultipartiteGraph& g, std::size_t limit,
                                              std::uint64_t cap = kDefaultIctCap);

/// Timings for the enumeration benchmark.
struct IctBenchmark {
    int k = 0;
    int l = 0;
    std::uint64_t trees = 0;
    double enumerate_ms = 0.0;
    double delay_ns = 0.0;
    /// Percent extra time to store all trees; negative when not measured.
    double storage_overhead_pct = -1.0;
    /// Percent extra time to store and sort all trees; negative when not measured.
    double sort_overhead_pct = -1.0;
};

/// Runs the (k, l) complete multipartite instance. Storage and sorting are
/// measured only when `with_sort` is set and the count is within `cap`.
IctBenchmark benchmark_icts(int k, int l, bool with_sort, std::uint64_t cap = kDefaultIctCap);

}  // namespace cagegen
