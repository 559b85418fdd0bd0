#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cagegen/binding_patterns.hpp"
#include "cagegen/ict.hpp"
#include "cagegen/path_search.hpp"

namespace cagegen {

enum class TreeMode : unsigned char { on_the_fly, ordered };

std::string_view tree_mode_name(TreeMode m);
std::optional<TreeMode> parse_tree_mode(std::string_view s);

struct PipelineConfig {
    TreeMode mode = TreeMode::on_the_fly;
    bool early_edge_removal = true;
    int max_cages = 10;
    /// Wall-clock budget in seconds; 0 disables it.
    double time_budget = 120.0;
    SearchConfig search;
    std::uint64_t ict_cap = kDefaultIctCap;
    /// Tree-level worker threads (on-the-fly mode only); 1 is deterministic.
    int workers = 1;

    void check() const;
};

struct PathStat {
    int length = 0;
    double nrmsd = 0.0;
};

struct CageSolution {
    MolecularGraph graph;
    /// Tree edges as atom ids of `graph` (s, t), in processing order.
    std::vector<std::pair<AtomId, AtomId>> edges;
    double tree_weight = 0.0;
    std::vector<PathStat> paths;
    /// Pattern plus path atoms.
    int atom_count = 0;
    double average_nrmsd = 0.0;
};

struct RunStats {
    std::uint64_t trees_enumerated = 0;
    std::uint64_t trees_processed = 0;
    std::uint64_t trees_skipped = 0;
    std::uint64_t path_searches = 0;
    std::uint64_t search_nodes = 0;
    int cages = 0;
    /// Smallest cage atom count, -1 without cages.
    int mnoa = -1;
    /// Mean of the per-cage average NRMSD, NaN without cages.
    double average_nrmsd = 0.0;
    double seconds = 0.0;
    bool timed_out = false;
    /// Failures per edge, keyed by (s, t) atom ids with s < t.
    std::map<std::pair<AtomId, AtomId>, int> edge_failures;
};

/// One part per binding pattern (atom group, ascending), holding its endpoint
/// atoms with their coordinates. Throws InputError if there are no patterns or
/// one has no endpoint.
MultipartiteGraph endpoint_graph(const MolecularGraph& instance);

struct AssemblyResult {
    std::vector<CageSolution> cages;
    RunStats stats;
};

/// Builds cages over `instance` (substrate plus Role::pattern atoms). Throws
/// InfeasibleError when the endpoint graph has no interconnection tree.
AssemblyResult assemble(const MolecularGraph& instance, const PipelineConfig& cfg, const ChemParams& params);

/// Convenience form placing a chosen pattern set first.
AssemblyResult assemble(const MolecularGraph& substrate, std::span<const BindingPattern> candidates,
                        std::span<const int> chosen, const PipelineConfig& cfg, const ChemParams& params);

/// Per-path length and terminal NRMSD recomputed from a cage graph (paths
/// ordered by group), as stored in emitted cage files.
std::vector<PathStat> path_stats(const MolecularGraph& cage, const SearchConfig& cfg, const ChemParams& params);

/// Pattern plus path atoms.
int cage_atom_count(const MolecularGraph& cage);

/// Stat records written alongside an emitted cage.
std::vector<std::pair<std::string, std::string>> cage_stat_records(const CageSolution& cage);

/// Table header and one row in the tab-separated run summary.
std::string run_stats_header();
std::string run_stats_row(const PipelineConfig& cfg, const RunStats& stats);

}  // namespace cagegen
