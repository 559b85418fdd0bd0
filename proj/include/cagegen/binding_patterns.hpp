#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cagegen/chem.hpp"
#include "cagegen/molecule.hpp"

namespace cagegen {

/// What a substrate site offers: an H on O/N (donor), an O/N with a free
/// valence (acceptor), or a planar carbon ring.
enum class SiteKind : unsigned char { donor, acceptor, ring };

enum class PatternKind : unsigned char { hydrogen_donor, hydrogen_acceptor, aromatic_ring };

std::string_view site_kind_name(SiteKind k);
std::string_view pattern_kind_name(PatternKind k);

struct Site {
    SiteKind kind;
    /// donor: {H, heavy atom}; acceptor: {atom}; ring: cycle in order.
    std::vector<AtomId> atoms;
};

struct PlacementConfig {
    /// Rotations sampled around the interaction axis for acceptor patterns.
    int rotations = 12;
    double stacking_distance = 0.35;
    double planarity_tol = 0.02;
};

struct BindingPattern {
    PatternKind kind;
    MolecularGraph fragment;
    /// Fragment atom ids eligible as path endpoints.
    std::vector<AtomId> endpoints;
    /// Index of the addressed site in detect_sites order.
    int site = -1;
};

std::vector<Site> detect_sites(const MolecularGraph& substrate, const PlacementConfig& cfg = {});

/// Candidate placements for one site; those closer than col to a substrate
/// atom (interaction partners excepted) are dropped.
std::vector<BindingPattern> place_candidates(const Site& site, int site_index, const MolecularGraph& substrate,
                                             const ChemParams& params, const PlacementConfig& cfg = {});

/// Every candidate for every site, ring candidates first.
std::vector<BindingPattern> all_candidates(const MolecularGraph& substrate, const ChemParams& params,
                                           const PlacementConfig& cfg = {});

struct ConflictGraph {
    std::vector<std::vector<int>> adjacency;

    int size() const { return static_cast<int>(adjacency.size()); }
    bool has_edge(int a, int b) const;
    void add_edge(int a, int b);
};

/// Edge iff two candidates address the same site or any of their atoms are closer than d_weak.
ConflictGraph build_conflict_graph(std::span<const BindingPattern> candidates, const ChemParams& params);

/// Called once per maximal independent set (ascending ids); return false to stop.
using SetVisitor = std::function<bool(std::span<const int>)>;

/// Bron-Kerbosch with pivoting on the complement graph, restricted to `among`
/// (all vertices when empty). Returns the number of sets visited.
std::size_t maximal_independent_sets(const ConflictGraph& g, const SetVisitor& visit, std::span<const int> among = {});

/// Up to `limit` maximal independent sets, built ring candidates first: each
/// maximal ring set is completed by maximal sets of compatible hydrogen candidates.
std::vector<std::vector<int>> select_pattern_sets(std::span<const BindingPattern> candidates,
                                                  const ConflictGraph& g, std::size_t limit);

/// Substrate plus the chosen patterns (Role::pattern, group = position in `chosen`).
MolecularGraph assemble_instance(const MolecularGraph& substrate, std::span<const BindingPattern> candidates,
                                 std::span<const int> chosen);

}  // namespace cagegen
