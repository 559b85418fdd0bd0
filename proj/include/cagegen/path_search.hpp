#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cagegen/angular.hpp"
#include "cagegen/chem.hpp"
#include "cagegen/molecule.hpp"

namespace cagegen {

enum class DistanceMode : unsigned char { euclidean, discretized_astar, discretized_ssmta, hybrid };
enum class CutMode : unsigned char { none, min_length, projected_length };

std::string_view distance_mode_name(DistanceMode m);
std::optional<DistanceMode> parse_distance_mode(std::string_view s);
std::string_view cut_mode_name(CutMode m);
std::optional<CutMode> parse_cut_mode(std::string_view s);

struct SearchConfig {
    int branching_factor = 3;
    int n_samples = 12;
    double min_spacing_deg = 15.0;
    DistanceMode distance = DistanceMode::hybrid;
    int max_path_len = 15;
    CutMode cut = CutMode::projected_length;
    double angle_tol_deg = 10.0;
    double length_tol = 0.05;
    std::uint64_t max_solutions = 1'000'000;
    double grid_step = 0.05;
    /// Also branch on the best directly attachable angle whenever t is one bond away.
    bool closure_probe = true;
    /// Stop after this many expanded nodes; 0 means unlimited.
    std::uint64_t max_nodes = 0;

    /// Throws InputError on out-of-range values.
    void check() const;
};

/// A complete path: carbons from s to t, each with its two hydrogens.
struct PathSolution {
    AtomId s = -1;
    AtomId t = -1;
    std::vector<Vec3> carbons;
    std::vector<std::array<Vec3, 2>> hydrogens;
    double nrmsd = 0.0;

    int length() const { return static_cast<int>(carbons.size()); }
    int atom_count() const { return 3 * length(); }
};

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t solutions = 0;
    std::uint64_t pruned = 0;
    std::uint64_t grid_queries = 0;
    bool truncated = false;
    double seconds = 0.0;
};

/// Terminal deviation score: angle a-b-c against 109.5, angle b-c-d against
/// `angle_at_c`, and |b - c| against cov_heavy, each scaled by its tolerance.
/// Throws GeometryError when consecutive points coincide.
double nrmsd_terminal(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const SearchConfig& cfg,
                      const ChemParams& params, double angle_at_c = 109.5);

/// Euclidean candidate angles: the valid angle nearest the analytic optimum,
/// then symmetric steps of max(measure / n, min_spacing), snapped forward to
/// the next valid angle in the stepping direction. At most n angles.
std::vector<double> candidates_euclidean(const AngularIntervalSet& valid, const PlacementCircle& circle,
                                         const Vec3& target, int n_samples, double min_spacing_deg);

/// n angles spread over the valid arcs by repeatedly splitting the longest segment.
std::vector<double> candidates_uniform(const AngularIntervalSet& valid, int n);

inline constexpr int kNoBound = 1 << 29;

/// True when a partial path of `current` carbons whose tip lies `tip_distance`
/// from the target cannot complete within `best_len` carbons. Only the
/// projected and min-length modes prune.
bool projected_length_cut(int current, double tip_distance, int best_len, CutMode mode, const ChemParams& params,
                          double length_tol);

/// Outcome of trying to bond the tip carbon to t.
struct Attachment {
    std::array<Vec3, 2> hydrogens;
    double nrmsd;
};

/// nrmsd_terminal against t's lowest-id prior neighbour; without one, only
/// the angle at the tip and the bond length count.
double attachment_nrmsd(const Vec3& prev, const Vec3& tip, const Vec3& t, const Vec3* t_neighbor,
                        const SearchConfig& cfg, const ChemParams& params, double angle_at_t);

/// Target angle at t for the attachment bond (tetrahedral unless t declares otherwise).
double attachment_angle(const Atom& t, const ChemParams& params);

class ObstacleField;

/// Accepts when the tip-t bond and every angle it creates at the tip and at t
/// are within tolerance and the tip's two hydrogens are clear of `field`.
std::optional<Attachment> try_attach(const MolecularGraph& world, const ObstacleField& field, const Vec3& prev,
                                     const Vec3& tip, AtomId t, const SearchConfig& cfg, const ChemParams& params);

/// Depth-first branch-and-bound search for paths from s to t. `world` holds
/// the substrate (Role::substrate) and the cage built so far. Solutions come
/// back sorted by (length, NRMSD).
std::vector<PathSolution> construct_paths(const MolecularGraph& world, AtomId s, AtomId t, const SearchConfig& cfg,
                                          const ChemParams& params, SearchStats* stats = nullptr,
                                          std::optional<std::chrono::steady_clock::time_point> deadline = {});

/// Adds the path atoms to `graph` (Role::path, `group`) and bonds them to s and t;
/// the t bond is marked relaxed. Returns the id of the first added atom.
AtomId splice_path(MolecularGraph& graph, const PathSolution& path, int group);

}  // namespace cagegen
