#include "cagegen/path_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

#include "cagegen/error.hpp"
#include "cagegen/voxel_grid.hpp"

namespace cagegen {

namespace {

// Candidates snapped onto an interval boundary sit this far inside it.
constexpr double kSnap = 1e-7;

double circular_distance(double a, double b) {
    const double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, kTwoPi - d);
}

double target_angle(const ChemParams& p, Geometry g) {
    return g == Geometry::none ? p.tetrahedral.angle_deg : p.rule(g).angle_deg;
}

// Geometry of `id` once one more bond is added.
Geometry geometry_after_bond(const MolecularGraph& g, AtomId id) {
    const Geometry declared = g.atom(id).geometry;
    if (declared != Geometry::none) return declared;
    return g.degree(id) + 1 == 4 ? Geometry::tetrahedral : Geometry::none;
}

}  // namespace

std::string_view distance_mode_name(DistanceMode m) {
    switch (m) {
        case DistanceMode::euclidean: return "euclidean";
        case DistanceMode::discretized_astar: return "astar";
        case DistanceMode::discretized_ssmta: return "ssmta";
        case DistanceMode::hybrid: return "hybrid";
    }
    return "?";
}

std::optional<DistanceMode> parse_distance_mode(std::string_view s) {
    for (auto m : {DistanceMode::euclidean, DistanceMode::discretized_astar, DistanceMode::discretized_ssmta,
                   DistanceMode::hybrid})
        if (distance_mode_name(m) == s) return m;
    if (s == "discretized") return DistanceMode::discretized_astar;
    return std::nullopt;
}

std::string_view cut_mode_name(CutMode m) {
    switch (m) {
        case CutMode::none: return "none";
        case CutMode::min_length: return "min";
        case CutMode::projected_length: return "projected";
    }
    return "?";
}

std::optional<CutMode> parse_cut_mode(std::string_view s) {
    for (auto m : {CutMode::none, CutMode::min_length, CutMode::projected_length})
        if (cut_mode_name(m) == s) return m;
    return std::nullopt;
}

void SearchConfig::check() const {
    if (branching_factor < 1) throw InputError("branching factor must be >= 1");
    if (n_samples < 1) throw InputError("sample count must be >= 1");
    if (!(min_spacing_deg >= 0.0)) throw InputError("minimum spacing must be >= 0");
    if (max_path_len < 1) throw InputError("maximum path length must be >= 1");
    if (!(angle_tol_deg > 0.0) || !(length_tol > 0.0)) throw InputError("tolerances must be positive");
    if (!(grid_step > 0.0)) throw InputError("grid step must be positive");
    if (max_solutions < 1) throw InputError("max solutions must be >= 1");
}

double nrmsd_terminal(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const SearchConfig& cfg,
                      const ChemParams& params, double angle_at_c) {
    const double t1 = (bond_angle(a, b, c) - params.tetrahedral.angle_deg) / cfg.angle_tol_deg;
    const double t2 = (bond_angle(b, c, d) - angle_at_c) / cfg.angle_tol_deg;
    const double t3 = ((b - c).norm() - params.cov_heavy) / cfg.length_tol;
    return std::sqrt(t1 * t1 + t2 * t2 + t3 * t3);
}

// ---------------------------------------------------------------- candidates

std::vector<double> candidates_euclidean(const AngularIntervalSet& valid, const PlacementCircle& circle,
                                         const Vec3& target, int n_samples, double min_spacing_deg) {
    std::vector<double> out;
    if (valid.empty() || n_samples < 1) return out;
    const std::vector<AngularIntervalSet::Interval> arcs = valid.arcs();
    const Vec3 w = target - circle.center;
    const double best = wrap_angle(std::atan2(w.dot(circle.vec2), w.dot(circle.vec1)));

    // nearest valid angle to `best`
    double first = best;
    if (!valid.contains(best)) {
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& a : arcs) {
            const double in = std::min(kSnap, a.length() / 2);
            const double fwd = wrap_angle(a.lo - best);
            const double back = wrap_angle(best - a.hi);
            if (fwd < gap) gap = fwd, first = wrap_angle(a.lo + in);
            if (back < gap) gap = back, first = wrap_angle(a.hi - in);
        }
    }
    out.push_back(first);

    const double step = std::max(valid.measure() / n_samples, deg_to_rad(min_spacing_deg));
    if (!(step > 0.0)) return out;

    // next valid angle at or after offset `off` from `first` in direction `dir`
    auto advance = [&](double off, int dir) -> std::optional<double> {
        const double theta = first + dir * off;
        if (valid.contains(theta)) return off;
        double gap = std::numeric_limits<double>::infinity();
        double in = kSnap;
        for (const auto& a : arcs) {
            const double g = dir > 0 ? wrap_angle(a.lo - theta) : wrap_angle(theta - a.hi);
            if (g < gap) gap = g, in = std::min(kSnap, a.length() / 2);
        }
        if (!std::isfinite(gap)) return std::nullopt;
        return off + gap + in;
    };

    double cursor[2] = {0.0, 0.0};
    bool live[2] = {true, true};
    auto seen = [&](double theta) {
        return std::any_of(out.begin(), out.end(), [&](double x) { return circular_distance(x, theta) < 1e-9; });
    };
    while (static_cast<int>(out.size()) < n_samples && (live[0] || live[1])) {
        for (int side = 0; side < 2 && static_cast<int>(out.size()) < n_samples; ++side) {
            if (!live[side]) continue;
            const int dir = side == 0 ? 1 : -1;
            const auto off = advance(cursor[side] + step, dir);
            if (!off || *off > kPi + 1e-12) {
                live[side] = false;
                continue;
            }
            cursor[side] = *off;
            const double theta = wrap_angle(first + dir * *off);
            if (!seen(theta)) out.push_back(theta);
        }
    }
    return out;
}

std::vector<double> candidates_uniform(const AngularIntervalSet& valid, int n) {
    std::vector<double> out;
    if (valid.empty() || n < 1) return out;
    std::vector<AngularIntervalSet::Interval> arcs = valid.arcs();
    std::stable_sort(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) { return a.length() > b.length(); });

    struct Segment {
        double lo, hi;
        double length() const { return hi - lo; }
    };
    // longest first, then lowest start
    auto worse = [](const Segment& a, const Segment& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        return a.lo > b.lo;
    };
    std::priority_queue<Segment, std::vector<Segment>, decltype(worse)> heap(worse);

    const std::size_t seeds = std::min(arcs.size(), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < seeds; ++i) {
        const double mid = 0.5 * (arcs[i].lo + arcs[i].hi);
        out.push_back(wrap_angle(mid));
        heap.push({arcs[i].lo, mid});
        heap.push({mid, arcs[i].hi});
    }
    while (static_cast<int>(out.size()) < n) {
        const Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.lo + s.hi);
        out.push_back(wrap_angle(mid));
        heap.push({s.lo, mid});
        heap.push({mid, s.hi});
    }
    return out;
}

bool projected_length_cut(int current, double tip_distance, int best_len, CutMode mode, const ChemParams& params,
                          double length_tol) {
    if (mode == CutMode::none || best_len >= kNoBound) return false;
    int remaining = 0;
    if (mode == CutMode::projected_length) {
        const double span = tip_distance - params.cov_heavy - length_tol;
        remaining = span > 0 ? static_cast<int>(std::ceil(span / params.cov_heavy)) : 0;
    }
    // the tip did not attach, so at least one more carbon is needed
    return current + std::max(1, remaining) > best_len;
}

// ---------------------------------------------------------------- attachment

std::optional<Attachment> try_attach(const MolecularGraph& world, const ObstacleField& field, const Vec3& prev,
                                     const Vec3& tip, AtomId t, const SearchConfig& cfg, const ChemParams& params) {
    const Atom& ta = world.atom(t);
    const double ideal = params.cov(Element::C, ta.element);
    if (std::abs((tip - ta.pos).norm() - ideal) > cfg.length_tol) return std::nullopt;

    const double tetra = params.tetrahedral.angle_deg;
    if (std::abs(bond_angle(prev, tip, ta.pos) - tetra) > cfg.angle_tol_deg) return std::nullopt;

    const Geometry gt = geometry_after_bond(world, t);
    const double at_t = target_angle(params, gt);
    if (gt != Geometry::none)
        for (AtomId n : world.neighbors(t))
            if (std::abs(bond_angle(tip, ta.pos, world.atom(n).pos) - at_t) > cfg.angle_tol_deg) return std::nullopt;

    const HydrogenFrame frame = hydrogen_frame(prev, tip, params);
    const double theta = frame.circle.angle_of(ta.pos);
    Attachment out{{frame.hydrogen(theta, 1), frame.hydrogen(theta, -1)}, 0.0};
    for (const Vec3& h : out.hydrogens) {
        if (std::abs(bond_angle(h, tip, ta.pos) - tetra) > cfg.angle_tol_deg) return std::nullopt;
        if (!field.clear(h)) return std::nullopt;
    }

    const auto nb = world.neighbors(t);
    const Vec3* d = nb.empty() ? nullptr : &world.atom(*std::min_element(nb.begin(), nb.end())).pos;
    out.nrmsd = attachment_nrmsd(prev, tip, ta.pos, d, cfg, params, at_t);
    return out;
}

double attachment_nrmsd(const Vec3& prev, const Vec3& tip, const Vec3& t, const Vec3* t_neighbor,
                        const SearchConfig& cfg, const ChemParams& params, double angle_at_t) {
    if (t_neighbor) return nrmsd_terminal(prev, tip, t, *t_neighbor, cfg, params, angle_at_t);
    const double t1 = (bond_angle(prev, tip, t) - params.tetrahedral.angle_deg) / cfg.angle_tol_deg;
    const double t3 = ((tip - t).norm() - params.cov_heavy) / cfg.length_tol;
    return std::sqrt(t1 * t1 + t3 * t3);
}

double attachment_angle(const Atom& t, const ChemParams& params) {
    return target_angle(params, t.geometry);
}

// ---------------------------------------------------------------- search

namespace {

struct Candidate {
    Vec3 pos;
    std::array<Vec3, 2> hydrogens;
    double theta;
    double score;
};

class PathSearch {
public:
    PathSearch(const MolecularGraph& world, AtomId s, AtomId t, const SearchConfig& cfg, const ChemParams& params,
               std::optional<std::chrono::steady_clock::time_point> deadline)
        : world_(world), s_(s), t_(t), cfg_(cfg), params_(params), field_(world, params), deadline_(deadline) {}

    std::vector<PathSolution> run(SearchStats& stats) {
        stats_ = &stats;
        const Atom& sa = world_.atom(s_);
        const Atom& ta = world_.atom(t_);
        if (world_.degree(s_) >= max_degree(sa.element) || world_.degree(t_) >= max_degree(ta.element)) return {};
        if (world_.neighbors(s_).empty()) return {};
        target_ = ta.pos;
        // s, t and the atoms bonded to them never block the line of sight
        anchors_ = {s_, t_};
        for (AtomId e : {s_, t_})
            for (AtomId n : world_.neighbors(e)) anchors_.push_back(n);
        if (cfg_.cut == CutMode::projected_length) best_len_ = cfg_.max_path_len;

        for (const Candidate& c : seed_candidates()) {
            if (stop_) break;
            carbons_.push_back(c.pos);
            visit(sa.pos, c.pos);
            carbons_.pop_back();
        }
        std::stable_sort(solutions_.begin(), solutions_.end(), [](const PathSolution& a, const PathSolution& b) {
            if (a.length() != b.length()) return a.length() < b.length();
            return a.nrmsd < b.nrmsd;
        });
        return std::move(solutions_);
    }

private:
    bool out_of_budget() {
        if (cfg_.max_nodes && stats_->nodes >= cfg_.max_nodes) return true;
        if (deadline_ && (stats_->nodes & 63) == 0 && std::chrono::steady_clock::now() > *deadline_) return true;
        return false;
    }

    // `tip` is the last carbon, already in carbons_; hydrogens_ holds those of earlier carbons.
    void visit(const Vec3& prev, const Vec3& tip) {
        if (out_of_budget()) {
            stop_ = true;
            stats_->truncated = true;
            return;
        }
        ++stats_->nodes;
        const int len = static_cast<int>(carbons_.size());

        if (auto att = try_attach(world_, field_, prev, tip, t_, cfg_, params_)) {
            PathSolution sol;
            sol.s = s_;
            sol.t = t_;
            sol.carbons = carbons_;
            sol.hydrogens = hydrogens_;
            sol.hydrogens.push_back(att->hydrogens);
            sol.nrmsd = att->nrmsd;
            solutions_.push_back(std::move(sol));
            ++stats_->solutions;
            if (cfg_.cut != CutMode::none) best_len_ = std::min(best_len_, len);
            if (solutions_.size() >= cfg_.max_solutions) stop_ = true;
            return;
        }
        if (len + 1 > cfg_.max_path_len) return;
        if (projected_length_cut(len, (tip - target_).norm(), best_len_, cfg_.cut, params_, cfg_.length_tol)) {
            ++stats_->pruned;
            return;
        }

        const std::vector<Candidate> next = chain_candidates(prev, tip);
        field_.push(tip);
        for (const Candidate& c : next) {
            if (stop_) break;
            field_.push(c.hydrogens[0]);
            field_.push(c.hydrogens[1]);
            carbons_.push_back(c.pos);
            hydrogens_.push_back(c.hydrogens);
            visit(tip, c.pos);
            hydrogens_.pop_back();
            carbons_.pop_back();
            field_.pop(2);
        }
        field_.pop();
    }

    // First carbon: on the placement circle around s, or at the free tetrahedral /
    // trigonal positions when s already has two or more neighbours.
    std::vector<Candidate> seed_candidates() {
        const Vec3& sp = world_.atom(s_).pos;
        const auto nb = world_.neighbors(s_);
        Geometry g = world_.atom(s_).geometry;
        if (g == Geometry::none) g = Geometry::tetrahedral;

        if (nb.size() == 1) {
            const Vec3& prev = world_.atom(nb[0]).pos;
            const double angle = g == Geometry::linear ? 180.0
                                 : g == Geometry::triangular ? 120.0
                                                             : kTetrahedralDeg;
            const PlacementCircle circle = placement_circle(prev, sp, params_.cov_heavy, angle);
            if (circle.radius < 1e-12) {
                std::vector<Candidate> one;
                if (field_.clear(circle.center)) one.push_back({circle.center, {}, 0.0, 0.0});
                return one;
            }
            const AngularIntervalSet valid = valid_intervals(circle, nullptr, field_);
            std::vector<Candidate> out = rank(circle, nullptr, valid, sp);
            add_closure(out, circle, nullptr, valid, sp);
            return out;
        }

        std::vector<Vec3> units;
        Vec3 sum = Vec3::Zero();
        for (AtomId n : nb) {
            units.push_back((world_.atom(n).pos - sp).normalized());
            sum += units.back();
        }
        std::vector<Vec3> dirs;
        if (g == Geometry::tetrahedral && nb.size() == 2) {
            const Vec3 bis = -sum.normalized();
            const Vec3 normal = units[0].cross(units[1]).normalized();
            const double half = deg_to_rad(kTetrahedralDeg / 2.0);
            dirs.push_back(std::cos(half) * bis + std::sin(half) * normal);
            dirs.push_back(std::cos(half) * bis - std::sin(half) * normal);
        } else if ((g == Geometry::tetrahedral && nb.size() == 3) || (g == Geometry::triangular && nb.size() == 2)) {
            if (sum.norm() > 1e-9) dirs.push_back(-sum.normalized());
        }
        std::vector<Candidate> out;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const Vec3 p = sp + params_.cov_heavy * dirs[i];
            if (field_.clear(p)) out.push_back({p, {}, static_cast<double>(i), (p - target_).norm()});
        }
        std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
        if (static_cast<int>(out.size()) > cfg_.branching_factor) out.resize(static_cast<std::size_t>(cfg_.branching_factor));
        return out;
    }

    std::vector<Candidate> chain_candidates(const Vec3& prev, const Vec3& tip) {
        const PlacementCircle circle = placement_circle(prev, tip, params_.cov_heavy, kTetrahedralDeg);
        const HydrogenFrame frame = hydrogen_frame(prev, tip, params_);
        const AngularIntervalSet valid = valid_intervals(circle, &frame, field_);
        std::vector<Candidate> out = rank(circle, &frame, valid, tip);
        add_closure(out, circle, &frame, valid, tip);
        return out;
    }

    // When t is within one bond of the circle, the sampled angles rarely land on
    // an attachable spot; scan the valid arcs finely for the angle whose carbon
    // attaches with the lowest deviation and branch on it as well.
    void add_closure(std::vector<Candidate>& out, const PlacementCircle& circle, const HydrogenFrame* frame,
                     const AngularIntervalSet& valid, const Vec3& pivot) {
        if (valid.empty() || !cfg_.closure_probe) return;
        if ((circle.center - target_).norm() - circle.radius > params_.cov_heavy + cfg_.length_tol) return;
        std::optional<Candidate> best;
        double best_score = std::numeric_limits<double>::infinity();
        constexpr int kSteps = 720;
        if (frame) field_.push(pivot);
        for (int i = 0; i < kSteps; ++i) {
            const double th = kTwoPi * i / kSteps;
            if (!valid.contains(th)) continue;
            Candidate c{circle.point(th), {}, th, 0.0};
            if (std::abs((c.pos - target_).norm() - params_.cov_heavy) > cfg_.length_tol) continue;
            if (frame) {
                c.hydrogens = {frame->hydrogen(th, 1), frame->hydrogen(th, -1)};
                field_.push(c.hydrogens[0]);
                field_.push(c.hydrogens[1]);
            }
            const auto att = try_attach(world_, field_, pivot, c.pos, t_, cfg_, params_);
            if (frame) field_.pop(2);
            if (att && att->nrmsd < best_score) {
                best_score = att->nrmsd;
                best = c;
            }
        }
        if (frame) field_.pop();
        if (!best) return;
        for (const Candidate& c : out)
            if (circular_distance(c.theta, best->theta) < 1e-9) return;
        out.insert(out.begin(), *best);
    }

    bool euclidean_here(const Vec3& from) {
        switch (cfg_.distance) {
            case DistanceMode::euclidean: return true;
            case DistanceMode::hybrid:
                return line_of_sight(from, target_, world_, field_.index(), params_.col, anchors_);
            default: return false;
        }
    }

    // Built on first use; s and t do not block, or their own attachment voxels would vanish.
    const VoxelGrid& grid() {
        if (!grid_) {
            std::vector<Vec3> atoms;
            for (AtomId i = 0; i < static_cast<AtomId>(world_.size()); ++i)
                if (i != s_ && i != t_) atoms.push_back(world_.atom(i).pos);
            std::vector<Vec3> extent = atoms;
            extent.push_back(world_.atom(s_).pos);
            extent.push_back(target_);
            grid_ = std::make_unique<VoxelGrid>(build_grid(extent, atoms, params_.d_weak, cfg_.grid_step, params_.col));
        }
        return *grid_;
    }

    std::vector<Candidate> rank(const PlacementCircle& circle, const HydrogenFrame* frame,
                                const AngularIntervalSet& valid, const Vec3& pivot) {
        std::vector<Candidate> out;
        if (valid.empty()) return out;
        const bool euclid = euclidean_here(pivot);
        const std::vector<double> thetas = euclid
                                               ? candidates_euclidean(valid, circle, target_, cfg_.n_samples,
                                                                      cfg_.min_spacing_deg)
                                               : candidates_uniform(valid, cfg_.n_samples);
        for (double th : thetas) {
            Candidate c{circle.point(th), {}, th, 0.0};
            if (frame) c.hydrogens = {frame->hydrogen(th, 1), frame->hydrogen(th, -1)};
            out.push_back(c);
        }
        if (euclid) {
            for (Candidate& c : out) c.score = (c.pos - target_).norm();
        } else {
            std::vector<Vec3> pts;
            for (const Candidate& c : out) pts.push_back(c.pos);
            stats_->grid_queries += pts.size();
            if (cfg_.distance != DistanceMode::discretized_ssmta) {
                for (Candidate& c : out) c.score = astar(grid(), c.pos, target_);
            } else {
                const std::vector<double> d = ssmt_astar(grid(), pts, target_);
                for (std::size_t i = 0; i < out.size(); ++i) out[i].score = d[i];
            }
            std::erase_if(out, [](const Candidate& c) { return !std::isfinite(c.score); });
        }
        const double first = thetas.front();
        std::stable_sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.score != b.score) return a.score < b.score;
            const double da = circular_distance(a.theta, first);
            const double db = circular_distance(b.theta, first);
            if (da != db) return da < db;
            return a.theta < b.theta;
        });
        if (static_cast<int>(out.size()) > cfg_.branching_factor) out.resize(static_cast<std::size_t>(cfg_.branching_factor));
        return out;
    }

    const MolecularGraph& world_;
    AtomId s_, t_;
    const SearchConfig& cfg_;
    const ChemParams& params_;
    ObstacleField field_;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    std::unique_ptr<VoxelGrid> grid_;
    SearchStats* stats_ = nullptr;
    Vec3 target_ = Vec3::Zero();
    std::vector<AtomId> anchors_;
    int best_len_ = kNoBound;
    bool stop_ = false;
    std::vector<Vec3> carbons_;
    std::vector<std::array<Vec3, 2>> hydrogens_;
    std::vector<PathSolution> solutions_;
};

}  // namespace

std::vector<PathSolution> construct_paths(const MolecularGraph& world, AtomId s, AtomId t, const SearchConfig& cfg,
                                          const ChemParams& params, SearchStats* stats,
                                          std::optional<std::chrono::steady_clock::time_point> deadline) {
    cfg.check();
    if (s < 0 || t < 0 || s >= static_cast<AtomId>(world.size()) || t >= static_cast<AtomId>(world.size()))
        throw InputError("path endpoint out of range");
    if (s == t) throw InputError("path endpoints must differ");
    SearchStats local;
    SearchStats& st = stats ? *stats : local;
    const auto t0 = std::chrono::steady_clock::now();
    PathSearch search(world, s, t, cfg, params, deadline);
    std::vector<PathSolution> out = search.run(st);
    st.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

AtomId splice_path(MolecularGraph& graph, const PathSolution& path, int group) {
    if (path.carbons.empty()) throw InputError("empty path");
    const AtomId first = static_cast<AtomId>(graph.size());
    AtomId prev = path.s;
    for (std::size_t i = 0; i < path.carbons.size(); ++i) {
        Atom c;
        c.element = Element::C;
        c.pos = path.carbons[i];
        c.role = Role::path;
        c.group = group;
        const AtomId id = graph.add_atom(c);
        graph.add_bond(prev, id);
        for (const Vec3& h : path.hydrogens.at(i)) {
            Atom ha = c;
            ha.element = Element::H;
            ha.pos = h;
            graph.add_bond(id, graph.add_atom(ha));
        }
        prev = id;
    }
    graph.add_bond(prev, path.t, true);
    return first;
}

}  // namespace cagegen
