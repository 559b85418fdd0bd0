#include "cagegen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "cagegen/error.hpp"

namespace cagegen {

std::string_view tree_mode_name(TreeMode m) { return m == TreeMode::ordered ? "ordered" : "on_the_fly"; }

std::optional<TreeMode> parse_tree_mode(std::string_view s) {
    if (s == "on_the_fly" || s == "on-the-fly" || s == "otf") return TreeMode::on_the_fly;
    if (s == "ordered") return TreeMode::ordered;
    return std::nullopt;
}

void PipelineConfig::check() const {
    if (max_cages < 1) throw InputError("max_cages must be >= 1");
    if (!(time_budget >= 0.0)) throw InputError("time budget must be >= 0");
    if (workers < 1) throw InputError("workers must be >= 1");
    if (ict_cap < 1) throw InputError("ict cap must be >= 1");
    search.check();
}

namespace {

using Clock = std::chrono::steady_clock;
using AtomEdge = std::pair<AtomId, AtomId>;

std::string shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

AtomEdge canonical(AtomId a, AtomId b) { return a < b ? AtomEdge{a, b} : AtomEdge{b, a}; }

enum class Outcome { built, failed, out_of_time };

// Processes trees one at a time, keeping the cages built for the edge prefix
// of the previous tree. A tree sharing that prefix resumes from it; since a
// search only depends on the cage it runs against, the outcome is the same as
// rebuilding from scratch.
class TreeBuilder {
public:
    TreeBuilder(const MolecularGraph& instance, const MultipartiteGraph& eg, const PipelineConfig& cfg,
                const ChemParams& params, std::optional<Clock::time_point> deadline)
        : eg_(eg), cfg_(cfg), params_(params), deadline_(deadline) {
        levels_.push_back({instance, {}});
    }

    Outcome build(std::span<const IctEdge> tree, CageSolution& out, AtomEdge& failed) {
        std::size_t p = 0;
        while (p < tree.size() && p < edges_.size() && tree[p] == edges_[p]) ++p;
        edges_.resize(p);
        levels_.resize(p + 1);

        if (fail_ && fail_->first == p && p < tree.size() && tree[p] == fail_->second) {
            failed = atoms(tree[p]);
            return Outcome::failed;
        }
        fail_.reset();

        for (std::size_t i = p; i < tree.size(); ++i) {
            const auto [s, t] = atoms(tree[i]);
            SearchStats st;
            const std::vector<PathSolution> found =
                construct_paths(levels_.back().graph, s, t, cfg_.search, params_, &st, deadline_);
            ++searches;
            nodes += st.nodes;
            if (found.empty()) {
                if (deadline_ && Clock::now() >= *deadline_) return Outcome::out_of_time;
                fail_ = {i, tree[i]};
                failed = {s, t};
                return Outcome::failed;
            }
            Level next{levels_.back().graph, levels_.back().paths};
            splice_path(next.graph, found.front(), static_cast<int>(i));
            next.paths.push_back({found.front().length(), found.front().nrmsd});
            levels_.push_back(std::move(next));
            edges_.push_back(tree[i]);
        }

        const Level& top = levels_.back();
        out.graph = top.graph;
        out.paths = top.paths;
        out.edges.clear();
        for (const IctEdge& e : tree) out.edges.push_back(atoms(e));
        out.tree_weight = tree_weight(eg_, tree);
        out.atom_count = cage_atom_count(out.graph);
        double sum = 0.0;
        for (const PathStat& ps : out.paths) sum += ps.nrmsd;
        out.average_nrmsd = out.paths.empty() ? 0.0 : sum / static_cast<double>(out.paths.size());
        return Outcome::built;
    }

    std::uint64_t searches = 0;
    std::uint64_t nodes = 0;

private:
    struct Level {
        MolecularGraph graph;
        std::vector<PathStat> paths;
    };

    AtomEdge atoms(const IctEdge& e) const { return {eg_.atom(e.u), eg_.atom(e.v)}; }

    const MultipartiteGraph& eg_;
    const PipelineConfig& cfg_;
    const ChemParams& params_;
    std::optional<Clock::time_point> deadline_;
    std::vector<IctEdge> edges_;
    std::vector<Level> levels_;
    std::optional<std::pair<std::size_t, IctEdge>> fail_;
};

class Assembler {
public:
    Assembler(const MolecularGraph& instance, const PipelineConfig& cfg, const ChemParams& params)
        : instance_(instance), eg_(endpoint_graph(instance)), cfg_(cfg), params_(params), start_(Clock::now()) {
        if (cfg.time_budget > 0)
            deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_budget));
    }

    AssemblyResult run() {
        if (!has_ict(eg_))
            throw InfeasibleError("endpoint graph admits no interconnection tree: " + std::to_string(eg_.vertex_count()) +
                                  " endpoints over " + std::to_string(eg_.part_count()) + " patterns");
        if (cfg_.mode == TreeMode::ordered) {
            run_ordered();
        } else if (cfg_.workers > 1) {
            run_parallel();
        } else {
            run_sequential();
        }
        finish();
        return std::move(result_);
    }

private:
    bool out_of_time() const { return deadline_ && Clock::now() >= *deadline_; }

    bool banned(std::span<const IctEdge> tree) const {
        for (const IctEdge& e : tree)
            if (failed_.count(canonical(eg_.atom(e.u), eg_.atom(e.v)))) return true;
        return false;
    }

    void record_failure(const AtomEdge& e) {
        ++result_.stats.edge_failures[canonical(e.first, e.second)];
        if (cfg_.early_edge_removal) failed_.insert(canonical(e.first, e.second));
    }

    // Returns false once the run should stop.
    bool handle(TreeBuilder& builder, std::span<const IctEdge> tree) {
        RunStats& st = result_.stats;
        ++st.trees_enumerated;
        if (out_of_time()) {
            st.timed_out = true;
            return false;
        }
        if (cfg_.early_edge_removal && banned(tree)) {
            ++st.trees_skipped;
            return true;
        }
        ++st.trees_processed;
        CageSolution cage;
        AtomEdge failed{-1, -1};
        switch (builder.build(tree, cage, failed)) {
            case Outcome::out_of_time: st.timed_out = true; return false;
            case Outcome::failed: record_failure(failed); return true;
            case Outcome::built:
                result_.cages.push_back(std::move(cage));
                return static_cast<int>(result_.cages.size()) < cfg_.max_cages;
        }
        return true;
    }

    void run_sequential() {
        TreeBuilder builder(instance_, eg_, cfg_, params_, deadline_);
        enumerate_icts(eg_, [&](std::span<const IctEdge> tree) { return handle(builder, tree); });
        absorb(builder);
    }

    void run_ordered() {
        TreeBuilder builder(instance_, eg_, cfg_, params_, deadline_);
        const OrderedTrees trees = collect_ordered_icts(eg_, cfg_.ict_cap);
        for (std::size_t r = 0; r < trees.size(); ++r)
            if (!handle(builder, trees.tree(r))) break;
        absorb(builder);
    }

    // Trees are taken from the enumeration in batches; each worker owns a
    // builder, the failed-edge set is shared, and results are merged in
    // enumeration order so the cage list is ordered as in the sequential run.
    void run_parallel() {
        const int w = cfg_.workers;
        const std::size_t batch = 64 * static_cast<std::size_t>(w);
        const int per_tree = std::max(0, eg_.part_count() - 1);
        std::vector<IctEdge> flat;
        std::vector<TreeBuilder> builders;
        for (int i = 0; i < w; ++i) builders.emplace_back(instance_, eg_, cfg_, params_, deadline_);
        std::mutex mu;
        bool stop = false;

        auto flush = [&] {
            const std::size_t n = per_tree ? flat.size() / static_cast<std::size_t>(per_tree) : flat.size();
            std::vector<std::optional<CageSolution>> cages(n);
            std::vector<char> state(n, 0);  // 0 untouched, 1 skipped, 2 processed, 3 out of time
            std::atomic<std::size_t> next{0};
            auto work = [&](TreeBuilder& b) {
                for (std::size_t i = next++; i < n; i = next++) {
                    const std::span<const IctEdge> tree(flat.data() + i * static_cast<std::size_t>(per_tree),
                                                        static_cast<std::size_t>(per_tree));
                    if (out_of_time()) {
                        state[i] = 3;
                        continue;
                    }
                    {
                        std::lock_guard lock(mu);
                        if (cfg_.early_edge_removal && banned(tree)) {
                            state[i] = 1;
                            continue;
                        }
                    }
                    CageSolution cage;
                    AtomEdge failed{-1, -1};
                    const Outcome o = b.build(tree, cage, failed);
                    state[i] = o == Outcome::out_of_time ? 3 : 2;
                    std::lock_guard lock(mu);
                    if (o == Outcome::failed) record_failure(failed);
                    if (o == Outcome::built) cages[i] = std::move(cage);
                }
            };
            std::vector<std::thread> threads;
            for (int t = 1; t < w; ++t) threads.emplace_back(work, std::ref(builders[static_cast<std::size_t>(t)]));
            work(builders[0]);
            for (auto& t : threads) t.join();

            RunStats& st = result_.stats;
            for (std::size_t i = 0; i < n && !stop; ++i) {
                ++st.trees_enumerated;
                if (state[i] == 3) {
                    st.timed_out = true;
                    stop = true;
                    break;
                }
                if (state[i] == 1) ++st.trees_skipped;
                if (state[i] == 2) ++st.trees_processed;
                if (cages[i]) {
                    result_.cages.push_back(std::move(*cages[i]));
                    if (static_cast<int>(result_.cages.size()) >= cfg_.max_cages) stop = true;
                }
            }
            flat.clear();
        };

        enumerate_icts(eg_, [&](std::span<const IctEdge> tree) {
            flat.insert(flat.end(), tree.begin(), tree.end());
            if (per_tree == 0 || flat.size() >= batch * static_cast<std::size_t>(per_tree)) flush();
            return !stop;
        });
        if (!flat.empty() && !stop) flush();
        for (TreeBuilder& b : builders) absorb(b);
    }

    void absorb(const TreeBuilder& b) {
        result_.stats.path_searches += b.searches;
        result_.stats.search_nodes += b.nodes;
    }

    void finish() {
        RunStats& st = result_.stats;
        st.cages = static_cast<int>(result_.cages.size());
        if (result_.cages.empty()) {
            st.average_nrmsd = std::numeric_limits<double>::quiet_NaN();
        } else {
            double sum = 0.0;
            st.mnoa = std::numeric_limits<int>::max();
            for (const CageSolution& c : result_.cages) {
                sum += c.average_nrmsd;
                st.mnoa = std::min(st.mnoa, c.atom_count);
            }
            st.average_nrmsd = sum / static_cast<double>(result_.cages.size());
        }
        st.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    }

    const MolecularGraph& instance_;
    MultipartiteGraph eg_;
    const PipelineConfig& cfg_;
    const ChemParams& params_;
    Clock::time_point start_;
    std::optional<Clock::time_point> deadline_;
    std::set<AtomEdge> failed_;
    AssemblyResult result_;
};

}  // namespace

MultipartiteGraph endpoint_graph(const MolecularGraph& instance) {
    std::map<int, std::vector<AtomId>> groups;
    for (AtomId id = 0; id < static_cast<AtomId>(instance.size()); ++id) {
        const Atom& a = instance.atom(id);
        if (a.role != Role::pattern) continue;
        auto& g = groups[a.group];
        if (a.endpoint) g.push_back(id);
    }
    if (groups.empty()) throw InputError("instance has no binding patterns");
    std::vector<std::vector<VertexId>> parts;
    std::vector<Vec3> pos;
    std::vector<AtomId> atoms;
    for (const auto& [group, ids] : groups) {
        if (ids.empty()) throw InputError("binding pattern " + std::to_string(group) + " has no endpoint atom");
        parts.emplace_back();
        for (AtomId id : ids) {
            parts.back().push_back(static_cast<VertexId>(atoms.size()));
            atoms.push_back(id);
            pos.push_back(instance.atom(id).pos);
        }
    }
    return MultipartiteGraph(std::move(parts), std::move(pos), std::move(atoms));
}

AssemblyResult assemble(const MolecularGraph& instance, const PipelineConfig& cfg, const ChemParams& params) {
    cfg.check();
    params.check();
    return Assembler(instance, cfg, params).run();
}

AssemblyResult assemble(const MolecularGraph& substrate, std::span<const BindingPattern> candidates,
                        std::span<const int> chosen, const PipelineConfig& cfg, const ChemParams& params) {
    return assemble(assemble_instance(substrate, candidates, chosen), cfg, params);
}

int cage_atom_count(const MolecularGraph& cage) {
    int n = 0;
    for (const Atom& a : cage.atoms()) n += a.role != Role::substrate;
    return n;
}

std::vector<PathStat> path_stats(const MolecularGraph& cage, const SearchConfig& cfg, const ChemParams& params) {
    std::map<int, std::vector<AtomId>> carbons;
    for (AtomId id = 0; id < static_cast<AtomId>(cage.size()); ++id) {
        const Atom& a = cage.atom(id);
        if (a.role == Role::path && a.element != Element::H) carbons[a.group].push_back(id);
    }
    std::vector<PathStat> out;
    for (const auto& [group, ids] : carbons) {
        AtomId tip = -1, t = -1;
        for (AtomId c : ids)
            for (AtomId n : cage.neighbors(c)) {
                const int b = cage.bond_index(c, n);
                if (cage.bonds()[static_cast<std::size_t>(b)].relaxed) tip = c, t = n;
            }
        if (tip < 0) throw InputError("path " + std::to_string(group) + " has no terminal bond");
        AtomId prev = -1, d = -1;
        for (AtomId n : cage.neighbors(tip))
            if (n != t && cage.atom(n).element != Element::H) prev = n;
        for (AtomId n : cage.neighbors(t))
            if (n != tip && (d < 0 || n < d)) d = n;
        if (prev < 0) throw InputError("path " + std::to_string(group) + " is not connected to its start");
        const Vec3* dp = d >= 0 ? &cage.atom(d).pos : nullptr;
        out.push_back({static_cast<int>(ids.size()),
                       attachment_nrmsd(cage.atom(prev).pos, cage.atom(tip).pos, cage.atom(t).pos, dp, cfg, params,
                                        attachment_angle(cage.atom(t), params))});
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> cage_stat_records(const CageSolution& cage) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("cage_atoms", std::to_string(cage.atom_count));
    out.emplace_back("paths", std::to_string(cage.paths.size()));
    out.emplace_back("tree_weight", shortest(cage.tree_weight));
    for (std::size_t i = 0; i < cage.paths.size(); ++i) {
        out.emplace_back("path_length." + std::to_string(i), std::to_string(cage.paths[i].length));
        out.emplace_back("path_nrmsd." + std::to_string(i), shortest(cage.paths[i].nrmsd));
    }
    out.emplace_back("average_nrmsd", shortest(cage.average_nrmsd));
    return out;
}

std::string run_stats_header() {
    return "Mode\tEdge Removal\t#Cages\t#Trees\tAverage NRMSD\tMNoA\tTotal seconds";
}

std::string run_stats_row(const PipelineConfig& cfg, const RunStats& st) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << tree_mode_name(cfg.mode) << '\t' << (cfg.early_edge_removal ? "on" : "off") << '\t' << st.cages << '\t'
       << st.trees_processed << '\t';
    if (st.cages) {
        os << st.average_nrmsd;
    } else {
        os << '-';
    }
    os << '\t';
    if (st.mnoa >= 0) {
        os << st.mnoa;
    } else {
        os << '-';
    }
    os << '\t' << st.seconds;
    return os.str();
}

}  // namespace cagegen
