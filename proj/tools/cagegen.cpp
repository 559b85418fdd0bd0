// Command-line front end.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cagegen/binding_patterns.hpp"
#include "cagegen/error.hpp"
#include "cagegen/ict.hpp"
#include "cagegen/instance_io.hpp"
#include "cagegen/path_search.hpp"
#include "cagegen/pipeline.hpp"
#include "cagegen/validate.hpp"

using namespace cagegen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kViolations = 1, kBadInput = 2, kInfeasible = 3, kNoSolution = 4, kIo = 5 };

// Every tunable, with the defaults the library uses.
struct Options {
    ChemParams chem;
    PipelineConfig pipe;
    PlacementConfig placement;
    std::string distance = "hybrid";
    std::string cut = "projected";
    std::string mode = "on_the_fly";
    bool no_eer = false;
    std::uint64_t seed = 0;
    bool json = false;

    // Turns the string-valued flags into enums; throws InputError on unknown names.
    void resolve() {
        const auto d = parse_distance_mode(distance);
        if (!d) throw InputError("unknown --distance '" + distance + "'");
        const auto c = parse_cut_mode(cut);
        if (!c) throw InputError("unknown --cut '" + cut + "'");
        const auto m = parse_tree_mode(mode);
        if (!m) throw InputError("unknown --mode '" + mode + "'");
        pipe.search.distance = *d;
        pipe.search.cut = *c;
        pipe.mode = *m;
        pipe.early_edge_removal = !no_eer;
        chem.check();
        pipe.check();
    }
};

void add_chem(CLI::App* app, Options& o) {
    app->add_option("--d-weak", o.chem.d_weak, "Minimum path-to-substrate distance (nm)")->capture_default_str();
    app->add_option("--col", o.chem.col, "Minimum non-bonded distance (nm)")->capture_default_str();
}

void add_search(CLI::App* app, Options& o) {
    SearchConfig& s = o.pipe.search;
    app->add_option("--branching", s.branching_factor, "Candidates kept per search step")->capture_default_str();
    app->add_option("--samples", s.n_samples, "Angular samples per step")->capture_default_str();
    app->add_option("--spacing", s.min_spacing_deg, "Minimum angular separation of samples (deg)")
        ->capture_default_str();
    app->add_option("--distance", o.distance, "Distance heuristic: euclidean|astar|ssmta|hybrid")
        ->capture_default_str();
    app->add_option("--cut", o.cut, "Length cut: none|min|projected")->capture_default_str();
    app->add_option("--max-len", s.max_path_len, "Maximum path length (carbons)")->capture_default_str();
    app->add_option("--max-solutions", s.max_solutions, "Solutions kept per path search")->capture_default_str();
    app->add_option("--grid", s.grid_step, "Voxel size for grid distances (nm)")->capture_default_str();
    app->add_option("--angle-tol", s.angle_tol_deg, "Terminal angle tolerance (deg)")->capture_default_str();
    app->add_option("--length-tol", s.length_tol, "Terminal bond length tolerance (nm)")->capture_default_str();
    app->add_option("--max-nodes", s.max_nodes, "Node limit per path search, 0 for none")->capture_default_str();
}

void add_pipeline(CLI::App* app, Options& o) {
    app->add_option("--mode", o.mode, "Tree order: on_the_fly|ordered")->capture_default_str();
    app->add_flag("--no-eer", o.no_eer, "Disable early edge removal");
    app->add_option("--max-cages", o.pipe.max_cages, "Stop after this many cages")->capture_default_str();
    app->add_option("--time-budget", o.pipe.time_budget, "Wall-clock budget in seconds, 0 for none")
        ->capture_default_str();
    app->add_option("--ict-cap", o.pipe.ict_cap, "Most trees stored in ordered mode")->capture_default_str();
    app->add_option("--workers", o.pipe.workers, "Tree-level worker threads")->capture_default_str();
}

void add_placement(CLI::App* app, Options& o) {
    app->add_option("--rotations", o.placement.rotations, "Hydrogen pattern rotations per donor")
        ->capture_default_str();
    app->add_option("--stacking", o.placement.stacking_distance, "Ring stacking distance (nm)")
        ->capture_default_str();
    app->add_option("--planarity", o.placement.planarity_tol, "Ring planarity tolerance (nm)")
        ->capture_default_str();
}

json config_json(const Options& o) {
    const SearchConfig& s = o.pipe.search;
    return {
        {"chem", {{"cov_heavy", o.chem.cov_heavy}, {"cov_hydrogen", o.chem.cov_hydrogen}, {"col", o.chem.col},
                  {"d_weak", o.chem.d_weak}}},
        {"search",
         {{"branching", s.branching_factor}, {"samples", s.n_samples}, {"spacing", s.min_spacing_deg},
          {"distance", distance_mode_name(s.distance)}, {"cut", cut_mode_name(s.cut)}, {"max_len", s.max_path_len},
          {"max_solutions", s.max_solutions}, {"grid", s.grid_step}, {"angle_tol", s.angle_tol_deg},
          {"length_tol", s.length_tol}, {"closure_probe", s.closure_probe}, {"max_nodes", s.max_nodes}}},
        {"pipeline",
         {{"mode", tree_mode_name(o.pipe.mode)}, {"early_edge_removal", o.pipe.early_edge_removal},
          {"max_cages", o.pipe.max_cages}, {"time_budget", o.pipe.time_budget}, {"ict_cap", o.pipe.ict_cap},
          {"workers", o.pipe.workers}}},
    };
}

// Inverse of config_json; missing keys keep their current values.
void apply_config(const json& j, Options& o) {
    auto get = [](const json& obj, const char* key, auto& dst) {
        if (obj.contains(key)) dst = obj.at(key).get<std::decay_t<decltype(dst)>>();
    };
    if (j.contains("chem")) {
        const json& c = j.at("chem");
        get(c, "cov_heavy", o.chem.cov_heavy);
        get(c, "cov_hydrogen", o.chem.cov_hydrogen);
        get(c, "col", o.chem.col);
        get(c, "d_weak", o.chem.d_weak);
    }
    if (j.contains("search")) {
        const json& c = j.at("search");
        SearchConfig& s = o.pipe.search;
        get(c, "branching", s.branching_factor);
        get(c, "samples", s.n_samples);
        get(c, "spacing", s.min_spacing_deg);
        get(c, "distance", o.distance);
        get(c, "cut", o.cut);
        get(c, "max_len", s.max_path_len);
        get(c, "max_solutions", s.max_solutions);
        get(c, "grid", s.grid_step);
        get(c, "angle_tol", s.angle_tol_deg);
        get(c, "length_tol", s.length_tol);
        get(c, "closure_probe", s.closure_probe);
        get(c, "max_nodes", s.max_nodes);
    }
    if (j.contains("pipeline")) {
        const json& c = j.at("pipeline");
        get(c, "mode", o.mode);
        bool eer = !o.no_eer;
        get(c, "early_edge_removal", eer);
        o.no_eer = !eer;
        get(c, "max_cages", o.pipe.max_cages);
        get(c, "time_budget", o.pipe.time_budget);
        get(c, "ict_cap", o.pipe.ict_cap);
        get(c, "workers", o.pipe.workers);
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Instance load(const fs::path& p, std::string* digest = nullptr) {
    const std::string bytes = slurp(p);
    if (digest) *digest = fnv1a_hex(bytes);
    std::istringstream in(bytes);
    try {
        return parse_instance(in);
    } catch (const InputError& e) {
        throw InputError(p.string() + ": " + e.what());
    }
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << text;
}

std::string xyz_text(const MolecularGraph& g, const std::string& comment) {
    std::ostringstream os;
    write_xyz_frame(os, g, comment);
    return os.str();
}

std::string numbered(const char* stem, std::size_t i, const char* ext) {
    std::ostringstream os;
    os << stem << '_' << std::setw(3) << std::setfill('0') << i << ext;
    return os.str();
}

double finite_or_null(double x) { return std::isfinite(x) ? x : 0.0; }

int cmd_validate(const fs::path& file, Options& o) {
    o.chem.check();
    const Instance inst = load(file);
    const ValidationReport r = validate(inst.graph, o.chem);
    if (o.json) {
        json v = json::array();
        for (const Violation& x : r.violations)
            v.push_back({{"kind", violation_name(x.kind)},
                         {"atoms", x.atoms},
                         {"measured", x.measured},
                         {"allowed", {x.allowed_lo, x.allowed_hi}}});
        std::cout << json{{"ok", r.ok()}, {"atoms", inst.graph.size()}, {"violations", v}}.dump(2) << '\n';
    } else {
        std::cout << r.render();
    }
    return r.ok() ? kOk : kViolations;
}

int cmd_patterns(const fs::path& file, Options& o, std::size_t limit, const std::string& out_dir) {
    o.chem.check();
    const Instance inst = load(file);
    const MolecularGraph& substrate = inst.graph;
    const auto sites = detect_sites(substrate, o.placement);
    const auto cands = all_candidates(substrate, o.chem, o.placement);
    const ConflictGraph conflicts = build_conflict_graph(cands, o.chem);
    const auto sets = select_pattern_sets(cands, conflicts, limit);

    if (o.json) {
        json js = json::array(), jc = json::array(), jsets = sets;
        for (const Site& s : sites) js.push_back({{"kind", site_kind_name(s.kind)}, {"atoms", s.atoms}});
        for (const BindingPattern& b : cands)
            jc.push_back({{"kind", pattern_kind_name(b.kind)}, {"site", b.site}, {"atoms", b.fragment.size()}});
        std::cout << json{{"sites", js}, {"candidates", jc}, {"sets", jsets}}.dump(2) << '\n';
    } else {
        std::cout << "site\tkind\tatoms\tcandidates\n";
        for (std::size_t i = 0; i < sites.size(); ++i) {
            std::size_t n = 0;
            for (const BindingPattern& b : cands) n += b.site == static_cast<int>(i);
            std::cout << i << '\t' << site_kind_name(sites[i].kind) << '\t' << sites[i].atoms.size() << '\t' << n
                      << '\n';
        }
        std::cout << "set\tpatterns\tmembers\n";
        for (std::size_t i = 0; i < sets.size(); ++i) {
            std::cout << i << '\t' << sets[i].size() << '\t';
            for (std::size_t k = 0; k < sets[i].size(); ++k) std::cout << (k ? "," : "") << sets[i][k];
            std::cout << '\n';
        }
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            Instance out;
            out.graph = assemble_instance(substrate, cands, sets[i]);
            write_instance(fs::path(out_dir) / numbered("set", i, ".cage"), out);
        }
    }
    return cands.empty() ? kNoSolution : kOk;
}

// First endpoint of the lowest pattern group and first endpoint of the next one.
std::pair<AtomId, AtomId> default_pair(const MolecularGraph& g) {
    const MultipartiteGraph eg = endpoint_graph(g);
    if (eg.part_count() < 2) throw InputError("need endpoints in two pattern groups; pass --s and --t");
    return {eg.atom(eg.parts()[0].front()), eg.atom(eg.parts()[1].front())};
}

int cmd_paths(const fs::path& file, Options& o, AtomId s, AtomId t, std::size_t limit, const std::string& out_dir) {
    o.resolve();
    const Instance inst = load(file);
    if (s < 0 || t < 0) std::tie(s, t) = default_pair(inst.graph);
    if (s >= static_cast<AtomId>(inst.graph.size()) || t >= static_cast<AtomId>(inst.graph.size())) throw InputError("--s/--t is not an atom id");
    SearchStats st;
    const auto sols = construct_paths(inst.graph, s, t, o.pipe.search, o.chem, &st);
    const std::size_t shown = std::min(limit, sols.size());
    if (o.json) {
        json rows = json::array();
        for (std::size_t i = 0; i < shown; ++i)
            rows.push_back({{"rank", i}, {"length", sols[i].length()}, {"nrmsd", sols[i].nrmsd}});
        std::cout << json{{"s", s},
                          {"t", t},
                          {"solutions", sols.size()},
                          {"nodes", st.nodes},
                          {"seconds", st.seconds},
                          {"paths", rows}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "rank\tlength\tnrmsd\n";
        for (std::size_t i = 0; i < shown; ++i)
            std::cout << i << '\t' << sols[i].length() << '\t' << sols[i].nrmsd << '\n';
        std::cerr << "solutions=" << sols.size() << " nodes=" << st.nodes << " seconds=" << st.seconds << '\n';
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        for (std::size_t i = 0; i < shown; ++i) {
            Instance out;
            out.graph = inst.graph;
            splice_path(out.graph, sols[i], inst.graph.atom(s).group);
            out.stats = {{"path_length", std::to_string(sols[i].length())}};
            write_instance(fs::path(out_dir) / numbered("path", i, ".cage"), out);
            write_text(fs::path(out_dir) / numbered("path", i, ".xyz"), xyz_text(out.graph, "path " + std::to_string(i)));
        }
    }
    return sols.empty() ? kNoSolution : kOk;
}

std::string bench_header() { return "Instance\t#Trees\tTotal ms\tDelay ns\tStorage %\tSort %"; }

json bench_json(const IctBenchmark& b) {
    auto pct = [](double x) { return x < 0 ? json(nullptr) : json(x); };
    return {{"k", b.k},
            {"l", b.l},
            {"trees", b.trees},
            {"total_ms", b.enumerate_ms},
            {"delay_ns", b.delay_ns},
            {"storage_pct", pct(b.storage_overhead_pct)},
            {"sort_pct", pct(b.sort_overhead_pct)}};
}

std::string bench_row(const IctBenchmark& b) {
    auto pct = [](double x) {
        if (x < 0) return std::string("-");
        std::ostringstream os;
        os << std::fixed << std::setprecision(1) << x;
        return os.str();
    };
    std::ostringstream os;
    os << '(' << b.k << ',' << b.l << ")\t" << b.trees << '\t' << std::fixed << std::setprecision(3) << b.enumerate_ms
       << '\t' << std::setprecision(1) << b.delay_ns << '\t' << pct(b.storage_overhead_pct) << '\t'
       << pct(b.sort_overhead_pct);
    return os.str();
}

IctBenchmark run_bench(int k, int l, bool sort, std::uint64_t cap) {
    if (k < 1 || l < 1) throw InputError("k and l must be at least 1");
    IctBenchmark b = benchmark_icts(k, l, sort, cap);
    if (sort && b.trees > cap)
        throw InputError("(" + std::to_string(k) + "," + std::to_string(l) + ") has " + std::to_string(b.trees) +
                         " trees, more than --cap " + std::to_string(cap) + " for sorting");
    return b;
}

int cmd_trees(int k, int l, bool sort, std::uint64_t cap, bool as_json) {
    const IctBenchmark b = run_bench(k, l, sort, cap);
    if (as_json)
        std::cout << bench_json(b).dump(2) << '\n';
    else
        std::cout << bench_header() << '\n' << bench_row(b) << '\n';
    return kOk;
}

int cmd_bench(const std::vector<std::string>& items, bool sort, std::uint64_t cap, bool as_json) {
    std::vector<IctBenchmark> rows;
    for (const std::string& item : items) {
        int k = 0, l = 0;
        char x = 0;
        std::istringstream in(item);
        if (!(in >> k >> x >> l) || x != 'x' || !in.eof()) throw InputError("bad instance '" + item + "', want KxL");
        if (k < 1 || l < 1) throw InputError("bad instance '" + item + "'");
        // Sorting beyond the cap is skipped rather than fatal in the batch table.
        rows.push_back(benchmark_icts(k, l, sort, cap));
    }
    if (as_json) {
        json j = json::array();
        for (const auto& b : rows) j.push_back(bench_json(b));
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << bench_header() << '\n';
        for (const auto& b : rows) std::cout << bench_row(b) << '\n';
    }
    return kOk;
}

json stats_json(const RunStats& st) {
    return {{"cages", st.cages},
            {"trees_enumerated", st.trees_enumerated},
            {"trees_processed", st.trees_processed},
            {"trees_skipped", st.trees_skipped},
            {"path_searches", st.path_searches},
            {"search_nodes", st.search_nodes},
            {"mnoa", st.mnoa},
            {"average_nrmsd", st.cages ? json(finite_or_null(st.average_nrmsd)) : json(nullptr)},
            {"seconds", st.seconds},
            {"timed_out", st.timed_out}};
}

int cmd_cage(std::string file, Options& o, const std::string& out_dir, const std::string& manifest_in) {
    std::string expect_digest;
    if (!manifest_in.empty()) {
        json m;
        try {
            m = json::parse(slurp(manifest_in));
        } catch (const json::exception& e) {
            throw InputError(manifest_in + ": " + e.what());
        }
        if (m.contains("config")) apply_config(m.at("config"), o);
        if (m.contains("seed")) o.seed = m.at("seed").get<std::uint64_t>();
        if (file.empty() && m.contains("input")) file = m.at("input").get<std::string>();
        if (m.contains("input_digest")) expect_digest = m.at("input_digest").get<std::string>();
    }
    if (file.empty()) throw InputError("no instance file given");
    o.resolve();

    std::string digest;
    const Instance inst = load(file, &digest);
    if (!expect_digest.empty() && expect_digest != digest)
        throw InputError("input digest " + digest + " does not match manifest " + expect_digest);

    const AssemblyResult r = assemble(inst.graph, o.pipe, o.chem);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const json manifest = {{"tool", "cagegen"},
                           {"version", CAGEGEN_VERSION},
                           {"command", "cage"},
                           {"input", file},
                           {"input_digest", digest},
                           {"seed", o.seed},
                           {"config", config_json(o)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    for (std::size_t i = 0; i < r.cages.size(); ++i) {
        const CageSolution& c = r.cages[i];
        Instance out;
        out.graph = c.graph;
        out.stats = cage_stat_records(c);
        write_instance(dir / numbered("cage", i, ".cage"), out);
        write_text(dir / numbered("cage", i, ".xyz"), xyz_text(c.graph, "cage " + std::to_string(i)));
    }
    const std::string table = run_stats_header() + "\n" + run_stats_row(o.pipe, r.stats) + "\n";
    write_text(dir / "stats.tsv", table);
    write_text(dir / "stats.json", stats_json(r.stats).dump(2) + "\n");

    if (o.json)
        std::cout << stats_json(r.stats).dump(2) << '\n';
    else
        std::cout << table;
    if (r.cages.empty()) {
        std::cerr << (r.stats.timed_out ? "no cage within the time budget\n" : "no cage found\n");
        return kNoSolution;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cage generation around a guest molecule", "cagegen"};
    app.set_version_flag("--version", std::string(CAGEGEN_VERSION));
    app.require_subcommand(1);

    Options o;
    std::string file, out_dir, cage_dir = "cages", manifest_in;
    std::size_t limit = 10;
    AtomId s = -1, t = -1;
    int k = 0, l = 0;
    bool sort = false;
    std::uint64_t cap = kDefaultIctCap;
    std::vector<std::string> specs{"3x3", "3x6", "5x3", "5x6"};

    auto* validate_cmd = app.add_subcommand("validate", "Check an instance against the chemical constraints");
    validate_cmd->add_option("instance", file, "Instance file")->required();
    add_chem(validate_cmd, o);

    auto* patterns_cmd = app.add_subcommand("patterns", "Detect binding sites and select pattern sets");
    patterns_cmd->add_option("substrate", file, "Substrate instance file")->required();
    patterns_cmd->add_option("--limit", limit, "Most pattern sets listed")->capture_default_str();
    patterns_cmd->add_option("--out-dir", out_dir, "Write one instance per set here");
    add_chem(patterns_cmd, o);
    add_placement(patterns_cmd, o);

    auto* paths_cmd = app.add_subcommand("paths", "Search paths between two endpoints");
    paths_cmd->add_option("instance", file, "Instance file")->required();
    paths_cmd->add_option("--s", s, "Start atom id (default: first endpoint of the first group)");
    paths_cmd->add_option("--t", t, "Target atom id (default: first endpoint of the second group)");
    paths_cmd->add_option("--limit", limit, "Most paths listed or written")->capture_default_str();
    paths_cmd->add_option("--out-dir", out_dir, "Write each listed path spliced into the instance here");
    add_chem(paths_cmd, o);
    add_search(paths_cmd, o);

    auto* trees_cmd = app.add_subcommand("trees", "Enumerate trees of a complete (k,l) multipartite graph");
    trees_cmd->add_option("k", k, "Number of parts")->required();
    trees_cmd->add_option("l", l, "Vertices per part")->required();
    trees_cmd->add_flag("--sort", sort, "Also time storing and sorting all trees");
    trees_cmd->add_option("--cap", cap, "Most trees stored for sorting")->capture_default_str();

    auto* bench_cmd = app.add_subcommand("bench", "Tree enumeration benchmark table");
    bench_cmd->add_option("--instances", specs, "Instances as KxL")->capture_default_str()->delimiter(',');
    bench_cmd->add_flag("--sort", sort, "Also time storing and sorting all trees");
    bench_cmd->add_option("--cap", cap, "Most trees stored for sorting")->capture_default_str();

    auto* cage_cmd = app.add_subcommand("cage", "Assemble cages around the substrate");
    cage_cmd->add_option("instance", file, "Instance file (substrate plus binding patterns)");
    cage_cmd->add_option("--out-dir", cage_dir, "Output directory")->capture_default_str();
    cage_cmd->add_option("--manifest", manifest_in, "Re-run with the config and input of a manifest.json");
    add_chem(cage_cmd, o);
    add_search(cage_cmd, o);
    add_pipeline(cage_cmd, o);

    for (CLI::App* sub : {validate_cmd, patterns_cmd, paths_cmd, trees_cmd, bench_cmd, cage_cmd}) {
        sub->add_flag("--json", o.json, "Structured output on stdout");
        sub->add_option("--seed", o.seed, "Seed recorded in the manifest (the algorithms are deterministic)")
            ->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*validate_cmd) return cmd_validate(file, o);
        if (*patterns_cmd) return cmd_patterns(file, o, limit, out_dir);
        if (*paths_cmd) return cmd_paths(file, o, s, t, limit, out_dir);
        if (*trees_cmd) return cmd_trees(k, l, sort, cap, o.json);
        if (*bench_cmd) return cmd_bench(specs, sort, cap, o.json);
        if (*cage_cmd) return cmd_cage(file, o, cage_dir, manifest_in);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}
