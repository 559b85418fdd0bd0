#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cagegen/error.hpp"
#include "cagegen/fixtures.hpp"
#include "cagegen/ict.hpp"
#include "cagegen/instance_io.hpp"
#include "cagegen/path_search.hpp"
#include "cagegen/pipeline.hpp"
#include "cagegen/validate.hpp"

namespace py = pybind11;
using namespace cagegen;

namespace {

const char* role_name(Role r) {
    switch (r) {
        case Role::substrate: return "substrate";
        case Role::pattern: return "pattern";
        case Role::path: return "path";
    }
    return "?";
}

py::dict atom_dict(const Atom& a) {
    py::dict d;
    d["element"] = std::string(symbol(a.element));
    d["pos"] = py::make_tuple(a.pos.x(), a.pos.y(), a.pos.z());
    d["role"] = role_name(a.role);
    d["group"] = a.group;
    d["endpoint"] = a.endpoint;
    d["geometry"] = std::string(geometry_name(a.geometry));
    return d;
}

Instance from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

std::string to_text(const Instance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

ChemParams chem(double d_weak, double col) {
    ChemParams p;
    p.d_weak = d_weak;
    p.col = col;
    p.check();
    return p;
}

// Keyword arguments named like the CLI flags.
SearchConfig search_from(const py::kwargs& kw) {
    SearchConfig s;
    for (auto [k, v] : kw) {
        const std::string key = py::cast<std::string>(k);
        if (key == "branching") s.branching_factor = py::cast<int>(v);
        else if (key == "samples") s.n_samples = py::cast<int>(v);
        else if (key == "spacing") s.min_spacing_deg = py::cast<double>(v);
        else if (key == "max_len") s.max_path_len = py::cast<int>(v);
        else if (key == "max_solutions") s.max_solutions = py::cast<std::uint64_t>(v);
        else if (key == "grid") s.grid_step = py::cast<double>(v);
        else if (key == "angle_tol") s.angle_tol_deg = py::cast<double>(v);
        else if (key == "length_tol") s.length_tol = py::cast<double>(v);
        else if (key == "max_nodes") s.max_nodes = py::cast<std::uint64_t>(v);
        else if (key == "distance") {
            const auto m = parse_distance_mode(py::cast<std::string>(v));
            if (!m) throw InputError("unknown distance mode");
            s.distance = *m;
        } else if (key == "cut") {
            const auto m = parse_cut_mode(py::cast<std::string>(v));
            if (!m) throw InputError("unknown cut mode");
            s.cut = *m;
        } else {
            throw InputError("unknown option '" + key + "'");
        }
    }
    s.check();
    return s;
}

py::list violations(const ValidationReport& r) {
    py::list out;
    for (const Violation& v : r.violations) {
        py::dict d;
        d["kind"] = std::string(violation_name(v.kind));
        d["atoms"] = v.atoms;
        d["measured"] = v.measured;
        d["allowed"] = py::make_tuple(v.allowed_lo, v.allowed_hi);
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_cagegen, m) {
    m.doc() = "Cage generation around guest molecules";
    m.attr("__version__") = CAGEGEN_VERSION;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_ArithmeticError);

    py::class_<Instance>(m, "Instance")
        .def_static("from_text", &from_text, py::arg("text"))
        .def_static("read", [](const std::string& path) { return read_instance(path); }, py::arg("path"))
        .def("to_text", &to_text)
        .def("write", [](const Instance& i, const std::string& path) { write_instance(path, i); }, py::arg("path"))
        .def("__len__", [](const Instance& i) { return i.graph.size(); })
        .def_property_readonly("atoms",
                               [](const Instance& i) {
                                   py::list out;
                                   for (const Atom& a : i.graph.atoms()) out.append(atom_dict(a));
                                   return out;
                               })
        .def_property_readonly("bonds",
                               [](const Instance& i) {
                                   py::list out;
                                   for (const Bond& b : i.graph.bonds()) out.append(py::make_tuple(b.a, b.b, b.relaxed));
                                   return out;
                               })
        .def_property_readonly("stats", [](const Instance& i) { return i.stats; })
        .def("xyz", [](const Instance& i, const std::string& comment) {
            std::ostringstream os;
            write_xyz_frame(os, i.graph, comment);
            return os.str();
        }, py::arg("comment") = "");

    m.def("validate",
          [](const Instance& i, double d_weak, double col) { return violations(validate(i.graph, chem(d_weak, col))); },
          py::arg("instance"), py::arg("d_weak") = 0.18, py::arg("col") = 0.1125,
          "List of constraint violations; empty when the instance is chemically realistic.");

    m.def("count_trees",
          [](const std::vector<int>& sizes) { return count_icts(MultipartiteGraph::from_sizes(sizes)); },
          py::arg("part_sizes"), "Number of interconnection trees of the complete multipartite graph.");

    m.def("trees",
          [](const std::vector<int>& sizes, std::size_t limit) {
              std::vector<std::vector<std::pair<int, int>>> out;
              enumerate_icts(MultipartiteGraph::from_sizes(sizes), [&](std::span<const IctEdge> es) {
                  std::vector<std::pair<int, int>> t;
                  for (const IctEdge& e : es) t.emplace_back(e.u, e.v);
                  out.push_back(std::move(t));
                  return out.size() < limit;
              });
              return out;
          },
          py::arg("part_sizes"), py::arg("limit") = 1000, "Up to `limit` trees as lists of vertex pairs.");

    m.def("benchmark_trees",
          [](int k, int l, bool sort) {
              const IctBenchmark b = benchmark_icts(k, l, sort);
              py::dict d;
              d["trees"] = b.trees;
              d["total_ms"] = b.enumerate_ms;
              d["delay_ns"] = b.delay_ns;
              d["storage_pct"] = b.storage_overhead_pct;
              d["sort_pct"] = b.sort_overhead_pct;
              return d;
          },
          py::arg("k"), py::arg("l"), py::arg("sort") = false);

    m.def("find_paths",
          [](const Instance& i, AtomId s, AtomId t, const py::kwargs& kw) {
              const SearchConfig cfg = search_from(kw);
              SearchStats st;
              std::vector<PathSolution> sols;
              {
                  py::gil_scoped_release nogil;
                  sols = construct_paths(i.graph, s, t, cfg, ChemParams{}, &st);
              }
              py::list out;
              for (const PathSolution& p : sols) {
                  py::dict d;
                  d["length"] = p.length();
                  d["nrmsd"] = p.nrmsd;
                  py::list carbons;
                  for (const Vec3& c : p.carbons) carbons.append(py::make_tuple(c.x(), c.y(), c.z()));
                  d["carbons"] = carbons;
                  out.append(d);
              }
              return py::make_tuple(out, py::dict(py::arg("nodes") = st.nodes, py::arg("seconds") = st.seconds));
          },
          py::arg("instance"), py::arg("s"), py::arg("t"),
          "Paths from atom s to atom t, shortest first. Search options as keyword arguments.");

    m.def("assemble",
          [](const Instance& i, const std::string& mode, bool early_edge_removal, int max_cages, double time_budget,
             int workers, const py::kwargs& kw) {
              PipelineConfig cfg;
              const auto tm = parse_tree_mode(mode);
              if (!tm) throw InputError("unknown mode '" + mode + "'");
              cfg.mode = *tm;
              cfg.early_edge_removal = early_edge_removal;
              cfg.max_cages = max_cages;
              cfg.time_budget = time_budget;
              cfg.workers = workers;
              cfg.search = search_from(kw);
              AssemblyResult r;
              {
                  py::gil_scoped_release nogil;
                  r = assemble(i.graph, cfg, ChemParams{});
              }
              py::list cages;
              for (const CageSolution& c : r.cages) {
                  Instance out;
                  out.graph = c.graph;
                  out.stats = cage_stat_records(c);
                  cages.append(py::cast(std::move(out)));
              }
              py::dict st;
              st["cages"] = r.stats.cages;
              st["trees_processed"] = r.stats.trees_processed;
              st["trees_skipped"] = r.stats.trees_skipped;
              st["mnoa"] = r.stats.mnoa;
              st["average_nrmsd"] = r.stats.average_nrmsd;
              st["seconds"] = r.stats.seconds;
              st["timed_out"] = r.stats.timed_out;
              st["summary"] = run_stats_row(cfg, r.stats);
              return py::make_tuple(cages, st);
          },
          py::arg("instance"), py::arg("mode") = "on_the_fly", py::arg("early_edge_removal") = true,
          py::arg("max_cages") = 10, py::arg("time_budget") = 120.0, py::arg("workers") = 1,
          "Cages as Instances plus a run statistics dict.");

    py::module_ fx = m.def_submodule("fixtures", "Synthetic instances");
    fx.def("small_cage", &fixtures::small_cage);
    fx.def("walled_endpoint", &fixtures::walled_endpoint);
    fx.def("methane", [] { return fixtures::as_instance(fixtures::ideal_methane()); });
    fx.def("corridor", [] {
        const auto pi = fixtures::corridor();
        return py::make_tuple(fixtures::as_instance(pi.world), pi.s, pi.t);
    });
}
