#include "cagegen/validate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cagegen/spatial_index.hpp"

namespace cagegen {

std::string_view violation_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::collision: return "collision";
        case ViolationKind::bond_length: return "bond_length";
        case ViolationKind::valence: return "valence";
        case ViolationKind::vsepr_angle: return "vsepr_angle";
    }
    return "?";
}

std::string ValidationReport::render() const {
    std::ostringstream os;
    if (ok()) {
        os << "ok\n";
        return os.str();
    }
    os << violations.size() << " violation(s)\n";
    for (const Violation& v : violations) {
        os << violation_name(v.kind) << "\tatoms=";
        for (std::size_t i = 0; i < v.atoms.size(); ++i) os << (i ? "," : "") << v.atoms[i];
        os << "\tmeasured=" << v.measured << "\tallowed=[" << v.allowed_lo << ", " << v.allowed_hi << "]\n";
    }
    return os.str();
}

ValidationReport validate(const MolecularGraph& graph, const ChemParams& params) {
    ValidationReport report;
    auto& out = report.violations;
    const auto n = static_cast<AtomId>(graph.size());

    // Collisions between non-bonded atoms. Distance exactly col is legal.
    SpatialIndex index(graph, std::max(params.col, 1e-3));
    for (AtomId i = 0; i < n; ++i) {
        const Vec3& p = graph.atom(i).pos;
        for (int j : index.range_query(p, params.col)) {
            if (j <= i || graph.bonded(i, j)) continue;
            const double d = (graph.atom(j).pos - p).norm();
            if (d < params.col) out.push_back({ViolationKind::collision, {i, j}, d, params.col, INFINITY});
        }
    }

    for (const Bond& b : graph.bonds()) {
        const double ideal = params.cov(graph.atom(b.a).element, graph.atom(b.b).element);
        const double tol = b.relaxed ? params.terminal_length_tol : params.bond_length_tol;
        const double d = (graph.atom(b.a).pos - graph.atom(b.b).pos).norm();
        if (std::abs(d - ideal) > tol)
            out.push_back({ViolationKind::bond_length, {b.a, b.b}, d, ideal - tol, ideal + tol});
    }

    for (AtomId i = 0; i < n; ++i) {
        const int limit = max_degree(graph.atom(i).element);
        if (graph.degree(i) > limit)
            out.push_back({ViolationKind::valence, {i}, static_cast<double>(graph.degree(i)), 0.0,
                           static_cast<double>(limit)});
    }

    for (AtomId c = 0; c < n; ++c) {
        const Geometry geo = effective_geometry(graph, c);
        if (geo == Geometry::none) continue;
        const VseprRule& rule = params.rule(geo);
        const auto nb = graph.neighbors(c);
        for (std::size_t x = 0; x < nb.size(); ++x) {
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const bool relaxed = graph.bonds()[static_cast<std::size_t>(graph.bond_index(c, nb[x]))].relaxed ||
                                     graph.bonds()[static_cast<std::size_t>(graph.bond_index(c, nb[y]))].relaxed;
                const double margin = relaxed ? params.terminal_angle_tol : rule.margin_deg;
                const Vec3& pc = graph.atom(c).pos;
                const Vec3& pa = graph.atom(nb[x]).pos;
                const Vec3& pb = graph.atom(nb[y]).pos;
                if (pa == pc || pb == pc) continue;  // already reported as a collision
                const double angle = bond_angle(pa, pc, pb);
                // Numeric slack keeps exactly-linear input legal under a zero margin.
                if (std::abs(angle - rule.angle_deg) > margin + 1e-9)
                    out.push_back({ViolationKind::vsepr_angle, {nb[x], c, nb[y]}, angle,
                                   rule.angle_deg - margin, rule.angle_deg + margin});
            }
        }
    }
    return report;
}

double min_path_substrate_distance(const MolecularGraph& graph) {
    double best = std::numeric_limits<double>::infinity();
    for (const Atom& a : graph.atoms()) {
        if (a.role != Role::path) continue;
        for (const Atom& s : graph.atoms())
            if (s.role == Role::substrate) best = std::min(best, (a.pos - s.pos).norm());
    }
    return best;
}

}  // namespace cagegen
