#include "cagegen/binding_patterns.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SVD>
#include <boost/dynamic_bitset.hpp>

#include "cagegen/error.hpp"
#include "cagegen/spatial_index.hpp"

namespace cagegen {

std::string_view site_kind_name(SiteKind k) {
    switch (k) {
        case SiteKind::donor: return "donor";
        case SiteKind::acceptor: return "acceptor";
        case SiteKind::ring: return "ring";
    }
    return "?";
}

std::string_view pattern_kind_name(PatternKind k) {
    switch (k) {
        case PatternKind::hydrogen_donor: return "hydrogen_donor";
        case PatternKind::hydrogen_acceptor: return "hydrogen_acceptor";
        case PatternKind::aromatic_ring: return "aromatic_ring";
    }
    return "?";
}

namespace {

bool is_heteroatom(Element e) { return e == Element::O || e == Element::N; }

Atom pattern_atom(Element e, const Vec3& p, bool endpoint, Geometry g) {
    Atom a;
    a.element = e;
    a.pos = p;
    a.role = Role::pattern;
    a.endpoint = endpoint;
    a.geometry = g;
    return a;
}

struct Plane {
    Vec3 centroid;
    Vec3 normal;
    double max_offset;
};

Plane fit_plane(const MolecularGraph& g, std::span<const AtomId> ids) {
    Vec3 c = Vec3::Zero();
    for (AtomId id : ids) c += g.atom(id).pos;
    c /= static_cast<double>(ids.size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(ids.size()), 3);
    for (std::size_t i = 0; i < ids.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = (g.atom(ids[i]).pos - c).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    const Vec3 n = svd.matrixV().col(2).normalized();
    double worst = 0.0;
    for (AtomId id : ids) worst = std::max(worst, std::abs((g.atom(id).pos - c).dot(n)));
    return {c, n, worst};
}

// Simple carbon cycles of length 5 or 6, each reported once starting from its
// smallest atom and walking towards the smaller of its two ring neighbours.
void find_rings(const MolecularGraph& g, std::vector<std::vector<AtomId>>& out) {
    const int n = static_cast<int>(g.size());
    std::vector<AtomId> path;
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    auto carbon = [&](AtomId id) { return g.atom(id).element == Element::C; };

    auto dfs = [&](auto& self, AtomId start, AtomId v) -> void {
        for (AtomId w : g.neighbors(v)) {
            if (!carbon(w) || w < start) continue;
            if (w == start && path.size() >= 5 && path[1] < path.back()) out.push_back(path);
            if (on_path[static_cast<std::size_t>(w)] || path.size() >= 6) continue;
            path.push_back(w);
            on_path[static_cast<std::size_t>(w)] = 1;
            self(self, start, w);
            on_path[static_cast<std::size_t>(w)] = 0;
            path.pop_back();
        }
    };
    for (AtomId s = 0; s < n; ++s) {
        if (!carbon(s)) continue;
        path.assign(1, s);
        on_path[static_cast<std::size_t>(s)] = 1;
        dfs(dfs, s, s);
        on_path[static_cast<std::size_t>(s)] = 0;
    }
}

bool clear_of_substrate(const MolecularGraph& frag, const MolecularGraph& substrate, const SpatialIndex& index,
                        double col, std::span<const AtomId> partners) {
    for (const Atom& a : frag.atoms())
        for (int id : index.range_query(a.pos, col)) {
            if (std::find(partners.begin(), partners.end(), id) != partners.end()) continue;
            if ((substrate.atom(id).pos - a.pos).norm() < col) return false;
        }
    return true;
}

}  // namespace

std::vector<Site> detect_sites(const MolecularGraph& substrate, const PlacementConfig& cfg) {
    std::vector<Site> sites;
    std::vector<std::vector<AtomId>> rings;
    find_rings(substrate, rings);
    for (auto& r : rings)
        if (fit_plane(substrate, r).max_offset <= cfg.planarity_tol) sites.push_back({SiteKind::ring, std::move(r)});

    for (AtomId id = 0; id < static_cast<AtomId>(substrate.size()); ++id) {
        const Atom& a = substrate.atom(id);
        if (a.element == Element::H) {
            for (AtomId d : substrate.neighbors(id))
                if (is_heteroatom(substrate.atom(d).element)) sites.push_back({SiteKind::donor, {id, d}});
        } else if (is_heteroatom(a.element) && substrate.degree(id) < max_degree(a.element)) {
            sites.push_back({SiteKind::acceptor, {id}});
        }
    }
    return sites;
}

std::vector<BindingPattern> place_candidates(const Site& site, int site_index, const MolecularGraph& substrate,
                                             const ChemParams& params, const PlacementConfig& cfg) {
    std::vector<BindingPattern> out;
    const SpatialIndex index(substrate, std::max(params.col, 0.05));

    auto keep = [&](BindingPattern bp, std::span<const AtomId> partners) {
        if (clear_of_substrate(bp.fragment, substrate, index, params.col, partners)) {
            bp.site = site_index;
            out.push_back(std::move(bp));
        }
    };

    switch (site.kind) {
        case SiteKind::donor: {
            // Acceptor O on the D-H axis; its H is swept around the axis at the
            // tetrahedral angle from the H...O direction.
            const Vec3 h = substrate.atom(site.atoms[0]).pos;
            const Vec3 u = (h - substrate.atom(site.atoms[1]).pos).normalized();
            const Vec3 o = h + params.d_weak * u;
            const Vec3 e1 = any_orthonormal(u);
            const Vec3 e2 = u.cross(e1);
            const double tilt = deg_to_rad(180.0 - kTetrahedralDeg);
            const int n = std::max(1, cfg.rotations);
            for (int i = 0; i < n; ++i) {
                const double phi = 2.0 * std::numbers::pi * i / n;
                const Vec3 dir = std::cos(tilt) * u + std::sin(tilt) * (std::cos(phi) * e1 + std::sin(phi) * e2);
                BindingPattern bp{PatternKind::hydrogen_acceptor, {}, {}, -1};
                const AtomId oid = bp.fragment.add_atom(pattern_atom(Element::O, o, true, Geometry::tetrahedral));
                bp.fragment.add_bond(oid, bp.fragment.add_atom(pattern_atom(Element::H, o + params.cov_hydrogen * dir,
                                                                            false, Geometry::none)));
                bp.endpoints = {oid};
                keep(std::move(bp), site.atoms);
            }
            break;
        }
        case SiteKind::acceptor: {
            // O-H pointing at the acceptor along its lone-pair direction.
            const AtomId aid = site.atoms[0];
            const Vec3 a = substrate.atom(aid).pos;
            Vec3 l = Vec3::Zero();
            for (AtomId nb : substrate.neighbors(aid)) l -= (substrate.atom(nb).pos - a).normalized();
            if (l.norm() < 1e-9) l = substrate.degree(aid) ? any_orthonormal(substrate.atom(substrate.neighbors(aid)[0]).pos - a)
                                                             : Vec3::UnitZ();
            l.normalize();
            const Vec3 h = a + params.d_weak * l;
            BindingPattern bp{PatternKind::hydrogen_donor, {}, {}, -1};
            const AtomId oid =
                bp.fragment.add_atom(pattern_atom(Element::O, h + params.cov_hydrogen * l, true, Geometry::tetrahedral));
            bp.fragment.add_bond(oid, bp.fragment.add_atom(pattern_atom(Element::H, h, false, Geometry::none)));
            bp.endpoints = {oid};
            keep(std::move(bp), site.atoms);
            break;
        }
        case SiteKind::ring: {
            const Plane plane = fit_plane(substrate, site.atoms);
            const Geometry geo = site.atoms.size() == 6 ? Geometry::triangular : Geometry::none;
            for (double side : {1.0, -1.0}) {
                BindingPattern bp{PatternKind::aromatic_ring, {}, {}, -1};
                const Vec3 shift = side * cfg.stacking_distance * plane.normal;
                for (AtomId id : site.atoms) {
                    const AtomId c = bp.fragment.add_atom(pattern_atom(Element::C, substrate.atom(id).pos + shift, true, geo));
                    bp.endpoints.push_back(c);
                }
                const int n = static_cast<int>(site.atoms.size());
                for (int i = 0; i < n; ++i) bp.fragment.add_bond(i, (i + 1) % n);
                keep(std::move(bp), {});
            }
            break;
        }
    }
    return out;
}

std::vector<BindingPattern> all_candidates(const MolecularGraph& substrate, const ChemParams& params,
                                           const PlacementConfig& cfg) {
    const std::vector<Site> sites = detect_sites(substrate, cfg);
    std::vector<BindingPattern> rings, hydrogen;
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (BindingPattern& bp : place_candidates(sites[i], static_cast<int>(i), substrate, params, cfg))
            (bp.kind == PatternKind::aromatic_ring ? rings : hydrogen).push_back(std::move(bp));
    for (BindingPattern& bp : hydrogen) rings.push_back(std::move(bp));
    return rings;
}

bool ConflictGraph::has_edge(int a, int b) const {
    const auto& adj = adjacency.at(static_cast<std::size_t>(a));
    return std::binary_search(adj.begin(), adj.end(), b);
}

void ConflictGraph::add_edge(int a, int b) {
    if (a == b) throw InputError("conflict graph: self loop");
    if (has_edge(a, b)) return;
    auto insert = [](std::vector<int>& v, int x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); };
    insert(adjacency.at(static_cast<std::size_t>(a)), b);
    insert(adjacency.at(static_cast<std::size_t>(b)), a);
}

ConflictGraph build_conflict_graph(std::span<const BindingPattern> candidates, const ChemParams& params) {
    ConflictGraph g;
    const int n = static_cast<int>(candidates.size());
    g.adjacency.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const BindingPattern& a = candidates[static_cast<std::size_t>(i)];
            const BindingPattern& b = candidates[static_cast<std::size_t>(j)];
            bool clash = a.site >= 0 && a.site == b.site;
            for (const Atom& x : a.fragment.atoms()) {
                if (clash) break;
                for (const Atom& y : b.fragment.atoms())
                    if ((x.pos - y.pos).norm() < params.d_weak) {
                        clash = true;
                        break;
                    }
            }
            if (clash) g.add_edge(i, j);
        }
    return g;
}

namespace {

using Bits = boost::dynamic_bitset<>;

class BronKerbosch {
public:
    BronKerbosch(const ConflictGraph& g, const SetVisitor& visit) : visit_(visit) {
        const std::size_t n = static_cast<std::size_t>(g.size());
        compatible_.assign(n, Bits(n));
        for (std::size_t v = 0; v < n; ++v) {
            compatible_[v].set();
            compatible_[v].reset(v);
            for (int w : g.adjacency[v]) compatible_[v].reset(static_cast<std::size_t>(w));
        }
    }

    std::size_t run(Bits p) {
        Bits x(p.size());
        recurse(p, x);
        return found_;
    }

private:
    bool recurse(Bits& p, Bits& x) {
        if (p.none()) {
            if (x.none()) {
                ++found_;
                return visit_(set_);
            }
            return true;
        }
        // Pivot maximising |P ∩ N(u)| in the complement graph.
        std::size_t pivot = Bits::npos, best = 0;
        const Bits px = p | x;
        for (std::size_t u = px.find_first(); u != Bits::npos; u = px.find_next(u)) {
            const std::size_t c = (p & compatible_[u]).count();
            if (pivot == Bits::npos || c > best) pivot = u, best = c;
        }
        const Bits todo = p - compatible_[pivot];
        for (std::size_t v = todo.find_first(); v != Bits::npos; v = todo.find_next(v)) {
            Bits p2 = p & compatible_[v];
            Bits x2 = x & compatible_[v];
            set_.insert(std::lower_bound(set_.begin(), set_.end(), static_cast<int>(v)), static_cast<int>(v));
            const bool more = recurse(p2, x2);
            set_.erase(std::lower_bound(set_.begin(), set_.end(), static_cast<int>(v)));
            if (!more) return false;
            p.reset(v);
            x.set(v);
        }
        return true;
    }

    const SetVisitor& visit_;
    std::vector<Bits> compatible_;
    std::vector<int> set_;
    std::size_t found_ = 0;
};

}  // namespace

std::size_t maximal_independent_sets(const ConflictGraph& g, const SetVisitor& visit, std::span<const int> among) {
    const std::size_t n = static_cast<std::size_t>(g.size());
    Bits p(n);
    if (among.empty()) {
        p.set();
    } else {
        for (int v : among) p.set(static_cast<std::size_t>(v));
    }
    if (n == 0) {
        visit({});
        return 1;
    }
    return BronKerbosch(g, visit).run(std::move(p));
}

std::vector<std::vector<int>> select_pattern_sets(std::span<const BindingPattern> candidates, const ConflictGraph& g,
                                                  std::size_t limit) {
    std::vector<std::vector<int>> out;
    if (limit == 0) return out;
    std::vector<int> rings, hydrogen;
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i)
        (candidates[static_cast<std::size_t>(i)].kind == PatternKind::aromatic_ring ? rings : hydrogen).push_back(i);

    auto complete = [&](std::span<const int> ring_set) {
        std::vector<int> free;
        for (int h : hydrogen)
            if (std::none_of(ring_set.begin(), ring_set.end(), [&](int r) { return g.has_edge(h, r); }))
                free.push_back(h);
        auto emit = [&](std::span<const int> hs) {
            std::vector<int> s(ring_set.begin(), ring_set.end());
            s.insert(s.end(), hs.begin(), hs.end());
            std::sort(s.begin(), s.end());
            out.push_back(std::move(s));
            return out.size() < limit;
        };
        if (free.empty()) return emit({});
        bool more = true;
        maximal_independent_sets(g, [&](std::span<const int> hs) { return more = emit(hs); }, free);
        return more;
    };

    if (rings.empty()) {
        complete({});
    } else {
        maximal_independent_sets(g, [&](std::span<const int> rs) { return complete(rs); }, rings);
    }
    return out;
}

MolecularGraph assemble_instance(const MolecularGraph& substrate, std::span<const BindingPattern> candidates,
                                 std::span<const int> chosen) {
    MolecularGraph g = substrate;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const BindingPattern& bp = candidates[static_cast<std::size_t>(chosen[i])];
        const AtomId off = g.append(bp.fragment);
        for (AtomId id = 0; id < static_cast<AtomId>(bp.fragment.size()); ++id) {
            g.set_role(off + id, Role::pattern, static_cast<int>(i));
            g.set_endpoint(off + id, std::find(bp.endpoints.begin(), bp.endpoints.end(), id) != bp.endpoints.end());
        }
    }
    return g;
}

}  // namespace cagegen
