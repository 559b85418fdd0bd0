#include "cagegen/fixtures.hpp"

#include <array>
#include <cmath>

namespace cagegen::fixtures {

namespace {

Atom make(Element e, const Vec3& p, Role r, int group = -1, bool endpoint = false, Geometry g = Geometry::none) {
    Atom a;
    a.element = e;
    a.pos = p;
    a.role = r;
    a.group = group;
    a.endpoint = endpoint;
    a.geometry = g;
    return a;
}

const Vec3 kTetra[4] = {Vec3(1, 1, 1).normalized(), Vec3(1, -1, -1).normalized(), Vec3(-1, 1, -1).normalized(),
                        Vec3(-1, -1, 1).normalized()};

// Unit vector at `deg` from `axis`, tilted towards `toward`.
Vec3 tilt(const Vec3& axis, const Vec3& toward, double deg) {
    const Vec3 a = axis.normalized();
    Vec3 w = toward - toward.dot(a) * a;
    if (w.norm() < 1e-12) w = any_orthonormal(a);
    w.normalize();
    const double r = deg_to_rad(deg);
    return std::cos(r) * a + std::sin(r) * w;
}

void add_substrate(MolecularGraph& g, const Vec3& p, Element e = Element::C) {
    g.add_atom(make(e, p, Role::substrate));
}

}  // namespace

MolecularGraph ideal_methane() {
    MolecularGraph g;
    const AtomId c = g.add_atom(make(Element::C, Vec3::Zero(), Role::substrate));
    for (const Vec3& d : kTetra) g.add_bond(c, g.add_atom(make(Element::H, 0.1125 * d, Role::substrate)));
    return g;
}

MolecularGraph bent_methane(double hch_deg) {
    MolecularGraph g = ideal_methane();
    g.set_position(2, 0.1125 * tilt(kTetra[0], kTetra[1], hch_deg));
    return g;
}

AtomId add_hydroxyl(MolecularGraph& g, const Vec3& o, const Vec3& h_dir, int group) {
    const AtomId id = g.add_atom(make(Element::O, o, Role::pattern, group, true, Geometry::tetrahedral));
    const AtomId h = g.add_atom(make(Element::H, o + 0.1125 * h_dir.normalized(), Role::pattern, group));
    g.add_bond(id, h);
    return id;
}

std::array<AtomId, 2> add_diamine(MolecularGraph& g, const Vec3& c, const Vec3& out, const Vec3& along, int group,
                               double twist_deg) {
    const Vec3 u = out.normalized();
    const Vec3 v = (along - along.dot(u) * u).normalized();
    const Vec3 w = u.cross(v);
    const double half = deg_to_rad(kTetrahedralDeg / 2.0);
    const AtomId cid = g.add_atom(make(Element::C, c, Role::pattern, group));
    for (double sgn : {1.0, -1.0})
        g.add_bond(cid, g.add_atom(make(Element::H, c + 0.1125 * (std::cos(half) * u + sgn * std::sin(half) * w),
                                        Role::pattern, group)));
    std::array<AtomId, 2> ends{};
    for (int i = 0; i < 2; ++i) {
        const double sgn = i == 0 ? 1.0 : -1.0;
        const Vec3 o = c + 0.15 * (-std::cos(half) * u + sgn * std::sin(half) * v);
        const Vec3 back = (c - o).normalized();
        const double tw = deg_to_rad(sgn * twist_deg);
        const AtomId n = g.add_atom(make(Element::N, o, Role::pattern, group, true, Geometry::tetrahedral));
        const Vec3 h_dir = tilt(back, std::cos(tw) * u + std::sin(tw) * w, kTetrahedralDeg);
        g.add_bond(n, g.add_atom(make(Element::H, o + 0.1125 * h_dir, Role::pattern, group)));
        g.add_bond(cid, n);
        ends[static_cast<std::size_t>(i)] = n;
    }
    return ends;
}

Instance as_instance(MolecularGraph g) {
    Instance inst;
    inst.graph = std::move(g);
    return inst;
}

PathInstance one_carbon_bridge() {
    PathInstance pi;
    const Vec3 s = 0.15 * kTetra[0];
    const Vec3 t = 0.15 * kTetra[1];
    const Vec3 side = kTetra[0].cross(kTetra[1]);
    pi.s = add_hydroxyl(pi.world, s, tilt(-kTetra[0], side, kTetrahedralDeg), 0);
    pi.t = add_hydroxyl(pi.world, t, tilt(-kTetra[1], -side, kTetrahedralDeg), 1);
    return pi;
}

PathInstance open_pair(double separation) {
    PathInstance pi;
    pi.s = add_hydroxyl(pi.world, Vec3::Zero(), Vec3(-1, 0.2, 0), 0);
    pi.t = add_hydroxyl(pi.world, Vec3(separation, 0, 0), Vec3(1, 0.2, 0), 1);
    return pi;
}

// Hydroxyl endpoints at the origin and at (sep, 0, 0) with a substrate carbon
// wall at x = wall blocking y < y_top, so the way round is over the top edge.
PathInstance walled_pair(double sep, double wall, double y_top) {
    PathInstance pi;
    pi.s = add_hydroxyl(pi.world, Vec3::Zero(), Vec3(-1, 0.2, 0), 0);
    pi.t = add_hydroxyl(pi.world, Vec3(sep, 0, 0), Vec3(1, 0.2, 0), 1);
    for (double y = -0.75; y <= y_top + 1e-9; y += 0.15)
        for (double z = -0.75; z <= 0.75 + 1e-9; z += 0.15) add_substrate(pi.world, Vec3(wall, y, z));
    return pi;
}

PathInstance corridor() { return walled_pair(1.0, 0.40, 0.15); }

PathInstance constrained() { return walled_pair(0.8, 0.35, 0.15); }

namespace {

// Methane guest with three diamine patterns on a ring around it.
MolecularGraph diamine_ring(std::array<AtomId, 2>* first) {
    MolecularGraph g = ideal_methane();
    for (int i = 0; i < 3; ++i) {
        const double a = deg_to_rad(90.0 + 120.0 * i);
        const Vec3 u(std::cos(a), std::sin(a), 0.0);
        const auto ends = add_diamine(g, 0.45 * u, u, Vec3::UnitZ().cross(u), i, 180.0);
        if (i == 0 && first) *first = ends;
    }
    return g;
}

}  // namespace

Instance small_cage() { return as_instance(diamine_ring(nullptr)); }

Instance walled_endpoint() {
    std::array<AtomId, 2> first{};
    MolecularGraph g = diamine_ring(&first);
    // Substrate atoms sitting in both free tetrahedral slots of one N.
    const AtomId x = first[0];
    const Vec3 p = g.atom(x).pos;
    const auto nb = g.neighbors(x);
    const Vec3 u1 = (g.atom(nb[0]).pos - p).normalized();
    const Vec3 u2 = (g.atom(nb[1]).pos - p).normalized();
    const Vec3 b = -(u1 + u2).normalized();
    const Vec3 n = u1.cross(u2).normalized();
    const double h = deg_to_rad(kTetrahedralDeg / 2.0);
    for (double sgn : {1.0, -1.0}) add_substrate(g, p + 0.27 * (std::cos(h) * b + sgn * std::sin(h) * n));
    return as_instance(std::move(g));
}

}  // namespace cagegen::fixtures
