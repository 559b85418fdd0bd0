#include "cagegen/molecule.hpp"

#include <algorithm>
#include <string>

#include "cagegen/error.hpp"

namespace cagegen {

AtomId MolecularGraph::add_atom(const Atom& atom) {
    atoms_.push_back(atom);
    adjacency_.emplace_back();
    return static_cast<AtomId>(atoms_.size() - 1);
}

void MolecularGraph::add_bond(AtomId a, AtomId b, bool relaxed) {
    const auto n = static_cast<AtomId>(atoms_.size());
    if (a < 0 || b < 0 || a >= n || b >= n)
        throw InputError("bond references unknown atom " + std::to_string(a) + "-" + std::to_string(b));
    if (a == b) throw InputError("self bond on atom " + std::to_string(a));
    if (bonded(a, b))
        throw InputError("duplicate bond " + std::to_string(a) + "-" + std::to_string(b));
    bonds_.push_back({a, b, relaxed});
    adjacency_[static_cast<std::size_t>(a)].push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
}

AtomId MolecularGraph::append(const MolecularGraph& other) {
    const auto offset = static_cast<AtomId>(atoms_.size());
    for (const Atom& a : other.atoms_) add_atom(a);
    for (const Bond& b : other.bonds_) add_bond(b.a + offset, b.b + offset, b.relaxed);
    return offset;
}

void MolecularGraph::set_role(AtomId id, Role role, int group) {
    Atom& a = atoms_.at(static_cast<std::size_t>(id));
    a.role = role;
    a.group = group;
}

bool MolecularGraph::bonded(AtomId a, AtomId b) const {
    const auto& adj = adjacency_.at(static_cast<std::size_t>(a));
    return std::find(adj.begin(), adj.end(), b) != adj.end();
}

int MolecularGraph::bond_index(AtomId a, AtomId b) const {
    for (std::size_t i = 0; i < bonds_.size(); ++i) {
        const Bond& bd = bonds_[i];
        if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a)) return static_cast<int>(i);
    }
    return -1;
}

Geometry effective_geometry(const MolecularGraph& g, AtomId id) {
    const Atom& a = g.atom(id);
    if (a.geometry != Geometry::none) return a.geometry;
    return g.degree(id) == 4 ? Geometry::tetrahedral : Geometry::none;
}

}  // namespace cagegen
