#pragma once

#include <span>
#include <vector>

#include "cagegen/chem.hpp"
#include "cagegen/geometry.hpp"

namespace cagegen {

using AtomId = int;

enum class Role : unsigned char { substrate, pattern, path };

struct Atom {
    Element element = Element::C;
    Vec3 pos = Vec3::Zero();
    Role role = Role::substrate;
    /// Binding-pattern id for Role::pattern, path index for Role::path, -1 otherwise.
    int group = -1;
    /// Eligible as a path endpoint (binding-pattern atoms only).
    bool endpoint = false;
    /// Declared VSEPR geometry; `none` lets degree decide (see effective_geometry).
    Geometry geometry = Geometry::none;
};

struct Bond {
    AtomId a;
    AtomId b;
    /// Terminal attachment bond of a path; validated with the relaxed tolerances.
    bool relaxed = false;
};

/// Atoms with coordinates (nm) and covalent bonds. Atom ids are indices.
class MolecularGraph {
public:
    AtomId add_atom(const Atom& atom);
    /// Throws InputError on unknown ids, self bonds and duplicates.
    void add_bond(AtomId a, AtomId b, bool relaxed = false);

    /// Appends all atoms and bonds of `other`; returns the id offset applied.
    AtomId append(const MolecularGraph& other);

    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    const Atom& atom(AtomId id) const { return atoms_.at(static_cast<std::size_t>(id)); }
    void set_position(AtomId id, const Vec3& pos) { atoms_.at(static_cast<std::size_t>(id)).pos = pos; }
    void set_role(AtomId id, Role role, int group);
    void set_endpoint(AtomId id, bool endpoint) { atoms_.at(static_cast<std::size_t>(id)).endpoint = endpoint; }
    void set_geometry(AtomId id, Geometry g) { atoms_.at(static_cast<std::size_t>(id)).geometry = g; }

    std::span<const Atom> atoms() const { return atoms_; }
    std::span<const Bond> bonds() const { return bonds_; }
    std::span<const AtomId> neighbors(AtomId id) const { return adjacency_.at(static_cast<std::size_t>(id)); }

    int degree(AtomId id) const { return static_cast<int>(neighbors(id).size()); }
    bool bonded(AtomId a, AtomId b) const;
    /// Index into bonds() of the bond a-b, or -1.
    int bond_index(AtomId a, AtomId b) const;

    /// Copy containing only atoms matching `keep`; `old_to_new` receives the id map (-1 if dropped).
    template <class Pred>
    MolecularGraph filtered(Pred keep, std::vector<AtomId>* old_to_new = nullptr) const;

private:
    std::vector<Atom> atoms_;
    std::vector<Bond> bonds_;
    std::vector<std::vector<AtomId>> adjacency_;
};

/// Declared geometry, or tetrahedral for any atom with four bonds, otherwise none.
Geometry effective_geometry(const MolecularGraph& g, AtomId id);

template <class Pred>
MolecularGraph MolecularGraph::filtered(Pred keep, std::vector<AtomId>* old_to_new) const {
    MolecularGraph out;
    std::vector<AtomId> map(atoms_.size(), -1);
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (keep(atoms_[i])) map[i] = out.add_atom(atoms_[i]);
    for (const Bond& b : bonds_) {
        const AtomId a = map[static_cast<std::size_t>(b.a)];
        const AtomId c = map[static_cast<std::size_t>(b.b)];
        if (a >= 0 && c >= 0) out.add_bond(a, c, b.relaxed);
    }
    if (old_to_new) *old_to_new = std::move(map);
    return out;
}

}  // namespace cagegen
