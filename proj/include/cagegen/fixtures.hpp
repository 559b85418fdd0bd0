#pragma once

#include <array>
#include <cstdint>

#include "cagegen/instance_io.hpp"
#include "cagegen/molecule.hpp"

// Synthetic instances used by the tests, the acceptance suite and the bundled data files.
namespace cagegen::fixtures {

/// CH4 with ideal tetrahedral hydrogens, C at the origin.
MolecularGraph ideal_methane();

/// Methane with one hydrogen moved on its bond sphere so that one H-C-H angle equals `hch_deg`.
MolecularGraph bent_methane(double hch_deg);

/// Hydroxyl binding pattern: endpoint O at `o` (declared tetrahedral) bonded to an H
/// pointing along `h_dir`. Returns the O id.
AtomId add_hydroxyl(MolecularGraph& g, const Vec3& o, const Vec3& h_dir, int group);

/// Methanediamine pattern: carbon at `c` with its hydrogens towards `out` and
/// two endpoint NH groups spread along `along`; each N-H is turned by
/// `twist_deg` about its N-C bond. Returns the two N ids.
std::array<AtomId, 2> add_diamine(MolecularGraph& g, const Vec3& c, const Vec3& out, const Vec3& along, int group,
                               double twist_deg);

struct PathInstance {
    MolecularGraph world;
    AtomId s = -1;
    AtomId t = -1;
};

/// Two hydroxyl endpoints placed exactly where one ideal tetrahedral carbon bridges them.
PathInstance one_carbon_bridge();

/// Two hydroxyl endpoints facing each other across open space, `separation` nm apart.
PathInstance open_pair(double separation);

/// s and t on either side of a substrate wall; the only way round is a corridor along one edge.
PathInstance corridor();

/// Endpoints inside a cluttered substrate pocket, where a single candidate per step cannot finish.
PathInstance constrained();

/// Methane guest ringed by three two-endpoint diamine patterns, for full cage assembly.
Instance small_cage();

/// small_cage with both free slots of one endpoint N filled by substrate atoms, so every edge at it fails.
Instance walled_endpoint();

/// Instance with the given graph and no stats.
Instance as_instance(MolecularGraph g);

}  // namespace cagegen::fixtures
