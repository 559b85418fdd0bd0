#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cagegen/chem.hpp"
#include "cagegen/molecule.hpp"

namespace cagegen {

enum class ViolationKind { collision, bond_length, valence, vsepr_angle };

std::string_view violation_name(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::vector<AtomId> atoms;
    double measured;
    double allowed_lo;
    double allowed_hi;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string render() const;
};

/// Checks the four chemical-realism constraints: non-bonded pairs at least
/// `col` apart, bond lengths equal to cov (relaxed bonds within the terminal
/// tolerance), degree within valence, and VSEPR angles within their margins.
/// Failures are reported, never thrown.
ValidationReport validate(const MolecularGraph& graph, const ChemParams& params);

/// Smallest distance from any atom with Role::path to any Role::substrate atom
/// (infinity when either set is empty).
double min_path_substrate_distance(const MolecularGraph& graph);

}  // namespace cagegen
