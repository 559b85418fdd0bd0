#include "cagegen/chem.hpp"

#include "cagegen/error.hpp"

namespace cagegen {

std::optional<Element> parse_element(std::string_view s) {
    if (s == "C") return Element::C;
    if (s == "N") return Element::N;
    if (s == "O") return Element::O;
    if (s == "H") return Element::H;
    return std::nullopt;
}

std::string_view geometry_name(Geometry g) {
    switch (g) {
        case Geometry::none: return "none";
        case Geometry::tetrahedral: return "tetrahedral";
        case Geometry::triangular: return "triangular";
        case Geometry::linear: return "linear";
    }
    return "none";
}

std::optional<Geometry> parse_geometry(std::string_view s) {
    if (s == "none") return Geometry::none;
    if (s == "tetrahedral") return Geometry::tetrahedral;
    if (s == "triangular") return Geometry::triangular;
    if (s == "linear") return Geometry::linear;
    return std::nullopt;
}

const VseprRule& ChemParams::rule(Geometry g) const {
    switch (g) {
        case Geometry::tetrahedral: return tetrahedral;
        case Geometry::triangular: return triangular;
        case Geometry::linear: return linear;
        case Geometry::none: break;
    }
    throw Error("no VSEPR rule for geometry 'none'");
}

void ChemParams::check() const {
    if (!(cov_heavy > 0 && cov_hydrogen > 0 && col > 0 && d_weak > 0))
        throw InputError("chemical lengths must be strictly positive");
    if (!(d_weak > col)) throw InputError("d_weak must exceed the collision distance");
    if (!(terminal_angle_tol > 0 && terminal_length_tol > 0))
        throw InputError("terminal tolerances must be positive");
}

}  // namespace cagegen
