#pragma once

#include <optional>
#include <string_view>

namespace cagegen {

enum class Element : unsigned char { C, N, O, H };

/// Maximum number of covalent bonds per element (C 4, N 3, O 2, H 1).
constexpr int max_degree(Element e) {
    switch (e) {
        case Element::C: return 4;
        case Element::N: return 3;
        case Element::O: return 2;
        case Element::H: return 1;
    }
    return 0;
}

constexpr std::string_view symbol(Element e) {
    switch (e) {
        case Element::C: return "C";
        case Element::N: return "N";
        case Element::O: return "O";
        case Element::H: return "H";
    }
    return "?";
}

std::optional<Element> parse_element(std::string_view s);

/// VSEPR geometry of a central atom. `none` means no angle constraint applies.
enum class Geometry : unsigned char { none, tetrahedral, triangular, linear };

std::string_view geometry_name(Geometry g);
std::optional<Geometry> parse_geometry(std::string_view s);

struct VseprRule {
    double angle_deg;
    double margin_deg;
};

/// Chemical model constants. Lengths in nanometres, angles in degrees.
struct ChemParams {
    double cov_heavy = 0.15;
    double cov_hydrogen = 0.1125;
    double col = 0.1125;
    double d_weak = 0.18;

    VseprRule tetrahedral{109.5, 3.0};
    VseprRule triangular{120.0, 2.0};
    VseprRule linear{180.0, 0.0};

    /// Bond-length equality tolerance for validation.
    double bond_length_tol = 1e-6;
    /// Relaxed tolerances applied to bonds flagged as terminal attachments.
    double terminal_angle_tol = 10.0;
    double terminal_length_tol = 0.05;

    double cov(Element a, Element b) const {
        return (a == Element::H || b == Element::H) ? cov_hydrogen : cov_heavy;
    }

    /// Only a tetrahedral, triangular or linear geometry has a rule.
    const VseprRule& rule(Geometry g) const;

    /// Throws InputError unless all lengths are positive and d_weak > col.
    void check() const;
};

}  // namespace cagegen
