#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cagegen/molecule.hpp"

namespace cagegen {

/// A molecular graph plus free-form `stat` records carried by emitted cage files.
///
/// Text format, one record per line, `#` starts a comment:
///
///     units nm
///     atom <id> <element> <x> <y> <z> <substrate|pattern|path> [group=<n>] [endpoint] [geometry=<g>]
///     bond <id> <id> [relaxed]
///     stat <key> <value>
///
/// Atom ids must be consecutive from 0 and coordinates are in nanometres.
struct Instance {
    MolecularGraph graph;
    std::vector<std::pair<std::string, std::string>> stats;

    /// Value of the first stat with this key, or empty.
    std::string stat(const std::string& key) const;
};

/// Parses instance text. Throws InputError naming the line and field on malformed input.
Instance parse_instance(std::istream& in);
/// Throws IoError if the file cannot be opened.
Instance read_instance(const std::filesystem::path& path);

void write_instance(std::ostream& out, const Instance& inst);
void write_instance(const std::filesystem::path& path, const Instance& inst);

/// One XYZ frame (element and coordinates in angstrom).
void write_xyz_frame(std::ostream& out, const MolecularGraph& graph, const std::string& comment);

/// 64-bit FNV-1a digest of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace cagegen
