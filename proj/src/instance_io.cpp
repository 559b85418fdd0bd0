#include "cagegen/instance_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "cagegen/error.hpp"

namespace cagegen {
namespace {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class LineParser {
public:
    LineParser(int line_no, std::vector<std::string> tokens) : line_(line_no), tokens_(std::move(tokens)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        throw InputError("line " + std::to_string(line_) + ": field '" + field + "': " + msg);
    }

    const std::string& token(std::size_t i, const std::string& field) const {
        if (i >= tokens_.size()) fail(field, "missing");
        return tokens_[i];
    }

    double number(std::size_t i, const std::string& field) const {
        const std::string& t = token(i, field);
        double v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) fail(field, "not a number: '" + t + "'");
        return v;
    }

    int integer(const std::string& t, const std::string& field) const {
        int v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) fail(field, "not an integer: '" + t + "'");
        return v;
    }

    int integer(std::size_t i, const std::string& field) const { return integer(token(i, field), field); }

    std::size_t size() const { return tokens_.size(); }
    int line() const { return line_; }

private:
    int line_;
    std::vector<std::string> tokens_;
};

}  // namespace

std::string Instance::stat(const std::string& key) const {
    for (const auto& [k, v] : stats)
        if (k == key) return v;
    return {};
}

Instance parse_instance(std::istream& in) {
    Instance inst;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);
        if (tokens.empty()) continue;
        const LineParser p(line_no, tokens);
        const std::string& kind = tokens[0];

        if (kind == "units") {
            if (p.token(1, "units") != "nm") p.fail("units", "only 'nm' is supported");
        } else if (kind == "atom") {
            const int id = p.integer(1, "id");
            if (id != static_cast<int>(inst.graph.size()))
                p.fail("id", "expected " + std::to_string(inst.graph.size()) + ", got " + std::to_string(id));
            Atom a;
            const auto el = parse_element(p.token(2, "element"));
            if (!el) p.fail("element", "unknown element '" + tokens[2] + "'");
            a.element = *el;
            a.pos = Vec3(p.number(3, "x"), p.number(4, "y"), p.number(5, "z"));
            const std::string& role = p.token(6, "role");
            if (role == "substrate") a.role = Role::substrate;
            else if (role == "pattern") a.role = Role::pattern;
            else if (role == "path") a.role = Role::path;
            else p.fail("role", "unknown role '" + role + "'");
            for (std::size_t i = 7; i < p.size(); ++i) {
                const std::string& t = tokens[i];
                if (t == "endpoint") {
                    a.endpoint = true;
                } else if (t.rfind("group=", 0) == 0) {
                    a.group = p.integer(t.substr(6), "group");
                } else if (t.rfind("geometry=", 0) == 0) {
                    const auto g = parse_geometry(t.substr(9));
                    if (!g) p.fail("geometry", "unknown geometry '" + t.substr(9) + "'");
                    a.geometry = *g;
                } else {
                    p.fail("attribute", "unknown attribute '" + t + "'");
                }
            }
            if (a.role == Role::pattern && a.group < 0) p.fail("group", "pattern atoms need group=<id>");
            if (a.endpoint && a.role != Role::pattern) p.fail("endpoint", "only pattern atoms can be endpoints");
            inst.graph.add_atom(a);
        } else if (kind == "bond") {
            const int a = p.integer(1, "atom1");
            const int b = p.integer(2, "atom2");
            bool relaxed = false;
            if (p.size() > 3) {
                if (tokens[3] != "relaxed") p.fail("flag", "unknown bond flag '" + tokens[3] + "'");
                relaxed = true;
            }
            try {
                inst.graph.add_bond(a, b, relaxed);
            } catch (const InputError& e) {
                p.fail("bond", e.what());
            }
        } else if (kind == "stat") {
            std::string value;
            for (std::size_t i = 2; i < tokens.size(); ++i) value += (i > 2 ? " " : "") + tokens[i];
            inst.stats.emplace_back(p.token(1, "key"), value);
        } else {
            p.fail("record", "unknown record type '" + kind + "'");
        }
    }
    return inst;
}

Instance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_instance(in);
}

void write_instance(std::ostream& out, const Instance& inst) {
    out << "units nm\n";
    const MolecularGraph& g = inst.graph;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Atom& a = g.atoms()[i];
        out << "atom " << i << ' ' << symbol(a.element) << ' ' << fmt_double(a.pos.x()) << ' '
            << fmt_double(a.pos.y()) << ' ' << fmt_double(a.pos.z()) << ' ';
        switch (a.role) {
            case Role::substrate: out << "substrate"; break;
            case Role::pattern: out << "pattern"; break;
            case Role::path: out << "path"; break;
        }
        if (a.group >= 0) out << " group=" << a.group;
        if (a.endpoint) out << " endpoint";
        if (a.geometry != Geometry::none) out << " geometry=" << geometry_name(a.geometry);
        out << '\n';
    }
    for (const Bond& b : g.bonds()) out << "bond " << b.a << ' ' << b.b << (b.relaxed ? " relaxed" : "") << '\n';
    for (const auto& [k, v] : inst.stats) out << "stat " << k << ' ' << v << '\n';
}

void write_instance(const std::filesystem::path& path, const Instance& inst) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_instance(out, inst);
}

void write_xyz_frame(std::ostream& out, const MolecularGraph& graph, const std::string& comment) {
    out << graph.size() << '\n' << comment << '\n';
    char buf[128];
    for (const Atom& a : graph.atoms()) {
        std::snprintf(buf, sizeof buf, "%s %.6f %.6f %.6f\n", symbol(a.element).data(), a.pos.x() * 10.0,
                      a.pos.y() * 10.0, a.pos.z() * 10.0);
        out << buf;
    }
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cagegen
