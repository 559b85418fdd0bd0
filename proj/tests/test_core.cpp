#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cagegen/error.hpp"
#include "cagegen/fixtures.hpp"
#include "cagegen/instance_io.hpp"
#include "cagegen/spatial_index.hpp"
#include "cagegen/validate.hpp"

using namespace cagegen;

namespace {

Atom atom_at(Element e, const Vec3& p, Role r = Role::substrate) {
    Atom a;
    a.element = e;
    a.pos = p;
    a.role = r;
    return a;
}

bool has_kind(const ValidationReport& r, ViolationKind k) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST_CASE("valences follow the element table") {
    CHECK(max_degree(Element::C) == 4);
    CHECK(max_degree(Element::N) == 3);
    CHECK(max_degree(Element::O) == 2);
    CHECK(max_degree(Element::H) == 1);
    CHECK(parse_element("N") == Element::N);
    CHECK_FALSE(parse_element("Xe").has_value());
}

TEST_CASE("default chemical parameters") {
    ChemParams p;
    CHECK(p.cov_heavy == 0.15);
    CHECK(p.cov_hydrogen == 0.1125);
    CHECK(p.col == 0.1125);
    CHECK(p.d_weak == 0.18);
    CHECK(p.rule(Geometry::tetrahedral).angle_deg == 109.5);
    CHECK(p.rule(Geometry::tetrahedral).margin_deg == 3.0);
    CHECK(p.rule(Geometry::triangular).angle_deg == 120.0);
    CHECK(p.rule(Geometry::triangular).margin_deg == 2.0);
    CHECK(p.rule(Geometry::linear).angle_deg == 180.0);
    CHECK(p.cov(Element::C, Element::H) == 0.1125);
    CHECK(p.cov(Element::C, Element::O) == 0.15);
    CHECK_NOTHROW(p.check());

    ChemParams bad = p;
    bad.d_weak = 0.1;
    CHECK_THROWS_AS(bad.check(), InputError);
    bad = p;
    bad.cov_heavy = 0.0;
    CHECK_THROWS_AS(bad.check(), InputError);
}

TEST_CASE("molecular graph rejects malformed bonds") {
    MolecularGraph g;
    const AtomId a = g.add_atom(atom_at(Element::C, Vec3::Zero()));
    const AtomId b = g.add_atom(atom_at(Element::C, Vec3(0.15, 0, 0)));
    g.add_bond(a, b);
    CHECK(g.bonded(a, b));
    CHECK(g.bonded(b, a));
    CHECK_THROWS_AS(g.add_bond(a, b), InputError);
    CHECK_THROWS_AS(g.add_bond(b, a), InputError);
    CHECK_THROWS_AS(g.add_bond(a, a), InputError);
    CHECK_THROWS_AS(g.add_bond(a, 7), InputError);
    CHECK(g.degree(a) == 1);
}

TEST_CASE("bond angles") {
    CHECK(bond_angle(Vec3(0.15, 0, 0), Vec3::Zero(), Vec3(0, 0.15, 0)) == doctest::Approx(90.0));
    CHECK(bond_angle(Vec3(0.15, 0, 0), Vec3::Zero(), Vec3(-0.15, 0, 0)) == doctest::Approx(180.0));
    CHECK_THROWS_AS(bond_angle(Vec3::Zero(), Vec3::Zero(), Vec3(1, 0, 0)), GeometryError);
    CHECK_THROWS_AS(bond_angle(Vec3(1, 0, 0), Vec3::Zero(), Vec3::Zero()), GeometryError);

    const MolecularGraph m = fixtures::ideal_methane();
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j)
            CHECK(std::abs(bond_angle(m.atom(i).pos, m.atom(0).pos, m.atom(j).pos) - 109.47) <= 0.01);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
        CHECK(bond_angle(a, b, c) == bond_angle(c, b, a));
    }
}

TEST_CASE("range query matches a linear scan") {
    SpatialIndex empty(0.18);
    CHECK(empty.range_query(Vec3::Zero(), 1.0).empty());

    SpatialIndex one(0.18);
    one.insert(0, Vec3::Zero());
    CHECK(one.range_query(Vec3::Zero(), 0.1) == std::vector<int>{0});

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        SpatialIndex idx(trial % 2 ? 0.18 : 0.07);
        std::vector<Vec3> pts;
        for (int i = 0; i < 100; ++i) {
            pts.emplace_back(u(rng), u(rng), u(rng));
            idx.insert(i, pts.back());
        }
        const Vec3 c(u(rng), u(rng), u(rng));
        const double r = trial < 500 ? 0.2 : 0.5 * u(rng);
        std::vector<int> expect;
        for (int i = 0; i < 100; ++i)
            if ((pts[static_cast<std::size_t>(i)] - c).norm() <= r) expect.push_back(i);
        REQUIRE(idx.range_query(c, r) == expect);
        bool strict_empty = true;
        for (const Vec3& p : pts) strict_empty = strict_empty && (p - c).norm() >= r;
        REQUIRE(idx.empty_within(c, r) == strict_empty);
    }
}

TEST_CASE("validation") {
    ChemParams p;
    SUBCASE("ideal methane passes") { CHECK(validate(fixtures::ideal_methane(), p).ok()); }

    SUBCASE("squeezed H-C-H angle") {
        const ValidationReport r = validate(fixtures::bent_methane(100.0), p);
        CHECK_FALSE(r.ok());
        CHECK(has_kind(r, ViolationKind::vsepr_angle));
        CHECK_FALSE(r.render().empty());
        CHECK(validate(fixtures::bent_methane(108.0), p).ok());
    }

    SUBCASE("collision") {
        MolecularGraph g;
        g.add_atom(atom_at(Element::C, Vec3::Zero()));
        g.add_atom(atom_at(Element::C, Vec3(0.05, 0, 0)));
        const ValidationReport r = validate(g, p);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].kind == ViolationKind::collision);
        CHECK(r.violations[0].measured == doctest::Approx(0.05));
    }

    SUBCASE("bond length") {
        MolecularGraph g;
        const AtomId a = g.add_atom(atom_at(Element::C, Vec3::Zero()));
        const AtomId b = g.add_atom(atom_at(Element::C, Vec3(0.16, 0, 0)));
        g.add_bond(a, b);
        CHECK(has_kind(validate(g, p), ViolationKind::bond_length));
        MolecularGraph r;
        const AtomId c = r.add_atom(atom_at(Element::C, Vec3::Zero()));
        const AtomId d = r.add_atom(atom_at(Element::C, Vec3(0.19, 0, 0)));
        r.add_bond(c, d, true);
        CHECK(validate(r, p).ok());
    }

    SUBCASE("valence") {
        MolecularGraph g;
        const AtomId o = g.add_atom(atom_at(Element::O, Vec3::Zero()));
        for (int i = 0; i < 3; ++i) {
            const double a = deg_to_rad(120.0 * i);
            g.add_bond(o, g.add_atom(atom_at(Element::H, 0.1125 * Vec3(std::cos(a), std::sin(a), 0))));
        }
        CHECK(has_kind(validate(g, p), ViolationKind::valence));
    }
}

TEST_CASE("instance text round trip") {
    Instance inst = fixtures::walled_endpoint();
    inst.stats.emplace_back("note", "x");
    std::stringstream ss;
    write_instance(ss, inst);
    const Instance back = parse_instance(ss);
    REQUIRE(back.graph.size() == inst.graph.size());
    REQUIRE(back.graph.bonds().size() == inst.graph.bonds().size());
    for (AtomId i = 0; i < static_cast<AtomId>(inst.graph.size()); ++i) {
        const Atom& a = inst.graph.atom(i);
        const Atom& b = back.graph.atom(i);
        CHECK(a.pos == b.pos);
        CHECK(a.element == b.element);
        CHECK(a.role == b.role);
        CHECK(a.group == b.group);
        CHECK(a.endpoint == b.endpoint);
        CHECK(a.geometry == b.geometry);
    }
    CHECK(back.stat("note") == "x");
}

TEST_CASE("parse errors name the line") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            parse_instance(in);
        } catch (const InputError& e) {
            const std::string msg = e.what();
            CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
            return;
        }
        FAIL("no error for: " << text);
    };
    fails_with("atom 0 C 0 0 0 substrate\natom 1 Q 0 0 0 substrate\n", "line 2");
    fails_with("atom 0 C 0 zero 0 substrate\n", "line 1");
    fails_with("atom 0 C 0 0 0 substrate\nbond 0 4\n", "line 2");
    fails_with("atom 1 C 0 0 0 substrate\n", "line 1");
    CHECK_THROWS_AS(read_instance("/nonexistent/file.cage"), IoError);
}

TEST_CASE("xyz export is in angstrom") {
    std::ostringstream os;
    write_xyz_frame(os, fixtures::ideal_methane(), "methane");
    std::istringstream in(os.str());
    int n = 0;
    std::string comment, el;
    in >> n;
    std::getline(in, comment);
    std::getline(in, comment);
    CHECK(n == 5);
    CHECK(comment == "methane");
    double x, y, z;
    in >> el >> x >> y >> z;
    CHECK(el == "C");
    in >> el >> x >> y >> z;
    CHECK(el == "H");
    CHECK(std::sqrt(x * x + y * y + z * z) == doctest::Approx(1.125));
}
