#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "cagegen/error.hpp"
#include "cagegen/fixtures.hpp"
#include "cagegen/path_search.hpp"
#include "cagegen/validate.hpp"

using namespace cagegen;

namespace {

// Points b-c at distance `len`, angle a-b-c = `abc`, angle b-c-d = `bcd`, all in one plane.
std::array<Vec3, 4> terminal(double abc, double bcd, double len) {
    const Vec3 b = Vec3::Zero();
    const Vec3 c(len, 0, 0);
    const double r1 = deg_to_rad(abc), r2 = deg_to_rad(bcd);
    const Vec3 a = 0.15 * Vec3(std::cos(r1), std::sin(r1), 0);
    const Vec3 d = c + 0.15 * Vec3(-std::cos(r2), std::sin(r2), 0);
    return {a, b, c, d};
}

PathSolution with_world(const fixtures::PathInstance& pi, const SearchConfig& cfg, std::size_t* count = nullptr) {
    ChemParams p;
    const auto sols = construct_paths(pi.world, pi.s, pi.t, cfg, p);
    if (count) *count = sols.size();
    return sols.empty() ? PathSolution{} : sols.front();
}

void check_realistic(const fixtures::PathInstance& pi, const PathSolution& sol) {
    ChemParams p;
    MolecularGraph g = pi.world;
    splice_path(g, sol, 0);
    const ValidationReport r = validate(g, p);
    CHECK_MESSAGE(r.ok(), r.render());
    CHECK(min_path_substrate_distance(g) >= p.d_weak);
    CHECK(sol.nrmsd <= std::sqrt(3.0) + 1e-9);
}

}  // namespace

TEST_CASE("terminal nrmsd") {
    SearchConfig cfg;
    ChemParams p;
    auto at = [&](double abc, double bcd, double len) {
        const auto q = terminal(abc, bcd, len);
        return nrmsd_terminal(q[0], q[1], q[2], q[3], cfg, p);
    };
    CHECK(at(109.5, 109.5, 0.15) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(at(119.5, 99.5, 0.20) - std::sqrt(3.0)) < 1e-9);
    CHECK(std::abs(at(109.5, 109.5, 0.175) - 0.5) < 1e-9);
    CHECK_THROWS_AS(nrmsd_terminal(Vec3::Zero(), Vec3::Zero(), Vec3(1, 0, 0), Vec3(2, 0, 0), cfg, p), GeometryError);
}

TEST_CASE("attachment tolerances") {
    ChemParams p;
    SearchConfig cfg;
    const fixtures::PathInstance pi = fixtures::one_carbon_bridge();
    ObstacleField field(pi.world, p);
    const Vec3 s = pi.world.atom(pi.s).pos;

    const auto ok = try_attach(pi.world, field, s, Vec3::Zero(), pi.t, cfg, p);
    REQUIRE(ok.has_value());
    CHECK(ok->nrmsd < 0.01);

    // Same direction, 0.21 nm away from t.
    MolecularGraph far = pi.world;
    const Vec3 t = pi.world.atom(pi.t).pos;
    far.set_position(pi.t, t.normalized() * 0.21);
    far.set_position(pi.t + 1, pi.world.atom(pi.t + 1).pos + (far.atom(pi.t).pos - t));
    ObstacleField far_field(far, p);
    CHECK_FALSE(try_attach(far, far_field, s, Vec3::Zero(), pi.t, cfg, p).has_value());

    // Bend the s side so the angle at the tip is 10.5 degrees off.
    const Vec3 axis = s.cross(t).normalized();
    const Eigen::AngleAxisd rot(deg_to_rad(10.5 + (kTetrahedralDeg - 109.5)), axis);
    const Vec3 bent = rot * s;
    CHECK(std::abs(bond_angle(bent, Vec3::Zero(), t) - 109.5) > 10.0);
    CHECK_FALSE(try_attach(pi.world, field, bent, Vec3::Zero(), pi.t, cfg, p).has_value());
}

TEST_CASE("euclidean candidates") {
    const PlacementCircle c = placement_circle(Vec3(-0.15, 0, 0), Vec3::Zero(), 0.15, kTetrahedralDeg);
    const Vec3 target = c.center + 0.5 * c.vec1;
    const auto full = candidates_euclidean(AngularIntervalSet::full(), c, target, 12, 15.0);
    REQUIRE(full.size() == 12);
    CHECK(std::abs(full[0]) < 1e-9);
    std::set<long> degs;
    for (double th : full) degs.insert(std::lround(rad_to_deg(wrap_angle(th + 1e-9))) % 360);
    std::set<long> expect;
    for (int i = 0; i < 12; ++i) expect.insert(30 * i);
    CHECK(degs == expect);
    CHECK(std::abs(wrap_angle(full[1]) - deg_to_rad(30)) < 1e-9);
    CHECK(std::abs(wrap_angle(full[2]) - deg_to_rad(330)) < 1e-9);

    const auto half = candidates_euclidean(AngularIntervalSet::arc(deg_to_rad(90), deg_to_rad(180)), c, target, 12, 15.0);
    REQUIRE_FALSE(half.empty());
    CHECK(half[0] == doctest::Approx(deg_to_rad(90)).epsilon(1e-6));
    for (std::size_t i = 1; i < half.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(half[i] - half[j]) > 1e-9);

    CHECK(candidates_euclidean(AngularIntervalSet{}, c, target, 12, 15.0).empty());
}

TEST_CASE("uniform candidates") {
    const double pi = kPi;
    auto one = candidates_uniform(AngularIntervalSet::arc(0, pi), 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(pi / 2));

    auto three = candidates_uniform(AngularIntervalSet::arc(0, pi), 3);
    std::sort(three.begin(), three.end());
    REQUIRE(three.size() == 3);
    CHECK(three[0] == doctest::Approx(pi / 4));
    CHECK(three[1] == doctest::Approx(pi / 2));
    CHECK(three[2] == doctest::Approx(3 * pi / 4));

    const AngularIntervalSet two = AngularIntervalSet::arc(0, 2).unite(AngularIntervalSet::arc(3, 4));
    const auto split = candidates_uniform(two, 3);
    REQUIRE(split.size() == 3);
    CHECK(std::count_if(split.begin(), split.end(), [](double t) { return t < 2; }) == 2);

    CHECK(candidates_uniform(AngularIntervalSet{}, 4).empty());
}

TEST_CASE("length cuts") {
    ChemParams p;
    CHECK_FALSE(projected_length_cut(5, 1.5, kNoBound, CutMode::projected_length, p, 0.05));
    CHECK(projected_length_cut(3, 1.5, 5, CutMode::projected_length, p, 0.05));
    CHECK_FALSE(projected_length_cut(3, 1.5, 5, CutMode::none, p, 0.05));
    // Within one bond of the target: prunes iff current >= best.
    CHECK(projected_length_cut(4, 0.19, 4, CutMode::projected_length, p, 0.05));
    CHECK_FALSE(projected_length_cut(3, 0.19, 4, CutMode::projected_length, p, 0.05));
    CHECK(projected_length_cut(4, 1.5, 4, CutMode::min_length, p, 0.05));
    CHECK_FALSE(projected_length_cut(3, 1.5, 4, CutMode::min_length, p, 0.05));
}

TEST_CASE("config parsing and checks") {
    CHECK(parse_distance_mode("hybrid") == DistanceMode::hybrid);
    CHECK(parse_distance_mode("astar") == DistanceMode::discretized_astar);
    CHECK(parse_distance_mode("ssmta") == DistanceMode::discretized_ssmta);
    CHECK_FALSE(parse_distance_mode("nope").has_value());
    CHECK(parse_cut_mode("projected") == CutMode::projected_length);
    SearchConfig cfg;
    CHECK_NOTHROW(cfg.check());
    cfg.branching_factor = 0;
    CHECK_THROWS_AS(cfg.check(), InputError);
}

TEST_CASE("one carbon bridges a tetrahedral gap") {
    const fixtures::PathInstance pi = fixtures::one_carbon_bridge();
    CHECK((pi.world.atom(pi.s).pos - pi.world.atom(pi.t).pos).norm() == doctest::Approx(0.245).epsilon(0.01));
    const PathSolution sol = with_world(pi, SearchConfig{});
    REQUIRE(sol.length() == 1);
    CHECK(sol.atom_count() == 3);
    check_realistic(pi, sol);
}

TEST_CASE("open space paths are realistic and sorted") {
    ChemParams p;
    for (double sep : {0.3, 0.5, 0.8}) {
        const fixtures::PathInstance pi = fixtures::open_pair(sep);
        const auto sols = construct_paths(pi.world, pi.s, pi.t, SearchConfig{}, p);
        REQUIRE_FALSE(sols.empty());
        for (std::size_t i = 1; i < sols.size(); ++i) {
            const bool ordered = sols[i - 1].length() < sols[i].length() ||
                                 (sols[i - 1].length() == sols[i].length() && sols[i - 1].nrmsd <= sols[i].nrmsd);
            REQUIRE(ordered);
        }
        for (const PathSolution& s : sols) {
            check_realistic(pi, s);
            for (std::size_t k = 1; k < s.carbons.size(); ++k)
                CHECK(std::abs((s.carbons[k] - s.carbons[k - 1]).norm() - 0.15) < 1e-6);
            for (std::size_t k = 2; k < s.carbons.size(); ++k)
                CHECK(std::abs(bond_angle(s.carbons[k - 2], s.carbons[k - 1], s.carbons[k]) - kTetrahedralDeg) < 1e-6);
        }
    }
}

TEST_CASE("cuts keep the minimum-length solutions") {
    ChemParams p;
    for (double sep : {0.3, 0.5}) {
        const fixtures::PathInstance pi = fixtures::open_pair(sep);
        SearchConfig none;
        none.cut = CutMode::none;
        none.max_path_len = 5;
        SearchConfig proj = none;
        proj.cut = CutMode::projected_length;
        const auto a = construct_paths(pi.world, pi.s, pi.t, none, p);
        const auto b = construct_paths(pi.world, pi.s, pi.t, proj, p);
        REQUIRE_FALSE(a.empty());
        REQUIRE_FALSE(b.empty());
        CHECK(a.front().length() == b.front().length());
        auto shortest = [](const std::vector<PathSolution>& v) {
            std::set<std::vector<double>> out;
            for (const PathSolution& s : v) {
                if (s.length() != v.front().length()) break;
                std::vector<double> key;
                for (const Vec3& c : s.carbons) key.insert(key.end(), {c.x(), c.y(), c.z()});
                out.insert(key);
            }
            return out;
        };
        CHECK(shortest(a) == shortest(b));
    }
}

TEST_CASE("wider branching finds a superset") {
    ChemParams p;
    const fixtures::PathInstance pi = fixtures::open_pair(0.5);
    auto keys = [&](int b) {
        SearchConfig cfg;
        cfg.cut = CutMode::none;
        cfg.max_path_len = 5;
        cfg.branching_factor = b;
        std::set<std::vector<double>> out;
        for (const PathSolution& s : construct_paths(pi.world, pi.s, pi.t, cfg, p)) {
            std::vector<double> key;
            for (const Vec3& c : s.carbons) key.insert(key.end(), {c.x(), c.y(), c.z()});
            out.insert(key);
        }
        return out;
    };
    const auto two = keys(2), three = keys(3);
    CHECK_FALSE(two.empty());
    CHECK(std::includes(three.begin(), three.end(), two.begin(), two.end()));
    CHECK(three.size() >= two.size());
}

TEST_CASE("distance heuristics on the corridor") {
    const fixtures::PathInstance pi = fixtures::corridor();
    SearchConfig eu;
    eu.distance = DistanceMode::euclidean;
    std::size_t n = 0;
    with_world(pi, eu, &n);
    CHECK(n == 0);

    SearchConfig hy;
    const PathSolution h = with_world(pi, hy, &n);
    REQUIRE(n > 0);
    check_realistic(pi, h);

    SearchConfig as;
    as.distance = DistanceMode::discretized_astar;
    const PathSolution a = with_world(pi, as, &n);
    REQUIRE(n > 0);
    CHECK(a.length() == h.length());
    check_realistic(pi, a);
}

TEST_CASE("search limits") {
    ChemParams p;
    const fixtures::PathInstance pi = fixtures::open_pair(0.8);
    SearchConfig cfg;
    cfg.max_solutions = 1;
    CHECK(construct_paths(pi.world, pi.s, pi.t, cfg, p).size() == 1);

    cfg.max_solutions = 1'000'000;
    cfg.max_nodes = 10;
    SearchStats st;
    construct_paths(pi.world, pi.s, pi.t, cfg, p, &st);
    CHECK(st.truncated);
    CHECK(st.nodes <= 10);

    cfg.max_path_len = 2;
    cfg.max_nodes = 0;
    CHECK(construct_paths(pi.world, pi.s, pi.t, cfg, p).empty());

    CHECK_THROWS_AS(construct_paths(pi.world, pi.s, pi.s, SearchConfig{}, p), InputError);
    CHECK_THROWS_AS(construct_paths(pi.world, pi.s, 999, SearchConfig{}, p), InputError);
}
