#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "varpoly/errors.hpp"
#include "varpoly/polyhedral.hpp"

using namespace varpoly;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Vec vec(std::initializer_list<double> data) {
    Vec v(static_cast<int>(data.size()));
    int i = 0;
    for (double x : data) v[i++] = x;
    return v;
}

PolyhedralFunction abs1() {
    return PolyhedralFunction({vec({1}), vec({-1})}, {0, 0}, {}, {});
}

PolyhedralFunction halfline_ind() {
    return PolyhedralFunction({vec({0})}, {0}, {vec({1})}, {0});
}

PolyhedralFunction max3() {
    return PolyhedralFunction({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}, {0, 0, 0}, {},
                              {});
}

// random polyhedral function on R^2: a few pieces, a box domain
PolyhedralFunction random_pf(Rng& rng) {
    std::vector<Vec> a;
    std::vector<double> alpha;
    int pieces = 2 + static_cast<int>(rng.uniform01() * 3);
    for (int j = 0; j < pieces; ++j) {
        a.push_back(vec({rng.uniform(-2, 2), rng.uniform(-2, 2)}));
        alpha.push_back(rng.uniform(-1, 1));
    }
    std::vector<Vec> b{vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})};
    std::vector<double> beta{2, 2, 2, 2};
    return PolyhedralFunction(a, alpha, b, beta);
}

}  // namespace

TEST_CASE("max-affine evaluation and domain rows") {
    PolyhedralFunction g = abs1();
    CHECK(eval(g, vec({0.3})) == doctest::Approx(0.3));
    CHECK(eval(g, vec({-2})) == doctest::Approx(2));
    CHECK(eval(g, vec({0})) == doctest::Approx(0));

    PolyhedralFunction h = halfline_ind();
    CHECK(eval(h, vec({-1})) == doctest::Approx(0));
    CHECK(eval(h, vec({0})) == doctest::Approx(0));
    CHECK(eval(h, vec({0.5})) == kInf);
}

TEST_CASE("construction rejects bad data") {
    CHECK_THROWS_AS(PolyhedralFunction({}, {}, {}, {}), PreconditionError);
    // empty domain: z <= -1 and z >= 2
    CHECK_THROWS_AS(
        PolyhedralFunction({vec({1})}, {0}, {vec({1}), vec({-1})}, {-1, -2}),
        PreconditionError);
    // mismatched offsets
    CHECK_THROWS_AS(PolyhedralFunction({vec({1})}, {0, 0}, {}, {}), PreconditionError);
}

TEST_CASE("active sets at kinks and in smooth regions") {
    PolyhedralFunction g = abs1();
    ActiveSets at0 = active_sets(g, vec({0}));
    CHECK(at0.pieces.size() == 2);
    ActiveSets atpos = active_sets(g, vec({1}));
    REQUIRE(atpos.pieces.size() == 1);
    CHECK(atpos.pieces[0] == 0);

    PolyhedralFunction h = halfline_ind();
    CHECK(active_sets(h, vec({0})).rows.size() == 1);
    CHECK(active_sets(h, vec({-1})).rows.empty());
    CHECK_THROWS_AS(active_sets(h, vec({1})), PreconditionError);
}

TEST_CASE("subdifferential of the absolute value at the kink") {
    PolyhedralFunction g = abs1();
    PolytopeRep P = subdifferential(g, vec({0}));
    CHECK(member(P, vec({0.3})));
    CHECK(member(P, vec({1})));
    CHECK(member(P, vec({-1})));
    CHECK_FALSE(member(P, vec({1.001})));
    CHECK(ri_member(P, vec({0})));
    CHECK_FALSE(ri_member(P, vec({1})));  // endpoint of the interval
}

TEST_CASE("subdifferential of a domain indicator is the normal cone") {
    PolyhedralFunction h = halfline_ind();
    PolytopeRep P = subdifferential(h, vec({0}));
    CHECK(member(P, vec({5})));
    CHECK(member(P, vec({0})));
    CHECK_FALSE(member(P, vec({-0.1})));
    // in the interior the normal cone collapses to the gradient {0}
    PolytopeRep Q = subdifferential(h, vec({-1}));
    CHECK(member(Q, vec({0})));
    CHECK_FALSE(member(Q, vec({0.1})));
}

TEST_CASE("subdifferential of a three-way max at the corner is the simplex") {
    PolyhedralFunction g = max3();
    PolytopeRep P = subdifferential(g, vec({0, 0, 0}));
    CHECK(member(P, vec({1, 0, 0})));
    CHECK(member(P, vec({1.0 / 3, 1.0 / 3, 1.0 / 3})));
    CHECK(ri_member(P, vec({1.0 / 3, 1.0 / 3, 1.0 / 3})));
    CHECK_FALSE(ri_member(P, vec({1, 0, 0})));
    CHECK_FALSE(member(P, vec({0.5, 0.5, 0.5})));  // off the affine hull
}

TEST_CASE("subgradient inequality holds for sampled subgradients") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        PolyhedralFunction g = random_pf(rng);
        Vec z = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        PolytopeRep P = subdifferential(g, z);
        double gz = eval(g, z);
        for (const Vec& v : P.points) {
            for (int k = 0; k < 10; ++k) {
                Vec z2 = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
                double gz2 = eval(g, z2);
                if (!std::isfinite(gz2)) continue;
                CHECK(gz2 >= gz + v.dot(z2 - z) - 1e-9);
            }
        }
    }
}

TEST_CASE("critical cone of the absolute value at both kinds of subgradient") {
    PolyhedralFunction g = abs1();
    // boundary subgradient 1: only the descent-blocking piece constrains
    ConeRep K1 = critical_cone(g, vec({0}), vec({1}));
    CHECK(member(K1, vec({2})));
    CHECK_FALSE(member(K1, vec({-1e-3})));
    // interior subgradient 0: cone collapses to the origin
    ConeRep K0 = critical_cone(g, vec({0}), vec({0}));
    CHECK(member(K0, vec({0})));
    CHECK_FALSE(member(K0, vec({1e-3})));
    CHECK_FALSE(member(K0, vec({-1e-3})));
    CHECK(cone_is_subspace(K0));
    // a non-subgradient is refused
    CHECK_THROWS_AS(critical_cone(g, vec({0}), vec({2})), PreconditionError);
}

TEST_CASE("critical cone matches its dual definition on random instances") {
    // K_g(z, lambda) = { y : dg(z)(y) = <lambda, y> }; every generator of the
    // computed cone must satisfy the directional-derivative identity
    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        PolyhedralFunction g = random_pf(rng);
        Vec z = vec({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        PolytopeRep P = subdifferential(g, z);
        if (P.points.empty()) continue;
        Vec lambda = P.points[static_cast<size_t>(rng.uniform01() * P.points.size()) %
                              P.points.size()];
        ConeRep K = dd_convert(critical_cone(g, z, lambda));
        ActiveSets act = active_sets(g, z);
        for (const Vec& y : *K.generators) {
            double dd = -kInf;
            for (int j : act.pieces) dd = std::max(dd, g.a[static_cast<size_t>(j)].dot(y));
            bool tangent = true;
            for (int i : act.rows)
                if (g.b[static_cast<size_t>(i)].dot(y) > 1e-9) tangent = false;
            CHECK(tangent);
            if (tangent) CHECK(dd == doctest::Approx(lambda.dot(y)).epsilon(1e-9));
            ++checked;
        }
    }
    CHECK(checked > 20);  // the sweep actually exercised generators
}

TEST_CASE("relative interior membership implies membership") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        PolyhedralFunction g = random_pf(rng);
        Vec z = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        PolytopeRep P = subdifferential(g, z);
        Vec probe = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        if (ri_member(P, probe)) CHECK(member(P, probe));
        for (const Vec& p : P.points) CHECK(member(P, p));
    }
}

TEST_CASE("projection onto polytopes and cones") {
    // segment [-1, 1]
    PolytopeRep seg{1, {vec({-1}), vec({1})}, {}};
    CHECK(polytope_project(seg, vec({5}))[0] == doctest::Approx(1));
    CHECK(polytope_project(seg, vec({-3}))[0] == doctest::Approx(-1));
    CHECK(polytope_project(seg, vec({0.2}))[0] == doctest::Approx(0.2));
    CHECK(polytope_dist(seg, vec({5})) == doctest::Approx(4));

    // ray {0} + cone{1}
    PolytopeRep ray{1, {vec({0})}, {vec({1})}};
    CHECK(polytope_project(ray, vec({-3}))[0] == doctest::Approx(0));
    CHECK(polytope_project(ray, vec({2}))[0] == doctest::Approx(2));

    // triangle in R^2: projection of an outside point onto an edge
    PolytopeRep tri{2, {vec({0, 0}), vec({1, 0}), vec({0, 1})}, {}};
    Vec p = polytope_project(tri, vec({1, 1}));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));

    // projection is idempotent and nonexpansive on random probes
    Rng rng(3);
    for (int k = 0; k < 30; ++k) {
        Vec y1 = vec({rng.uniform(-3, 3), rng.uniform(-3, 3)});
        Vec y2 = vec({rng.uniform(-3, 3), rng.uniform(-3, 3)});
        Vec p1 = polytope_project(tri, y1);
        Vec p2 = polytope_project(tri, y2);
        CHECK((polytope_project(tri, p1) - p1).norm() <= 1e-9);
        CHECK((p1 - p2).norm() <= (y1 - y2).norm() + 1e-9);
    }
}

TEST_CASE("normal cone of a cone at a boundary point") {
    ConeRep orthant = ConeRep::from_generators(2, {vec({1, 0}), vec({0, 1})});
    // at an interior-of-face point (1, 0): normals are the nonpositive e2 axis
    ConeRep N = normal_cone_at(orthant, vec({1, 0}));
    CHECK(member(N, vec({0, -1})));
    CHECK_FALSE(member(N, vec({0, 1e-3})));
    CHECK_FALSE(member(N, vec({-1e-3, 0})));
    // at the apex the normal cone is the polar
    ConeRep N0 = normal_cone_at(orthant, vec({0, 0}));
    CHECK(cone_equal(N0, polar(orthant)));
    // outside points are refused
    CHECK_THROWS_AS(normal_cone_at(orthant, vec({-1, 0})), PreconditionError);
}

TEST_CASE("cone/subspace predicates") {
    ConeRep orthant = ConeRep::from_generators(2, {vec({1, 0}), vec({0, 1})});
    LinSubspace diag = LinSubspace::from_spanning_set({vec({1, -1})}, 2, 1e-9);
    LinSubspace axis = LinSubspace::from_spanning_set({vec({1, 0})}, 2, 1e-9);
    CHECK(cone_meets_subspace_trivially(orthant, diag));
    CHECK_FALSE(cone_meets_subspace_trivially(orthant, axis));
    CHECK_FALSE(cone_is_subspace(orthant));

    ConeRep halfplane = ConeRep::from_halfspaces(2, {vec({0, 1})});
    // halfspace normals h cut out {x : <h,x> <= 0}: {-e1, -e2} is the
    // nonnegative orthant again, {e1, e2} is the opposite one
    CHECK(cone_contained(orthant, ConeRep::from_halfspaces(2, {vec({-1, 0}), vec({0, -1})})));
    CHECK_FALSE(
        cone_contained(orthant, ConeRep::from_halfspaces(2, {vec({1, 0}), vec({0, 1})})));
    CHECK(cone_contained(ConeRep::from_generators(2, {vec({1, -1})}), halfplane));
}

TEST_CASE("linear images of polytopes") {
    PolytopeRep seg{1, {vec({-1}), vec({1})}, {}};
    Mat M(2, 1);
    M << 1, 2;
    PolytopeRep img = map_polytope(M, seg);
    CHECK(member(img, vec({0, 0})));
    CHECK(member(img, vec({1, 2})));
    CHECK(member(img, vec({-0.5, -1})));
    CHECK_FALSE(member(img, vec({1, 0})));
}
