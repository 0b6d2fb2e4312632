#include <vector>

#include "doctest.h"
#include "varpoly/dd.hpp"
#include "varpoly/linalg.hpp"
#include "varpoly/polyhedral.hpp"

using namespace varpoly;

namespace {

Vec vec(std::initializer_list<double> data) {
    Vec v(static_cast<int>(data.size()));
    int i = 0;
    for (double x : data) v[i++] = x;
    return v;
}

// random cone from generators, occasionally with +/- pairs to create lineality
ConeRep random_cone(Rng& rng, int dim) {
    int count = 1 + static_cast<int>(rng.uniform01() * (dim + 2));
    std::vector<Vec> gens;
    for (int k = 0; k < count; ++k) {
        Vec g(dim);
        for (int i = 0; i < dim; ++i) g[i] = rng.uniform(-1.0, 1.0);
        gens.push_back(g);
        if (rng.uniform01() < 0.25) gens.push_back(-g);  // lineality direction
    }
    return ConeRep::from_generators(dim, std::move(gens));
}

// membership agreement on deterministic probes: cone points themselves,
// their negatives, and random vectors
void check_same_members(const ConeRep& A, const ConeRep& B, Rng& rng, int dim) {
    std::vector<Vec> probes;
    if (A.generators)
        for (const Vec& g : *A.generators) {
            probes.push_back(g);
            probes.push_back(-g);
        }
    for (int k = 0; k < 20; ++k) {
        Vec p(dim);
        for (int i = 0; i < dim; ++i) p[i] = rng.uniform(-1.0, 1.0);
        probes.push_back(p);
    }
    for (const Vec& p : probes) CHECK(member(A, p) == member(B, p));
}

}  // namespace

TEST_CASE("generator/halfspace conversion on textbook cones") {
    // nonnegative orthant: generated by e1, e2; cut out by -e1, -e2
    ConeRep orthant = ConeRep::from_generators(2, {vec({1, 0}), vec({0, 1})});
    ConeRep full = dd_convert(orthant);
    REQUIRE(full.halfspaces.has_value());
    CHECK(member(full, vec({0.5, 2.0})));
    CHECK(member(full, vec({0.0, 1.0})));
    CHECK_FALSE(member(full, vec({-0.1, 1.0})));

    // from the halfspace side
    ConeRep hs = ConeRep::from_halfspaces(2, {vec({-1, 0}), vec({0, -1})});
    ConeRep back = dd_convert(hs);
    REQUIRE(back.generators.has_value());
    CHECK(cone_equal(back, orthant));
}

TEST_CASE("polar cones of standard examples") {
    // polar of the nonpositive halfline is the nonnegative one
    ConeRep neg = ConeRep::from_generators(1, {vec({-1})});
    ConeRep pol = polar(neg);
    CHECK(member(pol, vec({3})));
    CHECK_FALSE(member(pol, vec({-1e-3})));

    // polar of the orthant is the opposite orthant
    ConeRep orthant = ConeRep::from_generators(2, {vec({1, 0}), vec({0, 1})});
    ConeRep expect = ConeRep::from_generators(2, {vec({-1, 0}), vec({0, -1})});
    CHECK(cone_equal(polar(orthant), expect));

    // polar of a line is its orthogonal complement line
    ConeRep line = ConeRep::from_generators(2, {vec({1, 1}), vec({-1, -1})});
    ConeRep perp = ConeRep::from_generators(2, {vec({1, -1}), vec({-1, 1})});
    CHECK(cone_equal(polar(line), perp));
    CHECK(cone_is_subspace(line));
}

TEST_CASE("whole space and origin convert to each other under polarity") {
    ConeRep everything = ConeRep::from_halfspaces(3, {});
    ConeRep origin = polar(everything);
    CHECK_FALSE(member(origin, vec({1e-3, 0, 0})));
    CHECK(member(origin, vec({0, 0, 0})));
    CHECK(cone_equal(polar(origin), everything));
}

TEST_CASE("lineality is preserved through conversion") {
    // half-plane {x : x2 <= 0} in R^2: lineality along e1
    ConeRep K = ConeRep::from_halfspaces(2, {vec({0, 1})});
    ConeRep G = dd_convert(K);
    REQUIRE(G.generators.has_value());
    CHECK(member(G, vec({5, 0})));
    CHECK(member(G, vec({-5, 0})));
    CHECK(member(G, vec({1, -2})));
    CHECK_FALSE(member(G, vec({1, 1e-3})));
}

TEST_CASE("round trip and polar involution on random cones") {
    Rng rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        int dim = 1 + trial % 5;
        ConeRep K = random_cone(rng, dim);

        // generators -> halfspaces -> generators preserves membership
        ConeRep conv = dd_convert(K);
        ConeRep stripped = ConeRep::from_halfspaces(dim, *conv.halfspaces);
        ConeRep back = dd_convert(stripped);
        check_same_members(K, back, rng, dim);
        CHECK(cone_equal(K, back));

        // polar(polar(K)) = K for closed convex cones
        CHECK(cone_equal(polar(polar(K)), K));
    }
}

TEST_CASE("canonicalize and prune produce irredundant generators") {
    std::vector<Vec> raw{vec({2, 0}), vec({1, 0}), vec({0, 3}),
                         vec({1, 1}),  // inside cone(e1, e2): redundant
                         vec({0, 0})};
    std::vector<Vec> canon = dd_canonicalize(raw, 1e-9);
    // zero dropped, duplicates merged after normalization
    CHECK(canon.size() == 3);
    std::vector<Vec> pruned = dd_prune(canon, 1e-9);
    CHECK(pruned.size() == 2);
    ConeRep K = ConeRep::from_generators(2, pruned);
    CHECK(member(K, vec({1, 1})));
    CHECK(member(K, vec({1, 0})));
    CHECK(member(K, vec({0, 1})));
}
