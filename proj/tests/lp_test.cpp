#include <Eigen/Dense>

#include "doctest.h"
#include "varpoly/linalg.hpp"
#include "varpoly/lp.hpp"

using namespace varpoly;

namespace {

Mat rows(std::initializer_list<std::initializer_list<double>> data) {
    int r = static_cast<int>(data.size());
    int c = r ? static_cast<int>(data.begin()->size()) : 0;
    Mat M(r, c);
    int i = 0;
    for (const auto& row : data) {
        int j = 0;
        for (double v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

Vec vec(std::initializer_list<double> data) {
    Vec v(static_cast<int>(data.size()));
    int i = 0;
    for (double x : data) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("simplex solves a small equality LP to its known optimum") {
    // max x1  s.t.  x1 + x2 = 1, x >= 0   ->   x = (1, 0), value 1
    LpResult r = lp_solve(rows({{1, 1}}), vec({1}), vec({1, 0}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("simplex reports infeasibility and unboundedness") {
    // x1 = -1 with x1 >= 0 is infeasible
    CHECK(lp_solve(rows({{1}}), vec({-1}), vec({1})).status == LpStatus::Infeasible);
    CHECK_FALSE(lp_feasible_eq(rows({{1}}), vec({-1})));

    // the constraint 0*x = 0 leaves max x1 unbounded over x >= 0
    CHECK(lp_solve(rows({{0}}), vec({0}), vec({1})).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate vertices do not cycle under the anti-cycling rule") {
    // multiple identical rows force a degenerate basis; the solve must
    // still terminate at the optimum
    Mat A = rows({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
    Vec b = vec({1, 1, 2});
    LpResult r = lp_solve(A, b, vec({2, 1, 1}));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-12));  // x = (1, 0, 2)
}

TEST_CASE("weak duality bound holds at the reported optimum") {
    // max <c,x> s.t. Ax = b, x >= 0; any feasible x has <c,x> <= value
    Mat A = rows({{1, 2, 1, 0}, {3, 1, 0, 1}});
    Vec b = vec({4, 6});
    Vec c = vec({3, 5, 0, 0});
    LpResult r = lp_solve(A, b, c);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK((A * r.x - b).norm() <= 1e-9);
    CHECK(r.x.minCoeff() >= -1e-12);

    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        // random feasible candidates: sample x3 free and solve for slacks
        Vec x(4);
        x[0] = rng.uniform(0.0, 2.0);
        x[1] = rng.uniform(0.0, 2.0);
        x[2] = 4 - x[0] - 2 * x[1];
        x[3] = 6 - 3 * x[0] - x[1];
        if (x.minCoeff() < 0) continue;
        CHECK(c.dot(x) <= r.value + 1e-9);
    }
}

TEST_CASE("constructed-feasible random systems are recognized as feasible") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 2, n = 4;
        Mat A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-2.0, 2.0);
        Vec x0(n);
        for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.0, 2.0);
        CHECK(lp_feasible_eq(A, A * x0));
    }
}

TEST_CASE("inequality feasibility handles free variables") {
    // {z : z <= 1} and {z : z <= -1} are both nonempty (z is free)
    CHECK(lp_feasible_ineq(rows({{1}}), vec({1})));
    CHECK(lp_feasible_ineq(rows({{1}}), vec({-1})));
    // z <= -1 and -z <= -2 means z <= -1 and z >= 2: empty
    CHECK_FALSE(lp_feasible_ineq(rows({{1}, {-1}}), vec({-1, -2})));
    // a 2D wedge with interior
    CHECK(lp_feasible_ineq(rows({{1, 0}, {0, 1}, {-1, -1}}), vec({0, 0, 5})));
}
