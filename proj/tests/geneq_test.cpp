#include <cmath>
#include <string>

#include "doctest.h"
#include "varpoly/catalog.hpp"
#include "varpoly/errors.hpp"
#include "varpoly/geneq.hpp"

using namespace varpoly;

namespace {

Vec vec(std::initializer_list<double> data) {
    Vec v(static_cast<int>(data.size()));
    int i = 0;
    for (double x : data) v[i++] = x;
    return v;
}

// u in 0 + subdiff(0): the zero map against the zero function
GeneralizedEquation degenerate_linear_ge() {
    PolyhedralFunction zero({vec({0})}, {0}, {}, {});
    CompositeProblem cp(zero, PolyMap::identity(1));
    Mat Z = Mat::Zero(1, 1);
    return GeneralizedEquation(PolyMap::linear(Z), cp, vec({0}));
}

Mat random_matrix(Rng& rng, int r, int c) {
    Mat M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = rng.uniform(-2.0, 2.0);
    return M;
}

}  // namespace

TEST_CASE("construction checks shapes") {
    CompositeProblem abs = catalog::abs_value();
    CHECK_THROWS_AS(GeneralizedEquation(PolyMap::identity(2), abs, vec({0, 0})),
                    PreconditionError);
    CHECK_THROWS_AS(GeneralizedEquation(PolyMap::identity(1), abs, vec({0, 0})),
                    PreconditionError);
}

TEST_CASE("solution certification on the half-line and circle instances") {
    GeneralizedEquation hl = catalog::halfline_ge();
    SolutionCheck s0 = check_solution(hl, vec({0}));
    CHECK(s0.is_solution);
    CHECK(s0.nondegenerate);
    CHECK_FALSE(check_solution(hl, vec({-0.5})).is_solution);

    GeneralizedEquation circ = catalog::circle_ge();
    SolutionCheck s1 = check_solution(circ, vec({1, 0}));
    CHECK(s1.is_solution);
    CHECK(s1.nondegenerate);
    // on the circle but with the wrong normal direction
    CHECK_FALSE(check_solution(circ, vec({0.6, 0.8})).is_solution);
    // off the circle entirely
    CHECK_FALSE(check_solution(circ, vec({0.5, 0})).is_solution);
}

TEST_CASE("regularity report on the circle instance") {
    GeneralizedEquation circ = catalog::circle_ge();
    MrReport rep = mr_check(circ, vec({1, 0}));
    CHECK(rep.nondegenerate);
    CHECK(rep.regular);
    CHECK(rep.strong);
    CHECK(rep.crit_kernel);
    CHECK(rep.crit_range);
    CHECK(rep.crit_reduced);

    // A = grad f + weighted curvature = I + (1/2) * 2I = 2I
    CHECK((rep.A - 2 * Mat::Identity(2, 2)).norm() <= 1e-10);
    // critical subspace is the vertical axis
    CHECK(rep.B.cols() == 1);
    CHECK(std::abs(rep.B(0, 0)) <= 1e-10);
    CHECK(cone_is_subspace(rep.K_bar));

    REQUIRE(rep.sigma_jacobian.has_value());
    Mat expect(2, 2);
    expect << 0, 0, 0, 0.5;
    CHECK((*rep.sigma_jacobian - expect).norm() <= 1e-12);

    // the reduced system solved for the Jacobian really is inverted
    Mat M = rep.B.transpose() * rep.A * rep.B;
    Mat X = rep.B.transpose() * (*rep.sigma_jacobian) * rep.B;
    CHECK((M * X - Mat::Identity(M.cols(), M.cols())).norm() <= 1e-12);
}

TEST_CASE("regularity report on the half-line instance") {
    GeneralizedEquation hl = catalog::halfline_ge();
    MrReport rep = mr_check(hl, vec({0}));
    CHECK(rep.regular);
    CHECK(rep.strong);
    // the critical subspace is {0}: the localization Jacobian is the zero matrix
    CHECK(rep.B.cols() == 0);
    REQUIRE(rep.sigma_jacobian.has_value());
    CHECK(rep.sigma_jacobian->norm() == doctest::Approx(0));
}

TEST_CASE("a flat instance is recognized as irregular") {
    GeneralizedEquation flat = degenerate_linear_ge();
    MrReport rep = mr_check(flat, vec({0}));
    CHECK(rep.nondegenerate);  // subdiff is the singleton {0}: trivially interior
    CHECK_FALSE(rep.regular);
    CHECK_FALSE(rep.strong);
    CHECK_FALSE(rep.crit_kernel);
    CHECK_FALSE(rep.crit_range);
    CHECK_FALSE(rep.crit_reduced);
    CHECK_FALSE(rep.sigma_jacobian.has_value());
    CHECK_THROWS_AS(localization_jacobian(flat, vec({0})), PreconditionError);
}

TEST_CASE("regularity refuses by name away from certified solutions") {
    GeneralizedEquation hl = catalog::halfline_ge();
    try {
        mr_check(hl, vec({-1}));
        FAIL("expected a refusal");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.name()) == "not_a_solution");
    }
}

TEST_CASE("the three regularity criteria agree on random matrix/subspace pairs") {
    Rng rng(2024);
    int disagreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 5;
        Mat A = random_matrix(rng, n, n);
        if (trial % 3 == 0) A = A + A.transpose().eval();  // mix in symmetric cases
        if (trial % 7 == 0) A.col(0).setZero();            // force rank deficiency
        int k = trial % (n + 1);
        Mat B = orthonormal_span(random_matrix(rng, n, k), 1e-12);
        MrCriteria mc = evaluate_mr_criteria(A, B, 1e-9);
        if (mc.crit_kernel != mc.crit_range || mc.crit_range != mc.crit_reduced)
            ++disagreements;
    }
    CHECK(disagreements == 0);

    // pinned corners: identity is regular on every subspace, zero is not on
    // any nontrivial one, and the empty subspace is vacuously regular
    Mat I3 = Mat::Identity(3, 3);
    MrCriteria all = evaluate_mr_criteria(I3, orthonormal_span(random_matrix(rng, 3, 2), 1e-12),
                                          1e-9);
    CHECK((all.crit_kernel && all.crit_range && all.crit_reduced));
    MrCriteria none = evaluate_mr_criteria(Mat::Zero(3, 3), I3, 1e-9);
    CHECK_FALSE((none.crit_kernel || none.crit_range || none.crit_reduced));
    MrCriteria vac = evaluate_mr_criteria(Mat::Zero(3, 3), Mat(3, 0), 1e-9);
    CHECK((vac.crit_kernel && vac.crit_range && vac.crit_reduced));
}

TEST_CASE("pattern-enumeration solves reach the known solutions") {
    GeneralizedEquation hl = catalog::halfline_ge();
    SolveResult a = solve_ge(hl, vec({0.7}), vec({0}));
    REQUIRE(a.converged);
    CHECK(std::abs(a.x[0]) <= 1e-10);
    CHECK(a.residual <= 1e-10);

    SolveResult b = solve_ge(hl, vec({-0.3}), vec({0}));
    REQUIRE(b.converged);
    CHECK(b.x[0] == doctest::Approx(-0.3).epsilon(1e-10));

    GeneralizedEquation circ = catalog::circle_ge();
    Vec u = vec({1.9, 0.1});
    SolveResult c = solve_ge(circ, u, vec({1, 0}));
    REQUIRE(c.converged);
    CHECK((c.x - u / u.norm()).norm() <= 1e-9);
    CHECK(c.patterns_tried >= 1);

    // a poor starting point still lands on the certified solution
    SolveResult d = solve_ge(circ, u, vec({0.2, -0.4}));
    REQUIRE(d.converged);
    CHECK((d.x - u / u.norm()).norm() <= 1e-9);
}

TEST_CASE("solve results are certified solutions of the inclusion") {
    GeneralizedEquation circ = catalog::circle_ge();
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
        Vec u = vec({rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0)});
        if (u.norm() < 0.5) continue;
        SolveResult s = solve_ge(circ, u, vec({1, 0}));
        REQUIRE(s.converged);
        GeneralizedEquation shifted(circ.f, circ.cp, u);
        CHECK(check_solution(shifted, s.x).is_solution);
    }
}

TEST_CASE("candidate enumeration keeps only converged, deduplicated solves") {
    GeneralizedEquation hl = catalog::halfline_ge();
    InclusionCandidates cands = inclusion_candidates(hl.f, hl.cp, vec({0.7}), vec({0}));
    REQUIRE_FALSE(cands.candidates.empty());
    for (const SolveResult& c : cands.candidates) {
        CHECK(c.converged);
        CHECK(c.residual <= 1e-10);
    }
    CHECK(cands.patterns_tried >= static_cast<int>(cands.candidates.size()));
}

TEST_CASE("finite-difference probe confirms the localization Jacobian") {
    GeneralizedEquation circ = catalog::circle_ge();
    LocalizationProbe p = localization_probe(circ, vec({1, 0}), 1e-3, 8);
    CHECK(p.solves > 0);
    CHECK(p.max_jacobian_dev <= 1e-5);
    Mat expect(2, 2);
    expect << 0, 0, 0, 0.5;
    CHECK((p.fd_jacobian - expect).norm() <= 1e-5);
    CHECK(p.lipschitz <= 0.5 + 1e-3);

    GeneralizedEquation hl = catalog::halfline_ge();
    LocalizationProbe q = localization_probe(hl, vec({0}), 1e-3, 8);
    CHECK(q.max_jacobian_dev <= 1e-9);
    CHECK(q.fd_jacobian.norm() <= 1e-9);
    CHECK(q.lipschitz <= 1e-9);
}
