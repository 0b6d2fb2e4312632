#include <cmath>

#include "doctest.h"
#include "varpoly/polymap.hpp"

using namespace varpoly;

namespace {

Vec vec(std::initializer_list<double> data) {
    Vec v(static_cast<int>(data.size()));
    int i = 0;
    for (double x : data) v[i++] = x;
    return v;
}

// p(x, y) = 3 x^2 y + 2 y^3 - x
Polynomial sample_poly() {
    Polynomial p;
    p.nvars = 2;
    p.terms = {Monomial{{2, 1}, 3.0}, Monomial{{0, 3}, 2.0}, Monomial{{1, 0}, -1.0}};
    return p;
}

PolyMap circle_map() {
    Polynomial c;
    c.nvars = 2;
    c.terms = {Monomial{{2, 0}, 1.0}, Monomial{{0, 2}, 1.0}, Monomial{{0, 0}, -1.0}};
    return PolyMap{2, 1, {c}};
}

}  // namespace

TEST_CASE("polynomial evaluation and exact first derivatives") {
    Polynomial p = sample_poly();
    Vec x = vec({1, 2});
    CHECK(p.eval(x) == doctest::Approx(3 * 2 + 2 * 8 - 1));  // 21
    CHECK(p.d1(x, 0) == doctest::Approx(6 * 1 * 2 - 1));     // 6xy - 1 = 11
    CHECK(p.d1(x, 1) == doctest::Approx(3 * 1 + 6 * 4));     // 3x^2 + 6y^2 = 27
}

TEST_CASE("second derivatives are exact and symmetric") {
    Polynomial p = sample_poly();
    Rng rng(21);
    for (int k = 0; k < 20; ++k) {
        Vec x = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        CHECK(p.d2(x, 0, 0) == doctest::Approx(6 * x[1]));
        CHECK(p.d2(x, 0, 1) == doctest::Approx(6 * x[0]));
        CHECK(p.d2(x, 1, 1) == doctest::Approx(12 * x[1]));
        CHECK(p.d2(x, 0, 1) == doctest::Approx(p.d2(x, 1, 0)));
    }
}

TEST_CASE("identity and linear maps expose their matrices") {
    PolyMap id3 = PolyMap::identity(3);
    Vec x = vec({1, -2, 0.5});
    CHECK((id3.eval(x) - x).norm() == doctest::Approx(0));
    CHECK((id3.jacobian(x) - Mat::Identity(3, 3)).norm() == doctest::Approx(0));

    Mat M(2, 3);
    M << 1, 2, 3, 4, 5, 6;
    PolyMap lin = PolyMap::linear(M);
    CHECK((lin.eval(x) - M * x).norm() == doctest::Approx(0));
    CHECK((lin.jacobian(x) - M).norm() == doctest::Approx(0));
    for (const Mat& H : lin.hessian(x)) CHECK(H.norm() == doctest::Approx(0));
}

TEST_CASE("jacobian and hessian of the circle map") {
    PolyMap Phi = circle_map();
    Vec x = vec({0.6, -0.8});
    CHECK(Phi.eval(x)[0] == doctest::Approx(0.0));
    Mat J = Phi.jacobian(x);
    CHECK(J(0, 0) == doctest::Approx(1.2));
    CHECK(J(0, 1) == doctest::Approx(-1.6));
    Mat H = Phi.hessian(x)[0];
    CHECK((H - 2 * Mat::Identity(2, 2)).norm() == doctest::Approx(0));
}

TEST_CASE("weighted hessian is linear in the weights") {
    Polynomial p = sample_poly();
    Polynomial q;
    q.nvars = 2;
    q.terms = {Monomial{{1, 1}, 4.0}, Monomial{{3, 0}, -1.0}};
    PolyMap map{2, 2, {p, q}};

    Rng rng(8);
    for (int k = 0; k < 10; ++k) {
        Vec x = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        Vec l1 = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        Vec l2 = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        Mat sum = map.hessian_lambda(x, l1) + map.hessian_lambda(x, l2);
        Mat joint = map.hessian_lambda(x, l1 + l2);
        CHECK((sum - joint).norm() <= 1e-12);
        // consistency with the per-component stack
        Mat manual = l1[0] * map.hessian(x)[0] + l1[1] * map.hessian(x)[1];
        CHECK((map.hessian_lambda(x, l1) - manual).norm() <= 1e-12);
        // symmetry
        Mat H = map.hessian_lambda(x, l1);
        CHECK((H - H.transpose()).norm() <= 1e-12);
    }
}

TEST_CASE("central differences agree with exact derivatives at O(h^2)") {
    // degree <= 2 components: central differences are exact up to roundoff
    PolyMap Phi = circle_map();
    FdReport r2 = fd_validate(Phi, vec({0.3, -0.7}), 1e-4);
    CHECK(r2.jacobian_dev <= 1e-9);
    CHECK(r2.hessian_dev <= 1e-6);  // second differences lose more digits

    // a cubic shows the expected h^2 truncation error: for x^3 the central
    // first difference misses by exactly h^2 at x = 1
    Polynomial cubic;
    cubic.nvars = 1;
    cubic.terms = {Monomial{{3}, 1.0}};
    PolyMap cmap{1, 1, {cubic}};
    double h = 1e-3;
    FdReport rc = fd_validate(cmap, vec({1}), h);
    CHECK(rc.jacobian_dev == doctest::Approx(h * h).epsilon(1e-4));
    CHECK(rc.hessian_dev <= 1e-6);

    // the envelope scales like h^2 when h shrinks
    FdReport rc2 = fd_validate(cmap, vec({1}), h / 10);
    CHECK(rc2.jacobian_dev <= rc.jacobian_dev / 50);
}
