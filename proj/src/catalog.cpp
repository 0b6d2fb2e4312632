#include "varpoly/catalog.hpp"

namespace varpoly::catalog {

namespace {

Vec vec1(double a) {
    Vec v(1);
    v << a;
    return v;
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Polynomial poly(int nvars, std::vector<Monomial> terms) {
    return Polynomial{nvars, std::move(terms)};
}

PolyMap map_of(int n_in, std::vector<Polynomial> comps) {
    return PolyMap{n_in, static_cast<int>(comps.size()), std::move(comps)};
}

// indicator of {z <= 0} in R^1 written as a single zero piece plus one row
PolyhedralFunction halfline_indicator() {
    return PolyhedralFunction({vec1(0)}, {0.0}, {vec1(1)}, {0.0});
}

// indicator of {z = 0} in R^1: two opposite rows pin the point
PolyhedralFunction point_indicator() {
    return PolyhedralFunction({vec1(0)}, {0.0}, {vec1(1), vec1(-1)}, {0.0, 0.0});
}

PolyhedralFunction abs_outer() {
    return PolyhedralFunction({vec1(1), vec1(-1)}, {0.0, 0.0}, {}, {});
}

}  // namespace

CompositeProblem abs_value(double vbar) {
    return CompositeProblem(abs_outer(), PolyMap::identity(1), vec1(0), vec1(vbar));
}

CompositeProblem kinked_quadratic() {
    // Phi(x) = x^2 - x
    PolyMap Phi = map_of(1, {poly(1, {Monomial{{2}, 1.0}, Monomial{{1}, -1.0}})});
    return CompositeProblem(abs_outer(), std::move(Phi), vec1(0), vec1(-1));
}

CompositeProblem orthant_nlp() {
    // g = indicator of the nonpositive orthant in R^2
    PolyhedralFunction g({vec2(0, 0)}, {0.0}, {vec2(1, 0), vec2(0, 1)}, {0.0, 0.0});
    // Phi(x) = (x1, x2 - x1^2)
    PolyMap Phi = map_of(2, {poly(2, {Monomial{{1, 0}, 1.0}}),
                             poly(2, {Monomial{{0, 1}, 1.0}, Monomial{{2, 0}, -1.0}})});
    return CompositeProblem(std::move(g), std::move(Phi), vec2(0, 0), vec2(0, 1));
}

CompositeProblem circle() {
    // Phi(x) = x1^2 + x2^2 - 1
    PolyMap Phi = map_of(
        2, {poly(2, {Monomial{{2, 0}, 1.0}, Monomial{{0, 2}, 1.0}, Monomial{{0, 0}, -1.0}})});
    return CompositeProblem(point_indicator(), std::move(Phi), vec2(1, 0), vec2(1, 0));
}

CompositeProblem neg_quadratic() {
    // g(z) = z2 on {z1 <= 0}; Phi(x) = (x, -x^2)
    PolyhedralFunction g({vec2(0, 1)}, {0.0}, {vec2(1, 0)}, {0.0});
    PolyMap Phi = map_of(1, {poly(1, {Monomial{{1}, 1.0}}), poly(1, {Monomial{{2}, -1.0}})});
    return CompositeProblem(std::move(g), std::move(Phi), vec1(0), vec1(0));
}

CompositeProblem halfline() {
    return CompositeProblem(halfline_indicator(), PolyMap::identity(1), vec1(0), vec1(1));
}

CompositeProblem squared() {
    PolyhedralFunction g({vec1(1)}, {0.0}, {}, {});
    PolyMap Phi = map_of(1, {poly(1, {Monomial{{2}, 1.0}})});
    return CompositeProblem(std::move(g), std::move(Phi), vec1(0), vec1(0));
}

CompositeProblem sphere3() {
    PolyMap Phi = map_of(3, {poly(3, {Monomial{{2, 0, 0}, 1.0}, Monomial{{0, 2, 0}, 1.0},
                                      Monomial{{0, 0, 2}, 1.0}, Monomial{{0, 0, 0}, -1.0}})});
    Vec e1 = Vec::Unit(3, 0);
    return CompositeProblem(point_indicator(), std::move(Phi), e1, Vec::Zero(3));
}

CompositeProblem axis_line() {
    PolyMap Phi = map_of(2, {poly(2, {Monomial{{0, 1}, 1.0}})});
    return CompositeProblem(point_indicator(), std::move(Phi), vec2(0, 0), vec2(0, 0));
}

GeneralizedEquation halfline_ge() {
    return GeneralizedEquation(PolyMap::identity(1), halfline(), vec1(1));
}

GeneralizedEquation circle_ge() {
    return GeneralizedEquation(PolyMap::identity(2), circle(), vec2(2, 0));
}

}  // namespace varpoly::catalog
