#pragma once

#include <optional>
#include <vector>

#include "varpoly/config.hpp"
#include "varpoly/linalg.hpp"

namespace varpoly {

// g(z) = max_j { <a_j, z> - alpha_j }  on  dom g = { z : <b_i, z> <= beta_i },
// +infinity outside.  Pieces must be nonempty; the domain must be nonempty
// (checked by LP at construction).
struct PolyhedralFunction {
    std::vector<Vec> a;
    std::vector<double> alpha;
    std::vector<Vec> b;
    std::vector<double> beta;
    int m = 0;

    PolyhedralFunction() = default;
    PolyhedralFunction(std::vector<Vec> pieces, std::vector<double> offsets,
                       std::vector<Vec> rows, std::vector<double> rhs,
                       const Tolerances& tols = {});

    int num_pieces() const { return static_cast<int>(a.size()); }
    int num_rows() const { return static_cast<int>(b.size()); }
};

struct ActiveSets {
    std::vector<int> pieces;  // J(z): argmax pieces
    std::vector<int> rows;    // I(z): tight domain rows
};

// conv(points) + cone(rays); empty iff points is empty.
struct PolytopeRep {
    int dim = 0;
    std::vector<Vec> points;
    std::vector<Vec> rays;
    bool empty() const { return points.empty(); }
};

// Convex polyhedral cone carrying either or both descriptions.
//   generators:  K = cone(generators)      (empty list = {0})
//   halfspaces:  K = { x : <h, x> <= 0 }   (empty list = R^dim)
struct ConeRep {
    int dim = 0;
    std::optional<std::vector<Vec>> generators;
    std::optional<std::vector<Vec>> halfspaces;

    static ConeRep from_generators(int dim, std::vector<Vec> gens);
    static ConeRep from_halfspaces(int dim, std::vector<Vec> halfs);
};

// Linear subspace as an orthonormal basis (dim() == number of columns).
struct LinSubspace {
    Mat basis;  // ambient x dim, orthonormal columns

    static LinSubspace from_spanning_set(const std::vector<Vec>& vs, int ambient,
                                         double tol);
    static LinSubspace from_basis_matrix(Mat B) { return LinSubspace{std::move(B)}; }
    int ambient() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
};

// ---- evaluation and first-order data ---------------------------------------

// max-affine value, +infinity outside the domain (rows checked with act slack)
double eval(const PolyhedralFunction& g, const Vec& z, const Tolerances& tols = {});

// J(z), I(z) at tolerance act; refuses when z is outside dom g
ActiveSets active_sets(const PolyhedralFunction& g, const Vec& z, const Tolerances& tols = {});

// subdifferential of g at z: conv{a_j : j active} + cone{b_i : i active}
PolytopeRep subdifferential(const PolyhedralFunction& g, const Vec& z,
                            const Tolerances& tols = {});

// critical cone K_g(z, lambda) = { y : <a_j - lambda, y> <= 0 (j active),
// <b_i, y> <= 0 (i active) }; requires lambda in the subdifferential at z.
// Returned with both descriptions populated.
ConeRep critical_cone(const PolyhedralFunction& g, const Vec& z, const Vec& lambda,
                      const Tolerances& tols = {});

// ---- cone arithmetic --------------------------------------------------------

// fill in whichever description is missing (double description)
ConeRep dd_convert(const ConeRep& K, const Tolerances& tols = {});

// polar cone: generators and halfspaces swap roles
ConeRep polar(const ConeRep& K, const Tolerances& tols = {});

LinSubspace span_of_cone(const ConeRep& K, const Tolerances& tols = {});

// N_K(w) = { h in polar(K) : <h, w> = 0 }; requires w in K
ConeRep normal_cone_at(const ConeRep& K, const Vec& w, const Tolerances& tols = {});

// membership tests (LP based; halfspace checks used when available)
bool member(const PolytopeRep& P, const Vec& v, const Tolerances& tols = {});
bool member(const ConeRep& K, const Vec& v, const Tolerances& tols = {});

// relative-interior membership: combination with all weights >= eps and the
// maximal such eps exceeding the ri tolerance
bool ri_member(const PolytopeRep& P, const Vec& v, const Tolerances& tols = {});
bool ri_member(const ConeRep& K, const Vec& v, const Tolerances& tols = {});

// K intersects span(L) only at the origin?
bool cone_meets_subspace_trivially(const ConeRep& K, const LinSubspace& L,
                                   const Tolerances& tols = {});

// true iff K = -K (compared via generator/halfspace containment)
bool cone_is_subspace(const ConeRep& K, const Tolerances& tols = {});

// A subset of B, cones compared exactly via generators against halfspaces
bool cone_contained(const ConeRep& A, const ConeRep& B, const Tolerances& tols = {});
bool cone_equal(const ConeRep& A, const ConeRep& B, const Tolerances& tols = {});

// ---- projection -------------------------------------------------------------

// Euclidean projection of y onto conv(points) + cone(rays) by KKT active-set
// enumeration (exact for desk-scale generator counts; refuses above the
// pattern budget).  Requires a nonempty polytope.
Vec polytope_project(const PolytopeRep& P, const Vec& y, const Tolerances& tols = {});
double polytope_dist(const PolytopeRep& P, const Vec& y, const Tolerances& tols = {});

// image of a polytope under a linear map (points and rays map through M)
PolytopeRep map_polytope(const Mat& M, const PolytopeRep& P);

}  // namespace varpoly
