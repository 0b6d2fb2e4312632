#include "varpoly/polyhedral.hpp"

#include <cmath>
#include <limits>

#include "varpoly/dd.hpp"
#include "varpoly/errors.hpp"
#include "varpoly/lp.hpp"

namespace varpoly {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PolyhedralFunction::PolyhedralFunction(std::vector<Vec> pieces, std::vector<double> offsets,
                                       std::vector<Vec> rows, std::vector<double> rhs,
                                       const Tolerances& tols)
    : a(std::move(pieces)), alpha(std::move(offsets)), b(std::move(rows)), beta(std::move(rhs)) {
    if (a.empty())
        throw PreconditionError("pieces_empty", "polyhedral function needs at least one piece");
    if (a.size() != alpha.size() || b.size() != beta.size())
        throw PreconditionError("shape_mismatch", "piece/offset or row/rhs count mismatch");
    m = static_cast<int>(a[0].size());
    for (const Vec& v : a)
        if (v.size() != m) throw PreconditionError("shape_mismatch", "piece dimension mismatch");
    for (const Vec& v : b)
        if (v.size() != m) throw PreconditionError("shape_mismatch", "row dimension mismatch");
    if (!b.empty()) {
        Mat B(static_cast<int>(b.size()), m);
        Vec bb(static_cast<int>(b.size()));
        for (size_t i = 0; i < b.size(); ++i) {
            B.row(static_cast<int>(i)) = b[i].transpose();
            bb[static_cast<int>(i)] = beta[i];
        }
        if (!lp_feasible_ineq(B, bb))
            throw PreconditionError("domain_infeasible", "domain rows describe an empty set");
    }
    (void)tols;
}

double eval(const PolyhedralFunction& g, const Vec& z, const Tolerances& tols) {
    for (size_t i = 0; i < g.b.size(); ++i)
        if (g.b[i].dot(z) > g.beta[i] + tols.act) return kInf;
    double best = -kInf;
    for (size_t j = 0; j < g.a.size(); ++j) best = std::max(best, g.a[j].dot(z) - g.alpha[j]);
    return best;
}

ActiveSets active_sets(const PolyhedralFunction& g, const Vec& z, const Tolerances& tols) {
    double val = eval(g, z, tols);
    if (!std::isfinite(val))
        throw PreconditionError("outside_domain", "active sets requested outside dom g");
    ActiveSets as;
    for (size_t j = 0; j < g.a.size(); ++j)
        if (val - (g.a[j].dot(z) - g.alpha[j]) <= tols.act) as.pieces.push_back(static_cast<int>(j));
    for (size_t i = 0; i < g.b.size(); ++i)
        if (std::abs(g.b[i].dot(z) - g.beta[i]) <= tols.act) as.rows.push_back(static_cast<int>(i));
    return as;
}

PolytopeRep subdifferential(const PolyhedralFunction& g, const Vec& z, const Tolerances& tols) {
    ActiveSets as = active_sets(g, z, tols);
    PolytopeRep P;
    P.dim = g.m;
    for (int j : as.pieces) P.points.push_back(g.a[static_cast<size_t>(j)]);
    for (int i : as.rows) P.rays.push_back(g.b[static_cast<size_t>(i)]);
    return P;
}

ConeRep ConeRep::from_generators(int dim, std::vector<Vec> gens) {
    ConeRep K;
    K.dim = dim;
    K.generators = std::move(gens);
    return K;
}

ConeRep ConeRep::from_halfspaces(int dim, std::vector<Vec> halfs) {
    ConeRep K;
    K.dim = dim;
    K.halfspaces = std::move(halfs);
    return K;
}

LinSubspace LinSubspace::from_spanning_set(const std::vector<Vec>& vs, int ambient, double tol) {
    return LinSubspace{orthonormal_span(vs, ambient, tol)};
}

ConeRep critical_cone(const PolyhedralFunction& g, const Vec& z, const Vec& lambda,
                      const Tolerances& tols) {
    if (!member(subdifferential(g, z, tols), lambda, tols))
        throw PreconditionError("multiplier_not_in_subdifferential",
                                "critical cone needs lambda in the subdifferential at z");
    ActiveSets as = active_sets(g, z, tols);
    std::vector<Vec> halfs;
    for (int j : as.pieces) halfs.push_back(g.a[static_cast<size_t>(j)] - lambda);
    for (int i : as.rows) halfs.push_back(g.b[static_cast<size_t>(i)]);
    ConeRep K = ConeRep::from_halfspaces(g.m, dd_canonicalize(halfs, tols.zero));
    return dd_convert(K, tols);
}

ConeRep dd_convert(const ConeRep& K, const Tolerances& tols) {
    if (!K.generators && !K.halfspaces)
        throw PreconditionError("cone_unpopulated", "cone carries no description");
    ConeRep out = K;
    if (!out.generators) out.generators = dd_dual(*out.halfspaces, out.dim, tols);
    if (!out.halfspaces) out.halfspaces = dd_dual(*out.generators, out.dim, tols);
    return out;
}

ConeRep polar(const ConeRep& K, const Tolerances& tols) {
    (void)tols;
    if (!K.generators && !K.halfspaces)
        throw PreconditionError("cone_unpopulated", "cone carries no description");
    ConeRep out;
    out.dim = K.dim;
    out.generators = K.halfspaces;
    out.halfspaces = K.generators;
    return out;
}

LinSubspace span_of_cone(const ConeRep& K, const Tolerances& tols) {
    ConeRep C = K.generators ? K : dd_convert(K, tols);
    return LinSubspace::from_spanning_set(*C.generators, C.dim, tols.zero);
}

ConeRep normal_cone_at(const ConeRep& K, const Vec& w, const Tolerances& tols) {
    if (!member(K, w, tols))
        throw PreconditionError("point_not_in_cone", "normal cone requested at w outside K");
    ConeRep C = K.generators ? K : dd_convert(K, tols);
    std::vector<Vec> rows = *C.generators;
    if (w.norm() > tols.zero) {
        rows.push_back(w);
        rows.push_back(-w);
    }
    ConeRep N;
    N.dim = K.dim;
    N.halfspaces = rows;
    N.generators = dd_dual(rows, K.dim, tols);
    return N;
}

bool member(const PolytopeRep& P, const Vec& v, const Tolerances& tols) {
    // Measured as Euclidean distance, not as feasibility of the coefficient
    // system: a feasibility phase with one-signed artificials can only
    // undershoot the target, so a point overshooting a generator by machine
    // epsilon along an ill-scaled coordinate gets charged that error
    // amplified by the column conditioning instead of the true distance.
    if (P.empty()) return false;
    return polytope_dist(P, v, tols) <= tols.zero * 10.0 * (1.0 + v.norm());
}

bool member(const ConeRep& K, const Vec& v, const Tolerances& tols) {
    if (K.halfspaces) {
        for (const Vec& h : *K.halfspaces)
            if (h.dot(v) > tols.zero * (1.0 + v.norm())) return false;
        return true;
    }
    if (!K.generators)
        throw PreconditionError("cone_unpopulated", "cone carries no description");
    if (K.generators->empty()) return v.norm() <= tols.zero;
    return lp_feasible_eq(columns(*K.generators, K.dim), v, tols.zero * 1e-2);
}

namespace {

// max eps s.t. the weights stay >= eps; v belongs to the relative interior
// iff the optimum exceeds the ri tolerance.  `points` may be empty (cone
// case: no convexity row).
double ri_epsilon(const std::vector<Vec>& points, const std::vector<Vec>& rays, int dim,
                  const Vec& v, const Tolerances& tols) {
    const int l = static_cast<int>(points.size());
    const int r = static_cast<int>(rays.size());
    const int rows = dim + (l > 0 ? 1 : 0) + 1;
    const int cols = l + r + 2;  // weights, eps, slack for eps <= 1
    Mat A = Mat::Zero(rows, cols);
    Vec rhs = Vec::Zero(rows);
    Vec sum = Vec::Zero(dim);
    for (int j = 0; j < l; ++j) {
        A.col(j).head(dim) = points[static_cast<size_t>(j)];
        sum += points[static_cast<size_t>(j)];
    }
    for (int i = 0; i < r; ++i) {
        A.col(l + i).head(dim) = rays[static_cast<size_t>(i)];
        sum += rays[static_cast<size_t>(i)];
    }
    A.col(l + r).head(dim) = sum;
    rhs.head(dim) = v;
    int rr = dim;
    if (l > 0) {
        A.row(rr).head(l).setOnes();
        A(rr, l + r) = static_cast<double>(l);
        rhs[rr] = 1.0;
        ++rr;
    }
    A(rr, l + r) = 1.0;
    A(rr, l + r + 1) = 1.0;
    rhs[rr] = 1.0;
    Vec c = Vec::Zero(cols);
    c[l + r] = 1.0;
    LpResult res = lp_solve(A, rhs, c, tols.zero * 1e-2);
    if (res.status != LpStatus::Optimal) return -1.0;
    return res.value;
}

}  // namespace

bool ri_member(const PolytopeRep& P, const Vec& v, const Tolerances& tols) {
    if (P.empty()) return false;
    return ri_epsilon(P.points, P.rays, P.dim, v, tols) > tols.ri;
}

bool ri_member(const ConeRep& K, const Vec& v, const Tolerances& tols) {
    ConeRep C = K.generators ? K : dd_convert(K, tols);
    if (C.generators->empty()) return v.norm() <= tols.zero;
    return ri_epsilon({}, *C.generators, C.dim, v, tols) > tols.ri;
}

bool cone_meets_subspace_trivially(const ConeRep& K, const LinSubspace& L,
                                   const Tolerances& tols) {
    if (L.dim() == 0) return true;
    ConeRep C = K.halfspaces ? K : dd_convert(K, tols);
    std::vector<Vec> rows = *C.halfspaces;
    Mat W = orthogonal_complement(L.basis, tols.zero);
    for (int j = 0; j < W.cols(); ++j) {
        rows.push_back(W.col(j));
        rows.push_back(-W.col(j));
    }
    return dd_dual(rows, K.dim, tols).empty();
}

bool cone_contained(const ConeRep& A, const ConeRep& B, const Tolerances& tols) {
    ConeRep Ag = A.generators ? A : dd_convert(A, tols);
    ConeRep Bh = B.halfspaces ? B : dd_convert(B, tols);
    for (const Vec& g : *Ag.generators) {
        double gn = g.norm();
        if (gn <= tols.zero) continue;
        for (const Vec& h : *Bh.halfspaces) {
            double hn = h.norm();
            if (hn <= tols.zero) continue;
            if (h.dot(g) / (gn * hn) > tols.zero) return false;
        }
    }
    return true;
}

bool cone_equal(const ConeRep& A, const ConeRep& B, const Tolerances& tols) {
    return cone_contained(A, B, tols) && cone_contained(B, A, tols);
}

bool cone_is_subspace(const ConeRep& K, const Tolerances& tols) {
    ConeRep C = dd_convert(K, tols);
    for (const Vec& g : *C.generators) {
        Vec neg = -g;
        bool ok = true;
        for (const Vec& h : *C.halfspaces)
            if (h.dot(neg) > tols.zero * (1.0 + neg.norm())) { ok = false; break; }
        if (!ok) return false;
    }
    return true;
}

Vec polytope_project(const PolytopeRep& P, const Vec& y, const Tolerances& tols) {
    if (P.empty())
        throw PreconditionError("empty_polytope", "projection onto an empty set");
    const int l = static_cast<int>(P.points.size());
    const int r = static_cast<int>(P.rays.size());
    const int nvar = l + r;
    if (nvar > 20 || (1 << nvar) > tols.pattern_budget)
        throw PreconditionError("pattern_budget",
                                "projection active-set enumeration exceeds the pattern budget");
    Mat C(P.dim, nvar);
    for (int j = 0; j < l; ++j) C.col(j) = P.points[static_cast<size_t>(j)];
    for (int i = 0; i < r; ++i) C.col(l + i) = P.rays[static_cast<size_t>(i)];

    double best_obj = kInf;
    Vec best_point;
    const double slack = 1e-8;

    for (int mask = 1; mask < (1 << nvar); ++mask) {
        std::vector<int> free;
        bool has_point = false;
        for (int j = 0; j < nvar; ++j) {
            if (mask & (1 << j)) {
                free.push_back(j);
                if (j < l) has_point = true;
            }
        }
        if (l > 0 && !has_point) continue;
        const int f = static_cast<int>(free.size());
        const bool with_sum = l > 0;
        const int dim_sys = f + (with_sum ? 1 : 0);

        Mat M(P.dim, f);
        for (int k = 0; k < f; ++k) M.col(k) = C.col(free[static_cast<size_t>(k)]);
        Mat S = Mat::Zero(dim_sys, dim_sys);
        Vec rhs = Vec::Zero(dim_sys);
        S.topLeftCorner(f, f) = 2.0 * M.transpose() * M;
        rhs.head(f) = 2.0 * M.transpose() * y;
        if (with_sum) {
            for (int k = 0; k < f; ++k) {
                if (free[static_cast<size_t>(k)] < l) {
                    S(k, f) = 1.0;
                    S(f, k) = 1.0;
                }
            }
            rhs[f] = 1.0;
        }
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(S);
        Vec sol = cod.solve(rhs);
        if ((S * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-7 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
            continue;  // singular KKT system without a consistent solution
        Vec x = sol.head(f);
        double theta = with_sum ? sol[f] : 0.0;
        if ((x.array() < -slack).any()) continue;
        Vec p = M * x.cwiseMax(0.0);
        Vec grad = 2.0 * (p - y);
        bool dual_ok = true;
        for (int j = 0; j < nvar && dual_ok; ++j) {
            if (mask & (1 << j)) continue;
            double mu = C.col(j).dot(grad) + (j < l ? theta : 0.0);
            if (mu < -1e-7 * (1.0 + grad.norm())) dual_ok = false;
        }
        if (!dual_ok) continue;
        double obj = (p - y).squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best_point = p;
        }
    }
    if (!std::isfinite(best_obj))
        throw ConsistencyError("polytope projection found no KKT-consistent active set");
    return best_point;
}

double polytope_dist(const PolytopeRep& P, const Vec& y, const Tolerances& tols) {
    return (polytope_project(P, y, tols) - y).norm();
}

PolytopeRep map_polytope(const Mat& M, const PolytopeRep& P) {
    PolytopeRep out;
    out.dim = static_cast<int>(M.rows());
    for (const Vec& p : P.points) out.points.push_back(M * p);
    for (const Vec& r : P.rays) out.rays.push_back(M * r);
    return out;
}

}  // namespace varpoly
