#include "varpoly/dd.hpp"

#include <cmath>

#include "varpoly/errors.hpp"
#include "varpoly/lp.hpp"

namespace varpoly {

std::vector<Vec> dd_canonicalize(const std::vector<Vec>& vs, double tol) {
    std::vector<Vec> out;
    for (const Vec& v : vs) {
        double n = v.norm();
        if (n <= tol) continue;
        Vec u = v / n;
        bool dup = false;
        for (const Vec& w : out) {
            if ((u - w).lpNorm<Eigen::Infinity>() <= 1e2 * tol) { dup = true; break; }
        }
        if (!dup) out.push_back(u);
    }
    return out;
}

std::vector<Vec> dd_prune(std::vector<Vec> gens, double tol) {
    if (gens.size() <= 1) return gens;
    const int d = static_cast<int>(gens[0].size());
    for (size_t i = gens.size(); i-- > 0;) {
        std::vector<Vec> others;
        others.reserve(gens.size() - 1);
        for (size_t j = 0; j < gens.size(); ++j)
            if (j != i) others.push_back(gens[j]);
        if (others.empty()) break;
        if (lp_feasible_eq(columns(others, d), gens[i], tol))
            gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return gens;
}

namespace {

// Incremental DD on a pointed cone: start from generators of R^k and cut one
// halfspace at a time.  Every (outside, strictly-inside) pair contributes the
// boundary combination; pruning keeps the list small.  Correct for any
// polyhedral cone; adjacency bookkeeping is deliberately traded for LP
// pruning at desk scale.
std::vector<Vec> dd_pointed(const std::vector<Vec>& rows, int k, double tol) {
    std::vector<Vec> gens;
    for (int i = 0; i < k; ++i) gens.push_back(Vec::Unit(k, i));
    gens.push_back(-Vec::Ones(k) / std::sqrt(static_cast<double>(k)));

    for (const Vec& h : rows) {
        std::vector<Vec> next;
        std::vector<double> s(gens.size());
        for (size_t i = 0; i < gens.size(); ++i) s[i] = h.dot(gens[i]);
        for (size_t i = 0; i < gens.size(); ++i)
            if (s[i] <= tol) next.push_back(gens[i]);
        for (size_t p = 0; p < gens.size(); ++p) {
            if (s[p] <= tol) continue;
            for (size_t q = 0; q < gens.size(); ++q) {
                if (s[q] >= -tol) continue;
                next.push_back(s[p] * gens[q] - s[q] * gens[p]);
            }
        }
        gens = dd_prune(dd_canonicalize(next, tol), tol);
    }
    return gens;
}

}  // namespace

std::vector<Vec> dd_dual(const std::vector<Vec>& rows_in, int dim, const Tolerances& tols) {
    if (dim > tols.dd_max_dim)
        throw PreconditionError("dd_dimension_bound",
                                "double description refused: ambient dimension " +
                                    std::to_string(dim) + " exceeds bound " +
                                    std::to_string(tols.dd_max_dim));
    const double tol = tols.zero;
    std::vector<Vec> rows = dd_canonicalize(rows_in, tol);

    std::vector<Vec> out;
    if (rows.empty()) {
        for (int i = 0; i < dim; ++i) {
            out.push_back(Vec::Unit(dim, i));
            out.push_back(-Vec::Unit(dim, i));
        }
        return out;
    }

    // lineality = kernel of the stacked rows; the pointed part lives in its
    // orthogonal complement
    Mat R(static_cast<int>(rows.size()), dim);
    for (size_t i = 0; i < rows.size(); ++i) R.row(static_cast<int>(i)) = rows[i].transpose();
    Mat L = nullspace(R, tol);
    Mat U = orthogonal_complement(L, tol);
    const int k = static_cast<int>(U.cols());

    if (k > 0) {
        std::vector<Vec> proj;
        proj.reserve(rows.size());
        for (const Vec& h : rows) proj.push_back(U.transpose() * h);
        std::vector<Vec> pointed = dd_pointed(dd_canonicalize(proj, tol), k, tol);
        for (const Vec& g : pointed) out.push_back(U * g);
    }
    for (int j = 0; j < L.cols(); ++j) {
        out.push_back(L.col(j));
        out.push_back(-L.col(j));
    }
    return dd_canonicalize(out, tol);
}

}  // namespace varpoly
