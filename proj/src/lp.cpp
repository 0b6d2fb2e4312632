#include "varpoly/lp.hpp"

#include <cmath>
#include <limits>

#include "varpoly/errors.hpp"

namespace varpoly {
namespace {

// Tableau layout: rows are constraints, the last column is the rhs, basis[i]
// is the variable basic in row i.
struct Tableau {
    Mat T;
    std::vector<int> basis;
    double tol;

    void pivot(int row, int col) {
        T.row(row) /= T(row, col);
        for (int i = 0; i < T.rows(); ++i) {
            if (i == row) continue;
            double f = T(i, col);
            if (f != 0.0) T.row(i) -= f * T.row(row);
        }
        basis[static_cast<size_t>(row)] = col;
    }

    // One Bland step maximizing the reduced objective row `obj` (length =
    // number of variables).  Entering: lowest index with reduced cost > tol.
    // Leaving: min ratio, ties broken by lowest basic variable index.
    // Returns false at optimality; sets *unbounded when no leaving row exists.
    bool step(Vec& obj, bool* unbounded) {
        int ncol = static_cast<int>(obj.size());
        int enter = -1;
        for (int j = 0; j < ncol; ++j) {
            if (obj[j] > tol) { enter = j; break; }
        }
        if (enter < 0) return false;
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < T.rows(); ++i) {
            if (T(i, enter) > tol) {
                double ratio = T(i, static_cast<int>(T.cols()) - 1) / T(i, enter);
                if (ratio < best - tol ||
                    (ratio < best + tol && leave >= 0 &&
                     basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            if (!unbounded) throw LpError("simplex: unbounded auxiliary objective");
            *unbounded = true;
            return false;
        }
        pivot(leave, enter);
        double f = obj[enter];
        if (f != 0.0) obj -= f * T.row(leave).head(ncol).transpose();
        return true;
    }

    void run(Vec& obj, bool* unbounded) {
        int guard = 0;
        while (step(obj, unbounded)) {
            if (++guard > 20000) throw LpError("simplex: did not terminate");
        }
    }
};

}  // namespace

LpResult lp_solve(const Mat& A_in, const Vec& b_in, const Vec& c, double tol) {
    const int m = static_cast<int>(A_in.rows());
    const int n = static_cast<int>(A_in.cols());
    if (b_in.size() != m || c.size() != n) throw LpError("simplex: shape mismatch");
    if (m == 0) {
        // no constraints: optimum is 0 iff c <= 0, else unbounded
        for (int j = 0; j < n; ++j)
            if (c[j] > tol) return {LpStatus::Unbounded, Vec::Zero(n), 0.0};
        return {LpStatus::Optimal, Vec::Zero(n), 0.0};
    }

    Mat A = A_in;
    Vec b = b_in;
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) { A.row(i) *= -1.0; b[i] = -b[i]; }
    }

    // ---- phase 1: artificial columns n..n+m-1, maximize -(sum artificials)
    Tableau tab;
    tab.tol = tol;
    tab.T = Mat::Zero(m, n + m + 1);
    tab.T.block(0, 0, m, n) = A;
    tab.T.block(0, n, m, m) = Mat::Identity(m, m);
    tab.T.col(n + m) = b;
    tab.basis.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) tab.basis[static_cast<size_t>(i)] = n + i;

    Vec obj = Vec::Zero(n + m);
    for (int i = 0; i < m; ++i) obj.head(n) += tab.T.row(i).head(n).transpose();
    tab.run(obj, nullptr);

    double infeas = 0;
    for (int i = 0; i < m; ++i)
        if (tab.basis[static_cast<size_t>(i)] >= n) infeas += tab.T(i, n + m);
    if (infeas > 1e3 * tol * (1.0 + b.lpNorm<Eigen::Infinity>()))
        return {LpStatus::Infeasible, Vec::Zero(n), 0.0};

    // pivot degenerate artificials out; rows that cannot be cleared are
    // redundant constraints and are dropped
    std::vector<int> keep;
    for (int i = 0; i < m; ++i) {
        if (tab.basis[static_cast<size_t>(i)] < n) { keep.push_back(i); continue; }
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.T(i, j)) > tol) { col = j; break; }
        if (col >= 0) { tab.pivot(i, col); keep.push_back(i); }
    }

    // ---- phase 2 on a tableau without artificial columns
    Tableau t2;
    t2.tol = tol;
    t2.T = Mat(static_cast<int>(keep.size()), n + 1);
    t2.basis.resize(keep.size());
    for (size_t k = 0; k < keep.size(); ++k) {
        t2.T.row(static_cast<int>(k)).head(n) = tab.T.row(keep[k]).head(n);
        t2.T(static_cast<int>(k), n) = tab.T(keep[k], n + m);
        t2.basis[k] = tab.basis[static_cast<size_t>(keep[k])];
    }

    Vec obj2 = c;
    for (size_t k = 0; k < t2.basis.size(); ++k) {
        double f = obj2[t2.basis[k]];
        if (f != 0.0) obj2 -= f * t2.T.row(static_cast<int>(k)).head(n).transpose();
    }
    bool unbounded = false;
    t2.run(obj2, &unbounded);
    if (unbounded) return {LpStatus::Unbounded, Vec::Zero(n), 0.0};

    Vec x = Vec::Zero(n);
    for (size_t k = 0; k < t2.basis.size(); ++k)
        x[t2.basis[k]] = t2.T(static_cast<int>(k), n);
    return {LpStatus::Optimal, x, c.dot(x)};
}

bool lp_feasible_eq(const Mat& A, const Vec& b, double tol) {
    return lp_solve(A, b, Vec::Zero(A.cols()), tol).status == LpStatus::Optimal;
}

bool lp_feasible_ineq(const Mat& B, const Vec& beta, double tol) {
    // z = zp - zm with slack s:  B zp - B zm + s = beta, all variables >= 0
    const int m = static_cast<int>(B.rows());
    const int d = static_cast<int>(B.cols());
    if (m == 0) return true;
    Mat A(m, 2 * d + m);
    A << B, -B, Mat::Identity(m, m);
    return lp_feasible_eq(A, beta, tol);
}

}  // namespace varpoly
