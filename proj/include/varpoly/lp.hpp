#pragma once

#include "varpoly/linalg.hpp"

namespace varpoly {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec x;              // primal point (meaningful for Optimal)
    double value = 0;   // objective at x
};

// max <c,x>  s.t.  A x = b,  x >= 0.
// Dense two-phase tableau simplex, Bland's rule (cycling-free).  Sizes here
// are desk scale (tens of rows/columns), so clarity beats sparsity.
LpResult lp_solve(const Mat& A, const Vec& b, const Vec& c, double pivot_tol = 1e-11);

// Is {x >= 0 : A x = b} nonempty?  (phase 1 only)  Exact-feasibility test:
// the one-signed artificials can amplify a near-miss on an ill-scaled row,
// so approximate membership questions must measure a two-sided residual
// instead of calling this.
bool lp_feasible_eq(const Mat& A, const Vec& b, double pivot_tol = 1e-11);

// Is {z free : B z <= beta} nonempty?  (free variables split, slacks added)
bool lp_feasible_ineq(const Mat& B, const Vec& beta, double pivot_tol = 1e-11);

}  // namespace varpoly
