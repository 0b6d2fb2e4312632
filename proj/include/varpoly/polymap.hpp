#pragma once

#include <vector>

#include "varpoly/config.hpp"
#include "varpoly/linalg.hpp"

namespace varpoly {

// Polynomial in n variables as a list of monomials; derivatives are exact.
struct Monomial {
    std::vector<int> exp;  // one exponent per input variable
    double coef = 0;
};

struct Polynomial {
    int nvars = 0;
    std::vector<Monomial> terms;

    double eval(const Vec& x) const;
    double d1(const Vec& x, int i) const;          // d/dx_i
    double d2(const Vec& x, int i, int j) const;   // d^2/dx_i dx_j
};

// Polynomial map R^n -> R^m with exact Jacobian and Hessian stacks.
struct PolyMap {
    int n_in = 0;
    int n_out = 0;
    std::vector<Polynomial> comp;

    Vec eval(const Vec& x) const;
    Mat jacobian(const Vec& x) const;              // n_out x n_in
    std::vector<Mat> hessian(const Vec& x) const;  // one n_in x n_in block per component
    // sum_k lambda_k Hess Phi_k(x)
    Mat hessian_lambda(const Vec& x, const Vec& lambda) const;

    static PolyMap identity(int n);
    static PolyMap linear(const Mat& M);
};

// Central-difference check of the exact derivatives; returns the max absolute
// deviations.  Deviations are O(h^2) for polynomial data, so callers can pin
// an envelope c*h^2.
struct FdReport {
    double jacobian_dev = 0;
    double hessian_dev = 0;
};
FdReport fd_validate(const PolyMap& map, const Vec& x, double h);

}  // namespace varpoly
