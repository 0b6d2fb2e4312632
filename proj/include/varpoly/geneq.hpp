#pragma once

#include <optional>
#include <string>

#include "varpoly/composite.hpp"
#include "varpoly/second_order.hpp"

namespace varpoly {

// Generalized equation  u in f(x) + subdiff phi(x)  with smooth polynomial f.
struct GeneralizedEquation {
    PolyMap f;            // R^n -> R^n
    CompositeProblem cp;  // phi = g o Phi
    Vec ubar;

    GeneralizedEquation() = default;
    GeneralizedEquation(PolyMap f_, CompositeProblem cp_, Vec ubar_);
};

struct SolutionCheck {
    bool is_solution = false;
    bool nondegenerate = false;  // ubar - f(x) in ri subdiff phi(x)
};

// Certifies x via the multiplier LP; the ri test is cross-checked against the
// subspace test on the pullback critical cone.
SolutionCheck check_solution(const GeneralizedEquation& ge, const Vec& x,
                             const Tolerances& tols = {});

// Metric-regularity criteria at a nondegenerate solution, evaluated three
// independent ways on A = grad f + Hess<lambda, Phi> and the critical subspace.
struct MrReport {
    bool nondegenerate = false;
    bool regular = false;
    bool strong = false;         // equals `regular` at nondegenerate solutions
    bool crit_kernel = false;    // {w : A^T w in Kbar-perp} meets Kbar only at 0
    bool crit_range = false;     // A Kbar + Kbar-perp is everything
    bool crit_reduced = false;   // B^T A B nonsingular
    Mat A;
    Mat B;                       // orthonormal basis of the critical subspace
    ConeRep K_bar;               // the critical cone itself (a subspace here)
    std::optional<Mat> sigma_jacobian;  // B (B^T A B)^{-1} B^T when regular
};

MrReport mr_check(const GeneralizedEquation& ge, const Vec& x, const Tolerances& tols = {});

// The three regularity tests on a raw (A, subspace-basis) pair, each computed
// by a different linear-algebra route; they agree for every input or the
// algebra is wrong.  Exposed so property tests can drive them with random
// matrices and random subspaces directly.
struct MrCriteria {
    bool crit_kernel = false;
    bool crit_range = false;
    bool crit_reduced = false;
};

MrCriteria evaluate_mr_criteria(const Mat& A, const Mat& B, double zero_tol);

// Jacobian of the single-valued localization of the solution map at ubar.
Mat localization_jacobian(const GeneralizedEquation& ge, const Vec& x,
                          const Tolerances& tols = {});

// Damped-Newton solve over enumerated active patterns of g.
struct SolveResult {
    bool converged = false;
    Vec x;
    Vec lambda;
    double residual = 0;
    int patterns_tried = 0;
    std::string diagnostics;
};

SolveResult solve_ge(const GeneralizedEquation& ge, const Vec& u, const Vec& x0,
                     const Tolerances& tols = {});

// Shared pattern-enumeration kernel: solves  u in f(x) + grad Phi(x)^T
// [subdiff g](Phi(x))  returning the converged candidate nearest to x0.
SolveResult solve_inclusion(const PolyMap& f, const CompositeProblem& cp, const Vec& u,
                            const Vec& x0, const Tolerances& tols = {});

// All certified, deduplicated candidates behind solve_inclusion, for callers
// that rank them by a criterion other than distance to x0.
struct InclusionCandidates {
    std::vector<SolveResult> candidates;  // each with converged = true
    int patterns_tried = 0;
    std::string diagnostics;
};

InclusionCandidates inclusion_candidates(const PolyMap& f, const CompositeProblem& cp,
                                         const Vec& u, const Vec& x0,
                                         const Tolerances& tols = {});

// Finite-difference probe of the localization around ubar: solves at stencil
// and random right-hand sides, compares the FD Jacobian against the formula,
// and reports an empirical Lipschitz constant of the localization.
struct LocalizationProbe {
    Mat fd_jacobian;
    double max_jacobian_dev = 0;
    double lipschitz = 0;
    int solves = 0;
};

LocalizationProbe localization_probe(const GeneralizedEquation& ge, const Vec& x, double radius,
                                     int count, const Tolerances& tols = {});

}  // namespace varpoly
