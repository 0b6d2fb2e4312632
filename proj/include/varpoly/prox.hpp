#pragma once

#include <optional>

#include "varpoly/composite.hpp"
#include "varpoly/second_order.hpp"

namespace varpoly {

// Proximal data for phi = g o Phi with prox parameter r in (0, 1/rho).
// rho is the caller's prox-boundedness threshold; construction additionally
// runs a sampled growth heuristic and refuses when phi + |.|^2/(2r) visibly
// decays along some ray.
struct ProxProblem {
    CompositeProblem cp;
    double r = 1.0;
    double rho = 0.0;

    ProxProblem() = default;
    ProxProblem(CompositeProblem cp_, double r_, double rho_, const Tolerances& tols = {});
};

struct ProxResult {
    Vec point;
    double objective = 0;         // phi(p) + |x - p|^2 / (2r)
    Vec subgradient;              // (x - p) / r, certified member of subdiff phi(p)
    bool localized_differs = false;  // nearest candidate is not the best-objective one
    int candidates = 0;
};

ProxResult prox_compute(const ProxProblem& pp, const Vec& x, const Tolerances& tols = {});

double moreau_envelope(const ProxProblem& pp, const Vec& x, const Tolerances& tols = {});
Vec moreau_gradient(const ProxProblem& pp, const Vec& x, const Tolerances& tols = {});

// Max deviation between moreau_gradient and central differences of the envelope.
double moreau_gradient_check(const ProxProblem& pp, const Vec& x, const Tolerances& tols = {});

// Differentiability verdict for the prox map near ubar = xbar + r*vbar, with a
// finite-difference scan that must not contradict the formula verdict.
enum class ProbeOutcome { Smooth, Jump, Inconclusive };

struct ProxC1Report {
    bool formula_c1 = false;   // nondegeneracy of (xbar, vbar)
    ProbeOutcome probe = ProbeOutcome::Inconclusive;
    double max_jump = 0;       // largest refined directional-derivative gap
    double jump_offset = 0;    // scan offset of that gap along jump_direction
    Vec jump_direction;
    Vec jump_point;            // ubar + jump_offset * jump_direction
};

ProxC1Report prox_c1_check(const ProxProblem& pp, const Tolerances& tols = {});

// Jacobian of the prox map at ubar = xbar + r*vbar under nondegeneracy:
// B (B^T (I + r H) B)^{-1} B^T on the critical subspace basis B.
Mat prox_jacobian(const ProxProblem& pp, const Tolerances& tols = {});

// Projection onto the zero set of Phi when g is the indicator of {0}: the
// derivative is the orthogonal projector onto ker grad Phi(xbar), asserted to
// match prox_jacobian at r = 1, vbar = 0.
Mat manifold_projection_jacobian(const CompositeProblem& cp, const Vec& xbar,
                                 const Tolerances& tols = {});

// Projection of y onto dom phi (prox of the domain indicator); used by the
// sampling layer to restore feasibility of perturbed points.
Vec project_to_domain(const CompositeProblem& cp, const Vec& y, const Tolerances& tols = {});

}  // namespace varpoly
