#pragma once

#include <optional>

#include "varpoly/polyhedral.hpp"
#include "varpoly/polymap.hpp"

namespace varpoly {

// phi(x) = g(Phi(x)) with g polyhedral and Phi a polynomial map.  When a base
// pair (xbar, vbar) is supplied it is certified at construction: vbar must be
// a subgradient of phi at xbar (multiplier LP).
struct CompositeProblem {
    PolyhedralFunction g;
    PolyMap Phi;
    std::optional<Vec> xbar;
    std::optional<Vec> vbar;

    CompositeProblem() = default;
    CompositeProblem(PolyhedralFunction g_, PolyMap Phi_,
                     std::optional<Vec> xbar_ = std::nullopt,
                     std::optional<Vec> vbar_ = std::nullopt, const Tolerances& tols = {});

    int n() const { return Phi.n_in; }
    int m() const { return Phi.n_out; }
    double value(const Vec& x, const Tolerances& tols = {}) const;
};

// subdifferential of phi at x as the linear image grad Phi(x)^T [subdiff g]
PolytopeRep phi_subdifferential(const CompositeProblem& cp, const Vec& x,
                                const Tolerances& tols = {});

// v in subdiff phi(x)?  Feasibility of the multiplier system
//   grad Phi(x)^T lambda = v,  lambda in subdiff g(Phi(x)).
bool subgradient_member(const CompositeProblem& cp, const Vec& x, const Vec& v,
                        const Tolerances& tols = {});

}  // namespace varpoly
