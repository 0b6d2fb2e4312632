#include "varpoly/composite.hpp"

#include <cmath>

#include "varpoly/errors.hpp"

namespace varpoly {

CompositeProblem::CompositeProblem(PolyhedralFunction g_, PolyMap Phi_, std::optional<Vec> xbar_,
                                   std::optional<Vec> vbar_, const Tolerances& tols)
    : g(std::move(g_)), Phi(std::move(Phi_)), xbar(std::move(xbar_)), vbar(std::move(vbar_)) {
    if (g.m != Phi.n_out)
        throw PreconditionError("shape_mismatch",
                                "inner map output dimension differs from the outer function");
    if (xbar.has_value() != vbar.has_value())
        throw PreconditionError("base_pair_incomplete", "base point and base subgradient "
                                                        "must be supplied together");
    if (xbar) {
        if (!std::isfinite(value(*xbar, tols)))
            throw PreconditionError("base_outside_domain", "base point lies outside dom phi");
        if (!subgradient_member(*this, *xbar, *vbar, tols))
            throw PreconditionError("base_not_subgradient",
                                    "base vbar is not a subgradient at xbar (multiplier LP)");
    }
}

double CompositeProblem::value(const Vec& x, const Tolerances& tols) const {
    return eval(g, Phi.eval(x), tols);
}

PolytopeRep phi_subdifferential(const CompositeProblem& cp, const Vec& x,
                                const Tolerances& tols) {
    Mat Jt = cp.Phi.jacobian(x).transpose();
    return map_polytope(Jt, subdifferential(cp.g, cp.Phi.eval(x), tols));
}

bool subgradient_member(const CompositeProblem& cp, const Vec& x, const Vec& v,
                        const Tolerances& tols) {
    Vec z = cp.Phi.eval(x);
    if (!std::isfinite(eval(cp.g, z, tols))) return false;
    Mat Jt = cp.Phi.jacobian(x).transpose();
    return member(map_polytope(Jt, subdifferential(cp.g, z, tols)), v, tols);
}

}  // namespace varpoly
