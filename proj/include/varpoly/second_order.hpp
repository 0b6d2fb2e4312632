#pragma once

#include <optional>
#include <utility>

#include "varpoly/composite.hpp"

namespace varpoly {

// Solution set of  grad Phi(x)^T lambda = v,  lambda in subdiff g(Phi(x)),
// in generator form (computed by double description on the lifted system).
// Empty is a meaningful answer, not an error.
struct MultiplierSet {
    PolytopeRep description;
    bool empty() const { return description.empty(); }
    bool is_singleton() const {
        return description.points.size() == 1 && description.rays.empty();
    }
    std::optional<Vec> unique() const {
        if (is_singleton()) return description.points[0];
        return std::nullopt;
    }
};

// Constraint-qualification verdict with a certificate on failure: a nonzero
// vector in the intersection that should have been trivial.
struct QualificationReport {
    bool holds = false;
    std::optional<Vec> witness;
    LinSubspace lhs;          // the subdifferential-side object (span / normal cone span)
    LinSubspace ker_adjoint;  // ker grad Phi(x)^T
};

enum class Verdict { Holds, Fails, Inconclusive };

struct GrowthReport {
    Verdict verdict = Verdict::Inconclusive;
    double modulus = 0;   // smallest reduced eigenvalue (+inf when vacuous)
    int reduced_dim = 0;  // dimension of the subspace the Hessian was reduced to
};

// Three equivalent nondegeneracy tests that must agree.
struct NondegeneracyReport {
    bool nondegenerate = false;
    bool ri_image = false;       // v in ri subdiff phi(x)
    bool ri_multiplier = false;  // some multiplier lies in ri subdiff g(Phi(x))
    bool cone_subspace = false;  // critical cone of phi is a linear subspace
};

struct StrictStabilityReport {
    bool verdict = false;    // nondegeneracy at the base pair
    int samples = 0;         // certified nearby graph pairs probed
    int cones_matching = 0;  // how many sampled critical cones equal the base cone
};

struct GraphRegularityReport {
    bool regular = false;        // graphical derivative and coderivative coincide
    bool domains_equal = false;  // pullback of K_g vs pullback of span K_g
    int value_checks = 0;        // sampled direction value-set comparisons
    int dom_dim = 0;             // dim span of the derivative's domain cone
    int dom_star_dim = 0;        // dim of the coderivative's domain subspace
};

// ---- operations -------------------------------------------------------------

// Multipliers at (x, v); refuses when x is outside dom phi.
MultiplierSet lagrange_multipliers(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                   const Tolerances& tols = {});

// Returns one multiplier when the set is nonempty (cheap LP, no DD).
std::optional<Vec> any_multiplier(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                  const Tolerances& tols = {});

// span{a_i - a_j : i,j active} + span{b_i : i active}  versus  ker grad Phi^T
QualificationReport soqc_check(const CompositeProblem& cp, const Vec& x, const Vec& lambda,
                               const Tolerances& tols = {});

// N_{dom g}(Phi(x))  versus  ker grad Phi^T
QualificationReport bcq_check(const CompositeProblem& cp, const Vec& x,
                              const Tolerances& tols = {});

// K_phi(x, v) = { w : grad Phi(x) w in K_g(Phi(x), lambda) }; the pullback is
// the same for every multiplier lambda.  Requires the basic qualification.
ConeRep critical_cone_phi(const CompositeProblem& cp, const Vec& x, const Vec& v,
                          const Tolerances& tols = {});

// The three tests agree or a ConsistencyError is thrown.
NondegeneracyReport nondegeneracy_check(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                        const Tolerances& tols = {});

// second subderivative value at direction w:
//   <lambda, Hess Phi(x)(w,w)> when grad Phi(x) w lies in K_g, else +inf.
// Requires a unique multiplier and the stronger qualification.
double second_subderivative(const CompositeProblem& cp, const Vec& x, const Vec& v, const Vec& w,
                            const Tolerances& tols = {});

// strict variant: membership relaxes to the span of K_g
double strict_second_subderivative(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                   const Vec& w, const Tolerances& tols = {});

// Reduced-Hessian positivity on { w : grad Phi(x) w in span K_g }.
GrowthReport quadratic_growth_check(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                    const Tolerances& tols = {});

// Nondegeneracy verdict plus a sampled probe: critical cones of g at certified
// nearby graph pairs must match the base cone when the verdict holds.
StrictStabilityReport strict_tepi_check(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                        double radius, int count, const Tolerances& tols = {});

// Domain/value comparison of the graphical derivative and coderivative of
// subdiff phi at (x, v); the verdict is asserted to equal nondegeneracy.
GraphRegularityReport graph_regularity_report(const CompositeProblem& cp, const Vec& x,
                                              const Vec& v, const Tolerances& tols = {});

// gamma = 1 / sigma_min( grad Phi(x)^T restricted to the qualification span );
// the uniform metric-regularity constant of the linearized constraint map is
// twice this value.  Requires the qualification to hold.
double mr_modulus_gamma(const CompositeProblem& cp, const Vec& x, const Vec& lambda,
                        const Tolerances& tols = {});

// ---- aggregate --------------------------------------------------------------

struct SecondOrderReport {
    bool bcq = false;
    bool soqc = false;
    MultiplierSet multipliers;
    ConeRep cone_g;    // critical cone of g at (Phi(x), lambda)
    ConeRep cone_phi;  // pullback critical cone
    NondegeneracyReport nondegeneracy;
    GrowthReport growth;
    std::optional<GrowthReport> tilt;   // growth at v = 0 when 0 is a subgradient
    std::optional<double> gamma;        // regularity modulus when the qualification holds
    std::vector<std::pair<Vec, double>> d2_probes;
    std::vector<std::pair<Vec, double>> strict_d2_probes;
};

SecondOrderReport analyze(const CompositeProblem& cp, const Vec& x, const Vec& v,
                          const Tolerances& tols = {});

}  // namespace varpoly
