#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varpoly/geneq.hpp"
#include "varpoly/oracle.hpp"

namespace varpoly {

// On-disk description of one problem instance.  Line-oriented text with
// sections; '#' starts a comment, blank lines are ignored:
//
//   [g]                              outer polyhedral function on R^m
//   piece = a_1 ... a_m ; alpha      one max piece <a,z> - alpha
//   row   = b_1 ... b_m ; beta       one domain row <b,z> <= beta
//   [phi]                            inner polynomial map R^n -> R^m
//   in   = n
//   comp = e_1 .. e_n : c, ...       monomials of one component
//   [f]                              optional smooth map R^n -> R^n
//   comp = ...
//   [points]                         optional named vectors
//   xbar | vbar | ubar | lambda | w
//   [params]                         solver / probe configuration
//   r, rho, radius, count, t_levels, dir_samples, base_samples,
//   divergence_threshold, epi_rho, epi_grid, seed, tol.<knob>
//
// Unknown sections and unknown keys are rejected with a ParseError carrying
// the line number.  serialize_problem writes every field back out (params
// included), and parse(serialize(x)) reproduces x exactly.
struct ProblemFile {
    PolyhedralFunction g;
    PolyMap Phi;
    std::optional<PolyMap> f;

    std::optional<Vec> xbar;
    std::optional<Vec> vbar;
    std::optional<Vec> ubar;
    std::optional<Vec> lambda;
    std::optional<Vec> w;

    std::vector<double> r_values{0.1, 0.5, 1.0};
    double rho = 1.0;      // prox-regularity bound supplied by the user
    double radius = 1e-3;  // localization / stability probe radius
    int count = 16;        // probe sample budget
    QuotientGrid grid;
    Tolerances tols;

    // Composite problem with the stored base pair (certified at construction).
    CompositeProblem problem(const Tolerances& t) const;

    // Generalized equation u in f(x) + subdiff phi(x); f defaults to the
    // identity.  Refuses when ubar is absent.
    GeneralizedEquation equation(const Tolerances& t) const;
};

ProblemFile parse_problem(std::istream& in);
ProblemFile parse_problem_text(const std::string& text);
ProblemFile parse_problem_path(const std::string& path);

std::string serialize_problem(const ProblemFile& pf);

// Applies one KEY=VAL tolerance override; unknown keys are a ParseError.
// Shared by [params] tol.* lines and the CLI --tol flag.
void apply_tol_override(Tolerances& tols, const std::string& key, double value);

}  // namespace varpoly
