#pragma once

#include "varpoly/geneq.hpp"

namespace varpoly::catalog {

// Small composite problems used across the test suites and shipped as sample
// inputs.  Each one stores a certified base pair (xbar, vbar).

// |x| as a two-piece max; base (0, vbar), so vbar in [-1, 1].
CompositeProblem abs_value(double vbar = 0.0);

// |x^2 - x|: the outer max folds a quadratic, putting a kink with curvature
// at the origin.  Base (0, -1), the smooth-side gradient limit.
CompositeProblem kinked_quadratic();

// Indicator of {x1 <= 0, x2 <= x1^2}: an inequality-constrained region with
// one curved boundary.  Base ((0,0), (0,1)), a normal at the corner.
CompositeProblem orthant_nlp();

// Indicator of the unit circle in R^2 (an equality manifold written as two
// opposite rows).  Base ((1,0), (1,0)), a normal pointing outward.
CompositeProblem circle();

// -x^2 + indicator of the halfline x <= 0: concave curvature against an
// active constraint.  Base (0, 0).
CompositeProblem neg_quadratic();

// Indicator of the halfline x <= 0.  Base (0, 1).
CompositeProblem halfline();

// x^2 through a linear outer function: smooth everywhere.  Base (0, 0).
CompositeProblem squared();

// Indicator of the unit sphere in R^3.  Base (e1, 0).
CompositeProblem sphere3();

// Indicator of the axis line {x2 = 0} in R^2.  Base ((0,0), (0,0)).
CompositeProblem axis_line();

// Generalized equations over the catalog: u in f(x) + subdiff phi(x), f = id.
GeneralizedEquation halfline_ge();  // ubar = 1, solved by x = 0
GeneralizedEquation circle_ge();    // ubar = (2,0), solved by x = (1,0)

}  // namespace varpoly::catalog
