#pragma once

#include <vector>

#include "varpoly/config.hpp"
#include "varpoly/linalg.hpp"

namespace varpoly {

// Normalize to unit length, drop (near-)zero vectors, remove duplicates.
std::vector<Vec> dd_canonicalize(const std::vector<Vec>& vs, double tol);

// Drop generators that lie in the cone of the remaining ones (LP test).
std::vector<Vec> dd_prune(std::vector<Vec> gens, double tol);

// Core double-description step.  `rows` are halfspace normals describing
// K = {x : <r,x> <= 0 for all r}; the result generates K.  By polarity the
// same routine converts generators to halfspace normals (the polar cone's
// generators are exactly the input cone's halfspaces).  Lineality is split
// off first (kernel of the stacked rows) and returned as +/- basis pairs, so
// the incremental part always runs on a pointed cone.
std::vector<Vec> dd_dual(const std::vector<Vec>& rows, int dim, const Tolerances& tols);

}  // namespace varpoly
