#pragma once

#include <cstdint>

namespace varpoly {

// Central tolerance/size knobs.  Every operation takes these explicitly (with
// defaults) so the CLI can override any of them via --tol KEY=VAL.
struct Tolerances {
    double act = 1e-9;       // active-set detection on |<a,z>-alpha - g(z)| and |<b,z>-beta|
    double ri = 1e-9;        // relative-interior margin: ri_member is true iff eps* > ri
    double eig = 1e-9;       // eigenvalue threshold separating growth verdicts
    double res = 1e-10;      // Newton residual acceptance for solve kernels
    double jump = 1e-3;      // Jacobian discontinuity threshold for the prox probe
    double epi = 1e-2;       // epigraph-distance threshold for convergence probes
    double zero = 1e-9;      // generic rank / duplicate / membership slack
    double fd_step = 1e-5;   // central-difference step for probes
    int dd_max_dim = 10;     // double-description refuses above this ambient dimension
    int pattern_budget = 1 << 12;  // active-pattern enumeration refuses above this
    int newton_max_iter = 50;
    std::uint64_t seed = 42;
};

}  // namespace varpoly
