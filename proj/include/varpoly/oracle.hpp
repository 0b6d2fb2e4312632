#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varpoly/composite.hpp"

namespace varpoly {

// Sampling-based estimates of second-order difference quotients, kept fully
// independent of the closed-form machinery so the two can be cross-checked.

// [phi(x + t w) - phi(x) - t <v, w>] / (t^2 / 2); +inf propagates.
double delta2(const CompositeProblem& cp, const Vec& x, const Vec& v, const Vec& w, double t,
              const Tolerances& tols = {});

// Tolerances for evaluating quotients at level t: the domain slack (and the
// restoration residual behind it) must vanish like t^2, or points lying
// within the slack shell but outside the true domain contribute spurious
// values of size slack / t^2 to the sampled minimum.  Both knobs are floored
// near machine precision (1e-13 / 1e-14) so tiny levels degrade gracefully
// instead of demanding projections beyond double accuracy; the residual floor
// stays below the slack floor so restored points always pass the domain test.
Tolerances level_quotient_tols(const Tolerances& tols, double t);

struct QuotientGrid {
    std::vector<double> t_levels{1e-1, 1e-2, 1e-3, 1e-4};
    int dir_samples = 64;              // random directions per level
    int base_samples = 32;             // graph pairs per level (strict variant)
    double divergence_threshold = 1e3; // estimate above this counts as +inf
    double rho = 10.0;                 // epigraph value clip for probe metrics
    int epi_grid = 24;                 // direction-grid size per sampled function
};

// Requires at least three strictly decreasing positive t levels; throws
// PreconditionError("bad_grid") otherwise.
void validate_grid(const QuotientGrid& grid);

struct SampledD2 {
    std::vector<double> level_min;  // min finite quotient per t level
    double estimate = 0;            // finest-level minimum
    bool diverged = false;          // estimate exceeded divergence_threshold
};

// Min of delta2 over perturbed directions w' in a ball of radius 2t around w,
// refined level by level.  Direction sets are deterministic-stencil plus
// seeded-random with a prefix property: enlarging dir_samples only adds
// directions, so the level minima can only decrease under refinement.
// Directions whose step x + t w' leaves dom phi are additionally restored by
// projecting the step onto the domain and kept when the restored direction
// stays in the ball; for curved domain boundaries this is what lets the
// sampled minimum reach the boundary curvature instead of stalling at +inf.
SampledD2 sampled_d2(const CompositeProblem& cp, const Vec& x, const Vec& v, const Vec& w,
                     const QuotientGrid& grid = {}, const Tolerances& tols = {});

// Strict variant around the stored base pair: additionally samples graph
// pairs (x_k, v_k) within distance t of (xbar, vbar) and minimizes over them.
SampledD2 sampled_strict_d2(const CompositeProblem& cp, const Vec& w,
                            const QuotientGrid& grid = {}, const Tolerances& tols = {});

// Raw rows behind sampled_d2, for CSV export: one row per evaluated quotient.
struct QuotientRow {
    double t = 0;
    Vec w_prime;
    double value = 0;  // +inf rows are kept
};

std::vector<QuotientRow> quotient_rows(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                       const Vec& w, const QuotientGrid& grid = {},
                                       const Tolerances& tols = {});

// Subgradient-graph sampling near a center point.  Points come from a
// deterministic axis stencil plus seeded random draws; infeasible draws are
// restored by projecting onto dom phi and kept only if they remain in the
// ball.  Every candidate is additionally projected onto each surface where
// a domain row active at the center stays tight (boundary strata): active
// rows contribute subgradients only while they are tight, and random draws
// hit a curved surface with probability zero.  Stratum projections may bow
// outward from the ball by the surface curvature, so they are accepted up
// to radius * (1 + radius).  Each kept point must satisfy the basic
// constraint qualification; failures are dropped and counted.  At each
// point the candidate
// subgradients are the generators of subdiff phi, their mean, and (when
// v_center is given) the projection of v_center onto subdiff phi; with
// v_center the pairs are also filtered to |v - v_center| <= 2 * radius.
// The factor two on the subgradient ball is deliberate: along a polyhedral
// kink the subgradient moves at up to twice the point rate (a gradient
// 2x - 1 traversed at |x| <= t spans a 2t interval), and boundary pairs of
// that kind are exactly the ones the strict quotient needs to reach.
struct GphSample {
    Vec x;
    Vec v;
};

struct GphSampleSet {
    std::vector<GphSample> samples;
    int bcq_dropped = 0;   // sampled points discarded for failing the BCQ
    bool warning = false;  // fewer than half the requested draws survived
};

GphSampleSet sample_gph(const CompositeProblem& cp, const Vec& x_center,
                        const std::optional<Vec>& v_center, double radius, int budget,
                        const Tolerances& tols = {});

// Batch quotient evaluation: one value per column of dirs.  The parallel
// kernel must produce bitwise-identical output to the serial one (results are
// stored by input index; no order-dependent reduction).
std::vector<double> quotient_kernel_serial(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                           double t, const Mat& dirs,
                                           const Tolerances& tols = {});
std::vector<double> quotient_kernel_parallel(const CompositeProblem& cp, const Vec& x,
                                             const Vec& v, double t, const Mat& dirs,
                                             const Tolerances& tols = {});

// A function sampled on a finite point set, values clipped to [-rho, rho]
// when fed to epi_distance (so indicators become comparable).
struct SampledFunction {
    Mat points;  // one sample point per column
    Vec values;  // may contain +inf; clipped by epi_distance
};

// Exact Hausdorff distance between the clipped sampled epigraphs
// {(p, s) : s in [clip(value(p)), rho]}.  Symmetric, zero on identical
// samples, and satisfies the triangle inequality exactly.  Both functions
// must be sampled on the same point grid; a mismatch throws
// PreconditionError("grid_mismatch").
double epi_distance(const SampledFunction& F, const SampledFunction& G, double rho);

// Shared direction grid and quotient-function sampler for the probe below.
Mat direction_grid(int dim, double radius, int count, std::uint64_t seed);
SampledFunction sample_quotient_function(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                         double t, const Mat& wgrid,
                                         const Tolerances& tols = {});

// Epi-convergence probe at the stored base pair: per level t, the sampled
// quotient functions at graph pairs near (xbar, vbar) are compared against
// the closed-form second subderivative on a shared direction grid, and the
// worst epi_distance per level is tracked.  The empirical trend must not
// contradict the nondegeneracy verdict: a true verdict should drive the
// final distance below tol.epi, a false one should leave it at or above
// 10 * tol.epi, and anything in between is reported as inconsistent (the
// probe never upgrades itself to a proof in either direction).
enum class EpiStatus { ConsistentConvergent, ConsistentDivergent, Inconsistent };

struct EpiProbeReport {
    std::vector<double> levels;
    std::vector<double> distances;  // worst epi_distance per level
    bool formula_verdict = false;   // strict twice-epi-differentiability claim
    EpiStatus status = EpiStatus::Inconsistent;
    std::string diagnostics;        // filled when the trend matches neither pattern
};

EpiProbeReport epi_convergence_probe(const CompositeProblem& cp, const QuotientGrid& grid = {},
                                     const Tolerances& tols = {});

}  // namespace varpoly
