#include "varpoly/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "varpoly/errors.hpp"
#include "varpoly/prox.hpp"
#include "varpoly/second_order.hpp"

namespace varpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t level_seed(std::uint64_t seed, size_t level) {
    return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(level + 1));
}

// Direction set around w: w itself, the axis stencil at the ball radius, then
// seeded random fill.  Random draws come after the deterministic block, so a
// larger `extra` only appends columns (level minima are monotone under
// refinement).
Mat build_dirs(int n, const Vec& w, double radius, int extra, std::uint64_t seed) {
    Mat D(n, 1 + 2 * n + std::max(0, extra));
    int c = 0;
    D.col(c++) = w;
    for (int i = 0; i < n; ++i) {
        D.col(c++) = w + radius * Vec::Unit(n, i);
        D.col(c++) = w - radius * Vec::Unit(n, i);
    }
    Rng rng(seed);
    for (int k = 0; k < extra; ++k) D.col(c++) = w + rng.ball(n, radius);
    return D;
}

double min_of(const std::vector<double>& vals) {
    double mn = kInf;
    for (double v : vals) mn = std::min(mn, v);
    return mn;
}

// build_dirs plus feasibility restoration: each direction whose step
// x + t w' leaves dom phi is projected back (the step, not the direction)
// and the restored direction is appended when it stays in the ball.  On a
// curved boundary the projected step lands exactly on the active surface,
// which is where the constrained quotient attains its minimum; plain ball
// sampling hits that surface with probability zero.
Mat build_dirs_restored(const CompositeProblem& cp, const Vec& x, const Vec& w, double t,
                        double radius, int extra, std::uint64_t seed, const Tolerances& tols) {
    Mat D = build_dirs(cp.n(), w, radius, extra, seed);
    std::vector<Vec> restored;
    for (int j = 0; j < D.cols(); ++j) {
        Vec step = x + t * D.col(j);
        if (std::isfinite(cp.value(step, tols))) continue;
        Vec p;
        try {
            p = project_to_domain(cp, step, tols);
        } catch (const PreconditionError&) {
            continue;  // restoration failed; the direction stays infeasible
        }
        Vec wr = (p - x) / t;
        if (std::isfinite(cp.value(x + t * wr, tols)) && (wr - w).norm() <= radius * (1.0 + 1e-9))
            restored.push_back(wr);
    }
    if (restored.empty()) return D;
    Mat out(D.rows(), D.cols() + static_cast<int>(restored.size()));
    out.leftCols(D.cols()) = D;
    for (size_t k = 0; k < restored.size(); ++k)
        out.col(D.cols() + static_cast<int>(k)) = restored[k];
    return out;
}

}  // namespace

void validate_grid(const QuotientGrid& grid) {
    if (grid.t_levels.size() < 3)
        throw PreconditionError("bad_grid", "at least three refinement levels are required");
    for (size_t i = 0; i < grid.t_levels.size(); ++i) {
        if (!(grid.t_levels[i] > 0))
            throw PreconditionError("bad_grid", "quotient levels must be positive");
        if (i > 0 && !(grid.t_levels[i] < grid.t_levels[i - 1]))
            throw PreconditionError("bad_grid", "quotient levels must strictly decrease");
    }
}

Tolerances level_quotient_tols(const Tolerances& tols, double t) {
    Tolerances out = tols;
    out.act = std::max(std::min(tols.act, 1e-5 * t * t), 1e-13);
    out.res = std::max(std::min(tols.res, 1e-6 * t * t), 1e-14);
    return out;
}

double delta2(const CompositeProblem& cp, const Vec& x, const Vec& v, const Vec& w, double t,
              const Tolerances& tols) {
    if (!(t > 0)) throw PreconditionError("bad_step", "quotient step must be positive");
    double f0 = cp.value(x, tols);
    if (!std::isfinite(f0))
        throw PreconditionError("outside_domain", "quotient base point has infinite value");
    double f1 = cp.value(x + t * w, tols);
    if (!std::isfinite(f1)) return kInf;
    return (f1 - f0 - t * v.dot(w)) / (t * t / 2.0);
}

std::vector<double> quotient_kernel_serial(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                           double t, const Mat& dirs, const Tolerances& tols) {
    if (!(t > 0)) throw PreconditionError("bad_step", "quotient step must be positive");
    double f0 = cp.value(x, tols);
    if (!std::isfinite(f0))
        throw PreconditionError("outside_domain", "quotient base point has infinite value");
    std::vector<double> out(static_cast<size_t>(dirs.cols()));
    for (int j = 0; j < dirs.cols(); ++j) {
        Vec w = dirs.col(j);
        double f1 = cp.value(x + t * w, tols);
        out[static_cast<size_t>(j)] =
            std::isfinite(f1) ? (f1 - f0 - t * v.dot(w)) / (t * t / 2.0) : kInf;
    }
    return out;
}

std::vector<double> quotient_kernel_parallel(const CompositeProblem& cp, const Vec& x,
                                             const Vec& v, double t, const Mat& dirs,
                                             const Tolerances& tols) {
    if (!(t > 0)) throw PreconditionError("bad_step", "quotient step must be positive");
    double f0 = cp.value(x, tols);
    if (!std::isfinite(f0))
        throw PreconditionError("outside_domain", "quotient base point has infinite value");
    const int cols = static_cast<int>(dirs.cols());
    std::vector<double> out(static_cast<size_t>(cols));
#ifdef VARPOLY_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < cols; ++j) {
        Vec w = dirs.col(j);
        double f1 = cp.value(x + t * w, tols);
        out[static_cast<size_t>(j)] =
            std::isfinite(f1) ? (f1 - f0 - t * v.dot(w)) / (t * t / 2.0) : kInf;
    }
    return out;
}

SampledD2 sampled_d2(const CompositeProblem& cp, const Vec& x, const Vec& v, const Vec& w,
                     const QuotientGrid& grid, const Tolerances& tols) {
    validate_grid(grid);
    SampledD2 out;
    for (size_t li = 0; li < grid.t_levels.size(); ++li) {
        double t = grid.t_levels[li];
        Tolerances lt = level_quotient_tols(tols, t);
        Mat dirs = build_dirs_restored(cp, x, w, t, 2.0 * t, grid.dir_samples,
                                       level_seed(tols.seed, li), lt);
        out.level_min.push_back(min_of(quotient_kernel_parallel(cp, x, v, t, dirs, lt)));
    }
    out.estimate = out.level_min.back();
    out.diverged = !(out.estimate < grid.divergence_threshold);
    return out;
}

std::vector<QuotientRow> quotient_rows(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                       const Vec& w, const QuotientGrid& grid,
                                       const Tolerances& tols) {
    validate_grid(grid);
    std::vector<QuotientRow> rows;
    for (size_t li = 0; li < grid.t_levels.size(); ++li) {
        double t = grid.t_levels[li];
        Tolerances lt = level_quotient_tols(tols, t);
        Mat dirs = build_dirs_restored(cp, x, w, t, 2.0 * t, grid.dir_samples,
                                       level_seed(tols.seed, li), lt);
        std::vector<double> vals = quotient_kernel_parallel(cp, x, v, t, dirs, lt);
        for (int j = 0; j < dirs.cols(); ++j)
            rows.push_back(QuotientRow{t, dirs.col(j), vals[static_cast<size_t>(j)]});
    }
    return rows;
}

GphSampleSet sample_gph(const CompositeProblem& cp, const Vec& x_center,
                        const std::optional<Vec>& v_center, double radius, int budget,
                        const Tolerances& tols) {
    if (!(radius > 0)) throw PreconditionError("bad_radius", "sampling radius must be positive");
    if (!std::isfinite(cp.value(x_center, tols)))
        throw PreconditionError("outside_domain", "sampling center has infinite value");
    const int n = cp.n();

    // candidate points: center, restored axis stencil, restored random draws
    std::vector<Vec> xs;
    std::vector<Vec> raws;  // pre-restoration candidates, reused per boundary stratum
    xs.push_back(x_center);
    raws.push_back(x_center);
    auto restore = [&](const Vec& y) {
        raws.push_back(y);
        if (std::isfinite(cp.value(y, tols))) {
            if ((y - x_center).norm() <= radius * (1.0 + 1e-9)) xs.push_back(y);
            return;
        }
        Vec p;
        try {
            p = project_to_domain(cp, y, tols);
        } catch (const PreconditionError&) {
            return;  // restoration failed; skip the draw
        }
        if (std::isfinite(cp.value(p, tols)) && (p - x_center).norm() <= radius * (1.0 + 1e-9))
            xs.push_back(p);
    };
    for (int i = 0; i < n; ++i) {
        restore(x_center + radius * Vec::Unit(n, i));
        restore(x_center - radius * Vec::Unit(n, i));
    }
    Rng rng(tols.seed);
    for (int k = 0; k < budget; ++k) restore(x_center + rng.ball(n, radius));

    // Boundary strata: every candidate is additionally projected onto each
    // surface where a row active at the center stays active (the row is
    // rewritten as an equality).  A domain row contributes subgradients only
    // while it is tight, so the graph pairs of constrained instances ride
    // these surfaces, and plain ball sampling hits a curved surface with
    // probability zero.  Surface projections may bow outward from the ball
    // by the surface curvature, hence the radius * (1 + radius) allowance.
    ActiveSets center_active = active_sets(cp.g, cp.Phi.eval(x_center), tols);
    for (int i : center_active.rows) {
        std::vector<Vec> b = cp.g.b;
        std::vector<double> beta = cp.g.beta;
        b.push_back(-cp.g.b[static_cast<size_t>(i)]);
        beta.push_back(-cp.g.beta[static_cast<size_t>(i)]);
        CompositeProblem stratum(PolyhedralFunction(cp.g.a, cp.g.alpha, b, beta), cp.Phi);
        for (const Vec& y : raws) {
            Vec p;
            try {
                p = project_to_domain(stratum, y, tols);
            } catch (const PreconditionError&) {
                continue;  // the stratum is out of reach from this candidate
            }
            if (std::isfinite(cp.value(p, tols)) &&
                (p - x_center).norm() <= radius * (1.0 + radius))
                xs.push_back(p);
        }
    }

    GphSampleSet out;
    int valid_points = 0;
    for (const Vec& x : xs) {
        if (!bcq_check(cp, x, tols).holds) {
            ++out.bcq_dropped;
            continue;
        }
        ++valid_points;
        PolytopeRep P = phi_subdifferential(cp, x, tols);
        std::vector<Vec> vcands = P.points;
        if (P.points.size() > 1) {
            Vec mean = Vec::Zero(n);
            for (const Vec& p : P.points) mean += p;
            vcands.push_back(mean / static_cast<double>(P.points.size()));
        }
        if (v_center) vcands.push_back(polytope_project(P, *v_center, tols));
        for (const Vec& v : vcands) {
            // the subgradient ball is twice the point ball; see the header note
            if (v_center && (v - *v_center).norm() > 2.0 * radius * (1.0 + 1e-9)) continue;
            bool dup = false;
            for (const GphSample& s : out.samples)
                if ((s.x - x).norm() <= 1e-12 && (s.v - v).norm() <= 1e-12) {
                    dup = true;
                    break;
                }
            if (!dup) out.samples.push_back(GphSample{x, v});
        }
    }
    out.warning = valid_points < (1 + 2 * n + budget) / 2;
    return out;
}

SampledD2 sampled_strict_d2(const CompositeProblem& cp, const Vec& w, const QuotientGrid& grid,
                            const Tolerances& tols) {
    if (!cp.xbar || !cp.vbar)
        throw PreconditionError("base_pair_missing", "strict quotients need a base pair");
    validate_grid(grid);
    SampledD2 out;
    for (size_t li = 0; li < grid.t_levels.size(); ++li) {
        double t = grid.t_levels[li];
        Tolerances lt = level_quotient_tols(tols, t);
        lt.seed = level_seed(tols.seed, li);
        GphSampleSet pairs = sample_gph(cp, *cp.xbar, *cp.vbar, t, grid.base_samples, lt);
        double mn = kInf;
        for (const GphSample& s : pairs.samples) {
            Mat dirs =
                build_dirs_restored(cp, s.x, w, t, 2.0 * t, grid.dir_samples, lt.seed, lt);
            mn = std::min(mn, min_of(quotient_kernel_parallel(cp, s.x, s.v, t, dirs, lt)));
        }
        out.level_min.push_back(mn);
    }
    out.estimate = out.level_min.back();
    out.diverged = !(out.estimate < grid.divergence_threshold);
    return out;
}

double epi_distance(const SampledFunction& F, const SampledFunction& G, double rho) {
    if (!(rho > 0)) throw PreconditionError("bad_rho", "epigraph clip must be positive");
    if (F.points.cols() == 0 || G.points.cols() == 0)
        throw PreconditionError("empty_sample", "epigraph distance needs nonempty samples");
    if (F.points.rows() != G.points.rows())
        throw PreconditionError("shape_mismatch", "sampled functions live in different spaces");
    if (F.values.size() != F.points.cols() || G.values.size() != G.points.cols())
        throw PreconditionError("shape_mismatch", "sample points and values disagree in count");
    if (F.points.cols() != G.points.cols() ||
        (F.points - G.points).cwiseAbs().maxCoeff() > 1e-12)
        throw PreconditionError("grid_mismatch", "both functions must share one sample grid");

    auto clip = [rho](double v) { return std::min(rho, std::max(-rho, v)); };
    // one-sided Hausdorff between unions of vertical segments [clip(v), rho]:
    // the supremum over a column is attained at its bottom point
    auto directed = [&](const SampledFunction& A, const SampledFunction& B) {
        double worst = 0;
        for (int i = 0; i < A.points.cols(); ++i) {
            double va = clip(A.values[i]);
            double best = kInf;
            for (int j = 0; j < B.points.cols(); ++j) {
                double vb = clip(B.values[j]);
                double dx = (A.points.col(i) - B.points.col(j)).norm();
                double d = va >= vb ? dx : std::hypot(dx, vb - va);
                best = std::min(best, d);
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(F, G), directed(G, F));
}

Mat direction_grid(int dim, double radius, int count, std::uint64_t seed) {
    Vec zero = Vec::Zero(dim);
    return build_dirs(dim, zero, radius, count, seed);
}

SampledFunction sample_quotient_function(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                         double t, const Mat& wgrid, const Tolerances& tols) {
    SampledFunction F;
    F.points = wgrid;
    std::vector<double> vals = quotient_kernel_parallel(cp, x, v, t, wgrid, tols);
    F.values = Vec(wgrid.cols());
    for (int j = 0; j < wgrid.cols(); ++j) F.values[j] = vals[static_cast<size_t>(j)];
    return F;
}

EpiProbeReport epi_convergence_probe(const CompositeProblem& cp, const QuotientGrid& grid,
                                     const Tolerances& tols) {
    if (!cp.xbar || !cp.vbar)
        throw PreconditionError("base_pair_missing", "the convergence probe needs a base pair");
    validate_grid(grid);
    const Vec& xb = *cp.xbar;
    const Vec& vb = *cp.vbar;

    EpiProbeReport rep;
    rep.formula_verdict = nondegeneracy_check(cp, xb, vb, tols).nondegenerate;

    // closed-form reference values on a shared direction grid
    Mat wgrid = direction_grid(cp.n(), 1.0, grid.epi_grid, tols.seed);
    SampledFunction ref;
    ref.points = wgrid;
    ref.values = Vec(wgrid.cols());
    for (int j = 0; j < wgrid.cols(); ++j)
        ref.values[j] = second_subderivative(cp, xb, vb, wgrid.col(j), tols);

    for (size_t li = 0; li < grid.t_levels.size(); ++li) {
        double t = grid.t_levels[li];
        Tolerances lt = level_quotient_tols(tols, t);
        lt.seed = level_seed(tols.seed, li);
        GphSampleSet pairs = sample_gph(cp, xb, vb, t, grid.base_samples, lt);
        double worst = 0;
        for (const GphSample& s : pairs.samples) {
            SampledFunction Fk = sample_quotient_function(cp, s.x, s.v, t, wgrid, lt);
            worst = std::max(worst, epi_distance(Fk, ref, grid.rho));
        }
        rep.levels.push_back(t);
        rep.distances.push_back(worst);
    }

    double final_dist = rep.distances.back();
    bool conv = final_dist <= tols.epi;
    bool div = final_dist >= 10.0 * tols.epi;
    if (rep.formula_verdict && conv) {
        rep.status = EpiStatus::ConsistentConvergent;
    } else if (!rep.formula_verdict && div) {
        rep.status = EpiStatus::ConsistentDivergent;
    } else {
        rep.status = EpiStatus::Inconsistent;
        std::ostringstream os;
        os << "verdict=" << (rep.formula_verdict ? "regular" : "degenerate")
           << " final_distance=" << final_dist << " convergent_below=" << tols.epi
           << " divergent_above=" << 10.0 * tols.epi
           << "; the sampled trend matches neither pattern";
        rep.diagnostics = os.str();
    }
    return rep;
}

}  // namespace varpoly
