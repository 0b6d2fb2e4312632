#include "varpoly/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "varpoly/errors.hpp"
#include "varpoly/geneq.hpp"
#include "varpoly/lp.hpp"

namespace varpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g scaled by r > 0: pieces scale, the domain rows do not.
PolyhedralFunction scale_pieces(const PolyhedralFunction& g, double r) {
    std::vector<Vec> a = g.a;
    std::vector<double> alpha = g.alpha;
    for (auto& ai : a) ai *= r;
    for (auto& al : alpha) al *= r;
    return PolyhedralFunction(std::move(a), std::move(alpha), g.b, g.beta);
}

double prox_objective(const CompositeProblem& cp, double r, const Vec& x, const Vec& w,
                      const Tolerances& tols) {
    double phi = cp.value(w, tols);
    if (!std::isfinite(phi)) return kInf;
    return phi + (w - x).squaredNorm() / (2.0 * r);
}

// All certified prox candidates at x (pattern enumeration on the scaled data).
InclusionCandidates prox_candidates(const ProxProblem& pp, const Vec& x, const Vec& warm,
                                    const Tolerances& tols) {
    CompositeProblem scaled(scale_pieces(pp.cp.g, pp.r), pp.cp.Phi, std::nullopt, std::nullopt,
                            tols);
    return inclusion_candidates(PolyMap::identity(pp.cp.n()), scaled, x, warm, tols);
}

ProxResult prox_at(const ProxProblem& pp, const Vec& x, const Vec& warm,
                   const Tolerances& tols) {
    if (x.size() != pp.cp.n())
        throw PreconditionError("shape_mismatch", "prox argument has the wrong dimension");
    InclusionCandidates all = prox_candidates(pp, x, warm, tols);
    if ((warm - x).norm() > 0) {
        // A warm start only accelerates the per-pattern solves; it can also
        // steer one onto a wrong root, so the cold start always contributes
        // its candidates and the objective comparison picks the winner.
        InclusionCandidates cold = prox_candidates(pp, x, x, tols);
        for (SolveResult& c : cold.candidates) all.candidates.push_back(std::move(c));
        if (all.candidates.empty()) all.diagnostics = cold.diagnostics;
    }
    if (all.candidates.empty())
        throw PreconditionError("prox_solve_failed",
                                "no active pattern produced a certified prox candidate: " +
                                    all.diagnostics);

    size_t best = 0, nearest = 0;
    double best_obj = kInf, nearest_d = kInf;
    std::vector<double> objs(all.candidates.size());
    for (size_t k = 0; k < all.candidates.size(); ++k) {
        const Vec& w = all.candidates[k].x;
        objs[k] = prox_objective(pp.cp, pp.r, x, w, tols);
        if (objs[k] < best_obj - 1e-14) {
            best_obj = objs[k];
            best = k;
        }
        double d = (w - warm).norm();
        if (d < nearest_d - 1e-14) {
            nearest_d = d;
            nearest = k;
        }
    }

    const Vec& p = all.candidates[best].x;
    Vec v = (x - p) / pp.r;
    if (!subgradient_member(pp.cp, p, v, tols))
        throw ConsistencyError(
            "prox candidate certified on the scaled data is not certified on the original");

    ProxResult out;
    out.point = p;
    out.objective = best_obj;
    out.subgradient = v;
    out.candidates = static_cast<int>(all.candidates.size());
    out.localized_differs =
        (all.candidates[best].x - all.candidates[nearest].x).norm() > 1e-9 * (1.0 + p.norm());
    return out;
}

}  // namespace

ProxProblem::ProxProblem(CompositeProblem cp_, double r_, double rho_, const Tolerances& tols)
    : cp(std::move(cp_)), r(r_), rho(rho_) {
    if (!(rho >= 0))
        throw PreconditionError("bad_rho", "prox-boundedness threshold must be >= 0");
    if (!(r > 0) || (rho > 0 && !(r < 1.0 / rho)))
        throw PreconditionError("r_range",
                                "prox parameter must lie strictly between 0 and 1/rho");

    // sampled growth heuristic: phi(R d) + R^2/(2r) must not visibly decay
    // between moderate and large radii along any probed ray
    const int n = cp.n();
    double scale = 1.0;
    if (cp.xbar) scale += cp.xbar->norm();
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
        dirs.push_back(Vec::Unit(n, i));
        dirs.push_back(-Vec::Unit(n, i));
    }
    Rng rng(tols.seed);
    for (int k = 0; k < 8; ++k) {
        Vec d = rng.ball(n, 1.0);
        if (d.norm() > 1e-9) dirs.push_back(d / d.norm());
    }
    auto level = [&](double R) {
        double q = kInf;
        for (const Vec& d : dirs) {
            double phi = cp.value(R * d, tols);
            if (std::isfinite(phi)) q = std::min(q, phi + R * R / (2.0 * r));
        }
        return q;
    };
    double q1 = level(10.0 * scale), q2 = level(1000.0 * scale);
    if (std::isfinite(q2) && q2 < q1 - 1e-6 * (1.0 + std::abs(q1)))
        throw PreconditionError("not_prox_bounded",
                                "sampled objective decays along a ray; the prox is unbounded "
                                "below for this parameter");
}

ProxResult prox_compute(const ProxProblem& pp, const Vec& x, const Tolerances& tols) {
    return prox_at(pp, x, x, tols);
}

double moreau_envelope(const ProxProblem& pp, const Vec& x, const Tolerances& tols) {
    return prox_compute(pp, x, tols).objective;
}

Vec moreau_gradient(const ProxProblem& pp, const Vec& x, const Tolerances& tols) {
    return prox_compute(pp, x, tols).subgradient;
}

double moreau_gradient_check(const ProxProblem& pp, const Vec& x, const Tolerances& tols) {
    const int n = pp.cp.n();
    double h = tols.fd_step * (1.0 + x.norm());
    Vec grad = moreau_gradient(pp, x, tols);
    Vec fd(n);
    for (int i = 0; i < n; ++i) {
        double ep = moreau_envelope(pp, x + h * Vec::Unit(n, i), tols);
        double em = moreau_envelope(pp, x - h * Vec::Unit(n, i), tols);
        fd[i] = (ep - em) / (2.0 * h);
    }
    return (fd - grad).cwiseAbs().maxCoeff();
}

ProxC1Report prox_c1_check(const ProxProblem& pp, const Tolerances& tols) {
    if (!pp.cp.xbar || !pp.cp.vbar)
        throw PreconditionError("base_pair_missing",
                                "the differentiability check needs a base pair");
    const Vec& xb = *pp.cp.xbar;
    const Vec& vb = *pp.cp.vbar;
    const int n = pp.cp.n();
    Vec ustar = xb + pp.r * vb;

    std::optional<Vec> lam = any_multiplier(pp.cp, xb, vb, tols);
    if (!lam || !soqc_check(pp.cp, xb, *lam, tols).holds)
        throw PreconditionError("soqc", "the differentiability check needs the stronger "
                                        "qualification at the base pair");

    ProxC1Report rep;
    rep.formula_c1 = nondegeneracy_check(pp.cp, xb, vb, tols).nondegenerate;

    // scan directions: the axes, plus one diagonal when n > 1
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(Vec::Unit(n, i));
    if (n > 1) dirs.push_back(Vec::Ones(n) / std::sqrt(static_cast<double>(n)));

    const double span = 0.1 * (1.0 + ustar.norm());
    const int grid = 33;
    const double stop = 1e-5 * (1.0 + ustar.norm());

    rep.max_jump = 0;
    rep.jump_direction = dirs[0];
    rep.jump_offset = 0;
    rep.jump_point = ustar;

    for (const Vec& d : dirs) {
        // coarse scan, chained warm starts so the local branch is tracked
        std::vector<Vec> p(grid);
        Vec warm = xb;
        std::vector<double> s(grid);
        for (int k = 0; k < grid; ++k) {
            s[k] = -span + 2.0 * span * k / (grid - 1);
            p[k] = prox_at(pp, ustar + s[k] * d, warm, tols).point;
            warm = p[k];
        }
        double delta = s[1] - s[0];
        double coarse_max = -1;
        int kstar = 1;
        for (int k = 1; k + 2 < grid; ++k) {
            Vec d1 = (p[k + 1] - p[k - 1]) / (2.0 * delta);
            Vec d2 = (p[k + 2] - p[k]) / (2.0 * delta);
            double jump = (d2 - d1).cwiseAbs().maxCoeff();
            if (jump > coarse_max) {
                coarse_max = jump;
                kstar = k;
            }
        }

        // bisect the worst bracket down to `stop`, tracking the largest
        // adjacent secant-slope gap
        double a = s[std::max(0, kstar - 1)], b = s[std::min(grid - 1, kstar + 2)];
        Vec pa = prox_at(pp, ustar + a * d, warm, tols).point;
        while (b - a > stop) {
            const int fine = 9;
            std::vector<Vec> q(fine);
            std::vector<double> t(fine);
            Vec w2 = pa;
            for (int k = 0; k < fine; ++k) {
                t[k] = a + (b - a) * k / (fine - 1);
                q[k] = prox_at(pp, ustar + t[k] * d, w2, tols).point;
                w2 = q[k];
            }
            double step = t[1] - t[0];
            double worst = -1;
            int j = 1;
            for (int k = 1; k + 1 < fine; ++k) {
                Vec dl = (q[k] - q[k - 1]) / step;
                Vec dr = (q[k + 1] - q[k]) / step;
                double jump = (dr - dl).cwiseAbs().maxCoeff();
                if (jump > worst) {
                    worst = jump;
                    j = k;
                }
            }
            a = t[j - 1];
            b = t[j + 1];
            pa = q[j - 1];
        }

        // one-sided slopes just outside the final bracket
        double w = std::max(10.0 * (b - a), 1e-4 * span);
        Vec pl0 = prox_at(pp, ustar + (a - w) * d, pa, tols).point;
        Vec pl1 = prox_at(pp, ustar + a * d, pl0, tols).point;
        Vec pr0 = prox_at(pp, ustar + b * d, pl1, tols).point;
        Vec pr1 = prox_at(pp, ustar + (b + w) * d, pr0, tols).point;
        Vec slope_l = (pl1 - pl0) / w;
        Vec slope_r = (pr1 - pr0) / w;
        double refined = (slope_r - slope_l).cwiseAbs().maxCoeff();
        if (refined > rep.max_jump) {
            rep.max_jump = refined;
            rep.jump_direction = d;
            rep.jump_offset = 0.5 * (a + b);
            rep.jump_point = ustar + rep.jump_offset * d;
        }
    }

    if (rep.max_jump >= 10.0 * tols.jump)
        rep.probe = ProbeOutcome::Jump;
    else if (rep.max_jump <= tols.jump)
        rep.probe = ProbeOutcome::Smooth;
    else
        rep.probe = ProbeOutcome::Inconclusive;

    // both directions are enforced: a differentiable localization cannot show
    // a genuine Jacobian jump, and a degenerate base pair must leave a jump
    // somewhere in the scanned star (the kink passes through ustar, so the
    // axis scan crosses it transversally along some direction).
    if (rep.formula_c1 && rep.probe == ProbeOutcome::Jump)
        throw ConsistencyError("prox map verdict says differentiable but the scan found a "
                               "Jacobian jump of size " +
                               std::to_string(rep.max_jump) + " at offset " +
                               std::to_string(rep.jump_offset) +
                               "; either the scanned star is wider than the differentiable "
                               "neighborhood or the verdict is wrong");
    if (!rep.formula_c1 && rep.probe != ProbeOutcome::Jump)
        throw ConsistencyError(
            "prox map verdict says not differentiable but the scan found no Jacobian jump "
            "above " +
            std::to_string(10.0 * tols.jump) + " (largest seen: " +
            std::to_string(rep.max_jump) + ")");
    return rep;
}

Mat prox_jacobian(const ProxProblem& pp, const Tolerances& tols) {
    if (!pp.cp.xbar || !pp.cp.vbar)
        throw PreconditionError("base_pair_missing", "the prox Jacobian needs a base pair");
    const Vec& xb = *pp.cp.xbar;
    const Vec& vb = *pp.cp.vbar;
    const int n = pp.cp.n();

    if (!nondegeneracy_check(pp.cp, xb, vb, tols).nondegenerate)
        throw PreconditionError("degenerate",
                                "the prox map is not differentiable at a degenerate pair");
    MultiplierSet ms = lagrange_multipliers(pp.cp, xb, vb, tols);
    std::optional<Vec> lam = ms.unique();
    if (!lam)
        throw PreconditionError("multiplier_not_unique",
                                "the prox Jacobian formula needs a unique multiplier");

    ConeRep K = critical_cone_phi(pp.cp, xb, vb, tols);
    Mat B = span_of_cone(K, tols).basis;
    if (B.cols() == 0) return Mat::Zero(n, n);

    Mat H = pp.cp.Phi.hessian_lambda(xb, *lam);
    Mat M = B.transpose() * (Mat::Identity(n, n) + pp.r * H) * B;
    Mat Ms = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(Ms);
    if (es.eigenvalues().minCoeff() <= tols.eig)
        throw PreconditionError("r_outside_admissible",
                                "I + r H is not positive definite on the critical subspace");
    return B * Ms.ldlt().solve(Mat(B.transpose()));
}

Mat manifold_projection_jacobian(const CompositeProblem& cp, const Vec& xbar,
                                 const Tolerances& tols) {
    const auto& g = cp.g;
    const int n = cp.n(), m = cp.m();
    if (xbar.size() != n)
        throw PreconditionError("shape_mismatch", "base point has the wrong dimension");

    // g must be the indicator of {0}: all pieces zero and dom g = {0}
    for (int j = 0; j < g.num_pieces(); ++j)
        if (g.a[j].norm() > tols.zero || std::abs(g.alpha[j]) > tols.zero)
            throw PreconditionError("not_zero_manifold", "outer function has a nonzero piece");
    const int rl = g.num_rows();
    Mat Brows(rl, m);
    for (int i = 0; i < rl; ++i) Brows.row(i) = g.b[i].transpose();
    for (int i = 0; i < m; ++i) {
        for (double sign : {1.0, -1.0}) {
            // max sign * z_i  over  { z : B z <= beta },  z split into z+ - z-
            Mat A(rl, 2 * m + rl);
            A << Brows, -Brows, Mat::Identity(rl, rl);
            Vec c = Vec::Zero(2 * m + rl);
            c[i] = sign;
            c[m + i] = -sign;
            Vec rhs(rl);
            for (int k = 0; k < rl; ++k) rhs[k] = g.beta[k];
            LpResult lr = lp_solve(A, rhs, c);
            if (lr.status != LpStatus::Optimal || std::abs(lr.value) > tols.zero)
                throw PreconditionError("not_zero_manifold",
                                        "outer domain is not the origin");
        }
    }

    Vec z = cp.Phi.eval(xbar);
    if (z.cwiseAbs().maxCoeff() > tols.act)
        throw PreconditionError("base_outside_domain", "base point is not on the zero set");
    Mat J = cp.Phi.jacobian(xbar);
    if (rank_of(J, tols.zero) < m)
        throw PreconditionError("rank_deficient",
                                "the zero set is not a manifold here: the Jacobian loses rank");

    Mat W = nullspace(J, tols.zero);
    Mat P = W * W.transpose();

    // cross-check against the prox route at r = 1, vbar = 0
    CompositeProblem based(cp.g, cp.Phi, xbar, Vec::Zero(n), tols);
    ProxProblem pp(based, 1.0, 0.0, tols);
    Mat Q = prox_jacobian(pp, tols);
    if ((P - Q).cwiseAbs().maxCoeff() > 1e-10)
        throw ConsistencyError("projection Jacobian disagrees with the prox Jacobian route");
    return P;
}

Vec project_to_domain(const CompositeProblem& cp, const Vec& y, const Tolerances& tols) {
    // prox of the domain indicator: same rows, a single zero piece
    std::vector<Vec> a{Vec::Zero(cp.m())};
    std::vector<double> alpha{0.0};
    PolyhedralFunction dom_ind(std::move(a), std::move(alpha), cp.g.b, cp.g.beta);
    CompositeProblem dom_cp(std::move(dom_ind), cp.Phi, std::nullopt, std::nullopt, tols);
    SolveResult sr = solve_inclusion(PolyMap::identity(cp.n()), dom_cp, y, y, tols);
    if (!sr.converged)
        throw PreconditionError("projection_failed",
                                "no pattern yielded a certified domain projection: " +
                                    sr.diagnostics);
    return sr.x;
}

}  // namespace varpoly
