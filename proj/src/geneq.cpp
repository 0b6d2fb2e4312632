#include "varpoly/geneq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "varpoly/errors.hpp"

namespace varpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Square KKT system for one active pattern (JA, IA) of g:
//   unknowns y = (x, eta, nu), lambda = sum_j eta_j a_j + sum_i nu_i b_i
//   rows:  f(x) + grad Phi(x)^T lambda - u             (n)
//          piece-value gaps against JA[0]              (|JA| - 1)
//          <b_i, Phi(x)> - beta_i for i in IA          (|IA|)
//          sum eta - 1                                 (1)
struct PatternSolver {
    const PolyMap& f;
    const CompositeProblem& cp;
    const Vec& u;
    std::vector<int> JA;
    std::vector<int> IA;

    int n() const { return cp.n(); }
    int size() const { return n() + static_cast<int>(JA.size() + IA.size()); }

    Vec lambda_of(const Vec& y) const {
        const auto& g = cp.g;
        Vec lam = Vec::Zero(cp.m());
        for (size_t k = 0; k < JA.size(); ++k) lam += y[n() + static_cast<int>(k)] * g.a[JA[k]];
        for (size_t k = 0; k < IA.size(); ++k)
            lam += y[n() + static_cast<int>(JA.size() + k)] * g.b[IA[k]];
        return lam;
    }

    Vec residual(const Vec& y) const {
        const auto& g = cp.g;
        const int sj = static_cast<int>(JA.size()), si = static_cast<int>(IA.size());
        Vec x = y.head(n());
        Vec z = cp.Phi.eval(x);
        Mat J = cp.Phi.jacobian(x);
        Vec F(size());
        F.head(n()) = f.eval(x) + J.transpose() * lambda_of(y) - u;
        double v0 = g.a[JA[0]].dot(z) - g.alpha[JA[0]];
        for (int k = 1; k < sj; ++k)
            F[n() + k - 1] = v0 - (g.a[JA[k]].dot(z) - g.alpha[JA[k]]);
        for (int k = 0; k < si; ++k)
            F[n() + sj - 1 + k] = g.b[IA[k]].dot(z) - g.beta[IA[k]];
        F[size() - 1] = y.segment(n(), sj).sum() - 1.0;
        return F;
    }

    Mat jacobian(const Vec& y) const {
        const auto& g = cp.g;
        const int sj = static_cast<int>(JA.size()), si = static_cast<int>(IA.size());
        Vec x = y.head(n());
        Mat J = cp.Phi.jacobian(x);
        Mat DF = Mat::Zero(size(), size());
        DF.block(0, 0, n(), n()) = f.jacobian(x) + cp.Phi.hessian_lambda(x, lambda_of(y));
        for (int k = 0; k < sj; ++k) DF.block(0, n() + k, n(), 1) = J.transpose() * g.a[JA[k]];
        for (int k = 0; k < si; ++k)
            DF.block(0, n() + sj + k, n(), 1) = J.transpose() * g.b[IA[k]];
        for (int k = 1; k < sj; ++k)
            DF.block(n() + k - 1, 0, 1, n()) = (g.a[JA[0]] - g.a[JA[k]]).transpose() * J;
        for (int k = 0; k < si; ++k)
            DF.block(n() + sj - 1 + k, 0, 1, n()) = g.b[IA[k]].transpose() * J;
        DF.block(size() - 1, n(), 1, sj).setOnes();
        return DF;
    }
};

struct Candidate {
    Vec x;
    Vec lambda;
    double res = kInf;
};

enum class PatternFate { Converged, Singular, LineSearch, MaxIter, Weights, Inactive, Certify };

PatternFate run_pattern(PatternSolver& ps, const Vec& x0, const Tolerances& tols,
                        Candidate* out) {
    const auto& g = ps.cp.g;
    const int n = ps.n();
    const int sj = static_cast<int>(ps.JA.size()), si = static_cast<int>(ps.IA.size());
    Vec y = Vec::Zero(ps.size());
    y.head(n) = x0;
    y.segment(n, sj).setConstant(1.0 / sj);

    Vec F = ps.residual(y);
    PatternFate fate = PatternFate::MaxIter;
    for (int it = 0; it < tols.newton_max_iter; ++it) {
        if (F.lpNorm<Eigen::Infinity>() <= tols.res) {
            fate = PatternFate::Converged;
            break;
        }
        Mat DF = ps.jacobian(y);
        Eigen::FullPivLU<Mat> lu(DF);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible()) return PatternFate::Singular;
        Vec step = lu.solve(-F);
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h) {
            Vec y_try = y + alpha * step;
            Vec F_try = ps.residual(y_try);
            if (F_try.norm() <= (1.0 - 1e-4 * alpha) * F.norm() ||
                F_try.lpNorm<Eigen::Infinity>() <= tols.res) {
                y = y_try;
                F = F_try;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) return PatternFate::LineSearch;
    }
    if (F.lpNorm<Eigen::Infinity>() <= tols.res) fate = PatternFate::Converged;
    if (fate != PatternFate::Converged) return fate;

    Vec x = y.head(n);
    Vec eta = y.segment(n, sj);
    Vec nu = y.tail(si);
    if (eta.minCoeff() < -1e-8) return PatternFate::Weights;
    if (si > 0 && nu.minCoeff() < -1e-8) return PatternFate::Weights;

    // the pattern's inactive pieces/rows must actually be inactive-or-tied
    Vec z = ps.cp.Phi.eval(x);
    double vA = g.a[ps.JA[0]].dot(z) - g.alpha[ps.JA[0]];
    for (int j = 0; j < g.num_pieces(); ++j) {
        if (std::find(ps.JA.begin(), ps.JA.end(), j) != ps.JA.end()) continue;
        if (g.a[j].dot(z) - g.alpha[j] > vA + 1e-8) return PatternFate::Inactive;
    }
    for (int i = 0; i < g.num_rows(); ++i) {
        if (std::find(ps.IA.begin(), ps.IA.end(), i) != ps.IA.end()) continue;
        if (g.b[i].dot(z) > g.beta[i] + 1e-8) return PatternFate::Inactive;
    }

    // independent certificate: u - f(x) must be a subgradient of phi at x
    Vec v = ps.u - ps.f.eval(x);
    try {
        if (!subgradient_member(ps.cp, x, v, tols)) return PatternFate::Certify;
    } catch (const PreconditionError&) {
        return PatternFate::Certify;
    }
    out->x = x;
    out->lambda = ps.lambda_of(y);
    out->res = F.lpNorm<Eigen::Infinity>();
    return PatternFate::Converged;
}

}  // namespace

GeneralizedEquation::GeneralizedEquation(PolyMap f_, CompositeProblem cp_, Vec ubar_)
    : f(std::move(f_)), cp(std::move(cp_)), ubar(std::move(ubar_)) {
    if (f.n_in != cp.n() || f.n_out != cp.n())
        throw PreconditionError("shape_mismatch",
                                "smooth part must map the composite's input space to itself");
    if (ubar.size() != cp.n())
        throw PreconditionError("shape_mismatch", "right-hand side dimension mismatch");
}

SolutionCheck check_solution(const GeneralizedEquation& ge, const Vec& x,
                             const Tolerances& tols) {
    SolutionCheck out;
    if (x.size() != ge.cp.n())
        throw PreconditionError("shape_mismatch", "candidate has the wrong dimension");
    if (!std::isfinite(ge.cp.value(x, tols))) return out;
    Vec v = ge.ubar - ge.f.eval(x);
    out.is_solution = subgradient_member(ge.cp, x, v, tols);
    if (!out.is_solution) return out;
    out.nondegenerate = nondegeneracy_check(ge.cp, x, v, tols).nondegenerate;
    return out;
}

InclusionCandidates inclusion_candidates(const PolyMap& f, const CompositeProblem& cp,
                                         const Vec& u, const Vec& x0, const Tolerances& tols) {
    const auto& g = cp.g;
    const int l = g.num_pieces(), r = g.num_rows();
    if (u.size() != cp.n() || x0.size() != cp.n())
        throw PreconditionError("shape_mismatch", "inclusion data has the wrong dimension");
    double pattern_count = (std::pow(2.0, l) - 1.0) * std::pow(2.0, r);
    if (pattern_count > static_cast<double>(tols.pattern_budget))
        throw PreconditionError("pattern_budget",
                                "active-pattern enumeration exceeds the configured budget");

    int tried = 0;
    int counts[7] = {0, 0, 0, 0, 0, 0, 0};
    std::vector<Candidate> cands;

    for (unsigned jm = 1; jm < (1u << l); ++jm) {
        std::vector<int> JA;
        for (int j = 0; j < l; ++j)
            if (jm & (1u << j)) JA.push_back(j);
        for (unsigned im = 0; im < (1u << r); ++im) {
            std::vector<int> IA;
            for (int i = 0; i < r; ++i)
                if (im & (1u << i)) IA.push_back(i);
            ++tried;
            PatternSolver ps{f, cp, u, JA, IA};
            Candidate cand;
            PatternFate fate = run_pattern(ps, x0, tols, &cand);
            ++counts[static_cast<int>(fate)];
            if (fate != PatternFate::Converged) continue;
            bool duplicate = false;
            for (const Candidate& c : cands)
                if ((c.x - cand.x).norm() <= 1e-9 * (1.0 + c.x.norm())) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) cands.push_back(std::move(cand));
        }
    }

    std::ostringstream diag;
    diag << "patterns=" << tried << " converged=" << counts[0] << " singular=" << counts[1]
         << " line_search=" << counts[2] << " max_iter=" << counts[3]
         << " weights=" << counts[4] << " inactive=" << counts[5] << " certify=" << counts[6];

    InclusionCandidates out;
    out.patterns_tried = tried;
    out.diagnostics = diag.str();
    for (Candidate& c : cands) {
        SolveResult sr;
        sr.converged = true;
        sr.x = std::move(c.x);
        sr.lambda = std::move(c.lambda);
        sr.residual = c.res;
        sr.patterns_tried = tried;
        out.candidates.push_back(std::move(sr));
    }
    return out;
}

SolveResult solve_inclusion(const PolyMap& f, const CompositeProblem& cp, const Vec& u,
                            const Vec& x0, const Tolerances& tols) {
    InclusionCandidates all = inclusion_candidates(f, cp, u, x0, tols);
    SolveResult out;
    out.patterns_tried = all.patterns_tried;
    out.diagnostics = all.diagnostics;
    if (all.candidates.empty()) {
        out.converged = false;
        out.x = x0;
        out.residual = kInf;
        return out;
    }
    size_t best = 0;
    double best_d = (all.candidates[0].x - x0).norm();
    for (size_t k = 1; k < all.candidates.size(); ++k) {
        double d = (all.candidates[k].x - x0).norm();
        if (d < best_d - 1e-14) {
            best = k;
            best_d = d;
        }
    }
    out.converged = true;
    out.x = all.candidates[best].x;
    out.lambda = all.candidates[best].lambda;
    out.residual = all.candidates[best].residual;
    return out;
}

SolveResult solve_ge(const GeneralizedEquation& ge, const Vec& u, const Vec& x0,
                     const Tolerances& tols) {
    return solve_inclusion(ge.f, ge.cp, u, x0, tols);
}

MrReport mr_check(const GeneralizedEquation& ge, const Vec& x, const Tolerances& tols) {
    SolutionCheck sc = check_solution(ge, x, tols);
    if (!sc.is_solution)
        throw PreconditionError("not_a_solution", "x does not solve the generalized equation");
    Vec v = ge.ubar - ge.f.eval(x);
    MultiplierSet ms = lagrange_multipliers(ge.cp, x, v, tols);
    std::optional<Vec> lam = ms.unique();
    if (!lam)
        throw PreconditionError("multiplier_not_unique",
                                "regularity criteria need a unique multiplier");
    if (!soqc_check(ge.cp, x, *lam, tols).holds)
        throw PreconditionError("soqc", "the stronger qualification fails at the solution");
    if (!sc.nondegenerate)
        throw PreconditionError("degenerate", "the solution pair is degenerate");

    const int n = ge.cp.n();
    ConeRep K = critical_cone_phi(ge.cp, x, v, tols);
    Mat B = span_of_cone(K, tols).basis;  // K is a subspace under nondegeneracy
    Mat A = ge.f.jacobian(x) + ge.cp.Phi.hessian_lambda(x, *lam);

    MrReport rep;
    rep.nondegenerate = sc.nondegenerate;
    rep.A = A;
    rep.B = B;
    rep.K_bar = K;

    MrCriteria mc = evaluate_mr_criteria(A, B, tols.zero);
    rep.crit_kernel = mc.crit_kernel;
    rep.crit_range = mc.crit_range;
    rep.crit_reduced = mc.crit_reduced;
    if (rep.crit_kernel != rep.crit_range || rep.crit_range != rep.crit_reduced)
        throw ConsistencyError("equivalent regularity criteria disagree: kernel=" +
                               std::to_string(rep.crit_kernel) +
                               " range=" + std::to_string(rep.crit_range) +
                               " reduced=" + std::to_string(rep.crit_reduced));
    rep.regular = rep.crit_kernel;
    rep.strong = rep.regular;  // the two notions coincide at nondegenerate solutions
    if (rep.regular) {
        Mat S = Mat::Zero(n, n);
        if (B.cols() > 0) {
            Mat Ared = B.transpose() * A * B;
            S = B * Ared.fullPivLu().solve(Mat(B.transpose()));
        }
        rep.sigma_jacobian = S;
    }
    return rep;
}

MrCriteria evaluate_mr_criteria(const Mat& A, const Mat& B, double zero_tol) {
    const int n = static_cast<int>(A.rows());
    MrCriteria out;

    // (1)  {w : A^T w  orthogonal to the subspace}  meets the subspace only at 0
    Mat ker = (B.cols() == 0)
                  ? Mat::Identity(n, n)
                  : nullspace(Mat(B.transpose() * A.transpose()), zero_tol);
    out.crit_kernel = !subspace_intersection_witness(ker, B, zero_tol).has_value();

    // (2)  A * subspace + its orthogonal complement spans everything
    Mat C = orthogonal_complement(B, zero_tol);
    Mat RC(n, B.cols() + C.cols());
    if (RC.cols() > 0) RC << A * B, C;
    out.crit_range = rank_of(RC, zero_tol) == n;

    // (3)  the reduced matrix B^T A B is nonsingular
    Mat Ared = B.transpose() * A * B;
    out.crit_reduced = rank_of(Ared, zero_tol) == Ared.cols();
    return out;
}

Mat localization_jacobian(const GeneralizedEquation& ge, const Vec& x, const Tolerances& tols) {
    MrReport rep = mr_check(ge, x, tols);
    if (!rep.regular)
        throw PreconditionError("not_regular",
                                "the solution map has no differentiable localization here");
    return *rep.sigma_jacobian;
}

LocalizationProbe localization_probe(const GeneralizedEquation& ge, const Vec& x, double radius,
                                     int count, const Tolerances& tols) {
    if (!(radius > 0))
        throw PreconditionError("bad_radius", "probe radius must be positive");
    MrReport mr = mr_check(ge, x, tols);
    if (!mr.regular)
        throw PreconditionError("not_regular",
                                "the probe needs a differentiable localization to compare against");

    const int n = ge.cp.n();
    std::vector<Vec> us;
    us.reserve(static_cast<size_t>(2 * n + count));
    for (int i = 0; i < n; ++i) {
        us.push_back(ge.ubar + radius * Vec::Unit(n, i));
        us.push_back(ge.ubar - radius * Vec::Unit(n, i));
    }
    Rng rng(tols.seed);
    for (int k = 0; k < count; ++k) us.push_back(ge.ubar + rng.ball(n, radius));

    const int total = static_cast<int>(us.size());
    std::vector<Vec> xs(us.size());
    std::vector<std::string> errs(us.size());
    std::vector<int> bad(us.size(), 0);
#ifdef VARPOLY_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < total; ++i) {
        try {
            SolveResult sr = solve_ge(ge, us[static_cast<size_t>(i)], x, tols);
            if (!sr.converged) {
                bad[static_cast<size_t>(i)] = 1;
                errs[static_cast<size_t>(i)] = sr.diagnostics;
            } else {
                xs[static_cast<size_t>(i)] = sr.x;
            }
        } catch (const std::exception& e) {
            bad[static_cast<size_t>(i)] = 1;
            errs[static_cast<size_t>(i)] = e.what();
        }
    }
    for (int i = 0; i < total; ++i)
        if (bad[static_cast<size_t>(i)])
            throw PreconditionError("probe_solve_failed",
                                    "solve failed at a probe right-hand side: " +
                                        errs[static_cast<size_t>(i)]);

    LocalizationProbe probe;
    probe.solves = total;
    Mat fd(n, n);
    for (int i = 0; i < n; ++i)
        fd.col(i) =
            (xs[static_cast<size_t>(2 * i)] - xs[static_cast<size_t>(2 * i + 1)]) / (2 * radius);
    probe.fd_jacobian = fd;
    probe.max_jacobian_dev = (fd - *mr.sigma_jacobian).cwiseAbs().maxCoeff();

    us.push_back(ge.ubar);
    xs.push_back(x);
    double lip = 0;
    for (size_t a = 0; a < us.size(); ++a)
        for (size_t b = a + 1; b < us.size(); ++b) {
            double du = (us[a] - us[b]).norm();
            if (du > 1e-12) lip = std::max(lip, (xs[a] - xs[b]).norm() / du);
        }
    probe.lipschitz = lip;
    return probe;
}

}  // namespace varpoly
