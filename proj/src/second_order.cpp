#include "varpoly/second_order.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "varpoly/dd.hpp"
#include "varpoly/errors.hpp"
#include "varpoly/lp.hpp"
#include "varpoly/oracle.hpp"

namespace varpoly {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MultiplierSet lagrange_multipliers(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                   const Tolerances& tols) {
    Vec z = cp.Phi.eval(x);
    PolytopeRep sub = subdifferential(cp.g, z, tols);  // refuses outside dom g
    MultiplierSet out;
    out.description.dim = cp.m();
    if (!subgradient_member(cp, x, v, tols)) return out;  // empty set, not an error

    // homogenize: the polytope {lambda in sub : grad^T lambda = v} is the
    // t = 1 slice of the lifted cone in R^{1+m}
    const int m = cp.m();
    std::vector<Vec> lifted;
    for (const Vec& p : sub.points) {
        Vec g(1 + m);
        g[0] = 1.0;
        g.tail(m) = p;
        lifted.push_back(g);
    }
    for (const Vec& r : sub.rays) {
        Vec g(1 + m);
        g[0] = 0.0;
        g.tail(m) = r;
        lifted.push_back(g);
    }
    std::vector<Vec> walls = dd_dual(lifted, 1 + m, tols);
    Mat Jt = cp.Phi.jacobian(x).transpose();
    for (int k = 0; k < cp.n(); ++k) {
        Vec h(1 + m);
        h[0] = -v[k];
        h.tail(m) = Jt.row(k).transpose();
        walls.push_back(h);
        walls.push_back(-h);
    }
    std::vector<Vec> gens = dd_dual(walls, 1 + m, tols);

    for (const Vec& g : gens) {
        double t = g[0];
        if (t > tols.zero) {
            out.description.points.push_back(g.tail(m) / t);
        } else if (t >= -tols.zero) {
            out.description.rays.push_back(g.tail(m));
        } else {
            throw ConsistencyError("lifted multiplier cone produced a negative-height generator");
        }
    }

    // invariant: everything in the description solves the multiplier system
    for (const Vec& p : out.description.points) {
        if ((Jt * p - v).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + v.norm()) ||
            !member(sub, p, tols))
            throw ConsistencyError("multiplier description violates the defining system");
    }
    ConeRep rec = ConeRep::from_generators(m, sub.rays);
    for (const Vec& r : out.description.rays) {
        if ((Jt * r).lpNorm<Eigen::Infinity>() > 1e-9 || !member(rec, r, tols))
            throw ConsistencyError("multiplier recession ray violates the defining system");
    }
    return out;
}

std::optional<Vec> any_multiplier(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                  const Tolerances& tols) {
    Vec z = cp.Phi.eval(x);
    PolytopeRep sub = subdifferential(cp.g, z, tols);
    Mat Jt = cp.Phi.jacobian(x).transpose();
    const int l = static_cast<int>(sub.points.size());
    const int r = static_cast<int>(sub.rays.size());
    const int n = cp.n();
    Mat A = Mat::Zero(n + 1, l + r);
    for (int j = 0; j < l; ++j) A.col(j).head(n) = Jt * sub.points[static_cast<size_t>(j)];
    for (int i = 0; i < r; ++i) A.col(l + i).head(n) = Jt * sub.rays[static_cast<size_t>(i)];
    A.row(n).head(l).setOnes();
    Vec rhs(n + 1);
    rhs.head(n) = v;
    rhs[n] = 1.0;
    LpResult res = lp_solve(A, rhs, Vec::Zero(l + r), tols.zero * 1e-2);
    if (res.status != LpStatus::Optimal) return std::nullopt;
    Vec lambda = Vec::Zero(cp.m());
    for (int j = 0; j < l; ++j) lambda += res.x[j] * sub.points[static_cast<size_t>(j)];
    for (int i = 0; i < r; ++i) lambda += res.x[l + i] * sub.rays[static_cast<size_t>(i)];
    return lambda;
}

QualificationReport soqc_check(const CompositeProblem& cp, const Vec& x, const Vec& lambda,
                               const Tolerances& tols) {
    Vec z = cp.Phi.eval(x);
    PolytopeRep sub = subdifferential(cp.g, z, tols);
    if (!member(sub, lambda, tols))
        throw PreconditionError("multiplier_not_in_subdifferential",
                                "qualification check needs lambda in the subdifferential");
    // span of the subdifferential's differences and active row normals; the
    // span depends only on the active sets, not on which lambda was passed
    std::vector<Vec> spanning;
    for (size_t j = 1; j < sub.points.size(); ++j) spanning.push_back(sub.points[j] - sub.points[0]);
    for (const Vec& r : sub.rays) spanning.push_back(r);
    QualificationReport rep;
    rep.lhs = LinSubspace::from_spanning_set(spanning, cp.m(), tols.zero);
    rep.ker_adjoint = LinSubspace::from_basis_matrix(
        nullspace(cp.Phi.jacobian(x).transpose(), tols.zero));
    rep.witness = subspace_intersection_witness(rep.lhs.basis, rep.ker_adjoint.basis, tols.zero);
    rep.holds = !rep.witness.has_value();
    return rep;
}

QualificationReport bcq_check(const CompositeProblem& cp, const Vec& x, const Tolerances& tols) {
    Vec z = cp.Phi.eval(x);
    ActiveSets as = active_sets(cp.g, z, tols);
    std::vector<Vec> normals;
    for (int i : as.rows) normals.push_back(cp.g.b[static_cast<size_t>(i)]);
    ConeRep Ndom = ConeRep::from_generators(cp.m(), normals);
    QualificationReport rep;
    rep.lhs = span_of_cone(Ndom, tols);
    rep.ker_adjoint = LinSubspace::from_basis_matrix(
        nullspace(cp.Phi.jacobian(x).transpose(), tols.zero));
    rep.holds = cone_meets_subspace_trivially(Ndom, rep.ker_adjoint, tols);
    if (!rep.holds) {
        // certificate: a nonzero generator of the intersection
        ConeRep C = dd_convert(Ndom, tols);
        std::vector<Vec> rows = *C.halfspaces;
        Mat W = orthogonal_complement(rep.ker_adjoint.basis, tols.zero);
        for (int j = 0; j < W.cols(); ++j) {
            rows.push_back(W.col(j));
            rows.push_back(-W.col(j));
        }
        std::vector<Vec> gens = dd_dual(rows, cp.m(), tols);
        if (!gens.empty()) rep.witness = gens[0];
    }
    return rep;
}

ConeRep critical_cone_phi(const CompositeProblem& cp, const Vec& x, const Vec& v,
                          const Tolerances& tols) {
    if (!bcq_check(cp, x, tols).holds)
        throw PreconditionError("bcq", "pullback critical cone needs the basic qualification");
    std::optional<Vec> lambda = any_multiplier(cp, x, v, tols);
    if (!lambda)
        throw PreconditionError("no_multiplier", "no multiplier exists at (x, v)");
    ConeRep Kg = critical_cone(cp.g, cp.Phi.eval(x), *lambda, tols);
    Mat Jt = cp.Phi.jacobian(x).transpose();
    std::vector<Vec> halfs;
    for (const Vec& h : *Kg.halfspaces) halfs.push_back(Jt * h);
    ConeRep K = ConeRep::from_halfspaces(cp.n(), dd_canonicalize(halfs, tols.zero));
    return dd_convert(K, tols);
}

NondegeneracyReport nondegeneracy_check(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                        const Tolerances& tols) {
    if (!bcq_check(cp, x, tols).holds)
        throw PreconditionError("bcq", "nondegeneracy check needs the basic qualification");
    if (!subgradient_member(cp, x, v, tols))
        throw PreconditionError("no_multiplier", "v is not a subgradient at x");

    NondegeneracyReport rep;
    rep.ri_image = ri_member(phi_subdifferential(cp, x, tols), v, tols);

    // does some multiplier lie in the relative interior of subdiff g?  One LP:
    // all weights >= eps on the multiplier system, maximize eps.
    {
        Vec z = cp.Phi.eval(x);
        PolytopeRep sub = subdifferential(cp.g, z, tols);
        Mat Jt = cp.Phi.jacobian(x).transpose();
        const int l = static_cast<int>(sub.points.size());
        const int r = static_cast<int>(sub.rays.size());
        const int n = cp.n();
        // rows: n (adjoint system), 1 (convexity), 1 (eps cap); cols: weights, eps, slack
        Mat A = Mat::Zero(n + 2, l + r + 2);
        Vec rhs = Vec::Zero(n + 2);
        Vec sum = Vec::Zero(n);
        for (int j = 0; j < l; ++j) {
            A.col(j).head(n) = Jt * sub.points[static_cast<size_t>(j)];
            sum += A.col(j).head(n);
        }
        for (int i = 0; i < r; ++i) {
            A.col(l + i).head(n) = Jt * sub.rays[static_cast<size_t>(i)];
            sum += A.col(l + i).head(n);
        }
        A.col(l + r).head(n) = sum;
        rhs.head(n) = v;
        A.row(n).head(l).setOnes();
        A(n, l + r) = static_cast<double>(l);
        rhs[n] = 1.0;
        A(n + 1, l + r) = 1.0;
        A(n + 1, l + r + 1) = 1.0;
        rhs[n + 1] = 1.0;
        Vec c = Vec::Zero(l + r + 2);
        c[l + r] = 1.0;
        LpResult res = lp_solve(A, rhs, c, tols.zero * 1e-2);
        rep.ri_multiplier = res.status == LpStatus::Optimal && res.value > tols.ri;
    }

    rep.cone_subspace = cone_is_subspace(critical_cone_phi(cp, x, v, tols), tols);

    if (rep.ri_image != rep.ri_multiplier || rep.ri_image != rep.cone_subspace) {
        std::ostringstream os;
        os << "nondegeneracy tests disagree: ri_image=" << rep.ri_image
           << " ri_multiplier=" << rep.ri_multiplier << " cone_subspace=" << rep.cone_subspace;
        throw ConsistencyError(os.str());
    }
    rep.nondegenerate = rep.ri_image;
    return rep;
}

namespace {

// shared guts of the two subderivative evaluations
struct ChainData {
    Vec lambda;
    ConeRep Kg;
    Mat J;
    Mat H;  // Hess <lambda, Phi>(x)
};

ChainData chain_data(const CompositeProblem& cp, const Vec& x, const Vec& v,
                     const Tolerances& tols) {
    MultiplierSet ms = lagrange_multipliers(cp, x, v, tols);
    if (ms.empty())
        throw PreconditionError("no_multiplier", "no multiplier exists at (x, v)");
    if (!ms.is_singleton())
        throw PreconditionError("multiplier_not_unique",
                                "the chain formula needs a unique multiplier");
    Vec lambda = *ms.unique();
    if (!soqc_check(cp, x, lambda, tols).holds)
        throw PreconditionError("soqc", "the chain formula needs the second-order "
                                        "qualification");
    ChainData cd;
    cd.lambda = lambda;
    cd.Kg = critical_cone(cp.g, cp.Phi.eval(x), lambda, tols);
    cd.J = cp.Phi.jacobian(x);
    cd.H = cp.Phi.hessian_lambda(x, lambda);
    return cd;
}

}  // namespace

double second_subderivative(const CompositeProblem& cp, const Vec& x, const Vec& v, const Vec& w,
                            const Tolerances& tols) {
    ChainData cd = chain_data(cp, x, v, tols);
    Vec u = cd.J * w;
    if (!member(cd.Kg, u, tols)) return kInf;
    return w.dot(cd.H * w);
}

double strict_second_subderivative(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                   const Vec& w, const Tolerances& tols) {
    ChainData cd = chain_data(cp, x, v, tols);
    Vec u = cd.J * w;
    Mat B = span_of_cone(cd.Kg, tols).basis;
    Vec res = u - B * (B.transpose() * u);
    if (res.lpNorm<Eigen::Infinity>() > tols.zero * (1.0 + u.norm())) return kInf;
    return w.dot(cd.H * w);
}

GrowthReport quadratic_growth_check(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                    const Tolerances& tols) {
    ChainData cd = chain_data(cp, x, v, tols);
    Mat Bs = span_of_cone(cd.Kg, tols).basis;
    Mat C = orthogonal_complement(Bs, tols.zero);  // in R^m
    Mat W = (C.cols() == 0) ? Mat::Identity(cp.n(), cp.n())
                            : nullspace(C.transpose() * cd.J, tols.zero);
    GrowthReport rep;
    rep.reduced_dim = static_cast<int>(W.cols());
    if (W.cols() == 0) {
        rep.verdict = Verdict::Holds;  // vacuous: the test subspace is {0}
        rep.modulus = kInf;
        return rep;
    }
    Mat M = W.transpose() * cd.H * W;
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (M + M.transpose()));
    double lo = eig.eigenvalues().minCoeff();
    rep.modulus = lo;
    if (lo > tols.eig)
        rep.verdict = Verdict::Holds;
    else if (lo <= -tols.eig)
        rep.verdict = Verdict::Fails;
    else
        rep.verdict = Verdict::Inconclusive;
    return rep;
}

StrictStabilityReport strict_tepi_check(const CompositeProblem& cp, const Vec& x, const Vec& v,
                                        double radius, int count, const Tolerances& tols) {
    StrictStabilityReport rep;
    rep.verdict = nondegeneracy_check(cp, x, v, tols).nondegenerate;
    std::optional<Vec> lambda = any_multiplier(cp, x, v, tols);
    ConeRep base = critical_cone(cp.g, cp.Phi.eval(x), *lambda, tols);

    GphSampleSet samples = sample_gph(cp, x, v, radius, count, tols);
    for (const GphSample& s : samples.samples) {
        if ((s.v - v).norm() > radius) continue;  // strict probes shrink in both coordinates
        std::optional<Vec> lam = any_multiplier(cp, s.x, s.v, tols);
        if (!lam) continue;  // certified pairs always carry one; defensive
        ConeRep K = critical_cone(cp.g, cp.Phi.eval(s.x), *lam, tols);
        ++rep.samples;
        if (cone_equal(K, base, tols)) ++rep.cones_matching;
    }
    if (rep.verdict && rep.cones_matching != rep.samples)
        throw ConsistencyError("stability probe contradicts the nondegeneracy verdict: a "
                               "sampled critical cone differs from the base cone");
    return rep;
}

GraphRegularityReport graph_regularity_report(const CompositeProblem& cp, const Vec& x,
                                              const Vec& v, const Tolerances& tols) {
    NondegeneracyReport nd = nondegeneracy_check(cp, x, v, tols);
    std::optional<Vec> lambda = any_multiplier(cp, x, v, tols);
    ConeRep Kg = critical_cone(cp.g, cp.Phi.eval(x), *lambda, tols);
    Mat J = cp.Phi.jacobian(x);
    Mat Jt = J.transpose();

    // derivative domain: pullback of K_g; coderivative domain: pullback of span K_g
    ConeRep Kphi = critical_cone_phi(cp, x, v, tols);
    Mat Bs = span_of_cone(Kg, tols).basis;
    Mat C = orthogonal_complement(Bs, tols.zero);
    std::vector<Vec> span_halfs;
    for (int j = 0; j < C.cols(); ++j) {
        span_halfs.push_back(Jt * C.col(j));
        span_halfs.push_back(-(Jt * C.col(j)));
    }
    ConeRep Wphi = dd_convert(ConeRep::from_halfspaces(cp.n(), dd_canonicalize(span_halfs, tols.zero)), tols);

    GraphRegularityReport rep;
    rep.domains_equal = cone_equal(Kphi, Wphi, tols);
    rep.dom_dim = span_of_cone(Kphi, tols).dim();
    rep.dom_star_dim = span_of_cone(Wphi, tols).dim();

    bool values_ok = true;
    if (rep.domains_equal) {
        // on a common domain the two maps differ only through the outer
        // normal-cone term; for a subspace K_g that term is K_g-perp for
        // every admissible direction
        ConeRep Kperp = dd_convert(
            ConeRep::from_generators(cp.m(),
                                     [&] {
                                         std::vector<Vec> gens;
                                         Mat P = orthogonal_complement(Bs, tols.zero);
                                         for (int j = 0; j < P.cols(); ++j) {
                                             gens.push_back(P.col(j));
                                             gens.push_back(-P.col(j));
                                         }
                                         return gens;
                                     }()),
            tols);
        ConeRep KphiG = dd_convert(Kphi, tols);
        for (const Vec& w : *KphiG.generators) {
            Vec u = J * w;
            ConeRep Nval = normal_cone_at(Kg, u, tols);
            ++rep.value_checks;
            if (!cone_equal(Nval, Kperp, tols)) { values_ok = false; break; }
        }
    }
    rep.regular = rep.domains_equal && values_ok;
    if (rep.regular != nd.nondegenerate)
        throw ConsistencyError("graph regularity verdict disagrees with nondegeneracy");
    return rep;
}

double mr_modulus_gamma(const CompositeProblem& cp, const Vec& x, const Vec& lambda,
                        const Tolerances& tols) {
    QualificationReport q = soqc_check(cp, x, lambda, tols);
    if (!q.holds)
        throw PreconditionError("soqc", "regularity modulus needs the second-order "
                                        "qualification");
    if (q.lhs.dim() == 0) return 0.0;  // max over an empty unit sphere
    Mat M = cp.Phi.jacobian(x).transpose() * q.lhs.basis;
    Eigen::JacobiSVD<Mat> svd(M);
    double smin = svd.singularValues().minCoeff();
    if (smin <= tols.zero)
        throw ConsistencyError("qualification held but the restricted adjoint is singular");
    return 1.0 / smin;
}

SecondOrderReport analyze(const CompositeProblem& cp, const Vec& x, const Vec& v,
                          const Tolerances& tols) {
    SecondOrderReport rep;
    rep.bcq = bcq_check(cp, x, tols).holds;
    rep.multipliers = lagrange_multipliers(cp, x, v, tols);
    if (rep.multipliers.empty())
        throw PreconditionError("no_multiplier", "v is not a subgradient at x");
    Vec lambda = rep.multipliers.description.points[0];
    rep.soqc = soqc_check(cp, x, lambda, tols).holds;
    rep.cone_g = critical_cone(cp.g, cp.Phi.eval(x), lambda, tols);
    rep.cone_phi = critical_cone_phi(cp, x, v, tols);
    rep.nondegeneracy = nondegeneracy_check(cp, x, v, tols);
    if (rep.soqc) rep.gamma = mr_modulus_gamma(cp, x, lambda, tols);

    // probe directions: pullback-cone generators plus coordinate axes
    std::vector<Vec> dirs;
    ConeRep KG = dd_convert(rep.cone_phi, tols);
    for (const Vec& g : *KG.generators) dirs.push_back(g);
    for (int i = 0; i < cp.n(); ++i) dirs.push_back(Vec::Unit(cp.n(), i));

    try {
        rep.growth = quadratic_growth_check(cp, x, v, tols);
        for (const Vec& w : dirs) {
            rep.d2_probes.emplace_back(w, second_subderivative(cp, x, v, w, tols));
            rep.strict_d2_probes.emplace_back(w, strict_second_subderivative(cp, x, v, w, tols));
        }
    } catch (const PreconditionError&) {
        // non-unique multiplier or failed qualification: probes stay empty
    }
    if (subgradient_member(cp, x, Vec::Zero(cp.n()), tols)) {
        try {
            rep.tilt = quadratic_growth_check(cp, x, Vec::Zero(cp.n()), tols);
        } catch (const PreconditionError&) {
        }
    }
    return rep;
}

}  // namespace varpoly
