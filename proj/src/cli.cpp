#include "varpoly/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "varpoly/errors.hpp"
#include "varpoly/problem_file.hpp"
#include "varpoly/prox.hpp"
#include "varpoly/report.hpp"

namespace varpoly {

namespace {

struct Options {
    std::string file;
    std::string out_path;
    std::string csv_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> tol_kv;
};

Tolerances effective_tols(const ProblemFile& pf, const Options& opt) {
    Tolerances tols = pf.tols;
    if (opt.seed) tols.seed = *opt.seed;
    for (const std::string& kv : opt.tol_kv) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("--tol expects KEY=VAL, got '" + kv + "'");
        char* end = nullptr;
        std::string val = kv.substr(eq + 1);
        double v = std::strtod(val.c_str(), &end);
        if (val.empty() || end != val.c_str() + val.size())
            throw ParseError("--tol " + kv + ": bad number '" + val + "'");
        apply_tol_override(tols, kv.substr(0, eq), v);
    }
    return tols;
}

std::pair<Vec, Vec> require_base(const ProblemFile& pf) {
    if (!pf.xbar || !pf.vbar)
        throw PreconditionError("missing_point",
                                "this command needs xbar and vbar in [points]");
    return {*pf.xbar, *pf.vbar};
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        default: return "inconclusive";
    }
}

ReportDocument cmd_analyze(const ProblemFile& pf, const Tolerances& tols) {
    CompositeProblem cp = pf.problem(tols);
    auto [x, v] = require_base(pf);
    SecondOrderReport rep = analyze(cp, x, v, tols);

    ReportDocument doc;
    doc.put("command", "analyze");
    doc.put("value", cp.value(x, tols));
    doc.put("bcq", rep.bcq);
    doc.put("soqc", rep.soqc);
    doc.put("multiplier.singleton", rep.multipliers.is_singleton());
    doc.put("multiplier.extreme_points",
            static_cast<int>(rep.multipliers.description.points.size()));
    if (auto lam = rep.multipliers.unique()) doc.put("multiplier.value", *lam);
    doc.put("nondegenerate", rep.nondegeneracy.nondegenerate);
    doc.put("nondegenerate.ri_image", rep.nondegeneracy.ri_image);
    doc.put("nondegenerate.ri_multiplier", rep.nondegeneracy.ri_multiplier);
    doc.put("nondegenerate.cone_subspace", rep.nondegeneracy.cone_subspace);
    doc.put("growth.verdict", verdict_name(rep.growth.verdict));
    doc.put("growth.modulus", rep.growth.modulus);
    doc.put("growth.reduced_dim", rep.growth.reduced_dim);
    if (rep.tilt) {
        doc.put("tilt.verdict", verdict_name(rep.tilt->verdict));
        doc.put("tilt.modulus", rep.tilt->modulus);
    }
    if (rep.gamma) doc.put("gamma", *rep.gamma);
    for (size_t i = 0; i < rep.d2_probes.size(); ++i) {
        std::string base = "d2." + std::to_string(i);
        doc.put(base + ".w", rep.d2_probes[i].first);
        doc.put(base + ".value", rep.d2_probes[i].second);
    }
    for (size_t i = 0; i < rep.strict_d2_probes.size(); ++i) {
        std::string base = "strict_d2." + std::to_string(i);
        doc.put(base + ".w", rep.strict_d2_probes[i].first);
        doc.put(base + ".value", rep.strict_d2_probes[i].second);
    }
    return doc;
}

ReportDocument cmd_subderiv(const ProblemFile& pf, const Tolerances& tols, std::string* csv) {
    CompositeProblem cp = pf.problem(tols);
    auto [x, v] = require_base(pf);
    if (!pf.w)
        throw PreconditionError("missing_point", "subderiv needs the direction w in [points]");
    const Vec& w = *pf.w;

    ReportDocument doc;
    doc.put("command", "subderiv");
    try {
        doc.put("formula", second_subderivative(cp, x, v, w, tols));
        doc.put("formula.status", "ok");
    } catch (const PreconditionError& e) {
        doc.put("formula.status", "refused(" + e.name() + ")");
    }
    try {
        doc.put("formula_strict", strict_second_subderivative(cp, x, v, w, tols));
        doc.put("formula_strict.status", "ok");
    } catch (const PreconditionError& e) {
        doc.put("formula_strict.status", "refused(" + e.name() + ")");
    }

    SampledD2 sd = sampled_d2(cp, x, v, w, pf.grid, tols);
    doc.put("sampled.estimate", sd.estimate);
    doc.put("sampled.diverged", sd.diverged);
    for (size_t i = 0; i < sd.level_min.size(); ++i) {
        doc.put("sampled.level." + std::to_string(i) + ".t", pf.grid.t_levels[i]);
        doc.put("sampled.level." + std::to_string(i) + ".min", sd.level_min[i]);
    }
    SampledD2 ss = sampled_strict_d2(cp, w, pf.grid, tols);
    doc.put("sampled_strict.estimate", ss.estimate);
    doc.put("sampled_strict.diverged", ss.diverged);
    for (size_t i = 0; i < ss.level_min.size(); ++i)
        doc.put("sampled_strict.level." + std::to_string(i) + ".min", ss.level_min[i]);

    if (csv) *csv = csv_of_rows(quotient_rows(cp, x, v, w, pf.grid, tols));
    return doc;
}

ReportDocument cmd_geneq(const ProblemFile& pf, const Tolerances& tols) {
    GeneralizedEquation ge = pf.equation(tols);

    ReportDocument doc;
    doc.put("command", "geneq");
    if (pf.xbar) {
        SolutionCheck sc = check_solution(ge, *pf.xbar, tols);
        doc.put("solution.is_solution", sc.is_solution);
        doc.put("solution.nondegenerate", sc.nondegenerate);
        if (sc.is_solution) {
            try {
                MrReport mr = mr_check(ge, *pf.xbar, tols);
                doc.put("mr.status", "ok");
                doc.put("mr.regular", mr.regular);
                doc.put("mr.strong", mr.strong);
                doc.put("mr.criteria.kernel", mr.crit_kernel);
                doc.put("mr.criteria.range", mr.crit_range);
                doc.put("mr.criteria.reduced", mr.crit_reduced);
                if (mr.sigma_jacobian) doc.put("localization.jacobian", *mr.sigma_jacobian);
            } catch (const PreconditionError& e) {
                doc.put("mr.status", "refused(" + e.name() + ")");
            }
        }
    }

    Vec x0 = pf.xbar ? *pf.xbar : Vec::Zero(ge.cp.n());
    SolveResult sr = solve_ge(ge, ge.ubar, x0, tols);
    doc.put("solve.converged", sr.converged);
    doc.put("solve.patterns", sr.patterns_tried);
    if (sr.converged) {
        doc.put("solve.x", sr.x);
        doc.put("solve.lambda", sr.lambda);
        doc.put("solve.residual", sr.residual);
    } else {
        doc.put("solve.diagnostics", sr.diagnostics);
    }
    return doc;
}

ReportDocument cmd_prox(const ProblemFile& pf, const Tolerances& tols) {
    auto [x, v] = require_base(pf);

    std::vector<double> admissible, skipped;
    for (double r : pf.r_values) {
        if (r > 0 && (pf.rho <= 0 || r < 1.0 / pf.rho))
            admissible.push_back(r);
        else
            skipped.push_back(r);
    }
    if (admissible.empty())
        throw PreconditionError("r_range", "no configured r lies in (0, 1/rho)");

    ReportDocument doc;
    doc.put("command", "prox");
    doc.put("rho", pf.rho);
    if (!skipped.empty()) {
        std::string s;
        for (size_t i = 0; i < skipped.size(); ++i) {
            if (i) s += ' ';
            s += format_sci(skipped[i]);
        }
        doc.put("skipped_r", s + " (outside (0, 1/rho))");
    }
    for (size_t i = 0; i < admissible.size(); ++i) {
        const double r = admissible[i];
        const std::string base = "prox." + std::to_string(i);
        CompositeProblem cp = pf.problem(tols);
        ProxProblem pp(cp, r, pf.rho, tols);
        Vec ustar = x + r * v;

        ProxResult pr = prox_compute(pp, ustar, tols);
        doc.put(base + ".r", r);
        doc.put(base + ".input", ustar);
        doc.put(base + ".point", pr.point);
        doc.put(base + ".objective", pr.objective);
        doc.put(base + ".subgradient", pr.subgradient);
        doc.put(base + ".localized_differs", pr.localized_differs);
        doc.put(base + ".envelope", moreau_envelope(pp, ustar, tols));
        doc.put(base + ".moreau_gradient", moreau_gradient(pp, ustar, tols));

        ProxC1Report c1 = prox_c1_check(pp, tols);
        doc.put(base + ".c1.formula", c1.formula_c1 ? "C1" : "notC1");
        doc.put(base + ".c1.probe", c1.probe == ProbeOutcome::Smooth
                                        ? "smooth"
                                        : (c1.probe == ProbeOutcome::Jump ? "jump"
                                                                          : "inconclusive"));
        doc.put(base + ".c1.max_jump", c1.max_jump);
        if (c1.probe == ProbeOutcome::Jump) {
            doc.put(base + ".c1.jump_point", c1.jump_point);
            doc.put(base + ".c1.jump_direction", c1.jump_direction);
        }
        try {
            doc.put(base + ".jacobian", prox_jacobian(pp, tols));
            doc.put(base + ".jacobian.status", "ok");
        } catch (const PreconditionError& e) {
            doc.put(base + ".jacobian.status", "refused(" + e.name() + ")");
        }
    }
    return doc;
}

ReportDocument cmd_epi(const ProblemFile& pf, const Tolerances& tols) {
    CompositeProblem cp = pf.problem(tols);
    require_base(pf);

    EpiProbeReport rep = epi_convergence_probe(cp, pf.grid, tols);
    ReportDocument doc;
    doc.put("command", "epi");
    doc.put("formula_verdict", rep.formula_verdict);
    for (size_t i = 0; i < rep.levels.size(); ++i) {
        doc.put("level." + std::to_string(i) + ".t", rep.levels[i]);
        doc.put("level." + std::to_string(i) + ".distance", rep.distances[i]);
    }
    switch (rep.status) {
        case EpiStatus::ConsistentConvergent: doc.put("status", "consistent-convergent"); break;
        case EpiStatus::ConsistentDivergent: doc.put("status", "consistent-divergent"); break;
        default: doc.put("status", "inconsistent"); break;
    }
    if (!rep.diagnostics.empty()) doc.put("diagnostics", rep.diagnostics);
    return doc;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

int dispatch(const std::string& command, const Options& opt) {
    ProblemFile pf = parse_problem_path(opt.file);
    Tolerances tols = effective_tols(pf, opt);
    if (!opt.csv_path.empty() && command != "subderiv")
        throw ParseError("--csv is only produced by the subderiv command");

    ReportDocument doc;
    std::string csv;
    if (command == "analyze")
        doc = cmd_analyze(pf, tols);
    else if (command == "subderiv")
        doc = cmd_subderiv(pf, tols, opt.csv_path.empty() ? nullptr : &csv);
    else if (command == "geneq")
        doc = cmd_geneq(pf, tols);
    else if (command == "prox")
        doc = cmd_prox(pf, tols);
    else
        doc = cmd_epi(pf, tols);

    doc.put("seed", std::to_string(tols.seed));
    emit(doc.render(), opt.out_path);
    if (!csv.empty()) emit(csv, opt.csv_path);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"second-order analysis of polyhedral composites"};
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seed_val = 0;
    std::string command;
    for (const char* name : {"analyze", "subderiv", "geneq", "prox", "epi"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("file", opt.file, "problem file")->required();
        sub->add_option("--out", opt.out_path, "write the report here instead of stdout");
        sub->add_option("--csv", opt.csv_path, "write sampled quotient rows as CSV");
        CLI::Option* seed_opt = sub->add_option("--seed", seed_val,
                                                "override the sampling seed");
        sub->add_option("--tol", opt.tol_kv, "override one tolerance, KEY=VAL (repeatable)");
        // the bound seed variable is converted before subcommand callbacks run
        sub->callback([&command, &opt, &seed_val, seed_opt, name] {
            command = name;
            if (seed_opt->count() > 0) opt.seed = seed_val;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return dispatch(command, opt);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failed [" << e.name() << "]: " << e.what() << "\n";
        return 3;
    } catch (const ConsistencyError& e) {
        std::cerr << "consistency error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace varpoly
