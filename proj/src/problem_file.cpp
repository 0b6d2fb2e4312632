#include "varpoly/problem_file.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "varpoly/errors.hpp"

namespace varpoly {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& s, int line) {
    std::string t = trim(s);
    if (t.empty()) fail(line, "expected a number");
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) fail(line, "bad number '" + t + "'");
    return v;
}

long long parse_int(const std::string& s, int line) {
    double v = parse_double(s, line);
    long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v) fail(line, "expected an integer, got '" + trim(s) + "'");
    return i;
}

std::vector<double> parse_numbers(const std::string& s, int line) {
    std::vector<double> out;
    std::istringstream is(trim(s));
    std::string tok;
    while (is >> tok) out.push_back(parse_double(tok, line));
    return out;
}

Vec to_vec(const std::vector<double>& vals) {
    Vec v(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

// "e_1 .. e_n : c, e_1 .. e_n : c"  ->  one polynomial; empty value = zero
Polynomial parse_poly(const std::string& value, int nvars, int line) {
    Polynomial p;
    p.nvars = nvars;
    std::string body = trim(value);
    if (body.empty()) return p;
    for (const std::string& term : split(body, ',')) {
        std::vector<std::string> halves = split(term, ':');
        if (halves.size() != 2) fail(line, "monomial must be 'exponents : coefficient'");
        std::vector<double> exps = parse_numbers(halves[0], line);
        if (static_cast<int>(exps.size()) != nvars)
            fail(line, "expected " + std::to_string(nvars) + " exponents");
        Monomial m;
        for (double e : exps) {
            if (e < 0 || e != static_cast<double>(static_cast<int>(e)))
                fail(line, "exponents must be nonnegative integers");
            m.exp.push_back(static_cast<int>(e));
        }
        m.coef = parse_double(halves[1], line);
        p.terms.push_back(std::move(m));
    }
    return p;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_vec(const Vec& v) {
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt_g(v[i]);
    }
    return out;
}

std::string poly_text(const Polynomial& p) {
    std::string out;
    for (size_t t = 0; t < p.terms.size(); ++t) {
        if (t) out += ", ";
        for (size_t i = 0; i < p.terms[t].exp.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(p.terms[t].exp[i]);
        }
        out += " : ";
        out += fmt_g(p.terms[t].coef);
    }
    return out;
}

struct RawBuilder {
    std::vector<Vec> pieces, rows;
    std::vector<double> alphas, betas;
    int n = -1;
    std::vector<Polynomial> phi_comps, f_comps;
    bool have_f_section = false;
};

}  // namespace

ProblemFile parse_problem(std::istream& in) {
    ProblemFile pf;
    RawBuilder raw;
    std::string section;
    std::string linebuf;
    int lineno = 0;
    int piece_len = -1;

    auto number_list = [&](const std::string& v) { return parse_numbers(v, lineno); };

    while (std::getline(in, linebuf)) {
        ++lineno;
        std::string line = linebuf;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "g" && section != "phi" && section != "f" && section != "points" &&
                section != "params")
                fail(lineno, "unknown section [" + section + "]");
            if (section == "f") raw.have_f_section = true;
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = line.substr(eq + 1);

        if (section.empty()) fail(lineno, "key '" + key + "' appears before any section");

        if (section == "g") {
            std::vector<std::string> halves = split(value, ';');
            if (halves.size() != 2) fail(lineno, "expected 'coefficients ; offset'");
            std::vector<double> coefs = number_list(halves[0]);
            if (coefs.empty()) fail(lineno, "empty coefficient list");
            if (piece_len < 0) piece_len = static_cast<int>(coefs.size());
            if (static_cast<int>(coefs.size()) != piece_len)
                fail(lineno, "inconsistent coefficient length");
            double off = parse_double(halves[1], lineno);
            if (key == "piece") {
                raw.pieces.push_back(to_vec(coefs));
                raw.alphas.push_back(off);
            } else if (key == "row") {
                raw.rows.push_back(to_vec(coefs));
                raw.betas.push_back(off);
            } else {
                fail(lineno, "unknown key '" + key + "' in [g]");
            }
        } else if (section == "phi" || section == "f") {
            std::vector<Polynomial>& comps = section == "phi" ? raw.phi_comps : raw.f_comps;
            if (key == "in") {
                if (section == "f") fail(lineno, "[f] inherits its dimension; no 'in' key");
                raw.n = static_cast<int>(parse_int(value, lineno));
                if (raw.n <= 0) fail(lineno, "dimension must be positive");
            } else if (key == "comp") {
                if (raw.n < 0) fail(lineno, "'in = n' must come before components");
                comps.push_back(parse_poly(value, raw.n, lineno));
            } else {
                fail(lineno, "unknown key '" + key + "' in [" + section + "]");
            }
        } else if (section == "points") {
            Vec v = to_vec(number_list(value));
            if (key == "xbar")
                pf.xbar = v;
            else if (key == "vbar")
                pf.vbar = v;
            else if (key == "ubar")
                pf.ubar = v;
            else if (key == "lambda")
                pf.lambda = v;
            else if (key == "w")
                pf.w = v;
            else
                fail(lineno, "unknown key '" + key + "' in [points]");
        } else {  // params
            if (key == "r") {
                pf.r_values = number_list(value);
                if (pf.r_values.empty()) fail(lineno, "empty r list");
            } else if (key == "rho") {
                pf.rho = parse_double(value, lineno);
            } else if (key == "radius") {
                pf.radius = parse_double(value, lineno);
            } else if (key == "count") {
                pf.count = static_cast<int>(parse_int(value, lineno));
            } else if (key == "t_levels") {
                pf.grid.t_levels = number_list(value);
            } else if (key == "dir_samples") {
                pf.grid.dir_samples = static_cast<int>(parse_int(value, lineno));
            } else if (key == "base_samples") {
                pf.grid.base_samples = static_cast<int>(parse_int(value, lineno));
            } else if (key == "divergence_threshold") {
                pf.grid.divergence_threshold = parse_double(value, lineno);
            } else if (key == "epi_rho") {
                pf.grid.rho = parse_double(value, lineno);
            } else if (key == "epi_grid") {
                pf.grid.epi_grid = static_cast<int>(parse_int(value, lineno));
            } else if (key == "seed") {
                pf.tols.seed = static_cast<std::uint64_t>(parse_int(value, lineno));
            } else if (key.rfind("tol.", 0) == 0) {
                try {
                    apply_tol_override(pf.tols, key.substr(4), parse_double(value, lineno));
                } catch (const ParseError& e) {
                    fail(lineno, e.what());
                }
            } else {
                fail(lineno, "unknown key '" + key + "' in [params]");
            }
        }
    }

    if (raw.pieces.empty()) throw ParseError("[g] needs at least one piece");
    if (raw.phi_comps.empty()) throw ParseError("[phi] needs at least one component");
    if (piece_len != static_cast<int>(raw.phi_comps.size()))
        throw ParseError("[g] lives on R^" + std::to_string(piece_len) + " but [phi] has " +
                         std::to_string(raw.phi_comps.size()) + " components");
    try {
        pf.g = PolyhedralFunction(raw.pieces, raw.alphas, raw.rows, raw.betas);
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("[g] rejected: ") + e.what());
    }
    pf.Phi = PolyMap{raw.n, static_cast<int>(raw.phi_comps.size()), raw.phi_comps};
    if (raw.have_f_section) {
        if (static_cast<int>(raw.f_comps.size()) != raw.n)
            throw ParseError("[f] must map R^n to R^n: expected " + std::to_string(raw.n) +
                             " components, got " + std::to_string(raw.f_comps.size()));
        pf.f = PolyMap{raw.n, raw.n, raw.f_comps};
    }

    auto check_len = [&](const std::optional<Vec>& v, int want, const std::string& name) {
        if (v && v->size() != want)
            throw ParseError(name + " must have " + std::to_string(want) + " entries");
    };
    check_len(pf.xbar, raw.n, "xbar");
    check_len(pf.vbar, raw.n, "vbar");
    check_len(pf.ubar, raw.n, "ubar");
    check_len(pf.w, raw.n, "w");
    check_len(pf.lambda, piece_len, "lambda");
    return pf;
}

ProblemFile parse_problem_text(const std::string& text) {
    std::istringstream is(text);
    return parse_problem(is);
}

ProblemFile parse_problem_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_problem(in);
}

std::string serialize_problem(const ProblemFile& pf) {
    std::ostringstream os;
    os << "[g]\n";
    for (size_t j = 0; j < pf.g.a.size(); ++j)
        os << "piece = " << join_vec(pf.g.a[j]) << " ; " << fmt_g(pf.g.alpha[j]) << "\n";
    for (size_t i = 0; i < pf.g.b.size(); ++i)
        os << "row = " << join_vec(pf.g.b[i]) << " ; " << fmt_g(pf.g.beta[i]) << "\n";

    os << "[phi]\n";
    os << "in = " << pf.Phi.n_in << "\n";
    for (const Polynomial& p : pf.Phi.comp) os << "comp = " << poly_text(p) << "\n";
    if (pf.f) {
        os << "[f]\n";
        for (const Polynomial& p : pf.f->comp) os << "comp = " << poly_text(p) << "\n";
    }

    os << "[points]\n";
    if (pf.xbar) os << "xbar = " << join_vec(*pf.xbar) << "\n";
    if (pf.vbar) os << "vbar = " << join_vec(*pf.vbar) << "\n";
    if (pf.ubar) os << "ubar = " << join_vec(*pf.ubar) << "\n";
    if (pf.lambda) os << "lambda = " << join_vec(*pf.lambda) << "\n";
    if (pf.w) os << "w = " << join_vec(*pf.w) << "\n";

    os << "[params]\n";
    os << "r =";
    for (double r : pf.r_values) os << ' ' << fmt_g(r);
    os << "\n";
    os << "rho = " << fmt_g(pf.rho) << "\n";
    os << "radius = " << fmt_g(pf.radius) << "\n";
    os << "count = " << pf.count << "\n";
    os << "t_levels =";
    for (double t : pf.grid.t_levels) os << ' ' << fmt_g(t);
    os << "\n";
    os << "dir_samples = " << pf.grid.dir_samples << "\n";
    os << "base_samples = " << pf.grid.base_samples << "\n";
    os << "divergence_threshold = " << fmt_g(pf.grid.divergence_threshold) << "\n";
    os << "epi_rho = " << fmt_g(pf.grid.rho) << "\n";
    os << "epi_grid = " << pf.grid.epi_grid << "\n";
    os << "seed = " << pf.tols.seed << "\n";
    const Tolerances def;
    const Tolerances& t = pf.tols;
    auto tol_line = [&](const char* key, double cur, double dflt) {
        if (cur != dflt) os << "tol." << key << " = " << fmt_g(cur) << "\n";
    };
    tol_line("act", t.act, def.act);
    tol_line("ri", t.ri, def.ri);
    tol_line("eig", t.eig, def.eig);
    tol_line("res", t.res, def.res);
    tol_line("jump", t.jump, def.jump);
    tol_line("epi", t.epi, def.epi);
    tol_line("zero", t.zero, def.zero);
    tol_line("fd_step", t.fd_step, def.fd_step);
    if (t.dd_max_dim != def.dd_max_dim) os << "tol.dd_max_dim = " << t.dd_max_dim << "\n";
    if (t.pattern_budget != def.pattern_budget)
        os << "tol.pattern_budget = " << t.pattern_budget << "\n";
    if (t.newton_max_iter != def.newton_max_iter)
        os << "tol.newton_max_iter = " << t.newton_max_iter << "\n";
    return os.str();
}

void apply_tol_override(Tolerances& tols, const std::string& key, double value) {
    if (key == "act")
        tols.act = value;
    else if (key == "ri")
        tols.ri = value;
    else if (key == "eig")
        tols.eig = value;
    else if (key == "res")
        tols.res = value;
    else if (key == "jump")
        tols.jump = value;
    else if (key == "epi")
        tols.epi = value;
    else if (key == "zero")
        tols.zero = value;
    else if (key == "fd_step")
        tols.fd_step = value;
    else if (key == "dd_max_dim")
        tols.dd_max_dim = static_cast<int>(value);
    else if (key == "pattern_budget")
        tols.pattern_budget = static_cast<int>(value);
    else if (key == "newton_max_iter")
        tols.newton_max_iter = static_cast<int>(value);
    else if (key == "seed")
        tols.seed = static_cast<std::uint64_t>(value);
    else
        throw ParseError("unknown tolerance '" + key + "'");
}

CompositeProblem ProblemFile::problem(const Tolerances& t) const {
    return CompositeProblem(g, Phi, xbar, vbar, t);
}

GeneralizedEquation ProblemFile::equation(const Tolerances& t) const {
    if (!ubar)
        throw PreconditionError("missing_point",
                                "the generalized equation needs ubar in [points]");
    PolyMap fmap = f ? *f : PolyMap::identity(Phi.n_in);
    return GeneralizedEquation(fmap, problem(t), *ubar);
}

}  // namespace varpoly
