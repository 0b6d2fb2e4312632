// Contract tests for the varpoly executable: exit codes, report keys,
// determinism across runs, and the side-channel outputs (--out, --csv).
// The binary under test is spawned through std::system with stdout/stderr
// captured to files, so these tests exercise the real process boundary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("varpoly_cli_contract_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

// Spawn the CLI with the given argument string; capture stdout/stderr.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
    fs::path err = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = quoted(VARPOLY_CLI_PATH) + " " + args + " > " +
                      quoted(out.string()) + " 2> " + quoted(err.string());
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string problem(const std::string& name) {
    return quoted((fs::path(VARPOLY_PROBLEM_DIR) / name).string());
}

// Parse "key = value" lines into a map; unknown shapes are ignored.
std::map<std::string, std::string> parse_report(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t sep = line.find(" = ");
        if (sep != std::string::npos)
            kv[line.substr(0, sep)] = line.substr(sep + 3);
    }
    return kv;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = scratch_dir() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

}  // namespace

TEST_CASE("every analysis command succeeds on its shipped problems") {
    const char* files[] = {"abs.vpp",      "abs_tilt.vpp",      "circle.vpp",
                           "halfline.vpp", "kinked_quadratic.vpp", "neg_quadratic.vpp",
                           "orthant_nlp.vpp"};
    for (const char* f : files) {
        for (std::string cmd : {"analyze", "subderiv", "epi"}) {
            RunResult r = run_cli(cmd + " " + problem(f));
            CAPTURE(cmd);
            CAPTURE(f);
            CHECK(r.code == 0);
            auto kv = parse_report(r.out);
            CHECK(kv.at("command") == cmd);
            CHECK(kv.count("seed") == 1);
        }
    }
}

TEST_CASE("analyze reports the second-order summary keys") {
    RunResult r = run_cli("analyze " + problem("kinked_quadratic.vpp"));
    REQUIRE(r.code == 0);
    auto kv = parse_report(r.out);
    CHECK(kv.at("bcq") == "true");
    CHECK(kv.at("soqc") == "true");
    CHECK(kv.count("nondegenerate") == 1);
    CHECK(kv.count("growth.verdict") == 1);
    CHECK(kv.count("multiplier.singleton") == 1);
    CHECK(kv.count("d2.0.value") == 1);
    CHECK(kv.count("strict_d2.0.value") == 1);
}

TEST_CASE("subderiv reports both formula routes and the sampled estimates") {
    RunResult r = run_cli("subderiv " + problem("kinked_quadratic.vpp"));
    REQUIRE(r.code == 0);
    auto kv = parse_report(r.out);
    CHECK(kv.at("formula.status") == "ok");
    CHECK(kv.at("formula_strict.status") == "ok");
    CHECK(kv.at("formula") == "2.000000000000e+00");
    CHECK(kv.at("formula_strict") == "2.000000000000e+00");
    CHECK(kv.at("sampled.diverged") == "false");
    CHECK(kv.count("sampled.estimate") == 1);
    CHECK(kv.count("sampled.level.3.min") == 1);
    CHECK(kv.count("sampled_strict.estimate") == 1);
}

TEST_CASE("reports are byte-identical across runs with the same seed") {
    for (std::string cmd : {"subderiv", "epi"}) {
        RunResult a = run_cli(cmd + " " + problem("kinked_quadratic.vpp"));
        RunResult b = run_cli(cmd + " " + problem("kinked_quadratic.vpp"));
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
    }
    RunResult c = run_cli("subderiv --seed 7 " + problem("kinked_quadratic.vpp"));
    RunResult d = run_cli("subderiv --seed 7 " + problem("kinked_quadratic.vpp"));
    REQUIRE(c.code == 0);
    CHECK(c.out == d.out);
    CHECK(parse_report(c.out).at("seed") == "7");
}

TEST_CASE("the geneq command solves the instances that carry an equation") {
    for (const char* f : {"circle.vpp", "halfline.vpp"}) {
        RunResult r = run_cli("geneq " + problem(f));
        CAPTURE(f);
        REQUIRE(r.code == 0);
        auto kv = parse_report(r.out);
        CHECK(kv.at("solution.is_solution") == "true");
        CHECK(kv.at("solve.converged") == "true");
        CHECK(kv.at("mr.status") == "ok");
        CHECK(kv.count("mr.regular") == 1);
    }
    auto circle = parse_report(run_cli("geneq " + problem("circle.vpp")).out);
    CHECK(circle.at("mr.strong") == "true");
    CHECK(circle.at("localization.jacobian") ==
          "[0.000000000000e+00, 0.000000000000e+00; "
          "0.000000000000e+00, 5.000000000000e-01]");
}

TEST_CASE("geneq refuses problems without an equation part") {
    RunResult r = run_cli("geneq " + problem("abs.vpp"));
    CHECK(r.code == 3);
    CHECK(r.err.find("missing_point") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("prox succeeds and reports parameters outside the threshold as skipped") {
    for (const char* f : {"abs.vpp", "abs_tilt.vpp", "circle.vpp", "kinked_quadratic.vpp",
                          "orthant_nlp.vpp"}) {
        RunResult r = run_cli("prox " + problem(f));
        CAPTURE(f);
        CHECK(r.code == 0);
    }
    RunResult r = run_cli("prox " + problem("neg_quadratic.vpp"));
    REQUIRE(r.code == 0);
    auto kv = parse_report(r.out);
    CHECK(kv.at("rho") == "2.000000000000e+00");
    CHECK(kv.at("skipped_r") ==
          "5.000000000000e-01 1.000000000000e+00 (outside (0, 1/rho))");
    CHECK(kv.count("prox.0.point") == 1);
    CHECK(kv.count("prox.1.point") == 0);  // only r = 0.1 is admissible
}

TEST_CASE("prox reports the consistency conflict on the halfline instance") {
    // The prox of the halfline indicator is locally constant at ustar = r,
    // but the scan star reaches the kink at offset -r: the formula and the
    // probe disagree and the command refuses with the consistency exit code.
    RunResult r = run_cli("prox " + problem("halfline.vpp"));
    CHECK(r.code == 4);
    CHECK(r.err.find("consistency error") != std::string::npos);
    CHECK(r.err.find("scanned star") != std::string::npos);
}

TEST_CASE("epi reports one distance per level and a verdict status") {
    RunResult r = run_cli("epi " + problem("abs.vpp"));
    REQUIRE(r.code == 0);
    auto kv = parse_report(r.out);
    CHECK(kv.at("status") == "consistent-convergent");
    CHECK(kv.at("formula_verdict") == "true");
    CHECK(kv.count("level.0.t") == 1);
    CHECK(kv.count("level.3.distance") == 1);
}

TEST_CASE("--out writes the report to a file instead of stdout") {
    fs::path dest = scratch_dir() / "report.txt";
    RunResult r = run_cli("analyze " + problem("abs.vpp") + " --out " +
                          quoted(dest.string()));
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    RunResult plain = run_cli("analyze " + problem("abs.vpp"));
    CHECK(slurp(dest) == plain.out);
}

TEST_CASE("--csv exports quotient rows for subderiv and only for subderiv") {
    fs::path dest = scratch_dir() / "rows.csv";
    RunResult r = run_cli("subderiv " + problem("kinked_quadratic.vpp") + " --csv " +
                          quoted(dest.string()));
    REQUIRE(r.code == 0);
    std::string csv = slurp(dest);
    CHECK(csv.rfind("t,w1,value\n", 0) == 0);
    CHECK(csv.find("1.000000000000e-01") != std::string::npos);

    RunResult bad = run_cli("prox " + problem("abs.vpp") + " --csv " +
                            quoted(dest.string()));
    CHECK(bad.code == 2);
    CHECK(bad.err.find("subderiv") != std::string::npos);
}

TEST_CASE("malformed inputs exit with the parse failure code") {
    fs::path broken = write_temp("broken.vpp", "[g]\npiece = 1 ; 0\n[phi]\nin = x\n");
    CHECK(run_cli("analyze " + quoted(broken.string())).code == 2);

    fs::path missing = scratch_dir() / "does_not_exist.vpp";
    CHECK(run_cli("analyze " + quoted(missing.string())).code == 2);

    CHECK(run_cli("subderiv " + problem("abs.vpp") + " --tol bogus=1").code == 2);
    CHECK(run_cli("subderiv " + problem("abs.vpp") + " --tol act").code == 2);
    CHECK(run_cli("subderiv " + problem("abs.vpp") + " --tol act=abc").code == 2);

    CHECK(run_cli("").code == 2);                            // missing subcommand
    CHECK(run_cli("frobnicate " + problem("abs.vpp")).code == 2);
}

TEST_CASE("tolerance overrides reach the analysis") {
    // The kinked-quadratic base pair is degenerate, so the plain prox run
    // reports a probed Jacobian jump in agreement with the formula.  Raising
    // the jump threshold reclassifies the probe as smooth, and the
    // cross-check turns that disagreement into the consistency exit code.
    RunResult plain = run_cli("prox " + problem("kinked_quadratic.vpp"));
    REQUIRE(plain.code == 0);
    auto kv = parse_report(plain.out);
    CHECK(kv.at("prox.0.c1.formula") == "notC1");
    CHECK(kv.at("prox.0.c1.probe") == "jump");

    RunResult loose = run_cli("prox " + problem("kinked_quadratic.vpp") +
                              " --tol jump=1000000");
    CHECK(loose.code == 4);
    CHECK(loose.err.find("no Jacobian jump") != std::string::npos);
}
