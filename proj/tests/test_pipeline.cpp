#include "bogospec/errors.hpp"
#include "bogospec/pipeline.hpp"
#include "bogospec/validate.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bogospec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("bogospec-test-" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.basis = Basis::make_radial(7.0, 119);
    c.asymptotic_ellN = {100.0, 300.0, 1000.0, 3000.0};
    c.l_max = 2;
    c.oracle_forms = 2;
    c.out_dir = out.string();
    return c;
}

}  // namespace

TEST_CASE("config file overrides defaults and rejects unknown keys") {
    TempDir dir("config");
    const auto p = write_file(dir.path / "a.ini",
                              "[potential]\nkind = square_barrier\nV0 = 2\nR = 0.5\n"
                              "[basis]\nkind = radial\nn = 99\n"
                              "[kernels]\nN = 10, 20\nell = 0.3\n"
                              "[ebog]\nkappa = 7\ndelta = 0.5, 0.25\n"
                              "[run]\nseed = 9\nout = res\n");
    const auto c = RunConfig::load(p.string());
    CHECK(c.potential.V0 == 2.0);
    CHECK(c.potential.R == 0.5);
    CHECK(c.basis.radial.n == 99);
    CHECK(c.N_list == std::vector<int>{10, 20});
    CHECK(c.ell == 0.3);
    CHECK(c.kappa == 7.0);
    CHECK(c.delta == std::vector<double>{0.5, 0.25});
    CHECK(c.seed == 9);
    CHECK_FALSE(c.a0.has_value());

    CHECK_THROWS_AS(RunConfig::load(write_file(dir.path / "b.ini", "[basis]\nsize = 3\n").string()), ValidationError);
    CHECK_THROWS_AS(RunConfig::load(write_file(dir.path / "c.ini", "[colour]\nx = 1\n").string()), ValidationError);
    CHECK_THROWS_AS(RunConfig::load(write_file(dir.path / "d.ini", "[ebog]\nkappa = fast\n").string()),
                    ValidationError);
    CHECK_THROWS_AS(RunConfig::load(write_file(dir.path / "g.ini", "[scattering]\nasymptotic_ellN = 100, 200, 300, 400\n").string()),
                    ValidationError);
    CHECK_THROWS_AS(RunConfig::load(write_file(dir.path / "e.ini", "[ebog]\ndelta = 0.1, 0.2\n").string()),
                    ValidationError);
    CHECK_THROWS_AS(
        RunConfig::load(write_file(dir.path / "f.ini", "[potential]\nkind = tabulated\nfile = nope.dat\n").string()),
        ValidationError);
}

TEST_CASE("config hash follows the canonical form") {
    RunConfig a, b;
    CHECK(sha256_hex(a.canonical()) == sha256_hex(b.canonical()));
    b.kappa = 6.0;
    CHECK(sha256_hex(a.canonical()) != sha256_hex(b.canonical()));
    // the output directory is not part of the computation
    b = a;
    b.out_dir = "elsewhere";
    CHECK(a.canonical() == b.canonical());
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("missing stage dependencies are usage errors") {
    RunConfig c;
    CHECK_THROWS_AS(check_stage_dependencies(c, {"gp"}), UsageError);
    CHECK_THROWS_AS(check_stage_dependencies(c, {"ebog", "gp", "scatter"}), UsageError);
    CHECK_THROWS_AS(check_stage_dependencies(c, {"kernels", "gp"}), UsageError);
    CHECK_THROWS_AS(check_stage_dependencies(c, {"plot"}), UsageError);
    CHECK_THROWS_AS(check_stage_dependencies(c, {}), UsageError);
    CHECK_NOTHROW(check_stage_dependencies(c, {"oracle"}));
    CHECK_NOTHROW(check_stage_dependencies(c, {"spectrum", "gp", "scatter"}));
    try {
        check_stage_dependencies(c, {"spectrum"});
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("ebog <- spectrum") != std::string::npos);
        CHECK(e.exit_code() == kExitUsage);
    }
    c.a0 = 0.3;
    CHECK_NOTHROW(check_stage_dependencies(c, {"gp"}));
    CHECK_THROWS_AS(check_stage_dependencies(c, {"kernels", "gp"}), UsageError);
}

TEST_CASE("scatter stage records a0 and the asymptotics") {
    TempDir dir("scatter");
    auto man = run_pipeline(small_config(dir.path), {"scatter"});
    CHECK(man.ok());
    const auto j = nlohmann::json::parse(slurp(dir.path / "scatter.json"));
    CHECK(j["a0"].get<double>() == doctest::Approx(1.0 - std::tanh(std::sqrt(2.0)) / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(j["ok"].get<bool>());

    const auto csv = emit_plot_data(man, "neumann-asymptotics");
    std::istringstream lines(slurp(csv));
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "ellN,lambda_scaled");
    int rows = 0;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == 4);
    const auto m = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
    CHECK(m["files"].size() == 3);

    CHECK_THROWS_AS(emit_plot_data(man, "histogram"), UsageError);
    CHECK_THROWS_AS(emit_plot_data(man, "ebog-terms"), UsageError);
}

TEST_CASE("full pipeline writes every stage and plot") {
    TempDir dir("full");
    auto cfg = small_config(dir.path);
    cfg.N_list = {25};
    cfg.delta = {0.8, 0.4, 0.2};
    auto man = run_pipeline(cfg, {"scatter", "gp", "spectrum", "kernels", "ebog", "oracle"});
    REQUIRE(man.stages.size() == 6);
    for (const auto& s : man.stages)
        if (s.name != "ebog") CHECK_MESSAGE(s.ok, s.name << ": " << s.failure);
    // on this coarse basis the mollified route is still far from its limit, and the stage says so
    const auto* eb = man.stage("ebog");
    CHECK_FALSE(eb->ok);
    CHECK(eb->failure.find("mollified") != std::string::npos);
    CHECK_FALSE(man.ok());
    CHECK(man.stages.front().name == "scatter");
    CHECK(man.stages.back().name == "oracle");
    for (const char* which : {"dispersion", "profile", "ebog-terms"}) emit_plot_data(man, which);
    std::istringstream terms(slurp(dir.path / "ebog_terms.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(terms, line)) ++rows;
    CHECK(rows == 8);
    CHECK(slurp(dir.path / "dispersion.csv").rfind("index,e_j\n", 0) == 0);
    for (const auto& f : man.files()) CHECK_MESSAGE(fs::exists(dir.path / f), f);
}

TEST_CASE("check relations and flags") {
    CHECK(make_check("x", 1.0 + 1e-7, 1.0, 1e-6, Relation::Relative, Provenance::Analytic).pass);
    CHECK_FALSE(make_check("x", 1.1, 1.0, 1e-6, Relation::Absolute, Provenance::Analytic).pass);
    CHECK(make_check("x", -2.0, 0.0, 0.0, Relation::AtMost, Provenance::Oracle).pass);
    CHECK_FALSE(make_check("x", -2.0, 0.0, 0.0, Relation::AtLeast, Provenance::Oracle).pass);
    CHECK_FALSE(make_check("x", std::nan(""), 0.0, 1.0, Relation::AtMost, Provenance::Oracle).pass);
    CHECK(make_flag("y", true, Provenance::SelfConvergence).pass);
    CHECK_FALSE(make_flag("y", false, Provenance::SelfConvergence).pass);
    CHECK(std::string(to_string(Provenance::Asymptotic)) == "asymptotic");
}

TEST_CASE("suite reports exceptions and orders fixtures by name") {
    std::vector<Fixture> fx = {
        {"zeta", "", [] { return std::vector<Check>{make_flag("holds", true, Provenance::Analytic)}; }},
        {"alpha", "", []() -> std::vector<Check> { throw NumericalError("diverged"); }},
        {"mid", "", [] { return std::vector<Check>{make_check("m", 2.0, 1.0, 0.5, Relation::Absolute, Provenance::Oracle)}; }},
    };
    for (int threads : {1, 3}) {
        const auto rep = run_suite(fx, threads);
        REQUIRE(rep.fixtures.size() == 3);
        CHECK(rep.fixtures[0].name == "alpha");
        CHECK(rep.fixtures[0].error == "diverged");
        CHECK(rep.fixtures[2].name == "zeta");
        CHECK(rep.passed() == 1);
        CHECK(rep.failed() == 2);
        CHECK_FALSE(rep.ok());
        const auto j = nlohmann::json::parse(rep.json());
        CHECK(j["fixtures"][1]["checks"][0]["provenance"] == "oracle");
        CHECK(rep.table().find("FAIL  exception: diverged") != std::string::npos);
    }
}

TEST_CASE("every fixture expectation carries a provenance") {
    CHECK(default_fixtures().size() == 12);
    const auto acc = acceptance_fixtures();
    REQUIRE(acc.size() == 10);
    CHECK(acc.front().name.rfind("01-", 0) == 0);
    CHECK(acc.back().name.rfind("10-", 0) == 0);
}
