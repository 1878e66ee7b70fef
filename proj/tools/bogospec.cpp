// Command line front end: `bogospec run` drives the pipeline, `bogospec validate` the property suite.

#include "bogospec/errors.hpp"
#include "bogospec/pipeline.hpp"
#include "bogospec/validate.hpp"

#include <CLI11.hpp>

#include <boost/algorithm/string.hpp>

#include <fstream>
#include <iostream>

using namespace bogospec;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    boost::split(out, text, boost::is_any_of(","), boost::token_compress_on);
    for (auto& s : out) boost::trim(s);
    out.erase(std::remove(out.begin(), out.end(), ""), out.end());
    return out;
}

int run(const std::string& config_path, const std::string& stages, const std::optional<std::string>& out,
        const std::optional<std::uint64_t>& seed, const std::optional<double>& kappa,
        const std::optional<double>& zeta, const std::string& plots) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (out) cfg.out_dir = *out;
    if (seed) cfg.seed = *seed;
    if (kappa) cfg.kappa = *kappa;
    if (zeta) cfg.zeta = *zeta;
    cfg.validate();

    auto man = run_pipeline(cfg, split_list(stages));
    for (const auto& which : split_list(plots)) std::cout << "wrote " << emit_plot_data(man, which) << "\n";
    for (const auto& s : man.stages)
        std::cout << (s.ok ? "ok    " : "FAIL  ") << s.name << "  " << s.seconds << " s"
                  << (s.ok ? "" : "  (" + s.failure + ")") << "\n";
    std::cout << "manifest: " << man.out_dir << "/manifest.json  config " << man.config_hash << "\n";
    for (const auto& s : man.stages)
        if (!s.ok) {
            std::cerr << "stage " << s.name << " failed: " << s.failure << "\n";
            return kExitValidation;
        }
    return kExitOk;
}

int validate(bool acceptance, const std::string& json_path, int threads) {
    const auto rep = run_suite(acceptance ? acceptance_fixtures() : default_fixtures(), threads);
    std::cout << rep.table();
    if (!json_path.empty()) std::ofstream(json_path) << rep.json() << "\n";
    return rep.ok() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bogoliubov excitation spectrum and ground state correction for trapped Bose gases"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run pipeline stages and write JSON outputs with a manifest");
    std::string config_path, stages = "scatter,gp,spectrum", plots;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> kappa, zeta;
    run_cmd->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    run_cmd->add_option("--stages", stages, "comma separated subset of scatter,gp,spectrum,kernels,ebog,oracle,validate")
        ->capture_default_str();
    run_cmd->add_option("--out", out, "output directory (overrides [run] out)");
    run_cmd->add_option("--seed", seed, "random seed (overrides [run] seed)");
    run_cmd->add_option("--kappa", kappa, "resolvent shift for the E_Bog formula");
    run_cmd->add_option("--zeta", zeta, "energy cutoff for the excitation level list");
    run_cmd->add_option("--plot", plots, "comma separated CSV outputs: dispersion,profile,neumann-asymptotics,ebog-terms");

    auto* val_cmd = app.add_subcommand("validate", "run the property suite and print the report");
    bool acceptance = false;
    std::string json_path;
    int threads = 0;
    val_cmd->add_flag("--acceptance", acceptance, "run the acceptance criteria instead of the invariant fixtures");
    val_cmd->add_option("--json", json_path, "also write the report as JSON");
    val_cmd->add_option("--threads", threads, "fixture workers (default BOGOSPEC_THREADS, else 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return run(config_path, stages, out, seed, kappa, zeta, plots);
        return validate(acceptance, json_path, threads);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
