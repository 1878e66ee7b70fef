#pragma once

#include "bogospec/basis.hpp"
#include "bogospec/gp.hpp"
#include "bogospec/scattering.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bogospec {

// Everything a run depends on. Loaded from an INI file; see README for the schema.
struct RunConfig {
    RadialPotential potential = RadialPotential::square_barrier(4.0, 1.0);
    std::string potential_file;  // tabulated potentials only
    TrapPotential trap = TrapPotential::harmonic();
    std::optional<double> a0;  // skips the scattering solve for the gp stage

    RadialGrid scatter_grid{20.0, 2048, RadialGrid::Spacing::Uniform};
    std::vector<double> asymptotic_ellN{100.0, 300.0, 1000.0, 3000.0};  // empty disables the fit

    Basis basis = Basis::make_radial(7.0, 279);
    int l_max = 4;

    std::vector<int> N_list{25, 50, 100};
    double ell = 0.2;

    int levels = 20;
    double zeta = 10.0;

    double kappa = 5.0;
    int quad_nodes = 128;
    std::vector<double> delta{0.4, 0.2, 0.1, 0.05};

    int oracle_forms = 10;

    std::string out_dir = "bogospec-out";
    std::uint64_t seed = 1;

    static RunConfig load(const std::string& path);
    void validate() const;
    // Stable text form of every field; the config hash is taken over it.
    std::string canonical() const;
};

std::string sha256_hex(const std::string& data);

struct StageRecord {
    std::string name;
    double seconds = 0.0;
    std::vector<std::string> files;  // relative to the output directory
    bool ok = true;
    std::string failure;  // first violated invariant, empty when ok
};

struct RunManifest {
    std::string out_dir;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> versions;
    std::vector<StageRecord> stages;

    const StageRecord* stage(const std::string& name) const;
    bool ok() const;
    std::vector<std::string> files() const;  // every file written, including the manifest
    void write() const;                      // manifest.json in out_dir
};

extern const std::vector<std::string> kStageOrder;

// Checks that every stage is known and its prerequisites are requested too.
// Throws UsageError listing the dependency graph otherwise.
void check_stage_dependencies(const RunConfig& config, const std::vector<std::string>& stages);

// Runs the requested stages in dependency order, one JSON file per stage.
// A stage whose invariants fail is recorded with ok = false and the run continues;
// exceptions from the modules propagate.
RunManifest run_pipeline(const RunConfig& config, const std::vector<std::string>& stages);

// CSV for plotting from a finished run: dispersion, profile, neumann-asymptotics or
// ebog-terms. The file is added to the manifest, which is rewritten.
std::string emit_plot_data(RunManifest& manifest, const std::string& which);

}  // namespace bogospec
