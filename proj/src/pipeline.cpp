#include "bogospec/pipeline.hpp"

#include "bogospec/bogo_diag.hpp"
#include "bogospec/ebog.hpp"
#include "bogospec/errors.hpp"
#include "bogospec/fock.hpp"
#include "bogospec/kernels.hpp"
#include "bogospec/operators.hpp"
#include "bogospec/validate.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace bogospec {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Recognized INI keys per section; anything else is a typo worth reporting.
const std::map<std::string, std::set<std::string>> kSchema = {
    {"potential", {"kind", "V0", "R", "file"}},
    {"trap", {"kind", "coefficient", "coefficients"}},
    {"scattering", {"r_max", "n_points", "spacing", "a0", "asymptotic_ellN"}},
    {"basis", {"kind", "r_max", "n", "half_width", "boundary", "l_max"}},
    {"kernels", {"N", "ell"}},
    {"spectrum", {"levels", "zeta"}},
    {"ebog", {"kappa", "quad_nodes", "delta"}},
    {"oracle", {"forms"}},
    {"run", {"out", "seed"}},
};

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream in(boost::trim_copy(text));
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) throw ValidationError("config: cannot parse " + key + " = '" + text + "'");
    return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    const std::string t = boost::trim_copy(text);
    if (t.empty() || t == "none") return out;
    std::vector<std::string> parts;
    boost::split(parts, t, boost::is_any_of(","));
    for (const auto& p : parts) out.push_back(parse_number<T>(key, p));
    return out;
}

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(static_cast<double>(v[i]));
    return out;
}

json to_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path.string());
    return json::parse(in);
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Keeps the first failed invariant of a stage.
struct Verdict {
    std::string failure;
    void require(bool holds, const std::string& what) {
        if (!holds && failure.empty()) failure = what;
    }
};

struct Context {
    const RunConfig& cfg;
    std::optional<ScatteringSolution> scat;
    std::optional<GPState> state;
    std::optional<OperatorBundle> bundle;
    std::optional<SpectrumResult> spec;

    const OperatorBundle& get_bundle() {
        if (!bundle) bundle = assemble_hgp(*state, cfg.trap, cfg.l_max);
        return *bundle;
    }
    const SpectrumResult& get_spec() {
        if (!spec) spec = assemble_E(get_bundle());
        return *spec;
    }
};

json stage_scatter(Context& ctx, Verdict& v) {
    const auto& cfg = ctx.cfg;
    ctx.scat = solve_zero_energy(cfg.potential, cfg.scatter_grid);
    const auto& s = *ctx.scat;
    json j;
    j["a0"] = s.a0;
    j["a0_tail"] = s.a0_tail;
    j["a0_integral"] = s.a0_integral;
    j["integral_Vf"] = s.integral_Vf;
    j["tail_residual"] = s.tail_residual;
    const double agree = s.a0 == 0.0 ? 0.0 : rel_diff(s.a0_tail, s.a0_integral);
    j["route_agreement"] = agree;
    v.require(agree <= 1e-6, "a0 from tail matching and from the integral of V f differ by more than 1e-6");

    if (!cfg.asymptotic_ellN.empty() && !cfg.potential.is_zero()) {
        RadialGrid g;
        g.r_max = *std::max_element(cfg.asymptotic_ellN.begin(), cfg.asymptotic_ellN.end());
        // only N l enters the scaled problem; N just has to keep l below 1
        const int N = std::max(10000, static_cast<int>(10.0 * g.r_max));
        g.n_points = 2048;
        g.spacing = RadialGrid::Spacing::LogUniform;
        std::vector<ScatteringSolution> sols;
        for (double B : cfg.asymptotic_ellN) sols.push_back(solve_neumann(cfg.potential, B / N, N, g));
        const auto rep = check_asymptotics(sols);
        json a;
        a["ellN"] = rep.ellN;
        a["lambda_scaled"] = rep.lambda_scaled;
        a["integral_Vf_residual"] = rep.integral_Vf_residual;
        a["c1"] = rep.c1;
        a["c2"] = rep.c2;
        a["residual_exponent"] = rep.residual_exponent;
        a["w_limit"] = rep.w_limit;
        a["w_limit_target"] = rep.w_limit_target;
        a["C_w"] = rep.C_w;
        a["f_bounds_ok"] = rep.f_bounds_ok;
        a["w_monotone_ok"] = rep.w_monotone_ok;
        j["asymptotics"] = a;
        v.require(rep.f_bounds_ok, "0 <= f_ell <= 1 violated");
        v.require(rep.w_monotone_ok, "w_ell not monotone on [R, N l]");
    }
    return j;
}

json stage_gp(Context& ctx, Verdict& v) {
    const auto& cfg = ctx.cfg;
    const double a0 = cfg.a0 ? *cfg.a0 : ctx.scat->a0;
    ctx.state = minimize_gp(cfg.trap, a0, cfg.basis);
    const auto& st = *ctx.state;
    const double identity = std::abs(st.eps_GP - st.E_GP - 4.0 * std::numbers::pi * a0 * st.norm4);
    json j;
    j["a0"] = a0;
    j["E_GP"] = st.E_GP;
    j["eps_GP"] = st.eps_GP;
    j["norm4"] = st.norm4;
    j["residual"] = st.residual;
    j["multiplier_identity"] = identity;
    j["iterations"] = st.iterations;
    j["max_energy_increase"] = st.max_energy_increase;
    j["min_phi"] = st.min_phi;
    j["boundary_value"] = st.boundary_value;
    j["expanded"] = st.expanded;
    j["profile"] = {{"r", to_json(st.basis.radii())}, {"phi", to_json(st.phi)}};
    v.require(st.residual <= 1e-8, "Euler-Lagrange residual above 1e-8");
    v.require(identity <= 1e-10 * std::max(1.0, std::abs(st.eps_GP)), "eps_GP != E_GP + 4 pi a0 |phi0|_4^4");
    v.require(st.max_energy_increase <= 1e-14, "energy increased on an accepted step");
    return j;
}

json stage_spectrum(Context& ctx, Verdict& v) {
    const auto& cfg = ctx.cfg;
    const auto& b = ctx.get_bundle();
    const auto& s = ctx.get_spec();
    const size_t n = std::min<size_t>(cfg.levels, s.eigenvalues.size());
    const std::vector<double> e(s.eigenvalues.begin(), s.eigenvalues.begin() + n);
    const std::vector<double> h(s.hgp_eigenvalues.begin(), s.hgp_eigenvalues.begin() + n);
    const std::vector<int> l(s.channel.begin(), s.channel.begin() + n);
    std::vector<double> below;
    for (double x : s.eigenvalues)
        if (x <= cfg.zeta) below.push_back(x);
    const auto levels = excitation_levels(below, cfg.zeta);
    json j;
    j["eigenvalues"] = e;
    j["hgp_eigenvalues"] = h;
    j["channel"] = l;
    j["phi0_residual"] = s.phi0_residual;
    j["hgp_phi_residual"] = b.hgp_phi_residual;
    j["positive"] = s.positive;
    j["dominates"] = s.dominates;
    j["levels"] = {{"zeta", cfg.zeta}, {"values", levels.levels}, {"multiplicities", levels.multiplicities}};
    v.require(s.positive, "E is not positive on range(Q)");
    v.require(b.a0 == 0.0 || s.dominates, "e_j does not dominate the H_GP levels");
    v.require(s.phi0_residual <= 1e-12, "E does not annihilate phi0");
    return j;
}

json stage_kernels(Context& ctx, Verdict& v) {
    const auto& cfg = ctx.cfg;
    const auto& b = ctx.get_bundle();
    const auto& spec = ctx.get_spec();
    json per_N = json::array();
    std::vector<double> Ns, dev;
    for (int N : cfg.N_list) {
        RadialGrid g;
        g.r_max = N * cfg.ell + 1.0;
        g.n_points = 512;
        const auto scat = solve_neumann(cfg.potential, cfg.ell, N, g);
        const auto k = build_kernels(*ctx.state, scat, N, cfg.l_max);
        const auto tf = assemble_tilde_forms(k, b);
        const auto cmp = compare_Etilde_E(tf, spec, N);
        const auto pr = tilde_properties(tf);
        json j;
        j["N"] = N;
        j["hs_eta"] = k.norms.hs_eta;
        j["hs_k"] = k.norms.hs_k;
        j["hs_mu"] = k.norms.hs_mu;
        j["hs_eta_over_sqrt_ell"] = k.norms.hs_eta / std::sqrt(cfg.ell);
        j["sup_eta_x"] = k.norms.sup_eta_x;
        j["pointwise_eta"] = k.norms.pointwise_eta;
        j["pointwise_mu"] = k.norms.pointwise_mu;
        j["symmetry_defect"] = k.symmetry_defect;
        j["orthogonality_defect"] = k.orthogonality_defect;
        j["hyperbolic_defect"] = k.hyperbolic_defect;
        j["d_identity_residual"] = tf.d_identity_residual;
        j["sum_identity_residual"] = tf.sum_identity_residual;
        j["gamma_hs"] = tf.gamma_hs;
        j["e_tilde"] = cmp.e_tilde;
        j["e"] = cmp.e;
        j["max_deviation"] = cmp.max_deviation;
        j["properties"] = {{"min_E_tilde", pr.min_E_tilde}, {"min_D", pr.min_D},   {"c", pr.c},
                           {"C", pr.C},                     {"A_minus_I", pr.A_minus_I}, {"B_minus_I", pr.B_minus_I},
                           {"beta", pr.beta},               {"alpha_weighted", pr.alpha_weighted},
                           {"all_pass", pr.all_pass()}};
        per_N.push_back(j);
        Ns.push_back(N);
        dev.push_back(cmp.max_deviation);
        v.require(tf.d_identity_residual <= 1e-8, "D~ = e^{-eta} H e^{-eta} fails at 1e-8");
        v.require(k.symmetry_defect <= 1e-12, "kernel symmetry fails at 1e-12");
        v.require(pr.all_pass(), "tilde form property suite fails");
    }
    json j;
    j["ell"] = cfg.ell;
    j["runs"] = per_N;
    if (Ns.size() >= 2 && std::all_of(dev.begin(), dev.end(), [](double d) { return d > 0.0; }))
        j["deviation_exponent"] = power_law_exponent(Ns, dev);
    return j;
}

json stage_ebog(Context& ctx, Verdict& v) {
    const auto& cfg = ctx.cfg;
    const auto& b = ctx.get_bundle();
    QuadratureSpec q;
    q.nodes = cfg.quad_nodes;
    const auto r = ebog_kappa(b, cfg.kappa, q);
    const auto r15 = ebog_kappa(b, 1.5 * cfg.kappa, q);
    const auto m = ebog_mollified(b, cfg.delta);
    json terms;
    for (const auto& [name, value] : r.terms) terms[name] = value;
    const double kdiff = r.total == 0.0 ? std::abs(r15.total) : rel_diff(r15.total, r.total);
    const double route = r.total == 0.0 ? std::abs(m.extrapolated) : rel_diff(m.extrapolated, r.total);
    json j;
    j["kappa"] = r.kappa;
    j["terms"] = terms;
    j["total"] = r.total;
    j["quadrature"] = {{"nodes", r.nodes},
                       {"tail_estimate", r.tail_estimate},
                       {"direct_nodes", r.direct_nodes},
                       {"condition", r.condition}};
    j["direct"] = r.direct;
    j["closure_residual"] = r.closure_residual;
    j["kappa_check"] = {{"kappa", r15.kappa}, {"total", r15.total}, {"relative_difference", kdiff}};
    j["mollified"] = {{"delta", m.delta},
                      {"values", m.values},
                      {"orders", m.orders},
                      {"extrapolated", m.extrapolated},
                      {"observed_order", m.observed_order},
                      {"monotone", m.monotone},
                      {"warning", m.warning},
                      {"relative_difference", route}};
    json en = json::array();
    for (int N : cfg.N_list) {
        const auto e = ground_energy(N, *ctx.state, r.total);
        en.push_back({{"N", N},
                      {"condensate", e.condensate},
                      {"quartic", e.quartic},
                      {"bogoliubov", e.bogoliubov},
                      {"total", e.total}});
    }
    j["E_N"] = en;
    v.require(kdiff <= 1e-3, "kappa-route totals at kappa and 1.5 kappa differ by more than 1e-3");
    v.require(route <= 1e-3, "mollified extrapolation and kappa route differ by more than 1e-3");
    v.require(r.term("T1") >= 0.0 && r.term("T3") >= 0.0, "T1 or T3 negative");
    return j;
}

json stage_oracle(Context& ctx, Verdict& v) {
    std::mt19937_64 rng(ctx.cfg.seed);
    json forms = json::array();
    double worst = 0.0;
    for (int i = 0; i < ctx.cfg.oracle_forms; ++i) {
        const int modes = 1 + i % 3;
        const auto f = random_admissible_form(modes, rng);
        const auto cert = certified_spectrum(f, 6);
        const auto d = diagonalize_quadratic(f);
        const auto rep = compare_spectrum(cert.values, d, 6);
        forms.push_back({{"modes", modes},
                         {"N_max", cert.N_max},
                         {"ground_shift", d.ground_shift},
                         {"oracle_ground", cert.values.front()},
                         {"ground_residual", rep.ground_residual},
                         {"gap_distance", rep.gap_distance}});
        worst = std::max({worst, rep.ground_residual, rep.gap_distance});
    }
    json j;
    j["seed"] = ctx.cfg.seed;
    j["forms"] = forms;
    j["max_residual"] = worst;
    v.require(worst <= 1e-5, "Fock oracle and diagonalizer differ by more than 1e-5");
    return j;
}

const std::map<std::string, std::vector<std::string>> kDependencies = {
    {"scatter", {}},          {"gp", {"scatter"}},  {"spectrum", {"gp"}}, {"kernels", {"gp", "scatter"}},
    {"ebog", {"spectrum"}}, {"oracle", {}},       {"validate", {}},
};

std::string dependency_graph() {
    std::ostringstream s;
    s << "stage dependencies:\n";
    for (const auto& name : kStageOrder) {
        const auto& deps = kDependencies.at(name);
        s << "  " << name << " <- " << (deps.empty() ? "(none)" : boost::join(deps, ", "));
        if (name == "gp") s << " (scatter not needed when [scattering] a0 is set)";
        s << "\n";
    }
    return s.str();
}

}  // namespace

const std::vector<std::string> kStageOrder = {"scatter", "gp", "spectrum", "kernels", "ebog", "oracle", "validate"};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256 digest failed");
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return s.str();
}

RunConfig RunConfig::load(const std::string& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto it = kSchema.find(section);
        if (it == kSchema.end()) throw ValidationError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ValidationError("config: unknown key " + key + " in [" + section + "]");
    }
    auto get = [&](const std::string& key) { return tree.get_optional<std::string>(key); };
    RunConfig c;

    const std::string pkind = get("potential.kind").value_or("square_barrier");
    if (pkind == "square_barrier") {
        c.potential = RadialPotential::square_barrier(parse_number<double>("V0", get("potential.V0").value_or("4")),
                                                      parse_number<double>("R", get("potential.R").value_or("1")));
    } else if (pkind == "zero") {
        c.potential = RadialPotential::zero();
    } else if (pkind == "tabulated") {
        const auto file = get("potential.file");
        if (!file) throw ValidationError("config: tabulated potential needs potential.file");
        fs::path p = *file;
        if (p.is_relative()) p = fs::path(path).parent_path() / p;
        if (!fs::exists(p)) throw ValidationError("config: potential file " + p.string() + " does not exist");
        c.potential_file = p.string();
        c.potential = RadialPotential::load(c.potential_file);
    } else {
        throw ValidationError("config: unknown potential kind " + pkind);
    }

    const std::string tkind = get("trap.kind").value_or("harmonic");
    if (tkind == "harmonic")
        c.trap = TrapPotential::harmonic(parse_number<double>("coefficient", get("trap.coefficient").value_or("1")));
    else if (tkind == "none")
        c.trap = TrapPotential::none();
    else if (tkind == "polynomial")
        c.trap = TrapPotential::polynomial(parse_list<double>("coefficients", get("trap.coefficients").value_or("")));
    else
        throw ValidationError("config: unknown trap kind " + tkind);

    if (auto s = get("scattering.r_max")) c.scatter_grid.r_max = parse_number<double>("r_max", *s);
    if (auto s = get("scattering.n_points")) c.scatter_grid.n_points = parse_number<int>("n_points", *s);
    if (auto s = get("scattering.spacing")) {
        if (*s == "uniform")
            c.scatter_grid.spacing = RadialGrid::Spacing::Uniform;
        else if (*s == "log")
            c.scatter_grid.spacing = RadialGrid::Spacing::LogUniform;
        else
            throw ValidationError("config: scattering.spacing must be uniform or log");
    }
    if (auto s = get("scattering.a0")) c.a0 = parse_number<double>("a0", *s);
    if (auto s = get("scattering.asymptotic_ellN")) c.asymptotic_ellN = parse_list<double>("asymptotic_ellN", *s);

    const std::string bkind = get("basis.kind").value_or("radial");
    if (bkind == "radial") {
        c.basis = Basis::make_radial(parse_number<double>("r_max", get("basis.r_max").value_or("7")),
                                     parse_number<int>("n", get("basis.n").value_or("279")));
    } else if (bkind == "cartesian") {
        const std::string bnd = get("basis.boundary").value_or("dirichlet");
        if (bnd != "dirichlet" && bnd != "periodic") throw ValidationError("config: basis.boundary must be dirichlet or periodic");
        c.basis = Basis::make_cartesian(parse_number<int>("n", get("basis.n").value_or("12")),
                                        parse_number<double>("half_width", get("basis.half_width").value_or("4")),
                                        bnd == "periodic" ? CartesianBasis::Boundary::Periodic
                                                          : CartesianBasis::Boundary::Dirichlet);
    } else {
        throw ValidationError("config: unknown basis kind " + bkind);
    }
    if (auto s = get("basis.l_max")) c.l_max = parse_number<int>("l_max", *s);

    if (auto s = get("kernels.N")) c.N_list = parse_list<int>("N", *s);
    if (auto s = get("kernels.ell")) c.ell = parse_number<double>("ell", *s);
    if (auto s = get("spectrum.levels")) c.levels = parse_number<int>("levels", *s);
    if (auto s = get("spectrum.zeta")) c.zeta = parse_number<double>("zeta", *s);
    if (auto s = get("ebog.kappa")) c.kappa = parse_number<double>("kappa", *s);
    if (auto s = get("ebog.quad_nodes")) c.quad_nodes = parse_number<int>("quad_nodes", *s);
    if (auto s = get("ebog.delta")) c.delta = parse_list<double>("delta", *s);
    if (auto s = get("oracle.forms")) c.oracle_forms = parse_number<int>("forms", *s);
    if (auto s = get("run.out")) c.out_dir = *s;
    if (auto s = get("run.seed")) c.seed = parse_number<std::uint64_t>("seed", *s);
    c.validate();
    return c;
}

void RunConfig::validate() const {
    potential.validate();
    scatter_grid.validate();
    trap.validate();
    if (!potential_file.empty() && !fs::exists(potential_file))
        throw ValidationError("config: potential file " + potential_file + " does not exist");
    if (a0 && !(*a0 >= 0.0)) throw ValidationError("config: a0 must be non-negative");
    if (!asymptotic_ellN.empty() && asymptotic_ellN.size() < 4)
        throw ValidationError("config: asymptotic_ellN needs at least four values for the fit, or none");
    if (!asymptotic_ellN.empty() &&
        *std::max_element(asymptotic_ellN.begin(), asymptotic_ellN.end()) <
            30.0 * *std::min_element(asymptotic_ellN.begin(), asymptotic_ellN.end()))
        throw ValidationError("config: asymptotic_ellN must span at least a factor of 30");
    for (double B : asymptotic_ellN)
        if (!(B > potential.support())) throw ValidationError("config: asymptotic_ellN values must exceed the support");
    if (l_max < 0) throw ValidationError("config: l_max must be non-negative");
    if (N_list.empty()) throw ValidationError("config: kernels.N must list at least one N");
    for (int N : N_list)
        if (N <= 0) throw ValidationError("config: N must be positive");
    if (!(ell > 0.0)) throw ValidationError("config: ell must be positive");
    if (levels < 1) throw ValidationError("config: spectrum.levels must be at least 1");
    if (!(zeta > 0.0)) throw ValidationError("config: zeta must be positive");
    if (!(kappa > 0.0)) throw ValidationError("config: kappa must be positive");
    QuadratureSpec q;
    q.nodes = quad_nodes;
    q.validate();
    if (delta.empty()) throw ValidationError("config: ebog.delta must list at least one value");
    for (size_t i = 0; i < delta.size(); ++i)
        if (!(delta[i] > 0.0) || (i > 0 && !(delta[i] < delta[i - 1])))
            throw ValidationError("config: ebog.delta must be positive and decreasing");
    if (oracle_forms < 0) throw ValidationError("config: oracle.forms must be non-negative");
    if (out_dir.empty()) throw ValidationError("config: run.out must not be empty");
}

std::string RunConfig::canonical() const {
    std::ostringstream s;
    switch (potential.kind) {
        case RadialPotential::Kind::SquareBarrier:
            s << "potential=square_barrier V0=" << fmt(potential.V0) << " R=" << fmt(potential.R) << "\n";
            break;
        case RadialPotential::Kind::Zero: s << "potential=zero\n"; break;
        case RadialPotential::Kind::Tabulated:
            s << "potential=tabulated r=" << fmt_list(potential.table_r) << " v=" << fmt_list(potential.table_v) << "\n";
            break;
    }
    s << "trap=" << static_cast<int>(trap.kind) << " c=" << fmt(trap.coefficient) << " poly=" << fmt_list(trap.poly)
      << "\n";
    s << "a0=" << (a0 ? fmt(*a0) : "computed") << "\n";
    s << "scatter_grid=" << fmt(scatter_grid.r_max) << "," << scatter_grid.n_points << ","
      << static_cast<int>(scatter_grid.spacing) << "\n";
    s << "asymptotic_ellN=" << fmt_list(asymptotic_ellN) << "\n";
    if (basis.kind == Basis::Kind::Radial)
        s << "basis=radial r_max=" << fmt(basis.radial.r_max) << " n=" << basis.radial.n << "\n";
    else
        s << "basis=cartesian n=" << basis.cartesian.n << " half_width=" << fmt(basis.cartesian.half_width)
          << " boundary=" << static_cast<int>(basis.cartesian.boundary) << "\n";
    s << "l_max=" << l_max << "\nN=" << fmt_list(N_list) << "\nell=" << fmt(ell) << "\n";
    s << "levels=" << levels << "\nzeta=" << fmt(zeta) << "\n";
    s << "kappa=" << fmt(kappa) << "\nquad_nodes=" << quad_nodes << "\ndelta=" << fmt_list(delta) << "\n";
    s << "oracle_forms=" << oracle_forms << "\nseed=" << seed << "\n";
    return s.str();
}

const StageRecord* RunManifest::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return &s;
    return nullptr;
}

bool RunManifest::ok() const {
    return std::all_of(stages.begin(), stages.end(), [](const StageRecord& s) { return s.ok; });
}

std::vector<std::string> RunManifest::files() const {
    std::vector<std::string> out;
    for (const auto& s : stages) out.insert(out.end(), s.files.begin(), s.files.end());
    out.push_back("manifest.json");
    return out;
}

void RunManifest::write() const {
    json j;
    j["config_hash"] = config_hash;
    json v;
    for (const auto& [k, val] : versions) v[k] = val;
    j["versions"] = v;
    json st = json::array();
    for (const auto& s : stages)
        st.push_back({{"name", s.name}, {"seconds", s.seconds}, {"files", s.files}, {"ok", s.ok}, {"failure", s.failure}});
    j["stages"] = st;
    j["files"] = files();
    j["ok"] = ok();
    write_json(fs::path(out_dir) / "manifest.json", j);
}

void check_stage_dependencies(const RunConfig& config, const std::vector<std::string>& stages) {
    const std::set<std::string> req(stages.begin(), stages.end());
    if (req.empty()) throw UsageError("no stages requested\n" + dependency_graph());
    for (const auto& s : req) {
        if (!kDependencies.count(s)) throw UsageError("unknown stage '" + s + "'\n" + dependency_graph());
        for (const auto& d : kDependencies.at(s)) {
            if (d == "scatter" && s == "gp" && config.a0) continue;
            if (!req.count(d))
                throw UsageError("stage '" + s + "' requires stage '" + d + "'\n" + dependency_graph());
        }
    }
}

RunManifest run_pipeline(const RunConfig& config, const std::vector<std::string>& stages) {
    check_stage_dependencies(config, stages);
    config.validate();
    const std::set<std::string> req(stages.begin(), stages.end());
    fs::create_directories(config.out_dir);

    RunManifest man;
    man.out_dir = config.out_dir;
    man.config_hash = sha256_hex(config.canonical());
    man.versions = {{"bogospec", kVersion},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"boost", BOOST_LIB_VERSION},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};

    Context ctx{config, {}, {}, {}, {}};
    for (const auto& name : kStageOrder) {
        if (!req.count(name)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        StageRecord rec;
        rec.name = name;
        Verdict v;
        if (name == "validate") {
            const auto rep = run_suite(default_fixtures());
            write_json(fs::path(config.out_dir) / "validate.json", json::parse(rep.json()));
            std::ofstream(fs::path(config.out_dir) / "validate.txt") << rep.table();
            rec.files = {"validate.json", "validate.txt"};
            v.require(rep.ok(), std::to_string(rep.failed()) + " validation checks failed");
        } else {
            json out;
            if (name == "scatter") out = stage_scatter(ctx, v);
            if (name == "gp") out = stage_gp(ctx, v);
            if (name == "spectrum") out = stage_spectrum(ctx, v);
            if (name == "kernels") out = stage_kernels(ctx, v);
            if (name == "ebog") out = stage_ebog(ctx, v);
            if (name == "oracle") out = stage_oracle(ctx, v);
            out["ok"] = v.failure.empty();
            out["failure"] = v.failure;
            write_json(fs::path(config.out_dir) / (name + ".json"), out);
            rec.files = {name + ".json"};
        }
        rec.ok = v.failure.empty();
        rec.failure = v.failure;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        man.stages.push_back(rec);
    }
    man.write();
    return man;
}

std::string emit_plot_data(RunManifest& manifest, const std::string& which) {
    static const std::map<std::string, std::pair<std::string, std::string>> kinds = {
        {"dispersion", {"spectrum", "dispersion.csv"}},
        {"profile", {"gp", "profile.csv"}},
        {"neumann-asymptotics", {"scatter", "neumann_asymptotics.csv"}},
        {"ebog-terms", {"ebog", "ebog_terms.csv"}},
    };
    const auto it = kinds.find(which);
    if (it == kinds.end())
        throw UsageError("unknown plot kind '" + which + "' (dispersion, profile, neumann-asymptotics, ebog-terms)");
    const auto& [stage, file] = it->second;
    if (!manifest.stage(stage)) throw UsageError("plot '" + which + "' needs the " + stage + " stage output");
    const fs::path dir(manifest.out_dir);
    const json j = read_json(dir / (stage + ".json"));

    std::ostringstream csv;
    csv << std::setprecision(17);
    if (which == "dispersion") {
        csv << "index,e_j\n";
        const auto& e = j.at("eigenvalues");
        for (size_t i = 0; i < e.size(); ++i) csv << i + 1 << "," << e[i].get<double>() << "\n";
    } else if (which == "profile") {
        csv << "r,phi0\n";
        const auto& r = j.at("profile").at("r");
        const auto& p = j.at("profile").at("phi");
        for (size_t i = 0; i < r.size(); ++i) csv << r[i].get<double>() << "," << p[i].get<double>() << "\n";
    } else if (which == "neumann-asymptotics") {
        if (!j.contains("asymptotics")) throw UsageError("scatter stage ran without asymptotic_ellN");
        csv << "ellN,lambda_scaled\n";
        const auto& a = j.at("asymptotics");
        for (size_t i = 0; i < a.at("ellN").size(); ++i)
            csv << a["ellN"][i].get<double>() << "," << a["lambda_scaled"][i].get<double>() << "\n";
    } else {
        csv << "term,value\n";
        for (const auto& [name, value] : j.at("terms").items()) csv << name << "," << value.get<double>() << "\n";
    }
    std::ofstream(dir / file) << csv.str();

    for (auto& s : manifest.stages)
        if (s.name == stage && std::find(s.files.begin(), s.files.end(), file) == s.files.end()) s.files.push_back(file);
    manifest.write();
    return (dir / file).string();
}

}  // namespace bogospec
