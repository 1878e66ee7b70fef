#include "bogospec/validate.hpp"

#include "bogospec/bogo_diag.hpp"
#include "bogospec/ebog.hpp"
#include "bogospec/errors.hpp"
#include "bogospec/fock.hpp"
#include "bogospec/kernels.hpp"
#include "bogospec/operators.hpp"
#include "bogospec/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace bogospec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr auto A = Provenance::Analytic;
constexpr auto O = Provenance::Oracle;
constexpr auto S = Provenance::SelfConvergence;
constexpr auto P = Provenance::Asymptotic;
constexpr auto Abs = Relation::Absolute;
constexpr auto Rel = Relation::Relative;
constexpr auto AtMost = Relation::AtMost;
constexpr auto AtLeast = Relation::AtLeast;

const char* to_string(Relation r) {
    switch (r) {
        case Relation::Absolute: return "abs";
        case Relation::Relative: return "rel";
        case Relation::AtMost: return "<=";
        case Relation::AtLeast: return ">=";
    }
    return "?";
}

double barrier_a0(double V0, double R) {
    const double k = std::sqrt(V0 / 2.0);
    return R - std::tanh(k * R) / k;
}

const double kDeskA0 = barrier_a0(4.0, 1.0);

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Desk condensates are shared between fixtures running on different threads.
const GPState& desk_state(int n, double a0 = kDeskA0) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, GPState> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, a0});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(n, a0), minimize_gp(TrapPotential::harmonic(), a0, Basis::make_radial(7.0, n)))
                 .first;
    return it->second;
}

ScatteringSolution desk_neumann(double ell, int N, const RadialPotential& pot = RadialPotential::square_barrier(4.0, 1.0)) {
    RadialGrid g;
    g.r_max = N * ell + 1.0;
    g.n_points = 512;
    return solve_neumann(pot, ell, N, g);
}

ScatteringSolution neumann_large(double ellN) {
    RadialGrid g;
    g.r_max = ellN;
    g.n_points = 2048;
    g.spacing = RadialGrid::Spacing::LogUniform;
    const int N = std::max(10000, static_cast<int>(10.0 * ellN));
    return solve_neumann(RadialPotential::square_barrier(4.0, 1.0), ellN / N, N, g);
}

std::vector<double> lattice_dispersion(int n, double a0) {
    std::vector<double> expect;
    for (int i = -n / 2 + 1; i <= n / 2; ++i)
        for (int j = -n / 2 + 1; j <= n / 2; ++j)
            for (int k = -n / 2 + 1; k <= n / 2; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                const double p2 = 4.0 * kPi * kPi * (i * i + j * j + k * k);
                expect.push_back(std::sqrt(p2 * p2 + 16.0 * kPi * a0 * p2));
            }
    std::sort(expect.begin(), expect.end());
    return expect;
}

// Worst relative error of the first `count` periodic-box levels against the lattice dispersion.
double dispersion_error(int count) {
    const double a0 = 0.5;
    const int n = 8;
    const auto st = minimize_gp(TrapPotential::none(), a0, Basis::make_cartesian(n, 0.5, CartesianBasis::Boundary::Periodic));
    const auto s = assemble_E(assemble_hgp(st, TrapPotential::none()));
    const auto expect = lattice_dispersion(n, a0);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) worst = std::max(worst, std::abs(s.eigenvalues[i] - expect[i]) / expect[i]);
    return worst;
}

QuadraticForm random_form(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat a(n, n), g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = u(rng);
            g(i, j) = u(rng);
        }
    return {a * a.transpose() + 3.0 * Mat::Identity(n, n), 0.4 * (g + g.transpose())};
}

QuadraticForm single_mode(double eps, double gam) {
    return {Mat::Constant(1, 1, eps), Mat::Constant(1, 1, gam)};
}

struct SeededFockResult {
    double ground = 0.0, gaps = 0.0;
};

SeededFockResult seeded_fock(int forms, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SeededFockResult r;
    for (int i = 0; i < forms; ++i) {
        const auto f = random_admissible_form(1 + i % 3, rng);
        const auto rep = compare_spectrum(certified_spectrum(f, 6).values, diagonalize_quadratic(f), 6);
        r.ground = std::max(r.ground, rep.ground_residual);
        r.gaps = std::max(r.gaps, rep.gap_distance);
    }
    return r;
}

// ---- invariant fixtures ----

std::vector<Check> fx_square_barrier() {
    RadialGrid g;
    g.r_max = 20.0;
    g.n_points = 2048;
    const auto pot = RadialPotential::square_barrier(4.0, 1.0);
    const auto s = solve_zero_energy(pot, g);
    g.n_points = 4096;
    const auto fine = solve_zero_energy(pot, g);
    return {
        make_check("a0 against analytic matching", s.a0, kDeskA0, 1e-6, Rel, A),
        make_check("tail route against integral route", s.a0_tail, s.a0_integral, 1e-6, Rel, O),
        make_check("a0 change on doubling the grid", std::abs(fine.a0 - s.a0) / s.a0, 0.0, 1e-7, AtMost, S),
        make_check("tail residual at r_max", s.tail_residual, 0.0, 1e-8, AtMost, A),
    };
}

std::vector<Check> fx_neumann_profile() {
    const auto s = neumann_large(1e4);
    const auto& nb = *s.neumann;
    bool bounds = true, monotone = true;
    double prev = 2.0;
    for (size_t i = 0; i < s.r.size(); ++i) {
        if (nb.f[i] < 0.0 || nb.f[i] > 1.0) bounds = false;
        if (s.r[i] >= 1.0 && s.r[i] <= nb.ellN) {
            if (nb.w[i] > prev + 1e-14) monotone = false;
            prev = nb.w[i];
        }
    }
    return {
        make_check("lambda_ell > 0", nb.lambda, 0.0, 0.0, AtLeast, A),
        make_flag("0 <= f_ell <= 1", bounds, A),
        make_flag("w_ell nonincreasing on [R, N l]", monotone, A),
        make_check("lambda (N l)^3 / 3 a0 at N l = 1e4", nb.lambda * std::pow(nb.ellN, 3) / (3.0 * s.a0), 1.0, 1e-2, Rel, P),
    };
}

std::vector<Check> fx_gp_free() {
    const auto& st = desk_state(139, 0.0);
    return {
        make_check("E_GP of the free oscillator", st.E_GP, 3.0, 1e-6, Abs, A),
        make_check("eps_GP of the free oscillator", st.eps_GP, 3.0, 1e-6, Abs, A),
    };
}

std::vector<Check> fx_gp_desk() {
    std::vector<Check> out;
    double prev = 0.0;
    bool monotone = true;
    for (double a0 : {0.1, kDeskA0, 1.0}) {
        const auto& st = desk_state(139, a0);
        const double id = std::abs(st.eps_GP - st.E_GP - 4.0 * kPi * a0 * st.norm4);
        std::ostringstream tag;
        tag << " (a0 = " << std::setprecision(5) << a0 << ")";
        out.push_back(make_check("Euler-Lagrange residual" + tag.str(), st.residual, 0.0, 1e-8, AtMost, S));
        out.push_back(make_check("multiplier identity" + tag.str(), id, 0.0, 1e-10, AtMost, A));
        out.push_back(make_check("energy increase on accepted steps" + tag.str(), st.max_energy_increase, 0.0, 1e-14,
                                 AtMost, A));
        if (st.eps_GP < prev) monotone = false;
        prev = st.eps_GP;
    }
    out.push_back(make_flag("eps_GP nondecreasing in a0", monotone, A));
    SolverOptions o1, o2;
    o1.seed = 11;
    o2.seed = 12345;
    const auto a = minimize_gp(TrapPotential::harmonic(), kDeskA0, Basis::make_radial(7.0, 139), o1);
    const auto b = minimize_gp(TrapPotential::harmonic(), kDeskA0, Basis::make_radial(7.0, 139), o2);
    out.push_back(make_check("random starts agree in L2", (a.v - b.v).norm(), 0.0, 1e-6, AtMost, A));
    for (double tol : {1e-8, 1e-10}) {
        SolverOptions o;
        o.tol = tol;
        const auto st = minimize_gp(TrapPotential::harmonic(), kDeskA0, Basis::make_radial(7.0, 139), o);
        std::ostringstream name;
        name << "residual tracks solver tolerance " << tol;
        out.push_back(make_check(name.str(), st.residual, 0.0, tol, AtMost, S));
    }
    return out;
}

std::vector<Check> fx_spectrum_desk() {
    const auto b = assemble_hgp(desk_state(159), TrapPotential::harmonic(), 4);
    const auto s = assemble_E(b);
    const auto fine = assemble_E(assemble_hgp(desk_state(239), TrapPotential::harmonic(), 4));
    double refine = 0.0, margin = 1e300;
    for (int i = 0; i < 10; ++i) {
        refine = std::max(refine, std::abs(fine.eigenvalues[i] - s.eigenvalues[i]) / s.eigenvalues[i]);
        margin = std::min(margin, s.eigenvalues[i] - s.hgp_eigenvalues[i]);
    }
    std::vector<double> low(s.eigenvalues.begin(), s.eigenvalues.begin() + 6);
    const double zeta = 3.0 * low.front();
    const auto lv = excitation_levels(low, zeta);
    bool closed = true;
    for (double u : lv.levels)
        for (double v : lv.levels) {
            if (u + v > zeta - 1e-9) continue;
            if (!std::any_of(lv.levels.begin(), lv.levels.end(), [&](double c) { return std::abs(c - u - v) < 1e-8; }))
                closed = false;
        }
    return {
        make_check("|M phi0| / |M| before restriction", s.phi0_residual, 0.0, 1e-12, AtMost, A),
        make_check("first ten levels move under 1.5x refinement", refine, 0.0, 1e-4, AtMost, S),
        make_check("min_j (e_j - h_j) over ten levels", margin, 0.0, 0.0, AtLeast, A),
        make_flag("E positive on range(Q)", s.positive, A),
        make_flag("levels closed under addition below zeta", closed, A),
    };
}

std::vector<Check> fx_periodic_dispersion() {
    return {make_check("first 20 levels against sqrt(p^4 + 16 pi a0 p^2)", dispersion_error(20), 0.0, 1e-6, AtMost, A)};
}

std::vector<Check> fx_kernels_desk() {
    const auto& st = desk_state(159);
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 4);
    const auto scat = desk_neumann(0.2, 25);
    const auto k = build_kernels(st, scat, 25, 4);
    const auto tf = assemble_tilde_forms(k, bundle);
    double tilde_sym = 0.0;
    for (const auto& t : tf.channels) {
        const double scale = t.Phi.cwiseAbs().maxCoeff();
        tilde_sym = std::max({tilde_sym, symmetry_defect(t.Phi) / scale, symmetry_defect(t.Gamma) / scale});
    }
    const auto pr = tilde_properties(tf);
    const auto fine = kernel_norms(desk_state(279), scat);
    return {
        make_check("symmetry of k, eta, mu, sigma, gamma, K_N", k.symmetry_defect, 0.0, 1e-12, AtMost, A),
        make_check("symmetry of Phi~ and Gamma~ (relative)", tilde_sym, 0.0, 1e-12, AtMost, A),
        make_check("Q eta = eta and Q K_N Q = K_N", k.orthogonality_defect, 0.0, 1e-12, AtMost, A),
        make_check("sup |mu| / (phi0 phi0) under refinement", fine.pointwise_mu, k.norms.pointwise_mu, 1e-3, Rel, S),
        make_check("min eig D~ (N = 25, l = 0.2)", pr.min_D, 0.0, 0.0, AtLeast, A),
        make_check("min eig E~ (so D~ + 2 Gamma~ > 0)", pr.min_E_tilde, 0.0, 0.0, AtLeast, A),
    };
}

std::vector<Check> fx_bogo_random() {
    std::mt19937_64 rng(17);
    double square = 0.0, sympl = 0.0, scale = 0.0, shift = -1e300;
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_form(2 + trial % 5, rng);
        const auto d = diagonalize_quadratic(f);
        square = std::max(square, d.square_defect);
        sympl = std::max(sympl, d.symplectic_defect);
        const auto g = diagonalize_quadratic({2.5 * f.Phi, 2.5 * f.Gamma});
        scale = std::max({scale, (g.E_tilde - 2.5 * d.E_tilde).norm() / d.E_tilde.norm(),
                          std::abs(g.ground_shift - 2.5 * d.ground_shift) / std::abs(d.ground_shift)});
    }
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_form(3, rng);
        const double top = sym_eig(f.Phi).values.maxCoeff();
        f.Gamma = 0.3 * f.Phi - 0.05 * f.Phi * f.Phi / top;
        shift = std::max(shift, diagonalize_quadratic(f).ground_shift);
    }
    return {
        make_check("E~^2 against D^{1/2}(D+2G)D^{1/2}", square, 0.0, 1e-10, AtMost, A),
        make_check("A^T B - I", sympl, 0.0, 1e-10, AtMost, A),
        make_check("ground shift on commuting pairs", shift, 0.0, 0.0, AtMost, A),
        make_check("scale covariance at t = 2.5", scale, 0.0, 1e-11, AtMost, A),
    };
}

std::vector<Check> fx_fock_2mode() {
    std::mt19937_64 rng(21);
    const auto f = random_admissible_form(2, rng);
    const auto rep = compare_spectrum(certified_spectrum(f, 6).values, diagonalize_quadratic(f), 6);
    double prev = 1e300;
    bool monotone = true;
    for (int N : {6, 10, 14, 18, 22}) {
        const double e = oracle_spectrum(build_fock_hamiltonian(f, N), 1)[0];
        if (e > prev + 1e-12) monotone = false;
        prev = e;
    }
    const auto h = build_fock_hamiltonian(f, 16);
    const Eigen::SelfAdjointEigenSolver<Mat> es{Mat(h.H)};
    double mixing = 0.0;
    for (int k = 0; k < 6; ++k) {
        double even = 0.0, odd = 0.0;
        for (Eigen::Index i = 0; i < h.basis.dim(); ++i) {
            const auto& s = h.basis.states[i];
            const double w2 = es.eigenvectors()(i, k) * es.eigenvectors()(i, k);
            ((s[0] + s[1]) % 2 == 0 ? even : odd) += w2;
        }
        mixing = std::max(mixing, std::min(even, odd));
    }
    return {
        make_check("oracle ground against ground shift", rep.ground_residual, 0.0, 1e-5, AtMost, O),
        make_check("oracle gaps against sums of e~_j", rep.gap_distance, 0.0, 1e-5, AtMost, O),
        make_flag("truncated ground energy nonincreasing in N_max", monotone, A),
        make_check("parity mixing of the first six eigenvectors", mixing, 0.0, 1e-12, AtMost, A),
    };
}

std::vector<Check> fx_ebog_desk() {
    const auto b = assemble_hgp(desk_state(279), TrapPotential::harmonic(), 4);
    const auto r = ebog_kappa(b, 5.0);
    const auto r15 = ebog_kappa(b, 7.5);
    const auto m = ebog_mollified(b, {0.4, 0.2, 0.1, 0.05});
    bool finite = std::isfinite(r.total);
    for (const auto& [name, v] : r.terms) finite = finite && std::isfinite(v);
    return {
        make_flag("every term finite", finite, A),
        make_check("T1", r.term("T1"), 0.0, 0.0, AtLeast, A),
        make_check("T3", r.term("T3"), 0.0, 0.0, AtLeast, A),
        make_check("T2 + T3 (commutator equals minus gradient term)", r.term("T2") + r.term("T3"), 0.0,
                   1e-12 * r.term("T3"), Abs, A),
        make_check("total at 1.5 kappa", r15.total, r.total, 1e-3, Rel, S),
        make_check("mollified extrapolation", m.extrapolated, r.total, 1e-3, Rel, O),
        make_check("s-integral tail estimate / integral", r.tail_estimate / std::abs(r.term("Tcomm") + r.term("Tcubic")),
                   0.0, 1e-8, AtMost, S),
    };
}

std::vector<Check> fx_free_case() {
    const auto st = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(7.0, 119));
    const auto b = assemble_hgp(st, TrapPotential::harmonic(), 2);
    const auto s = assemble_E(b);
    double spread = 0.0;
    for (size_t i = 0; i < 20; ++i)
        spread = std::max(spread, std::abs(s.eigenvalues[i] - s.hgp_eigenvalues[i]) / s.hgp_eigenvalues[i]);
    const auto k = build_kernels(st, desk_neumann(0.2, 50, RadialPotential::zero()), 50, 2);
    const auto r = ebog_kappa(b, 5.0);
    const auto m = ebog_mollified(b, {0.8, 0.4, 0.2});
    return {
        make_check("E against H_GP on range(Q)", spread, 0.0, 1e-10, AtMost, A),
        make_check("|eta|_HS", k.norms.hs_eta, 0.0, 0.0, Abs, A),
        make_check("E_Bog kappa route", r.total, 0.0, 0.0, Abs, A),
        make_check("E_Bog mollified route", m.extrapolated, 0.0, 0.0, Abs, A),
        make_check("N E_GP at N = 100", ground_energy(100, st, r.total).condensate, 300.0, 1e-4, Abs, A),
    };
}

std::vector<Check> fx_pipeline_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("bogospec-determinism-" + std::to_string(::getpid()));
    RunConfig cfg;
    cfg.asymptotic_ellN.clear();
    cfg.basis = Basis::make_radial(7.0, 119);
    cfg.oracle_forms = 3;
    std::vector<RunManifest> runs;
    for (const char* sub : {"a", "b"}) {
        cfg.out_dir = (root / sub).string();
        runs.push_back(run_pipeline(cfg, {"scatter", "gp", "spectrum", "oracle"}));
        emit_plot_data(runs.back(), "dispersion");
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    bool identical = runs[0].config_hash == runs[1].config_hash, complete = true;
    for (const auto& s : runs[0].stages)
        for (const auto& f : s.files)
            if (slurp(root / "a" / f) != slurp(root / "b" / f)) identical = false;
    for (const auto& run : runs) {
        auto listed = run.files();
        std::vector<std::string> present;
        for (const auto& e : fs::directory_iterator(run.out_dir)) present.push_back(e.path().filename().string());
        std::sort(listed.begin(), listed.end());
        std::sort(present.begin(), present.end());
        if (listed != present) complete = false;
    }
    fs::remove_all(root);
    return {
        make_flag("same config gives identical hash and stage files", identical, A),
        make_flag("manifest lists exactly the files written", complete, A),
    };
}

// ---- acceptance criteria ----

std::vector<Check> ac_scattering() {
    const auto t0 = Clock::now();
    RadialGrid g;
    g.r_max = 20.0;
    g.n_points = 2048;
    const auto s = solve_zero_energy(RadialPotential::square_barrier(4.0, 1.0), g);
    const double t = since(t0);
    return {
        make_check("a0 against 1 - tanh(sqrt 2)/sqrt 2", s.a0, kDeskA0, 1e-6, Rel, A),
        make_check("tail route against integral route", s.a0_tail, s.a0_integral, 1e-6, Rel, O),
        make_check("runtime [s]", t, 1.0, 0.0, AtMost, A),
    };
}

std::vector<Check> ac_neumann() {
    const auto t0 = Clock::now();
    std::vector<ScatteringSolution> sols;
    for (double B : {100.0, 300.0, 1000.0, 3000.0}) sols.push_back(neumann_large(B));
    const auto rep = check_asymptotics(sols);
    const double t = since(t0);
    return {
        make_check("c1 lower end", rep.c1, 1.7, 0.0, AtLeast, P),
        make_check("c1 upper end", rep.c1, 1.9, 0.0, AtMost, P),
        make_check("exponent of the integral V f_ell residual", rep.residual_exponent, -1.7, 0.0, AtMost, P),
        make_check("runtime [s]", t, 30.0, 0.0, AtMost, A),
    };
}

std::vector<Check> ac_w_integral() {
    const auto s = neumann_large(3000.0);
    const double a0 = s.a0;
    const double lim = s.neumann->integral_w / std::pow(s.neumann->ellN, 2);
    return {make_check("(N l)^{-2} integral w_ell at N l = 3000", lim, 0.4 * kPi * a0, 0.02, Rel, P)};
}

std::vector<Check> ac_gp() {
    std::vector<Check> out;
    double worst_time = 0.0, worst_id = 0.0, worst_res = 0.0;
    for (double a0 : {0.0, 0.1, kDeskA0, 1.0, 10.0}) {
        const auto t0 = Clock::now();
        const auto st = minimize_gp(TrapPotential::harmonic(), a0, Basis::make_radial(7.0, 279));
        worst_time = std::max(worst_time, since(t0));
        worst_res = std::max(worst_res, st.residual);
        worst_id = std::max(worst_id, std::abs(st.eps_GP - st.E_GP - 4.0 * kPi * a0 * st.norm4));
        if (a0 == 0.0) {
            out.push_back(make_check("E_GP at a0 = 0", st.E_GP, 3.0, 1e-6, Abs, A));
            out.push_back(make_check("eps_GP at a0 = 0", st.eps_GP, 3.0, 1e-6, Abs, A));
        }
    }
    SolverOptions o1, o2;
    o1.seed = 3;
    o2.seed = 77;
    const auto a = minimize_gp(TrapPotential::harmonic(), kDeskA0, Basis::make_radial(7.0, 279), o1);
    const auto b = minimize_gp(TrapPotential::harmonic(), kDeskA0, Basis::make_radial(7.0, 279), o2);
    out.push_back(make_check("Euler-Lagrange residual, worst case", worst_res, 0.0, 1e-8, AtMost, S));
    out.push_back(make_check("eps_GP - E_GP - 4 pi a0 |phi0|_4^4, worst case", worst_id, 0.0, 1e-10, AtMost, A));
    out.push_back(make_check("two random starts, L2 distance", (a.v - b.v).norm(), 0.0, 1e-6, AtMost, A));
    out.push_back(make_check("runtime per case [s]", worst_time, 60.0, 0.0, AtMost, A));
    return out;
}

std::vector<Check> ac_dispersion() {
    return {make_check("first 20 levels, worst relative error", dispersion_error(20), 0.0, 1e-6, AtMost, A)};
}

std::vector<Check> ac_fock() {
    const auto t0 = Clock::now();
    const auto seeded = seeded_fock(10, 20240601);
    const auto f = single_mode(5.0, 3.0);
    const auto d = diagonalize_quadratic(f);
    const auto cert = certified_spectrum(f, 3);
    const double t = since(t0);
    return {
        make_check("ground residual over 10 seeded forms", seeded.ground, 0.0, 1e-5, AtMost, O),
        make_check("first five gaps over 10 seeded forms", seeded.gaps, 0.0, 1e-5, AtMost, O),
        make_check("single mode E~", d.e_tilde(0), 4.0, 1e-6, Abs, A),
        make_check("single mode ground shift", d.ground_shift, -0.5, 1e-6, Abs, A),
        make_check("single mode oracle ground", cert.values[0], -0.5, 1e-6, Abs, O),
        make_check("runtime [s]", t, 120.0, 0.0, AtMost, A),
    };
}

struct DeskTilde {
    std::vector<double> N, deviation;
    std::vector<PropertyReport> props;
};

DeskTilde desk_tilde(const std::vector<int>& Ns) {
    const auto& st = desk_state(279);
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 4);
    const auto spec = assemble_E(bundle);
    DeskTilde out;
    for (int N : Ns) {
        const auto k = build_kernels(st, desk_neumann(0.2, N), N, 4);
        const auto tf = assemble_tilde_forms(k, bundle);
        out.N.push_back(N);
        out.deviation.push_back(compare_Etilde_E(tf, spec, N).max_deviation);
        out.props.push_back(tilde_properties(tf));
    }
    return out;
}

std::vector<Check> ac_alpha_properties() {
    const auto d = desk_tilde({25, 50, 100});
    std::vector<Check> out;
    for (size_t i = 0; i < d.N.size(); ++i) {
        const auto& p = d.props[i];
        const std::string tag = " (N = " + std::to_string(static_cast<int>(d.N[i])) + ")";
        out.push_back(make_flag("D~ > 0 and D~ + 2 Gamma~ > 0" + tag, p.positivity, A));
        out.push_back(make_check("C / c" + tag, p.C / p.c, 10.0, 0.0, AtMost, A));
        out.push_back(make_flag("HS norms of A - I, B - I, D^{b/2} alpha D^{b/2} finite" + tag, p.finite_norms, A));
    }
    return out;
}

std::vector<Check> ac_tilde_rate() {
    const auto d = desk_tilde({25, 50, 100, 200});
    bool decreasing = true;
    for (size_t i = 1; i < d.deviation.size(); ++i) decreasing = decreasing && d.deviation[i] < d.deviation[i - 1];
    return {
        make_flag("max level deviation decreases with N", decreasing, P),
        make_check("fitted exponent", power_law_exponent(d.N, d.deviation), -0.8, 0.0, AtMost, P),
    };
}

std::vector<Check> ac_ebog() {
    const auto t0 = Clock::now();
    const auto b = assemble_hgp(desk_state(559), TrapPotential::harmonic(), 4);
    const auto r = ebog_kappa(b, 5.0);
    const auto r15 = ebog_kappa(b, 7.5);
    const auto m = ebog_mollified(b, {0.2, 0.1, 0.05, 0.025});
    const double t = since(t0);
    const auto st0 = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(7.0, 279));
    const auto b0 = assemble_hgp(st0, TrapPotential::harmonic(), 4);
    return {
        make_check("kappa = 5 against 7.5", r15.total, r.total, 1e-3, Rel, S),
        make_check("mollified extrapolation against kappa route", m.extrapolated, r.total, 1e-3, Rel, O),
        make_check("a0 = 0, kappa route", ebog_kappa(b0, 5.0).total, 0.0, 0.0, Abs, A),
        make_check("a0 = 0, mollified route", ebog_mollified(b0, {0.4, 0.2, 0.1, 0.05}).extrapolated, 0.0, 0.0, Abs, A),
        make_check("runtime on the desk case [s]", t, 600.0, 0.0, AtMost, A),
    };
}

std::vector<Check> ac_kernel_bounds() {
    std::vector<double> ratio;
    const auto& st = desk_state(279);
    for (double ell : {0.1, 0.2, 0.4}) ratio.push_back(kernel_norms(st, desk_neumann(ell, 50)).hs_eta / std::sqrt(ell));
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    const auto scat = desk_neumann(0.2, 50);
    const auto coarse = kernel_norms(desk_state(159), scat);
    const auto fine = kernel_norms(st, scat);
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 4);
    const auto tf = assemble_tilde_forms(build_kernels(st, scat, 50, 4), bundle);
    return {
        make_check("max/min of |eta|_HS / sqrt(l) over l = 0.1, 0.2, 0.4", *hi / *lo, 1.25, 0.0, AtMost, P),
        make_flag("sup_x |eta_x| / phi0(x) finite", std::isfinite(fine.sup_eta_x), A),
        make_check("sup_x |eta_x| / phi0(x) under refinement", fine.sup_eta_x, coarse.sup_eta_x, 1e-3, Rel, S),
        make_check("|D~ - e^{-eta} H e^{-eta}| / |H|", tf.d_identity_residual, 0.0, 1e-8, AtMost, A),
    };
}

}  // namespace

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Analytic: return "analytic";
        case Provenance::Oracle: return "oracle";
        case Provenance::SelfConvergence: return "self-convergence";
        case Provenance::Asymptotic: return "asymptotic";
    }
    return "?";
}

Check make_check(std::string name, double measured, double expected, double tolerance, Relation relation,
                 Provenance provenance) {
    Check c{std::move(name), measured, expected, tolerance, relation, provenance, false};
    switch (relation) {
        case Relation::Absolute: c.pass = std::abs(measured - expected) <= tolerance; break;
        case Relation::Relative: c.pass = std::abs(measured - expected) <= tolerance * std::abs(expected); break;
        case Relation::AtMost: c.pass = measured <= expected + tolerance; break;
        case Relation::AtLeast: c.pass = measured >= expected - tolerance; break;
    }
    return c;  // NaN fails every comparison
}

Check make_flag(std::string name, bool holds, Provenance provenance) {
    return make_check(std::move(name), holds ? 1.0 : 0.0, 1.0, 0.0, Relation::Absolute, provenance);
}

bool FixtureReport::ok() const {
    return error.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

int SuiteReport::passed() const {
    int n = 0;
    for (const auto& f : fixtures)
        for (const auto& c : f.checks) n += c.pass;
    return n;
}

int SuiteReport::failed() const {
    int n = 0;
    for (const auto& f : fixtures) {
        n += !f.error.empty();
        for (const auto& c : f.checks) n += !c.pass;
    }
    return n;
}

std::string SuiteReport::table() const {
    std::ostringstream s;
    s << std::left << std::setw(6) << "" << std::setw(68) << "check" << std::setw(25) << "measured" << std::setw(4)
      << "" << std::setw(25) << "expected" << std::setw(11) << "tol" << "provenance\n";
    for (const auto& f : fixtures) {
        s << "[" << f.name << "] " << f.config << "  (" << std::setprecision(3) << std::fixed << f.seconds << " s)\n"
          << std::defaultfloat;
        if (!f.error.empty()) s << "  FAIL  exception: " << f.error << "\n";
        for (const auto& c : f.checks) {
            s << "  " << (c.pass ? "pass" : "FAIL") << "  " << std::setw(68) << c.name << std::setprecision(17)
              << std::setw(25) << c.measured << std::setw(4) << to_string(c.relation) << std::setw(25) << c.expected
              << std::setprecision(3) << std::setw(11) << c.tolerance << to_string(c.provenance) << "\n";
        }
    }
    s << passed() << " passed, " << failed() << " failed\n";
    return s.str();
}

std::string SuiteReport::json() const {
    using nlohmann::ordered_json;
    ordered_json out;
    ordered_json fx = ordered_json::array();
    for (const auto& f : fixtures) {
        ordered_json checks = ordered_json::array();
        for (const auto& c : f.checks)
            checks.push_back({{"name", c.name},
                              {"measured", c.measured},
                              {"expected", c.expected},
                              {"tolerance", c.tolerance},
                              {"relation", to_string(c.relation)},
                              {"provenance", to_string(c.provenance)},
                              {"pass", c.pass}});
        fx.push_back({{"name", f.name}, {"config", f.config}, {"ok", f.ok()}, {"error", f.error}, {"checks", checks}});
    }
    out["fixtures"] = fx;
    out["passed"] = passed();
    out["failed"] = failed();
    out["ok"] = ok();
    return out.dump(2);
}

int thread_cap() {
    if (const char* env = std::getenv("BOGOSPEC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

SuiteReport run_suite(const std::vector<Fixture>& fixtures, int threads) {
    SuiteReport rep;
    rep.fixtures.resize(fixtures.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < fixtures.size(); i = next++) {
            auto& r = rep.fixtures[i];
            r.name = fixtures[i].name;
            r.config = fixtures[i].config;
            const auto t0 = Clock::now();
            try {
                r.checks = fixtures[i].run();
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            r.seconds = since(t0);
        }
    };
    const int n = std::max(1, std::min<int>(threads > 0 ? threads : thread_cap(), static_cast<int>(fixtures.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::stable_sort(rep.fixtures.begin(), rep.fixtures.end(),
                     [](const FixtureReport& a, const FixtureReport& b) { return a.name < b.name; });
    return rep;
}

std::vector<Fixture> default_fixtures() {
    return {
        {"square-barrier-a0", "V0 = 4, R = 1, r_max 20, 2048 and 4096 points", fx_square_barrier},
        {"neumann-profile", "square barrier, N l = 1e4, log grid", fx_neumann_profile},
        {"gp-free-oscillator", "harmonic trap, a0 = 0, radial n = 139", fx_gp_free},
        {"gp-desk", "harmonic trap, a0 in {0.1, desk, 1}, radial n = 139", fx_gp_desk},
        {"spectrum-desk", "desk condensate, radial n = 159 and 239, l <= 4", fx_spectrum_desk},
        {"periodic-dispersion", "periodic box 8^3, a0 = 0.5, phi0 = 1", fx_periodic_dispersion},
        {"kernels-desk", "desk condensate n = 159, N = 25, l = 0.2", fx_kernels_desk},
        {"bogo-diag-random", "10 random forms of size 2..6, 5 commuting forms", fx_bogo_random},
        {"fock-vs-bogo-2mode", "seeded 2-mode admissible form", fx_fock_2mode},
        {"ebog-desk", "desk condensate n = 279, kappa = 5, delta = 0.4..0.05", fx_ebog_desk},
        {"free-case-zeros", "a0 = 0 cascade through E, kernels and E_Bog", fx_free_case},
        {"pipeline-determinism", "scatter, gp, spectrum, oracle run twice", fx_pipeline_determinism},
    };
}

std::vector<Fixture> acceptance_fixtures() {
    return {
        {"01-scattering-length", "square barrier V0 = 4, R = 1", ac_scattering},
        {"02-neumann-asymptotics", "N l in {100, 300, 1000, 3000}", ac_neumann},
        {"03-w-integral-limit", "N l = 3000", ac_w_integral},
        {"04-gp-solver", "harmonic trap, radial n = 279", ac_gp},
        {"05-periodic-dispersion", "periodic box 8^3, phi0 = 1", ac_dispersion},
        {"06-fock-oracle", "10 seeded forms with 1..3 modes, single mode closed form", ac_fock},
        {"07-alpha-properties", "desk tilde forms, N in {25, 50, 100}", ac_alpha_properties},
        {"08-tilde-rate", "desk tilde forms, N in {25, 50, 100, 200}", ac_tilde_rate},
        {"09-ebog-consistency", "desk condensate n = 559, kappa = 5", ac_ebog},
        {"10-kernel-bounds", "desk condensate n = 279, N = 50", ac_kernel_bounds},
    };
}

}  // namespace bogospec
