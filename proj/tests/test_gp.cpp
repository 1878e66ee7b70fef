#include "bogospec/errors.hpp"
#include "bogospec/gp.hpp"
#include "bogospec/linalg.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace bogospec;

namespace {

Basis desk_radial(int n = 139, double r_max = 7.0) { return Basis::make_radial(r_max, n); }

// Gaussian ground state of -Delta + |x|^2, nodal values.
Vec gaussian_nodes(const Basis& b) {
    const Vec r = b.radii();
    return (std::pow(M_PI, -0.75) * (-0.5 * r.array().square()).exp()).matrix();
}

// int phi^4 for the oscillator ground state by Gauss-Legendre on [0, 10].
double gaussian_norm4_by_quadrature() {
    std::vector<double> x, w;
    gauss_legendre(80, 0.0, 10.0, x, w);
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        acc += w[i] * 4 * M_PI * x[i] * x[i] * std::pow(M_PI, -3.0) * std::exp(-2 * x[i] * x[i]);
    return acc;
}

}  // namespace

TEST_CASE("free oscillator ground state") {
    auto t0 = std::chrono::steady_clock::now();
    auto st = minimize_gp(TrapPotential::harmonic(), 0.0, desk_radial());
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(st.E_GP == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(st.eps_GP == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(st.residual <= 1e-8);
    CHECK(std::abs(st.v.norm() - 1.0) < 1e-12);
    CHECK(st.max_energy_increase <= 1e-14);
    const Vec g = gaussian_nodes(st.basis);
    CHECK((st.phi - g).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(secs < 60.0);
}

TEST_CASE("gp_energy of the Gaussian") {
    auto b = desk_radial();
    const Vec g = gaussian_nodes(b);
    const Vec w = b.weights();
    const Vec gn = g / g.cwiseProduct(w.cwiseSqrt()).norm();
    const double n4 = gaussian_norm4_by_quadrature();
    CHECK(n4 == doctest::Approx(std::pow(M_PI, -1.5) * std::pow(2.0, -1.5)).epsilon(1e-12));
    CHECK(gp_energy(gn, b, TrapPotential::harmonic(), 0.0) == doctest::Approx(3.0).epsilon(1e-9));
    const double a0 = 0.37182;
    CHECK(gp_energy(gn, b, TrapPotential::harmonic(), a0) ==
          doctest::Approx(3.0 + 4 * M_PI * a0 * n4).epsilon(1e-9));
    // refinement
    auto fine = desk_radial(279);
    const Vec gf = gaussian_nodes(fine);
    const Vec gfn = gf / gf.cwiseProduct(fine.weights().cwiseSqrt()).norm();
    CHECK(std::abs(gp_energy(gfn, fine, TrapPotential::harmonic(), a0) - gp_energy(gn, b, TrapPotential::harmonic(), a0)) <
          1e-7);
    CHECK_THROWS_AS(gp_energy(2.0 * gn, b, TrapPotential::harmonic(), a0), ValidationError);
}

TEST_CASE("interacting condensate: multiplier identity, Thomas-Fermi, monotonicity") {
    double prev = 0.0;
    for (double a0 : {0.1, 1.0, 10.0}) {
        auto st = minimize_gp(TrapPotential::harmonic(), a0, desk_radial());
        CHECK(st.residual <= 1e-8);
        CHECK(std::abs(st.eps_GP - st.E_GP - 4 * M_PI * a0 * st.norm4) <= 1e-10 * st.eps_GP);
        CHECK(st.max_energy_increase <= 1e-14);
        // positive up to roundoff in the far tail
        CHECK(st.min_phi > -1e-15 * st.phi.maxCoeff());
        CHECK(st.eps_GP >= prev);
        prev = st.eps_GP;
        if (a0 == 10.0) {
            // Thomas-Fermi: eps = (15 a0)^{2/5} from dropping the kinetic term
            const double tf = std::pow(15 * a0, 0.4);
            CHECK(tf == doctest::Approx(7.4206).epsilon(1e-4));
            CHECK(std::abs(st.eps_GP - tf) / tf < 0.1);
        }
    }
}

TEST_CASE("random starts converge to the same state") {
    SolverOptions o1, o2;
    o1.seed = 11;
    o2.seed = 12345;
    auto a = minimize_gp(TrapPotential::harmonic(), 0.37182, desk_radial(), o1);
    auto b = minimize_gp(TrapPotential::harmonic(), 0.37182, desk_radial(), o2);
    CHECK((a.v - b.v).norm() <= 1e-6);
    CHECK(a.E_GP == doctest::Approx(b.E_GP).epsilon(1e-11));
}

TEST_CASE("decay diagnostics") {
    auto st = minimize_gp(TrapPotential::harmonic(), 0.0, desk_radial());
    auto rep = check_decay(st, {1.0, 2.0, 5.0});
    for (size_t i = 0; i < rep.nu.size(); ++i) {
        CHECK(std::isfinite(rep.C_phi[i]));
        CHECK(std::isfinite(rep.C_grad[i]));
        CHECK(std::isfinite(rep.C_lap[i]));
        // e^{-r^2/2 + nu r} peaks at r = nu: the supremum sits in the bulk
        CHECK(std::abs(rep.argmax_phi[i] - rep.nu[i]) < 0.05);
        if (i > 0) CHECK(rep.C_phi[i] > rep.C_phi[i - 1]);
    }
    CHECK(rep.C_phi[0] == doctest::Approx(std::pow(M_PI, -0.75) * std::exp(0.5)).epsilon(1e-6));
    CHECK(std::isfinite(rep.fourier_C));
    CHECK(rep.fourier_C > 0.0);

    SolverOptions tight;
    tight.auto_expand = false;
    auto small = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(3.0, 59), tight);
    CHECK_THROWS_AS(check_decay(small, {1.0}), NumericalError);
    auto grown = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(5.0, 99));
    CHECK(grown.expanded);
    CHECK(grown.boundary_value <= 1e-10);
}

TEST_CASE("cartesian grids") {
    using B = CartesianBasis::Boundary;
    // A coarse 7-point grid: second-order accurate, so only percent-level agreement.
    SolverOptions coarse;
    coarse.min_nodes_per_length = 2.0;
    coarse.auto_expand = false;
    auto st = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_cartesian(31, 4.0, B::Dirichlet), coarse);
    CHECK(std::abs(st.E_GP - 3.0) < 0.05);
    CHECK(st.residual <= 1e-8);
    auto aniso = TrapPotential::harmonic();
    aniso.axis_scale = {1.0, 1.0, 2.0};
    auto sa = minimize_gp(aniso, 0.0, Basis::make_cartesian(31, 4.0, B::Dirichlet), coarse);
    CHECK(std::abs(sa.E_GP - 4.0) < 0.1);
    // periodic unit box without a trap: the constant state
    auto sp = minimize_gp(TrapPotential::none(), 0.5, Basis::make_cartesian(8, 0.5, B::Periodic));
    CHECK((sp.phi.array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(sp.E_GP == doctest::Approx(4 * M_PI * 0.5).epsilon(1e-12));
}

TEST_CASE("gp input validation") {
    CHECK_THROWS_AS(minimize_gp(TrapPotential::harmonic(), -1.0, desk_radial()), ValidationError);
    CHECK_THROWS_AS(minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(7.0, 30)), ValidationError);
    CHECK_THROWS_AS(TrapPotential::polynomial({0.0, -1.0}), ValidationError);
    SolverOptions few;
    few.max_iter = 2;
    CHECK_THROWS_AS(minimize_gp(TrapPotential::harmonic(), 1.0, desk_radial(), few), NumericalError);
}
