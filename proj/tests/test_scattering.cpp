#include "bogospec/errors.hpp"
#include "bogospec/scattering.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace bogospec;

namespace {

// Square barrier of height V0 and radius R: inside, u = sinh(k r) with k = sqrt(V0/2);
// matching u and u' at R to the line C (r - a0) gives a0 = R - tanh(k R)/k.
double barrier_a0(double V0, double R) {
    double k = std::sqrt(V0 / 2.0);
    return R - std::tanh(k * R) / k;
}

RadialGrid grid(double r_max, int n = 512) {
    RadialGrid g;
    g.r_max = r_max;
    g.n_points = n;
    return g;
}

}  // namespace

TEST_CASE("square barrier scattering length from both routes") {
    auto pot = RadialPotential::square_barrier(4.0, 1.0);
    auto t0 = std::chrono::steady_clock::now();
    auto sol = solve_zero_energy(pot, grid(20.0));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double exact = barrier_a0(4.0, 1.0);
    CHECK(exact == doctest::Approx(0.37182).epsilon(1e-4));
    CHECK(std::abs(sol.a0 - exact) / exact < 1e-9);
    CHECK(std::abs(sol.a0_integral - sol.a0_tail) / exact < 1e-9);
    CHECK(sol.tail_residual < 1e-8);
    CHECK(secs < 1.0);
}

TEST_CASE("profile inside the barrier matches the closed form") {
    auto pot = RadialPotential::square_barrier(4.0, 1.0);
    auto sol = solve_zero_energy(pot, grid(5.0));
    const double k = std::sqrt(2.0), a0 = barrier_a0(4.0, 1.0);
    // f = C sinh(k r)/r inside, with C fixed by f(R) = 1 - a0/R
    const double C = (1.0 - a0) / std::sinh(k);
    for (double r : {0.01, 0.3, 0.77, 0.999, 1.5, 3.0}) {
        double expect = r < 1.0 ? C * std::sinh(k * r) / r : 1.0 - a0 / r;
        CHECK(sol.f_at(r) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("zero potential gives f = 1 and a0 = 0") {
    auto sol = solve_zero_energy(RadialPotential::zero(), grid(5.0));
    CHECK(sol.a0 == 0.0);
    for (double f : sol.f) CHECK(f == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("hard-sphere limit approaches the support radius") {
    auto sol = solve_zero_energy(RadialPotential::square_barrier(1e6, 1.0), grid(5.0));
    CHECK(std::abs(sol.a0 - 1.0) < 1e-2);
    CHECK(std::abs(sol.a0 - barrier_a0(1e6, 1.0)) < 1e-9);
    CHECK(std::abs(sol.a0_integral - sol.a0_tail) / sol.a0 < 1e-6);
}

TEST_CASE("tabulated potential reproduces a linear ramp") {
    // V = 2 (1 - r) on [0, 1]; compare against the built-in barrier only loosely and
    // against grid refinement of the ODE tolerance through the two a0 routes.
    auto pot = RadialPotential::tabulated({0.0, 0.5, 1.0}, {2.0, 1.0, 0.0});
    auto sol = solve_zero_energy(pot, grid(10.0));
    CHECK(sol.a0 > 0.0);
    CHECK(sol.a0 < 1.0);
    CHECK(std::abs(sol.a0_integral - sol.a0_tail) / sol.a0 < 1e-6);
    // Refining the reporting grid does not change a0 (the integrator is adaptive).
    auto fine = solve_zero_energy(pot, grid(10.0, 1024));
    CHECK(std::abs(fine.a0 - sol.a0) / sol.a0 < 1e-7);
}

TEST_CASE("invalid potentials and grids are rejected") {
    CHECK_THROWS_AS(RadialPotential::tabulated({0.0, 1.0}, {1.0, -0.1}), ValidationError);
    CHECK_THROWS_AS(RadialPotential::square_barrier(-1.0, 1.0), ValidationError);
    auto pot = RadialPotential::square_barrier(4.0, 1.0);
    CHECK_THROWS_AS(solve_zero_energy(pot, grid(0.5)), ValidationError);
    CHECK_THROWS_AS(solve_zero_energy(pot, grid(5.0, 32)), ValidationError);
    CHECK_THROWS_AS(solve_neumann(pot, 0.1, 5, grid(5.0)), ValidationError);    // N l <= R
    CHECK_THROWS_AS(solve_neumann(pot, 1.5, 5, grid(10.0)), ValidationError);   // l outside (0,1)
    CHECK_THROWS_AS(solve_neumann(pot, 0.5, 100, grid(10.0)), ValidationError); // grid too short
}

TEST_CASE("Neumann eigenvalue at N l = 100") {
    auto pot = RadialPotential::square_barrier(4.0, 1.0);
    auto sol = solve_neumann(pot, 0.5, 200, grid(100.0, 1024));
    const double a0 = barrier_a0(4.0, 1.0);
    const double B = 100.0;
    const double lead = 3 * a0 / (B * B * B) * (1 + 1.8 * a0 / B);
    REQUIRE(sol.neumann);
    CHECK(sol.neumann->lambda == doctest::Approx(1.123e-6).epsilon(1e-3));
    CHECK(std::abs(sol.neumann->lambda - lead) / lead < 1e-4);
    CHECK(sol.neumann->residual < 1e-8);
    // integral of V f_ell against 8 pi a0 (1 + 3 a0/(2 N l)), up to O((N l)^-2)
    const double ref = 8 * M_PI * a0 * (1 + 1.5 * a0 / B);
    CHECK(std::abs(sol.neumann->integral_Vf - ref) < 10.0 / (B * B));
    // f_ell(N l) = 1 and the radial derivative vanishes there
    CHECK(sol.f_at(B * (1 - 1e-12)) == doctest::Approx(1.0).epsilon(1e-9));
    double d = (sol.f_at(B) - sol.f_at(B - 1e-3)) / 1e-3;
    CHECK(std::abs(d) < 1e-8);
}

TEST_CASE("Neumann problem with zero potential") {
    auto sol = solve_neumann(RadialPotential::zero(), 0.5, 40, grid(20.0, 128));
    CHECK(sol.neumann->lambda == 0.0);
    for (double f : sol.neumann->f) CHECK(f == 1.0);
    auto fw = fourier_w(sol, {0.5, 1.0, 10.0});
    for (double v : fw.w_hat) CHECK(v == 0.0);
}

TEST_CASE("asymptotic fits over two decades of N l") {
    auto pot = RadialPotential::square_barrier(4.0, 1.0);
    std::vector<ScatteringSolution> sols;
    RadialGrid g;
    g.r_max = 3000.0;
    g.n_points = 2048;
    g.spacing = RadialGrid::Spacing::LogUniform;
    for (double B : {100.0, 300.0, 1000.0, 3000.0}) sols.push_back(solve_neumann(pot, B / 10000.0, 10000, g));
    auto rep = check_asymptotics(sols);
    const double a0 = barrier_a0(4.0, 1.0);
    CHECK(!rep.trivial);
    CHECK(rep.c1 > 1.7);
    CHECK(rep.c1 < 1.9);
    CHECK(rep.residual_exponent <= -1.7);
    CHECK(std::abs(rep.w_limit - 0.4 * M_PI * a0) / (0.4 * M_PI * a0) < 0.02);
    CHECK(rep.f_bounds_ok);
    CHECK(rep.w_monotone_ok);
    CHECK(std::isfinite(rep.C_w));
    CHECK(rep.C_w > 0.0);
    // lambda (N l)^3 -> 3 a0
    CHECK(std::abs(rep.lambda_scaled.back() / (3 * a0) - 1) < 1e-3);
}

TEST_CASE("asymptotic fit flags the free case and rejects a narrow span") {
    RadialGrid g;
    g.r_max = 3000.0;
    g.n_points = 256;
    std::vector<ScatteringSolution> sols;
    for (double B : {10.0, 30.0, 100.0, 300.0})
        sols.push_back(solve_neumann(RadialPotential::zero(), B / 10000.0, 10000, g));
    auto rep = check_asymptotics(sols);
    CHECK(rep.trivial);
    for (double l : rep.lambda_scaled) CHECK(l == 0.0);
    sols.pop_back();
    CHECK_THROWS_AS(check_asymptotics(sols), ValidationError);
}

TEST_CASE("Fourier transform of w_ell") {
    auto pot = RadialPotential::square_barrier(4.0, 1.0);
    auto sol = solve_neumann(pot, 0.5, 40, grid(20.0, 512));
    // small p limit is the direct integral
    auto small = fourier_w(sol, {1e-7});
    CHECK(std::abs(small.w_hat[0] - sol.neumann->integral_w) / sol.neumann->integral_w < 1e-6);
    // |w_hat(p)| p^2 stays bounded on [5, 50]; the running supremum settles
    std::vector<double> ps;
    for (double p = 5; p <= 50.0001; p += 2.5) ps.push_back(p);
    auto rep = fourier_w(sol, ps);
    double sup5 = 0;
    for (size_t i = 0; i < ps.size(); ++i) sup5 = std::max(sup5, std::abs(rep.w_hat[i]) * ps[i] * ps[i]);
    CHECK(std::abs(rep.w_hat[2]) * 100 <= rep.C);
    auto wide = fourier_w(sol, {5, 10, 20, 30, 40, 50, 60, 80, 100});
    CHECK(std::abs(wide.C - rep.C) / rep.C < 0.1);
    CHECK(std::isfinite(rep.C));
    CHECK(sup5 == rep.C);
}
