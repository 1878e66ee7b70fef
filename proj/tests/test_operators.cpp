#include "bogospec/errors.hpp"
#include "bogospec/operators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace bogospec;

namespace {

GPState desk_state(double a0, int n = 139) {
    return minimize_gp(TrapPotential::harmonic(), a0, Basis::make_radial(7.0, n));
}

// Brute force over the box of occupation vectors 0..nmax in every mode.
std::map<long, long> brute_levels(const std::vector<double>& eigs, double zeta, double quantum) {
    std::map<long, long> out;
    const size_t m = eigs.size();
    const int nmax = static_cast<int>(zeta / eigs.front()) + 1;
    std::vector<int> occ(m, 0);
    while (true) {
        double s = 0;
        for (size_t i = 0; i < m; ++i) s += occ[i] * eigs[i];
        if (s <= zeta + 1e-12) ++out[std::lround(s / quantum)];
        size_t k = 0;
        while (k < m && ++occ[k] > nmax) occ[k++] = 0;
        if (k == m) break;
    }
    return out;
}

}  // namespace

TEST_CASE("free oscillator: H_GP and E coincide on range(Q)") {
    auto st = desk_state(0.0);
    auto b = assemble_hgp(st, TrapPotential::harmonic(), 3);
    CHECK(b.hgp_phi_residual < 1e-8);
    CHECK(b.symmetry_defect < 1e-12);
    CHECK(b.q_defect < 1e-12);
    auto s = assemble_E(b);
    REQUIRE(s.eigenvalues.size() > 12);
    // oscillator levels 3, 5, 7, ... shifted by -3, ground state removed
    const double expect[] = {2, 2, 2, 4, 4, 4, 4, 4, 4};
    // the centrifugal term converges algebraically on the sine grid, hence 1e-4
    for (int i = 0; i < 9; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-4));
    for (size_t i = 0; i < 40; ++i)
        CHECK(std::abs(s.eigenvalues[i] - s.hgp_eigenvalues[i]) <= 1e-10 * s.hgp_eigenvalues[i]);
    CHECK(s.positive);
}

TEST_CASE("interacting condensate: positivity, annihilation of phi0, strict domination") {
    auto st = desk_state(0.37182);
    auto b = assemble_hgp(st, TrapPotential::harmonic(), 4);
    CHECK(b.hgp_phi_residual < 1e-7);
    CHECK(b.min_perp_eigenvalue > 0.0);
    auto s = assemble_E(b);
    CHECK(s.positive);
    CHECK(s.dominates);
    CHECK(s.phi0_residual < 1e-12);
    for (int i = 0; i < 10; ++i) CHECK(s.eigenvalues[i] > s.hgp_eigenvalues[i] + 1e-6);
    // a 1.5x finer basis moves the first ten levels by at most 1e-4 relative
    auto fine = assemble_E(assemble_hgp(desk_state(0.37182, 209), TrapPotential::harmonic(), 4));
    for (int i = 0; i < 10; ++i)
        CHECK(std::abs(fine.eigenvalues[i] - s.eigenvalues[i]) / s.eigenvalues[i] <= 1e-4);
}

TEST_CASE("mismatched trap is rejected") {
    auto st = desk_state(0.0);
    CHECK_THROWS_AS(assemble_hgp(st, TrapPotential::harmonic(2.0)), ValidationError);
}

TEST_CASE("periodic box dispersion") {
    const double a0 = 0.5;
    const int n = 8;
    auto st = minimize_gp(TrapPotential::none(), a0, Basis::make_cartesian(n, 0.5, CartesianBasis::Boundary::Periodic));
    auto s = assemble_E(assemble_hgp(st, TrapPotential::none()));
    // lattice momenta 2 pi m with m in (-n/2, n/2]^3 \ {0}
    std::vector<double> expect;
    for (int i = -n / 2 + 1; i <= n / 2; ++i)
        for (int j = -n / 2 + 1; j <= n / 2; ++j)
            for (int k = -n / 2 + 1; k <= n / 2; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                const double p2 = 4 * M_PI * M_PI * (i * i + j * j + k * k);
                expect.push_back(std::sqrt(p2 * p2 + 16 * M_PI * a0 * p2));
            }
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 20; ++i) CHECK(std::abs(s.eigenvalues[i] - expect[i]) / expect[i] <= 1e-6);
}

TEST_CASE("excitation spectrum against a Cholesky similarity oracle") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 6 + trial;
        Mat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = g(rng);
        Mat H = a * a.transpose() + 0.5 * Mat::Identity(n, n);
        Vec m2(n);
        for (int i = 0; i < n; ++i) m2(i) = u(rng);
        const double a0 = 0.3;
        Mat K2 = (16 * M_PI * a0 * m2).asDiagonal();
        Vec e = excitation_spectrum(H, K2);
        // H^{1/2} X H^{1/2} is similar to C^T X C for H = C C^T
        Eigen::LLT<Mat> llt(H);
        Mat C = llt.matrixL();
        Mat sim = C.transpose() * (H + K2) * C;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sim + sim.transpose()));
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(e(i) * e(i) - es.eigenvalues()(i)) <= 1e-10 * es.eigenvalues().maxCoeff());
    }
}

TEST_CASE("excitation levels: direct enumeration examples") {
    auto a = excitation_levels({1.0, 2.5}, 3.1);
    std::vector<double> ea = {0, 1.0, 2.0, 2.5, 3.0};
    REQUIRE(a.levels.size() == ea.size());
    for (size_t i = 0; i < ea.size(); ++i) CHECK(a.levels[i] == doctest::Approx(ea[i]));
    auto b = excitation_levels({2.0}, 5.0);
    REQUIRE(b.levels.size() == 3);
    CHECK(b.levels[2] == doctest::Approx(4.0));
}

TEST_CASE("excitation levels: oscillator degeneracies against brute force") {
    const std::vector<double> eigs = {2, 2, 2, 4, 4};
    auto lv = excitation_levels(eigs, 4.0);
    auto brute = brute_levels(eigs, 4.0, 1.0);
    REQUIRE(lv.levels.size() == 3);
    std::vector<long> mult;
    for (auto& [k, m] : brute) mult.push_back(m);
    REQUIRE(mult.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(lv.multiplicities[i] == mult[i]);
    // 1 vacuum, 3 single quanta at 2, and 6 + 2 states at 4
    CHECK(lv.multiplicities[0] == 1);
    CHECK(lv.multiplicities[1] == 3);
    CHECK(lv.multiplicities[2] == 8);
}

TEST_CASE("excitation levels are closed under addition below zeta") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.7, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> e(1 + trial % 4);
        for (double& x : e) x = u(rng);
        std::sort(e.begin(), e.end());
        const double zeta = 6.0;
        auto lv = excitation_levels(e, zeta);
        CHECK(lv.levels.front() == 0.0);
        CHECK(std::is_sorted(lv.levels.begin(), lv.levels.end()));
        for (double a : lv.levels)
            for (double b : lv.levels) {
                if (a + b > zeta - 1e-9) continue;
                bool found = std::any_of(lv.levels.begin(), lv.levels.end(),
                                         [&](double c) { return std::abs(c - a - b) < 1e-8; });
                CHECK(found);
            }
    }
}

TEST_CASE("excitation levels guard and validation") {
    std::vector<double> many(40, 0.01);
    CHECK_THROWS_AS(excitation_levels(many, 1.0), NumericalError);
    CHECK_THROWS_AS(excitation_levels({2.0, 1.0}, 3.0), ValidationError);
    CHECK_THROWS_AS(excitation_levels({1.0}, -1.0), ValidationError);
}
