#include "bogospec/bogo_diag.hpp"
#include "bogospec/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bogospec;

namespace {

QuadraticForm single(double eps, double gam) {
    QuadraticForm f;
    f.Phi = Mat::Constant(1, 1, eps);
    f.Gamma = Mat::Constant(1, 1, gam);
    return f;
}

QuadraticForm random_form(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat a(n, n), g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = u(rng);
            g(i, j) = u(rng);
        }
    QuadraticForm f;
    f.Phi = a * a.transpose() + 3.0 * Mat::Identity(n, n);
    f.Gamma = 0.4 * (g + g.transpose());
    return f;
}

}  // namespace

TEST_CASE("single mode closed form") {
    // E~ = sqrt(eps^2 - gamma^2), shift = (E~ - eps)/2, A = sqrt(D/E~)
    auto d = diagonalize_quadratic(single(5.0, 3.0));
    CHECK(d.E_tilde(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(d.ground_shift == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(d.A(0, 0) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
    CHECK(d.alpha(0, 0) == doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-13));
    CHECK(bogoliubov_spectrum(d) == std::vector<double>{4.0});
    auto rep = check_alpha_properties(d, single(5.0, 3.0));
    CHECK(rep.A_minus_I == doctest::Approx(1.0 - std::sqrt(2.0) / 2).epsilon(1e-13));
    CHECK(rep.all_pass());
}

TEST_CASE("no pairing gives the identity transformation") {
    std::mt19937_64 rng(5);
    auto f = random_form(4, rng);
    f.Gamma.setZero();
    auto d = diagonalize_quadratic(f);
    const Mat I = Mat::Identity(4, 4);
    CHECK((d.E_tilde - f.Phi).norm() < 1e-12);
    CHECK((d.A - I).norm() < 1e-12);
    CHECK((d.B - I).norm() < 1e-12);
    CHECK((d.W - I).norm() < 1e-12);
    CHECK(d.alpha.norm() < 1e-12);
    CHECK(std::abs(d.ground_shift) < 1e-13);
    auto rep = check_alpha_properties(d, f);
    CHECK(rep.A_minus_I < 1e-12);
    for (double a : rep.alpha_weighted) CHECK(a < 1e-12);
    auto spec = bogoliubov_spectrum(d);
    Vec ev = sym_eig(f.Phi).values;
    for (int i = 0; i < 4; ++i) CHECK(spec[i] == doctest::Approx(ev(i)).epsilon(1e-12));
}

TEST_CASE("invariants on random admissible forms") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 5;
        auto f = random_form(n, rng);
        auto d = diagonalize_quadratic(f);
        CHECK(d.square_defect < 1e-10);
        CHECK(d.symplectic_defect < 1e-10);
        CHECK(d.w_defect < 1e-10);
        CHECK(d.alpha_defect < 1e-9);
        CHECK(((d.A.inverse()).transpose() - d.B).norm() < 1e-10);
        // eigenvalues of E~^2 against the direct product, through a Cholesky similarity
        Eigen::LLT<Mat> llt(f.D());
        Mat C = llt.matrixL();
        Mat sim = C.transpose() * (f.D() + 2 * f.Gamma) * C;
        Vec ev = sym_eig(0.5 * (sim + sim.transpose())).values;
        for (int i = 0; i < n; ++i) CHECK(std::abs(d.e_tilde(i) * d.e_tilde(i) - ev(i)) < 1e-10 * ev.maxCoeff());
        // A = W |A| with |A| = (A^T A)^{1/2}
        Mat absA = matrix_sqrt(d.A.transpose() * d.A);
        CHECK((d.W * absA - d.A).norm() < 1e-10);
        // scale covariance
        QuadraticForm g{2.5 * f.Phi, 2.5 * f.Gamma};
        auto dg = diagonalize_quadratic(g);
        CHECK((dg.E_tilde - 2.5 * d.E_tilde).norm() < 1e-11 * d.E_tilde.norm());
        CHECK(dg.ground_shift == doctest::Approx(2.5 * d.ground_shift).epsilon(1e-11));
        auto rep = check_alpha_properties(d, f);
        CHECK(rep.all_pass());
        CHECK(rep.c <= rep.C);
    }
}

TEST_CASE("commuting pairing lowers the ground energy") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_form(3, rng);
        // Gamma a polynomial in Phi commutes with it
        Vec ev = sym_eig(f.Phi).values;
        f.Gamma = 0.3 * f.Phi - 0.05 * f.Phi * f.Phi / ev.maxCoeff();
        auto d = diagonalize_quadratic(f);
        CHECK(d.ground_shift <= 0.0);
    }
}

TEST_CASE("indefinite forms are rejected with the offending eigenvalue") {
    try {
        diagonalize_quadratic(single(1.0, 2.0));
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("Phi - Gamma") != std::string::npos);
    }
    QuadraticForm f;
    f.Phi = Mat::Identity(2, 2);
    f.Gamma = Mat::Zero(2, 2);
    f.Gamma(0, 1) = 0.5;
    CHECK_THROWS_AS(diagonalize_quadratic(f), ValidationError);
}
