#include "bogospec/errors.hpp"
#include "bogospec/kernels.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

using namespace bogospec;

namespace {

const double kA0 = 1.0 - std::tanh(std::sqrt(2.0)) / std::sqrt(2.0);

RadialPotential barrier() { return RadialPotential::square_barrier(4.0, 1.0); }

ScatteringSolution neumann(double ell, int N, const RadialPotential& pot = barrier()) {
    RadialGrid g;
    g.r_max = N * ell + 1.0;
    g.n_points = 512;
    return solve_neumann(pot, ell, N, g);
}

const GPState& desk_state(int n) {
    static std::map<int, GPState> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, minimize_gp(TrapPotential::harmonic(), kA0, Basis::make_radial(7.0, n))).first;
    return it->second;
}

}  // namespace

TEST_CASE("kernels vanish without an interaction") {
    const auto& st = desk_state(159);
    const auto zero = neumann(0.2, 50, RadialPotential::zero());
    const auto k = build_kernels(st, zero, 50, 2);
    for (const auto& c : k.channels) {
        CHECK(c.k.cwiseAbs().maxCoeff() == 0.0);
        CHECK(c.eta.cwiseAbs().maxCoeff() == 0.0);
        CHECK(c.K_N.cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(k.norms.hs_eta == 0.0);
}

TEST_CASE("kernel invariants on the desk case") {
    const auto& st = desk_state(159);
    const auto k = build_kernels(st, neumann(0.2, 50), 50, 4);
    CHECK(k.eta_phi0 <= 1e-10);
    CHECK(k.hyperbolic_defect <= 1e-10);
    CHECK(k.symmetry_defect <= 1e-12);
    CHECK(k.orthogonality_defect <= 1e-12);
    for (const auto& c : k.channels) CHECK((c.mu - (c.eta - c.k)).norm() == 0.0);
    CHECK(std::isfinite(k.norms.sup_eta_x));
    CHECK(std::isfinite(k.norms.pointwise_eta));
    CHECK(std::isfinite(k.norms.pointwise_mu));
    CHECK(k.norms.pair_samples > 3000);
}

TEST_CASE("spectral kernels match the real-space quadrature") {
    // phi0 is an s-wave, so k phi0 and <phi0, k phi0> live entirely in the l = 0 block.
    const auto& st = desk_state(119);
    const int N = 25;
    const auto scat = neumann(0.4, N);
    const auto k = build_kernels(st, scat, N, 60);
    const auto& c0 = k.channels[0];
    CHECK(st.v.dot(c0.k * st.v) == doctest::Approx(k.norms.c0).epsilon(1e-6));
    CHECK((c0.k * st.v).norm() == doctest::Approx(k.norms.g_norm).epsilon(1e-6));

    // The angular sum converges to the full Hilbert-Schmidt norm from below.
    CHECK(k.hs_k_channels < k.norms.hs_k);
    CHECK(k.hs_k_channels > 0.995 * k.norms.hs_k);

    // <phi0, K phi0> -> int V f_l * int phi0^4 up to curvature of phi0 on the scale 1/N.
    const double pred = 8.0 * std::numbers::pi * kA0 * (1.0 + 1.5 * kA0 / (N * 0.4)) * st.norm4;
    CHECK(st.v.dot(c0.K_full * st.v) == doctest::Approx(pred).epsilon(5e-3));
}

TEST_CASE("eta norm scales like the square root of ell") {
    const auto& st = desk_state(159);
    std::vector<double> ratio;
    for (double ell : {0.1, 0.2, 0.4}) {
        const auto kn = kernel_norms(st, neumann(ell, 50));
        ratio.push_back(kn.hs_eta / std::sqrt(ell));
        CHECK(kn.hs_mu < kn.hs_eta);
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*hi / *lo <= 1.25);
}

TEST_CASE("pointwise kernel bounds are stable under refinement") {
    const auto scat = neumann(0.2, 50);
    const auto a = kernel_norms(desk_state(159), scat);
    const auto b = kernel_norms(desk_state(279), scat);
    CHECK(b.sup_eta_x == doctest::Approx(a.sup_eta_x).epsilon(1e-3));
    CHECK(b.pointwise_mu == doctest::Approx(a.pointwise_mu).epsilon(1e-3));
    CHECK(b.pointwise_eta == doctest::Approx(a.pointwise_eta).epsilon(1e-3));
    CHECK(b.hs_eta == doctest::Approx(a.hs_eta).epsilon(1e-4));
}

TEST_CASE("tilde forms satisfy the exponential identities") {
    const auto& st = desk_state(159);
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 4);
    const auto k = build_kernels(st, neumann(0.2, 50), 50, 4);
    const auto tf = assemble_tilde_forms(k, bundle);
    CHECK(tf.d_identity_residual <= 1e-8);
    CHECK(tf.sum_identity_residual <= 1e-8);
    for (const auto& t : tf.channels) {
        CHECK(symmetry_defect(t.Phi) <= 1e-12 * t.Phi.cwiseAbs().maxCoeff());
        CHECK(symmetry_defect(t.Gamma) <= 1e-12 * t.Phi.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("vanishing eta reduces the tilde forms to H and K") {
    const auto& st = desk_state(159);
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 2);
    auto k = build_kernels(st, neumann(0.2, 50), 50, 2);
    for (auto& c : k.channels) {
        const auto m = c.eta_perp.rows();
        c.eta_perp.setZero();
        c.sigma.setZero();
        c.gamma.setIdentity(m, m);
    }
    const auto tf = assemble_tilde_forms(k, bundle);
    for (size_t i = 0; i < tf.channels.size(); ++i) {
        const auto& t = tf.channels[i];
        const auto& c = k.channels[i];
        const Mat& H = bundle.channels[i].H_perp;
        CHECK((t.D - H).norm() <= 1e-12 * H.norm());
        CHECK((t.Gamma - c.K_N).norm() <= 1e-12 * H.norm());
    }
}

TEST_CASE("E tilde approaches E with a rate close to 1/N") {
    const auto& st = desk_state(159);
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 4);
    const auto spec = assemble_E(bundle);
    std::vector<double> Ns, dev, gamma_hs;
    for (int N : {25, 50, 100}) {
        const auto k = build_kernels(st, neumann(0.2, N), N, 4);
        const auto tf = assemble_tilde_forms(k, bundle);
        const auto cmp = compare_Etilde_E(tf, spec, N);
        REQUIRE(cmp.ratios.size() == 10);
        Ns.push_back(N);
        dev.push_back(cmp.max_deviation);
        gamma_hs.push_back(tf.gamma_hs);
        if (N == 100) CHECK(std::abs(cmp.first_ratio - 1.0) <= 5.0 / N);
        if (N == 25) {
            const auto pr = tilde_properties(tf);
            CHECK(pr.all_pass());
            CHECK(pr.C / pr.c <= 10.0);
        }
    }
    CHECK(dev[0] > dev[1]);
    CHECK(dev[1] > dev[2]);
    CHECK(power_law_exponent(Ns, dev) <= -0.8);
    const auto [lo, hi] = std::minmax_element(gamma_hs.begin(), gamma_hs.end());
    CHECK(*hi / *lo <= 1.3);
}

TEST_CASE("E tilde equals E without interaction") {
    const auto st = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(7.0, 119));
    const auto bundle = assemble_hgp(st, TrapPotential::harmonic(), 2);
    const auto spec = assemble_E(bundle);
    const auto k = build_kernels(st, neumann(0.2, 50, RadialPotential::zero()), 50, 2);
    const auto cmp = compare_Etilde_E(assemble_tilde_forms(k, bundle), spec, 50);
    CHECK(cmp.max_deviation <= 1e-10);  // equal up to rounding along two eigensolver paths
}

TEST_CASE("kernel preconditions") {
    const auto& st = desk_state(159);
    const auto scat = neumann(0.2, 50);
    CHECK_THROWS_AS(build_kernels(st, scat, 40), ValidationError);  // N mismatch

    RadialGrid g;
    g.r_max = 20.0;
    CHECK_THROWS_AS(build_kernels(st, solve_zero_energy(barrier(), g), 50), ValidationError);

    const auto cart = minimize_gp(TrapPotential::none(), 0.1,
                                  Basis::make_cartesian(6, 0.5, CartesianBasis::Boundary::Periodic));
    CHECK_THROWS_AS(build_kernels(cart, scat, 50), ValidationError);

    TildeForms bad;
    TildeChannel t;
    t.Phi = -Mat::Identity(3, 3);
    t.Gamma = Mat::Zero(3, 3);
    t.D = t.Phi;
    bad.channels.push_back(t);
    SpectrumResult spec;
    spec.eigenvalues = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(compare_Etilde_E(bad, spec, 50), ValidationError);
}

TEST_CASE("power law fit recovers the exponent") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
    CHECK(power_law_exponent(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
}
