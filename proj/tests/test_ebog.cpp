#include "bogospec/ebog.hpp"
#include "bogospec/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace bogospec;

namespace {

const double kA0 = 1.0 - std::tanh(std::sqrt(2.0)) / std::sqrt(2.0);

const OperatorBundle& desk_bundle(int n) {
    static std::map<int, OperatorBundle> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        const auto st = minimize_gp(TrapPotential::harmonic(), kA0, Basis::make_radial(7.0, n));
        it = cache.emplace(n, assemble_hgp(st, TrapPotential::harmonic(), 4)).first;
    }
    return it->second;
}

const EBogResult& desk_kappa5() {
    static const EBogResult r = ebog_kappa(desk_bundle(159), 5.0);
    return r;
}

}  // namespace

TEST_CASE("both routes vanish without an interaction") {
    const auto st = minimize_gp(TrapPotential::harmonic(), 0.0, Basis::make_radial(7.0, 119));
    const auto b = assemble_hgp(st, TrapPotential::harmonic(), 2);
    const auto r = ebog_kappa(b, 5.0);
    REQUIRE(r.terms.size() == 8);
    for (const auto& [name, v] : r.terms) CHECK(v == 0.0);
    CHECK(r.total == 0.0);
    const auto m = ebog_mollified(b, {0.8, 0.4, 0.2});
    for (double v : m.values) CHECK(v == 0.0);
    CHECK(m.extrapolated == 0.0);
}

TEST_CASE("kappa route is independent of kappa") {
    const auto& b = desk_bundle(159);
    const auto& r = desk_kappa5();
    for (double k : {7.5, 10.0}) {
        const auto r2 = ebog_kappa(b, k);
        CHECK(std::abs(r2.total - r.total) <= 1e-9 * std::abs(r.total));
        // the split between terms does move with kappa
        CHECK(std::abs(r2.term("T1") - r.term("T1")) > 1e-3);
    }
}

TEST_CASE("kappa route closes against the direct half-trace") {
    const auto& r = desk_kappa5();
    CHECK(r.closure_residual <= 1e-7);
    CHECK(r.tail_estimate <= 1e-8 * std::abs(r.term("Tcomm") + r.term("Tcubic")));
    CHECK(r.condition <= 1e6);
    double sum = 0.0;
    for (const auto& [name, v] : r.terms) {
        CHECK(std::isfinite(v));
        sum += v;
    }
    CHECK(sum == doctest::Approx(r.total).epsilon(1e-14));
}

TEST_CASE("kappa route term signs") {
    const auto& r = desk_kappa5();
    CHECK(r.term("T1") >= 0.0);
    CHECK(r.term("T3") >= 0.0);
    CHECK(r.term("T5") >= 0.0);
    CHECK(r.term("T6") <= 0.0);
    CHECK(r.term("Tcubic") >= 0.0);
    // The commutator term is minus the discrete gradient term: [[L, phi0], phi0] = -2 |grad phi0|^2.
    CHECK(r.term("T2") <= 0.0);
    CHECK(r.term("T2") + r.term("T3") == doctest::Approx(0.0).epsilon(1e-12).scale(r.term("T3")));
    CHECK_THROWS_AS(r.term("T7"), ValidationError);
}

TEST_CASE("s-integrals converge in the node count") {
    const auto& b = desk_bundle(159);
    const auto& r = desk_kappa5();
    QuadratureSpec q;
    q.nodes = 64;
    const auto r64 = ebog_kappa(b, 5.0, q);
    CHECK(r64.term("Tcomm") == doctest::Approx(r.term("Tcomm")).epsilon(1e-6));
    CHECK(r64.term("Tcubic") == doctest::Approx(r.term("Tcubic")).epsilon(1e-6));
    CHECK(r64.term("T1") == r.term("T1"));
}

TEST_CASE("mollified route approaches the kappa route") {
    const auto& b = desk_bundle(279);
    const auto r = ebog_kappa(b, 5.0);
    const auto m = ebog_mollified(b, {0.4, 0.2, 0.1, 0.05});
    REQUIRE(m.values.size() == 4);
    CHECK(m.orders == std::vector<int>{2, 3, 4});
    CHECK(std::abs(m.extrapolated - r.total) <= 1e-3 * std::abs(r.total));
    // the raw values have not converged yet; only the extrapolation is close
    CHECK(std::abs(m.values.back() - r.total) > 1e-2 * std::abs(r.total));
    // the first step rises, so the sequence is flagged
    CHECK_FALSE(m.monotone);
    CHECK_FALSE(m.warning.empty());
}

TEST_CASE("kappa preconditions") {
    const auto& b = desk_bundle(159);
    const double kmin = kappa_min(b);
    CHECK(kmin > 0.0);
    CHECK_NOTHROW(ebog_kappa(b, kmin, {.nodes = 16}));
    CHECK_THROWS_AS(ebog_kappa(b, 0.01), NumericalError);
    CHECK_THROWS_AS(ebog_kappa(b, -1.0), ValidationError);
    CHECK_THROWS_AS(ebog_kappa(b, 5.0, {.nodes = 4}), ValidationError);
    CHECK_THROWS_AS(ebog_kappa(b, 5.0, {.scale = 0.0}), ValidationError);

    const auto cart = minimize_gp(TrapPotential::none(), 0.1,
                                  Basis::make_cartesian(6, 0.5, CartesianBasis::Boundary::Periodic));
    const auto pb = assemble_hgp(cart, TrapPotential::none());
    CHECK_THROWS_AS(ebog_kappa(pb, 5.0), ValidationError);
    CHECK_THROWS_AS(ebog_mollified(pb, {0.4}), ValidationError);
}

TEST_CASE("mollifier preconditions") {
    const auto& b = desk_bundle(159);
    const double h = b.basis.spacing();
    CHECK_THROWS_AS(ebog_mollified(b, {0.4, 1.5 * h}), ValidationError);
    CHECK_THROWS_AS(ebog_mollified(b, {0.2, 0.4}), ValidationError);
    CHECK_THROWS_AS(ebog_mollified(b, {}), ValidationError);
    CHECK_THROWS_AS(ebog_mollified(b, {0.4, 0.2}, {0}), ValidationError);
}

TEST_CASE("ground energy is plain composition") {
    GPState free;
    free.E_GP = 3.0;
    free.norm4 = 0.25;
    CHECK(ground_energy(100, free, 0.0).total == 300.0);

    GPState st;
    st.a0 = kA0;
    st.E_GP = 3.26508;
    st.norm4 = 0.0713;
    const auto e = ground_energy(100, st, 0.0642);
    CHECK(e.condensate == doctest::Approx(326.508));
    CHECK(e.quartic == doctest::Approx(-4.0 * std::numbers::pi * kA0 * 0.0713));
    CHECK(e.total == e.condensate + e.quartic + e.bogoliubov);
    const double slope = (ground_energy(200, st, 0.0642).total - e.total) / 100.0;
    CHECK(std::abs(slope - st.E_GP) <= 1e-12);
}
