#pragma once

#include "bogospec/basis.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace bogospec {

struct TrapPotential {
    enum class Kind { Harmonic, Polynomial, Tabulated, None };

    Kind kind = Kind::Harmonic;
    double coefficient = 1.0;                    // harmonic: V = c |S x|^2
    std::vector<double> poly;                    // polynomial: V = sum_k poly[k] |S x|^k
    std::vector<double> table_r, table_v;        // tabulated radial profile, linear interpolation
    std::array<double, 3> axis_scale{1.0, 1.0, 1.0};  // S = diag(axis_scale)
    double floor = 0.0;  // required minimum of V on the box boundary for trapping kinds

    static TrapPotential harmonic(double c = 1.0);
    static TrapPotential polynomial(std::vector<double> coeffs);
    static TrapPotential tabulated(std::vector<double> r, std::vector<double> v);
    static TrapPotential none();

    double operator()(double x, double y, double z) const;
    double radial(double r) const;  // only meaningful for isotropic traps
    bool isotropic() const;
    // Oscillator length of the quadratic part, or 0 if there is none.
    double length_scale() const;
    void validate() const;
};

Vec trap_on_nodes(const TrapPotential& trap, const Basis& basis);

struct SolverOptions {
    double tol = 1e-10;         // Euler-Lagrange residual target
    double energy_tol = 1e-12;  // energy change over the last 10 iterations
    int max_iter = 20000;
    double tau0 = 0.5;
    std::optional<std::uint64_t> seed;  // random positive start instead of a Gaussian
    bool auto_expand = true;
    double boundary_tol = 1e-10;
    double min_nodes_per_length = 8.0;  // resolution required across one oscillator length
};

struct GPState {
    Basis basis;
    TrapPotential trap;
    double a0 = 0.0;
    Vec v;    // symmetric coordinates, unit Euclidean norm
    Vec phi;  // nodal values
    double E_GP = 0.0;
    double eps_GP = 0.0;
    double norm4 = 0.0;  // integral of phi^4
    double residual = 0.0;
    double boundary_value = 0.0;
    double min_phi = 0.0;
    int iterations = 0;
    int rejected_steps = 0;
    double max_energy_increase = 0.0;  // over accepted steps
    bool expanded = false;

    Vec rho() const;  // phi^2 on the nodes
};

GPState minimize_gp(const TrapPotential& trap, double a0, const Basis& basis,
                    const SolverOptions& opts = {});

// int |grad phi|^2 + V phi^2 + 4 pi a0 phi^4 with the basis quadrature; phi are nodal values.
double gp_energy(const Vec& phi, const Basis& basis, const TrapPotential& trap, double a0);

struct DecayReport {
    std::vector<double> nu;
    std::vector<double> C_phi, C_grad, C_lap;  // sup over the resolved region of |.| e^{nu |x|}
    std::vector<double> argmax_phi;            // radius where C_phi is attained
    double fourier_C = 0.0;                    // sup |phi_hat(p)| (1 + p)^3, p <= p_max
    double p_max = 0.0;
    double boundary_value = 0.0;
};

DecayReport check_decay(const GPState& state, const std::vector<double>& nu_list);

}  // namespace bogospec
