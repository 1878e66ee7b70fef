#pragma once

#include "bogospec/gp.hpp"
#include "bogospec/operators.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bogospec {

// Gauss-Legendre rule on t in (0, 1) for the s-integrals, mapped by
// s = scale (t / (1 - t))^power.
struct QuadratureSpec {
    int nodes = 128;
    double scale = 10.0;
    int power = 6;
    // Cubic-term nodes whose expansion could lose more than this fraction of the
    // integral to rounding are evaluated directly.
    double rounding_tol = 1e-11;
    void validate() const;
};

struct EBogResult {
    double kappa = 0.0;
    // T1 .. T6, Tcomm, Tcubic in this order, summed over angular blocks with multiplicity.
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;
    int nodes = 0;
    double tail_estimate = 0.0;  // |s-integrals at n nodes - at n/2 nodes|
    int direct_nodes = 0;        // cubic-term nodes evaluated without the resolvent expansion
    double condition = 0.0;      // largest condition number of H_GP + kappa^2 over the blocks
    // Half-trace of the discrete operators with the counterterm, no kappa involved.
    double direct = 0.0;
    double closure_residual = 0.0;  // |total - direct| / |direct|
    std::vector<double> block_totals;

    double term(const std::string& name) const;
};

// Smallest kappa (on a doubling grid from 1/8) with cond(H_GP + kappa^2) <= max_condition.
double kappa_min(const OperatorBundle& bundle, double max_condition = 1e6);

EBogResult ebog_kappa(const OperatorBundle& bundle, double kappa, const QuadratureSpec& quad = {});

struct MollifiedResult {
    std::vector<double> delta, values;
    std::vector<int> orders;  // powers of delta removed by the Richardson fit
    double extrapolated = 0.0;
    double observed_order = 0.0;  // from the three smallest delta values
    bool monotone = true;
    std::string warning;
};

// Gaussian mollifier e^{delta^2 Delta / 2} applied in the eigenbasis of each block Laplacian.
MollifiedResult ebog_mollified(const OperatorBundle& bundle, const std::vector<double>& delta,
                               const std::vector<int>& orders = {2, 3, 4});

struct GroundEnergy {
    double condensate = 0.0;  // N E_GP
    double quartic = 0.0;     // -4 pi a0 |phi0|_4^4
    double bogoliubov = 0.0;
    double total = 0.0;
};

GroundEnergy ground_energy(long N, const GPState& state, double ebog_total);

}  // namespace bogospec
