#pragma once

#include "bogospec/gp.hpp"
#include "bogospec/linalg.hpp"

#include <vector>

namespace bogospec {

// One angular-momentum block of the discretized operators (a single block for
// cartesian bases). The condensate lives in channel 0, where `perp` spans the
// orthogonal complement of phi0; for every other channel `perp` is the identity.
struct ChannelBlock {
    int l = 0;
    int multiplicity = 1;
    Mat L;       // -Delta
    Mat H;       // H_GP = L + V_ext + 8 pi a0 phi0^2 - eps_GP
    Mat perp;    // orthonormal columns spanning range(Q) within the block
    Mat H_perp;  // perp^T H perp
    Vec rho_diag;  // phi0^2
};

struct OperatorBundle {
    Basis basis;
    double a0 = 0.0;
    double eps_GP = 0.0;
    int l_max = 0;
    Vec v, phi, rho, Vext_diag;
    Mat Q;  // I - v v^T on the condensate block
    std::vector<ChannelBlock> channels;

    double hgp_phi_residual = 0.0;  // |H_GP phi0|
    double symmetry_defect = 0.0;
    double q_defect = 0.0;          // max(|Q^2 - Q|, |Q - Q^T|)
    double min_perp_eigenvalue = 0.0;

    size_t dim_perp() const;
};

// Radial bases get blocks l = 0..l_max; cartesian bases (n^3 <= 4096) a single block.
OperatorBundle assemble_hgp(const GPState& state, const TrapPotential& trap, int l_max = 4);

struct SpectrumResult {
    std::vector<double> eigenvalues;      // E on range(Q), full multiplicity, ascending
    std::vector<double> hgp_eigenvalues;  // H_GP on range(Q), same layout
    std::vector<int> channel;             // angular momentum of each eigenvalue
    double phi0_residual = 0.0;           // |M phi0| / |M| before restricting to range(Q)
    bool positive = true;
    bool dominates = true;  // e_j >= j-th eigenvalue of H_GP|Q after sorting
};

// E = (H^{1/2} (H + 16 pi a0 phi0^2) H^{1/2})^{1/2} on range(Q), channel by channel.
SpectrumResult assemble_E(const OperatorBundle& bundle);

// Eigenvalues of E from symmetric H (positive definite) and the diagonal of phi0^2.
Vec excitation_spectrum(const Mat& H, const Mat& K2);

struct LevelList {
    std::vector<double> levels;         // distinct sums of n_i e_i <= zeta, ascending, with 0
    std::vector<long> multiplicities;   // number of occupation vectors behind each level
};

LevelList excitation_levels(const std::vector<double>& eigs, double zeta);

}  // namespace bogospec
