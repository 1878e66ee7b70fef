#pragma once

#include "bogospec/bogo_diag.hpp"
#include "bogospec/gp.hpp"
#include "bogospec/linalg.hpp"
#include "bogospec/operators.hpp"
#include "bogospec/scattering.hpp"

#include <cstdint>
#include <vector>

namespace bogospec {

// Norms of the continuum kernels computed by direct quadrature in R^3, without
// any angular-momentum truncation. With G(x) = int N w_l(N|x-y|) phi0(y)^2 dy,
//   eta(x;y) = phi0(x) phi0(y) [-N w_l(N|x-y|) + G(x) + G(y) + c0],  c0 = -<phi0^2, G>,
// and mu = eta - k keeps only the bracketed G and c0 terms.
struct KernelNorms {
    double hs_k = 0.0, hs_eta = 0.0, hs_mu = 0.0;
    double c0 = 0.0;       // <phi0, k phi0>
    double g_norm = 0.0;   // |k phi0|
    double sup_eta_x = 0.0;  // sup_x |eta_x| / phi0(x)
    double sup_k_x = 0.0;    // sup_x |k_x| / phi0(x)
    double argsup_eta_x = 0.0;
    double pointwise_eta = 0.0;  // sup over sampled pairs of |eta| (|x-y| + 1/N) / (phi0 phi0)
    double pointwise_mu = 0.0;   // sup over sampled pairs of |mu| / (phi0 phi0)
    int pair_samples = 0;
};

struct KernelQuadrature {
    int r_panels = 32;     // Gauss-Legendre panels (8 nodes) over [0, r_max]
    int core_nodes = 24;   // nodes in N|z| on [0, R]
    int outer_nodes = 48;  // nodes in N|z| on [R, N l]
    int angle_nodes = 16;
    int table_points = 1024;
    int sup_points = 256;
    int pair_samples = 4000;
    std::uint64_t seed = 1;
};

KernelNorms kernel_norms(const GPState& state, const ScatteringSolution& scat,
                         const KernelQuadrature& quad = {});

// One angular-momentum block. k, K_full and eta act on the whole channel in
// symmetric coordinates; eta_perp, sigma, gamma and K_N act on range(Q), in the
// coordinates given by the matching ChannelBlock::perp.
struct KernelChannel {
    int l = 0;
    int multiplicity = 1;
    Mat perp;
    Mat k, eta, mu;
    Mat K_full;  // phi0 [N^3 (V f_l)(N .) *] phi0
    Mat eta_perp, sigma, gamma, K_N;
};

struct CorrelationKernels {
    Basis basis;
    int N = 0;
    double ell = 0.0;
    double a0 = 0.0;
    int l_max = 0;
    std::vector<KernelChannel> channels;

    double eta_phi0 = 0.0;           // |eta phi0|
    double hyperbolic_defect = 0.0;  // max |gamma^2 - sigma^2 - I|
    double symmetry_defect = 0.0;    // max over k, eta, mu, sigma, gamma, K_N
    double orthogonality_defect = 0.0;  // max(|Q eta - eta|, |Q K Q - K|) on the condensate block
    double hs_eta_channels = 0.0;    // sum over blocks l <= l_max with multiplicity
    double hs_k_channels = 0.0;
    KernelNorms norms;
};

// Kernels as functions of the channel Laplacians: k = phi0 F(L) phi0 with
// F(p^2) = -N^{-2} w_hat(p/N), K = phi0 Vf_hat(L^{1/2}/N) phi0, both exact
// for the resolved modes. Radial bases only.
CorrelationKernels build_kernels(const GPState& state, const ScatteringSolution& scat, int N, int l_max = 4,
                                 const KernelQuadrature& quad = {});

struct TildeChannel {
    int l = 0;
    int multiplicity = 1;
    Mat Phi, Gamma, D;  // on range(Q)
    double d_identity = 0.0;    // |D - e^{-eta} H e^{-eta}| / |H|
    double sum_identity = 0.0;  // |D + 2 Gamma - e^{eta} (H + 2K) e^{eta}| / |H + 2K|
};

struct TildeForms {
    int N = 0;
    std::vector<TildeChannel> channels;
    double d_identity_residual = 0.0;
    double sum_identity_residual = 0.0;
    double gamma_hs = 0.0;  // channel sum with multiplicity
};

TildeForms assemble_tilde_forms(const CorrelationKernels& kern, const OperatorBundle& bundle);

struct TildeComparison {
    int N = 0;
    std::vector<double> e_tilde, e;  // lowest levels with multiplicity
    std::vector<double> ratios;
    double max_deviation = 0.0;      // max |e~_n / e_n - 1|
    double first_ratio = 0.0;
};

TildeComparison compare_Etilde_E(const TildeForms& forms, const SpectrumResult& spec, int N, int levels = 10);

// Property suite over all blocks: extreme eigenvalue ratios are taken
// across blocks, norms are summed with multiplicity.
PropertyReport tilde_properties(const TildeForms& forms);

// Least-squares slope of log y against log x.
double power_law_exponent(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bogospec
