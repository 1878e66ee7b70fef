#include "bogospec/operators.hpp"

#include "bogospec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace bogospec {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Eigen::Index kMaxDense = 4096;
}  // namespace

size_t OperatorBundle::dim_perp() const {
    size_t n = 0;
    for (const auto& c : channels) n += static_cast<size_t>(c.perp.cols()) * c.multiplicity;
    return n;
}

OperatorBundle assemble_hgp(const GPState& state, const TrapPotential& trap, int l_max) {
    const Vec vext = trap_on_nodes(trap, state.basis);
    const Vec vstate = trap_on_nodes(state.trap, state.basis);
    if ((vext - vstate).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + vstate.cwiseAbs().maxCoeff()))
        throw ValidationError("assemble_hgp: trap does not match the one the state was solved with");
    if (state.basis.dim() > kMaxDense) {
        std::ostringstream msg;
        msg << "assemble_hgp: dimension " << state.basis.dim() << " exceeds the dense limit " << kMaxDense;
        throw ResourceError(msg.str());
    }
    if (l_max < 0) throw ValidationError("assemble_hgp: l_max must be nonnegative");

    OperatorBundle b;
    b.basis = state.basis;
    b.a0 = state.a0;
    b.eps_GP = state.eps_GP;
    b.v = state.v;
    b.phi = state.phi;
    b.rho = state.rho();
    b.Vext_diag = vext;
    const Eigen::Index n = b.v.size();
    b.Q = Mat::Identity(n, n) - b.v * b.v.transpose();
    const Mat P = complement_basis(b.v);
    const double g = 8.0 * kPi * b.a0;

    const bool radial = state.basis.kind == Basis::Kind::Radial;
    b.l_max = radial ? l_max : 0;
    for (int l = 0; l <= b.l_max; ++l) {
        ChannelBlock c;
        c.l = l;
        c.multiplicity = radial ? 2 * l + 1 : 1;
        c.L = radial ? state.basis.radial.laplacian(l) : Mat(state.basis.cartesian.laplacian());
        c.H = c.L;
        c.H.diagonal() += vext + g * b.rho - b.eps_GP * Vec::Ones(n);
        c.rho_diag = b.rho;
        c.perp = l == 0 ? P : Mat::Identity(n, n);
        c.H_perp = c.perp.transpose() * c.H * c.perp;
        c.H_perp = 0.5 * (c.H_perp + c.H_perp.transpose());
        b.symmetry_defect = std::max(b.symmetry_defect, symmetry_defect(c.H));
        if (l == 0) b.hgp_phi_residual = (c.H * b.v).norm();
        const double lo = sym_eig(c.H_perp).values(0);
        b.min_perp_eigenvalue = l == 0 ? lo : std::min(b.min_perp_eigenvalue, lo);
        b.channels.push_back(std::move(c));
    }
    b.q_defect = std::max((b.Q * b.Q - b.Q).cwiseAbs().maxCoeff(), symmetry_defect(b.Q));
    return b;
}

Vec excitation_spectrum(const Mat& H, const Mat& K2) {
    SymEig eh = sym_eig(H);
    if (eh.values(0) <= 0.0) {
        std::ostringstream msg;
        msg << "excitation operator: H_GP on range(Q) is not positive definite, smallest eigenvalue "
            << eh.values(0);
        throw NumericalError(msg.str());
    }
    const Mat hs = apply_fn(eh, [](double x) { return std::sqrt(x); });
    Mat m = hs * (H + K2) * hs;
    m = 0.5 * (m + m.transpose());
    Vec e = sym_eig(m).values;
    if (e(0) <= 0.0) {
        std::ostringstream msg;
        msg << "excitation operator: E^2 lost positivity, smallest eigenvalue " << e(0);
        throw NumericalError(msg.str());
    }
    return e.cwiseSqrt();
}

SpectrumResult assemble_E(const OperatorBundle& b) {
    SpectrumResult out;
    const double g2 = 16.0 * kPi * b.a0;
    std::vector<std::pair<double, int>> e_all;
    std::vector<double> h_all;
    for (const auto& c : b.channels) {
        const Mat K2 = c.perp.transpose() * (g2 * c.rho_diag).asDiagonal() * c.perp;
        const Vec e = excitation_spectrum(c.H_perp, K2);
        const Vec h = sym_eig(c.H_perp).values;
        for (Eigen::Index i = 0; i < e.size(); ++i)
            for (int m = 0; m < c.multiplicity; ++m) {
                e_all.emplace_back(e(i), c.l);
                h_all.push_back(h(i));
            }
        if (c.l == 0) {
            // Before restriction: H^{1/2}(H + 16 pi a0 phi0^2)H^{1/2} still annihilates phi0.
            // Relative to |M| <= |H| |H + 16 pi a0 phi0^2|: the square root of the zero mode
            // leaves an absolute floor near sqrt(eps |H|) |H|.
            const SymEig eh = sym_eig(c.H);
            const Mat hs = apply_fn(eh, [](double x) { return std::sqrt(std::max(x, 0.0)); });
            Mat full = c.H;
            full.diagonal() += g2 * c.rho_diag;
            const double hmax = eh.values.cwiseAbs().maxCoeff();
            const double scale = hmax * (hmax + g2 * c.rho_diag.maxCoeff());
            out.phi0_residual = (hs * full * hs * b.v).norm() / scale;
        }
    }
    std::sort(e_all.begin(), e_all.end());
    std::sort(h_all.begin(), h_all.end());
    for (const auto& [e, l] : e_all) {
        out.eigenvalues.push_back(e);
        out.channel.push_back(l);
        if (!(e > 0.0)) out.positive = false;
    }
    out.hgp_eigenvalues = h_all;
    for (size_t i = 0; i < h_all.size(); ++i)
        if (out.eigenvalues[i] < h_all[i] - 1e-10 * std::max(1.0, h_all[i])) out.dominates = false;
    return out;
}

LevelList excitation_levels(const std::vector<double>& eigs, double zeta) {
    if (!(zeta > 0.0)) throw ValidationError("excitation_levels: zeta must be positive");
    for (size_t i = 0; i < eigs.size(); ++i) {
        if (!(eigs[i] > 0.0)) throw ValidationError("excitation_levels: eigenvalues must be positive");
        if (i > 0 && eigs[i] < eigs[i - 1]) throw ValidationError("excitation_levels: eigenvalues must ascend");
    }
    const double tol = 1e-9 * std::max(1.0, zeta);
    std::vector<double> e;
    for (double x : eigs)
        if (x <= zeta + tol) e.push_back(x);

    // Depth-first over occupation vectors with nondecreasing mode index.
    std::vector<double> sums;
    long visited = 0;
    auto dfs = [&](auto&& self, size_t start, double total) -> void {
        if (++visited > 1'000'000) throw NumericalError("excitation_levels: more than 10^6 occupation vectors");
        sums.push_back(total);
        for (size_t i = start; i < e.size(); ++i) {
            if (total + e[i] > zeta + tol) break;
            self(self, i, total + e[i]);
        }
    };
    dfs(dfs, 0, 0.0);
    std::sort(sums.begin(), sums.end());

    LevelList out;
    for (double s : sums) {
        if (!out.levels.empty() && std::abs(s - out.levels.back()) <= tol) {
            ++out.multiplicities.back();
        } else {
            out.levels.push_back(s);
            out.multiplicities.push_back(1);
        }
    }
    return out;
}

}  // namespace bogospec
