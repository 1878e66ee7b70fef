#include "bogospec/fock.hpp"

#include "bogospec/errors.hpp"
#include "bogospec/operators.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bogospec {

namespace {
constexpr long kMaxFockDim = 200000;
}  // namespace

long FockBasis::expected_dim(int n_modes, int N_max) {
    // C(N_max + n_modes, n_modes)
    long c = 1;
    for (int i = 1; i <= n_modes; ++i) c = c * (N_max + i) / i;
    return c;
}

FockBasis::FockBasis(int n_modes_, int N_max_) : n_modes(n_modes_), N_max(N_max_) {
    if (n_modes < 1 || n_modes > 3) throw ValidationError("fock basis: 1 to 3 modes supported");
    if (N_max < 0) throw ValidationError("fock basis: N_max must be nonnegative");
    const long d = expected_dim(n_modes, N_max);
    if (d > kMaxFockDim) {
        std::ostringstream msg;
        msg << "fock basis: dimension " << d << " exceeds the limit " << kMaxFockDim;
        throw ResourceError(msg.str());
    }
    const int m1 = n_modes > 1 ? N_max : 0, m2 = n_modes > 2 ? N_max : 0;
    const size_t side = static_cast<size_t>(N_max + 1);
    offsets_.assign(side * side * side, -1);
    for (int a = 0; a <= N_max; ++a)
        for (int b = 0; b <= m1 && a + b <= N_max; ++b)
            for (int c = 0; c <= m2 && a + b + c <= N_max; ++c) {
                offsets_[(a * side + b) * side + c] = static_cast<Eigen::Index>(states.size());
                states.push_back({a, b, c});
            }
}

Eigen::Index FockBasis::index(const std::array<int, 3>& occ) const {
    int total = 0;
    for (int i = 0; i < 3; ++i) {
        if (occ[i] < 0) return -1;
        if (i >= n_modes && occ[i] != 0) return -1;
        total += occ[i];
    }
    if (total > N_max) return -1;
    const size_t side = static_cast<size_t>(N_max + 1);
    return offsets_[(occ[0] * side + occ[1]) * side + occ[2]];
}

FockHamiltonian build_fock_hamiltonian(const QuadraticForm& form, int N_max) {
    const int m = form.n();
    if (m < 1 || m > 3) throw ValidationError("fock hamiltonian: 1 to 3 modes supported");
    FockHamiltonian ham{FockBasis(m, N_max), SpMat()};
    const FockBasis& fb = ham.basis;
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index col = 0; col < fb.dim(); ++col) {
        const auto& n = fb.states[col];
        // number-conserving part
        double diag = 0.0;
        for (int i = 0; i < m; ++i) diag += form.Phi(i, i) * n[i];
        trip.emplace_back(col, col, diag);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j || n[j] == 0 || form.Phi(i, j) == 0.0) continue;
                auto t = n;
                ++t[i];
                --t[j];
                const Eigen::Index row = fb.index(t);
                if (row < 0) continue;
                trip.emplace_back(row, col, form.Phi(i, j) * std::sqrt((n[i] + 1.0) * n[j]));
            }
        // pair creation and its adjoint
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                if (form.Gamma(i, j) == 0.0) continue;
                auto t = n;
                ++t[i];
                ++t[j];
                const Eigen::Index row = fb.index(t);
                if (row < 0) continue;
                const double amp = i == j ? 0.5 * form.Gamma(i, i) * std::sqrt((n[i] + 1.0) * (n[i] + 2.0))
                                          : form.Gamma(i, j) * std::sqrt((n[i] + 1.0) * (n[j] + 1.0));
                trip.emplace_back(row, col, amp);
                trip.emplace_back(col, row, amp);
            }
    }
    ham.H.resize(fb.dim(), fb.dim());
    ham.H.setFromTriplets(trip.begin(), trip.end());
    return ham;
}

std::vector<double> oracle_spectrum(const FockHamiltonian& ham, int k, Eigen::Index dense_limit) {
    const Eigen::Index n = ham.H.rows();
    if (k < 1 || k > n) throw ValidationError("oracle_spectrum: k must lie in [1, dimension]");
    if (n <= dense_limit) {
        Vec e = sym_eig(Mat(ham.H)).values;
        return {e.data(), e.data() + k};
    }
    // Shift below the spectrum using a Gershgorin bound, then subspace iteration on (H - s)^{-1}.
    double lower = 1e300;
    for (Eigen::Index c = 0; c < n; ++c) {
        double d = 0.0, off = 0.0;
        for (SpMat::InnerIterator it(ham.H, c); it; ++it) {
            if (it.row() == c) d = it.value();
            else off += std::abs(it.value());
        }
        lower = std::min(lower, d - off);
    }
    const double shift = lower - 1.0;
    SpMat a = ham.H;
    for (Eigen::Index i = 0; i < n; ++i) a.coeffRef(i, i) -= shift;
    Eigen::SimplicialLDLT<SpMat> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw NumericalError("oracle_spectrum: factorization failed");

    const int p = std::min<Eigen::Index>(n, k + 6);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Mat x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = g(rng);
    Vec prev = Vec::Constant(p, 1e300);
    for (int it = 0; it < 5000; ++it) {
        Eigen::HouseholderQR<Mat> qr(x);
        x = qr.householderQ() * Mat::Identity(n, p);
        const Mat hx = ham.H * x;
        const SymEig rr = sym_eig(x.transpose() * hx);
        x = x * rr.vectors;
        const Vec theta = rr.values;
        const double change = (theta.head(k) - prev.head(k)).cwiseAbs().maxCoeff();
        if (change <= 1e-13 * std::max(1.0, theta.head(k).cwiseAbs().maxCoeff())) {
            return {theta.data(), theta.data() + k};
        }
        prev = theta;
        x = ldlt.solve(x);
    }
    throw NumericalError("oracle_spectrum: subspace iteration did not converge");
}

CertifiedSpectrum certified_spectrum(const QuadraticForm& form, int k, int N_start, double tol) {
    form.validate();
    int N = N_start;
    std::vector<double> cur = oracle_spectrum(build_fock_hamiltonian(form, N), k);
    while (true) {
        if (FockBasis::expected_dim(form.n(), N + 10) > kMaxFockDim) {
            std::ostringstream msg;
            msg << "fock oracle: truncation not converged at N_max = " << N;
            throw NumericalError(msg.str());
        }
        std::vector<double> next = oracle_spectrum(build_fock_hamiltonian(form, N + 10), k);
        double shift = 0.0;
        for (int i = 0; i < k; ++i) shift = std::max(shift, std::abs(next[i] - cur[i]));
        if (shift <= tol) return {next, N + 10, shift};
        cur = std::move(next);
        N += 10;
    }
}

ComparisonReport compare_spectrum(const std::vector<double>& oracle, const BogoliubovDiagonalization& diag, int k) {
    if (oracle.empty() || k < 1 || static_cast<size_t>(k) > oracle.size())
        throw ValidationError("compare_spectrum: k must lie in [1, number of oracle levels]");
    ComparisonReport rep;
    rep.ground_residual = std::abs(oracle[0] - diag.ground_shift);
    for (int i = 1; i < k; ++i) rep.oracle_gaps.push_back(oracle[i] - oracle[0]);
    if (rep.oracle_gaps.empty()) return rep;
    const double zeta = rep.oracle_gaps.back() + 1e-6 * std::max(1.0, rep.oracle_gaps.back());
    const LevelList lv = excitation_levels(bogoliubov_spectrum(diag), zeta);
    for (size_t i = 1; i < lv.levels.size(); ++i)
        for (long m = 0; m < lv.multiplicities[i]; ++m) rep.predicted_gaps.push_back(lv.levels[i]);
    const size_t common = std::min(rep.predicted_gaps.size(), rep.oracle_gaps.size());
    for (size_t i = 0; i < common; ++i)
        rep.gap_distance = std::max(rep.gap_distance, std::abs(rep.predicted_gaps[i] - rep.oracle_gaps[i]));
    // A level missing on one side counts as an unmatched distance.
    if (rep.predicted_gaps.size() < rep.oracle_gaps.size())
        rep.gap_distance = std::max(rep.gap_distance, rep.oracle_gaps.back() - rep.predicted_gaps.back());
    return rep;
}

QuadraticForm random_admissible_form(int n_modes, std::mt19937_64& rng) {
    if (n_modes < 1 || n_modes > 3) throw ValidationError("random form: 1 to 3 modes supported");
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Mat a(n_modes, n_modes), g(n_modes, n_modes);
        for (int i = 0; i < n_modes; ++i)
            for (int j = 0; j < n_modes; ++j) {
                a(i, j) = u(rng);
                g(i, j) = u(rng);
            }
        QuadraticForm f;
        f.Phi = a * a.transpose() + 2.0 * Mat::Identity(n_modes, n_modes);
        f.Gamma = 0.5 * (g + g.transpose());
        const double phi_norm = sym_eig(f.Phi).values.cwiseAbs().maxCoeff();
        if (sym_eig(f.D()).values(0) >= 0.2 * phi_norm && sym_eig(f.Phi + f.Gamma).values(0) > 0.0) return f;
    }
    throw NumericalError("random form: admissibility filter rejected every draw");
}

}  // namespace bogospec
