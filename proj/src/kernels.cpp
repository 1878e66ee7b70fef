#include "bogospec/kernels.hpp"

#include "bogospec/errors.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace bogospec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Eigen::Index kMaxKernelDim = 3000;

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

// Radial profile on [0, r_max], zero beyond.
class Profile {
public:
    Profile(std::vector<double> values, double r_max, double left_slope)
        : r_max_(r_max),
          spline_(values.begin(), values.end(), 0.0, r_max / (values.size() - 1), left_slope) {}

    double operator()(double r) const { return r >= r_max_ ? 0.0 : spline_(r); }

private:
    double r_max_;
    Spline spline_;
};

std::vector<double> uniform(double a, double b, int intervals) {
    std::vector<double> x(intervals + 1);
    for (int i = 0; i <= intervals; ++i) x[i] = a + (b - a) * i / intervals;
    return x;
}

// Convolution with the scattering profile, evaluated at radius r for radial f:
//   C[f](r) = int m(|z|) f(|x + z|) dz,  |x| = r,
// where m(s) = N w(N s) (first moment) or N^2 w(N s)^2 (second moment).
class Convolver {
public:
    Convolver(const ScatteringSolution& scat, const KernelQuadrature& quad) {
        const auto& nb = *scat.neumann;
        const double N = nb.N;
        const double R = std::min(scat.potential.support(), nb.ellN);
        auto add = [&](int n, double a, double b) {
            if (!(b > a) || n <= 0) return;
            std::vector<double> x, w;
            gauss_legendre(n, a, b, x, w);
            for (int i = 0; i < n; ++i) {
                const double t = x[i], wt = scat.w_at(t);
                s_.push_back(t / N);
                // dz = 4 pi s^2 ds with s = t / N
                w1_.push_back(w[i] * 4.0 * kPi * t * t * wt / (N * N));
                w2_.push_back(w[i] * 4.0 * kPi * t * t * wt * wt / N);
            }
        };
        add(quad.core_nodes, 0.0, R);
        add(quad.outer_nodes, R, nb.ellN);
        gauss_legendre(quad.angle_nodes, u_, uw_);
    }

    template <class F>
    double first(const F& f, double r) const { return apply(f, r, w1_); }

    template <class F>
    double second(const F& f, double r) const { return apply(f, r, w2_); }

private:
    template <class F>
    double apply(const F& f, double r, const std::vector<double>& weights) const {
        double acc = 0.0;
        for (size_t j = 0; j < s_.size(); ++j) {
            if (weights[j] == 0.0) continue;
            const double s = s_[j];
            double avg = 0.0;
            for (size_t k = 0; k < u_.size(); ++k)
                avg += uw_[k] * f(std::sqrt(std::max(r * r + s * s + 2.0 * r * s * u_[k], 0.0)));
            acc += weights[j] * 0.5 * avg;
        }
        return acc;
    }

    std::vector<double> s_, w1_, w2_, u_, uw_;
};

void require_radial_neumann(const GPState& state, const ScatteringSolution& scat, const char* who) {
    if (state.basis.kind != Basis::Kind::Radial) {
        std::ostringstream msg;
        msg << who << ": correlation kernels require a radial basis";
        throw ValidationError(msg.str());
    }
    if (!scat.neumann) {
        std::ostringstream msg;
        msg << who << ": scattering solution has no Neumann block";
        throw ValidationError(msg.str());
    }
}

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

KernelNorms kernel_norms(const GPState& state, const ScatteringSolution& scat, const KernelQuadrature& quad) {
    require_radial_neumann(state, scat, "kernel_norms");
    KernelNorms out;
    if (scat.potential.is_zero()) return out;

    const RadialBasis& rb = state.basis.radial;
    const double r_max = rb.r_max;
    const double N = scat.neumann->N;
    const std::vector<double> grid = uniform(0.0, r_max, quad.table_points);
    const Profile phi(rb.values(state.v, grid), r_max, 0.0);
    const Convolver conv(scat, quad);

    // G = C[phi^2] and g = k phi0 = -phi0 G, tabulated for reuse inside further convolutions.
    std::vector<double> G_tab(grid.size()), g_tab(grid.size());
    auto phi2 = [&](double r) { double p = phi(r); return p * p; };
    for (size_t i = 0; i < grid.size(); ++i) {
        G_tab[i] = conv.first(phi2, grid[i]);
        g_tab[i] = -phi(grid[i]) * G_tab[i];
    }
    const Profile G(G_tab, r_max, 0.0);
    const Profile g(g_tab, r_max, 0.0);
    auto phig = [&](double r) { return phi(r) * g(r); };

    // Radial integrals: c0 = -int phi^2 G, |g|^2 = int phi^2 G^2, |k|^2 = int phi^2 C2[phi^2].
    std::vector<double> x8, w8;
    gauss_legendre(8, x8, w8);
    double c0 = 0.0, g2 = 0.0, k2 = 0.0;
    const double pw = r_max / quad.r_panels;
    for (int p = 0; p < quad.r_panels; ++p) {
        const double m = (p + 0.5) * pw, h = 0.5 * pw;
        for (int k = 0; k < 8; ++k) {
            const double r = m + h * x8[k];
            const double wr = w8[k] * h * 4.0 * kPi * r * r;
            const double p2 = phi2(r), Gr = conv.first(phi2, r);
            c0 -= wr * p2 * Gr;
            g2 += wr * p2 * Gr * Gr;
            k2 += wr * p2 * conv.second(phi2, r);
        }
    }
    out.c0 = c0;
    out.g_norm = std::sqrt(g2);
    out.hs_k = std::sqrt(k2);
    out.hs_eta = std::sqrt(std::max(k2 - 2.0 * g2 + c0 * c0, 0.0));
    out.hs_mu = std::sqrt(std::max(2.0 * g2 - c0 * c0, 0.0));

    // |eta_x|^2 / phi0(x)^2 = C2[phi^2] + a^2 + |g|^2 - 2 a G + 2 C[phi g] - 2 a c0, a = c0 + G(x).
    for (double r : uniform(0.0, r_max, quad.sup_points)) {
        if (r >= r_max) continue;
        const double Gr = G(r), a = c0 + Gr, c2 = conv.second(phi2, r);
        const double e2 = c2 + a * a + g2 - 2.0 * a * Gr + 2.0 * conv.first(phig, r) - 2.0 * a * c0;
        const double e = std::sqrt(std::max(e2, 0.0));
        if (e > out.sup_eta_x) {
            out.sup_eta_x = e;
            out.argsup_eta_x = r;
        }
        out.sup_k_x = std::max(out.sup_k_x, std::sqrt(std::max(c2, 0.0)));
    }

    // Random pairs, half of them within 2 l of each other to probe the singular part.
    const double phi_0 = phi(0.0);
    double ball = r_max;
    for (double r : grid)
        if (std::abs(phi(r)) >= 1e-6 * std::abs(phi_0)) ball = r;
    std::mt19937_64 rng(quad.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto direction = [&]() {
        std::array<double, 3> d{gauss(rng), gauss(rng), gauss(rng)};
        const double nrm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        for (double& c : d) c /= nrm;
        return d;
    };
    auto in_ball = [&]() {
        auto d = direction();
        const double r = ball * std::cbrt(uni(rng));
        for (double& c : d) c *= r;
        return d;
    };
    const double ell = scat.neumann->ell;
    for (int s = 0; s < quad.pair_samples; ++s) {
        const auto x = in_ball();
        std::array<double, 3> y;
        if (s % 2 == 0) {
            const auto d = direction();
            const double len = 2.0 * ell * uni(rng);
            for (int i = 0; i < 3; ++i) y[i] = x[i] + len * d[i];
        } else {
            y = in_ball();
        }
        const double rx = std::hypot(x[0], x[1], x[2]), ry = std::hypot(y[0], y[1], y[2]);
        if (ry >= r_max) continue;
        const double dist = std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
        const double mu = G(rx) + G(ry) + c0;
        const double eta = -N * scat.w_at(N * dist) + mu;
        out.pointwise_eta = std::max(out.pointwise_eta, std::abs(eta) * (dist + 1.0 / N));
        out.pointwise_mu = std::max(out.pointwise_mu, std::abs(mu));
        ++out.pair_samples;
    }
    return out;
}

CorrelationKernels build_kernels(const GPState& state, const ScatteringSolution& scat, int N, int l_max,
                                 const KernelQuadrature& quad) {
    require_radial_neumann(state, scat, "build_kernels");
    if (scat.neumann->N != N) {
        std::ostringstream msg;
        msg << "build_kernels: Neumann block was solved for N = " << scat.neumann->N << ", not " << N;
        throw ValidationError(msg.str());
    }
    if (state.basis.dim() > kMaxKernelDim) {
        std::ostringstream msg;
        msg << "build_kernels: dimension " << state.basis.dim() << " exceeds the dense kernel limit "
            << kMaxKernelDim;
        throw ResourceError(msg.str());
    }
    if (l_max < 0) throw ValidationError("build_kernels: l_max must be nonnegative");

    CorrelationKernels out;
    out.basis = state.basis;
    out.N = N;
    out.ell = scat.neumann->ell;
    out.a0 = state.a0;
    out.l_max = l_max;

    const RadialBasis& rb = state.basis.radial;
    const Eigen::Index n = rb.n;
    const Vec& v = state.v;
    const auto phi = state.phi.asDiagonal();
    const Mat Q = Mat::Identity(n, n) - v * v.transpose();
    const Mat P = complement_basis(v);
    double hs_eta2 = 0.0, hs_k2 = 0.0;

    for (int l = 0; l <= l_max; ++l) {
        KernelChannel c;
        c.l = l;
        c.multiplicity = 2 * l + 1;
        const SymEig el = sym_eig(rb.laplacian(l));
        std::vector<double> q(n);
        for (Eigen::Index i = 0; i < n; ++i) q[i] = std::sqrt(std::max(el.values(i), 0.0)) / N;
        const std::vector<double> wh = w_hat_angular(scat, q), vh = Vf_hat_angular(scat, q);
        Vec fk(n), fv(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            fk(i) = -wh[i] / (double(N) * N);
            fv(i) = vh[i];
        }
        const Mat& Z = el.vectors;
        Mat k = phi * (Z * fk.asDiagonal() * Z.transpose()) * phi;
        Mat K = phi * (Z * fv.asDiagonal() * Z.transpose()) * phi;
        c.k = 0.5 * (k + k.transpose());
        c.K_full = 0.5 * (K + K.transpose());

        if (l == 0) {
            c.perp = P;
            c.eta = Q * c.k * Q;
            out.eta_phi0 = (c.eta * v).norm();
            const Mat KQ = Q * c.K_full * Q;
            out.orthogonality_defect = std::max(max_abs(Q * c.eta - c.eta), max_abs(Q * KQ * Q - KQ));
        } else {
            c.perp = Mat::Identity(n, n);
            c.eta = c.k;
        }
        c.eta = 0.5 * (c.eta + c.eta.transpose());
        c.mu = c.eta - c.k;
        c.eta_perp = c.perp.transpose() * c.eta * c.perp;
        c.eta_perp = 0.5 * (c.eta_perp + c.eta_perp.transpose());
        c.K_N = c.perp.transpose() * c.K_full * c.perp;
        c.K_N = 0.5 * (c.K_N + c.K_N.transpose());
        const SymEig ee = sym_eig(c.eta_perp);
        c.sigma = apply_fn(ee, [](double x) { return std::sinh(x); });
        c.gamma = apply_fn(ee, [](double x) { return std::cosh(x); });

        const Eigen::Index m = c.eta_perp.rows();
        out.hyperbolic_defect = std::max(
            out.hyperbolic_defect, max_abs(c.gamma * c.gamma - c.sigma * c.sigma - Mat::Identity(m, m)));
        for (const Mat* a : {&c.k, &c.eta, &c.mu, &c.sigma, &c.gamma, &c.K_N})
            out.symmetry_defect = std::max(out.symmetry_defect, symmetry_defect(*a));
        hs_eta2 += c.multiplicity * c.eta.squaredNorm();
        hs_k2 += c.multiplicity * c.k.squaredNorm();
        out.channels.push_back(std::move(c));
    }
    out.hs_eta_channels = std::sqrt(hs_eta2);
    out.hs_k_channels = std::sqrt(hs_k2);
    out.norms = kernel_norms(state, scat, quad);
    return out;
}

TildeForms assemble_tilde_forms(const CorrelationKernels& kern, const OperatorBundle& bundle) {
    if (bundle.basis.kind != Basis::Kind::Radial || bundle.basis.dim() != kern.basis.dim() ||
        std::abs(bundle.basis.radial.r_max - kern.basis.radial.r_max) > 1e-12)
        throw ValidationError("assemble_tilde_forms: kernels and operators live on different bases");
    if (bundle.l_max < kern.l_max)
        throw ValidationError("assemble_tilde_forms: operator bundle has fewer angular blocks than the kernels");

    TildeForms out;
    out.N = kern.N;
    const double g = 8.0 * kPi * bundle.a0;
    double gamma2 = 0.0;
    for (const auto& kc : kern.channels) {
        const ChannelBlock& bc = bundle.channels[kc.l];
        const Mat& P = bc.perp;
        const Mat H = bc.H_perp;
        const Mat Kc = P.transpose() * (g * bc.rho_diag).asDiagonal() * P;  // 8 pi a0 phi0^2
        const Mat h0 = H - Kc;                                               // -Delta + V_ext - eps
        const Mat& ga = kc.gamma;
        const Mat& si = kc.sigma;
        const Mat& K = kc.K_N;
        const Mat local = Kc + K;

        TildeChannel t;
        t.l = kc.l;
        t.multiplicity = kc.multiplicity;
        const Mat sKg = si * K * ga, sh0g = si * h0 * ga, slg = si * local * ga;
        t.Phi = ga * h0 * ga + si * h0 * si + ga * local * ga + si * local * si + sKg + sKg.transpose();
        t.Gamma = ga * K * ga + si * K * si + sh0g + sh0g.transpose() + slg + slg.transpose();
        t.Phi = 0.5 * (t.Phi + t.Phi.transpose());
        t.Gamma = 0.5 * (t.Gamma + t.Gamma.transpose());
        t.D = t.Phi - t.Gamma;

        const SymEig ee = sym_eig(kc.eta_perp);
        const Mat em = apply_fn(ee, [](double x) { return std::exp(-x); });
        const Mat ep = apply_fn(ee, [](double x) { return std::exp(x); });
        const Mat HK = H + 2.0 * K;
        t.d_identity = (t.D - em * H * em).norm() / H.norm();
        t.sum_identity = (t.D + 2.0 * t.Gamma - ep * HK * ep).norm() / HK.norm();
        out.d_identity_residual = std::max(out.d_identity_residual, t.d_identity);
        out.sum_identity_residual = std::max(out.sum_identity_residual, t.sum_identity);
        gamma2 += t.multiplicity * t.Gamma.squaredNorm();
        out.channels.push_back(std::move(t));
    }
    out.gamma_hs = std::sqrt(gamma2);
    if (out.d_identity_residual > 1e-6 || out.sum_identity_residual > 1e-6) {
        std::ostringstream msg;
        msg << "assemble_tilde_forms: exponential identities violated (D residual " << out.d_identity_residual
            << ", D + 2 Gamma residual " << out.sum_identity_residual << ")";
        throw NumericalError(msg.str());
    }
    return out;
}

namespace {

QuadraticForm as_form(const TildeChannel& t) { return {t.Phi, t.Gamma}; }

void require_tilde_positive(const TildeChannel& t) {
    const double lo = sym_eig(t.D).values(0);
    if (!(lo > 0.0)) {
        std::ostringstream msg;
        msg << "D~ is not positive definite in block l = " << t.l << " (smallest eigenvalue " << lo
            << "); reduce ell";
        throw ValidationError(msg.str());
    }
}

}  // namespace

TildeComparison compare_Etilde_E(const TildeForms& forms, const SpectrumResult& spec, int N, int levels) {
    TildeComparison out;
    out.N = N;
    std::vector<double> all;
    for (const auto& t : forms.channels) {
        require_tilde_positive(t);
        const Mat D = t.D;
        const SymEig ed = sym_eig(D);
        const Mat dh = apply_fn(ed, [](double x) { return std::sqrt(x); });
        Mat sq = dh * (D + 2.0 * t.Gamma) * dh;
        const Vec e = sym_eig(0.5 * (sq + sq.transpose())).values;
        for (Eigen::Index i = 0; i < e.size(); ++i)
            for (int m = 0; m < t.multiplicity; ++m) all.push_back(std::sqrt(std::max(e(i), 0.0)));
    }
    std::sort(all.begin(), all.end());
    const size_t count = std::min({static_cast<size_t>(levels), all.size(), spec.eigenvalues.size()});
    for (size_t i = 0; i < count; ++i) {
        out.e_tilde.push_back(all[i]);
        out.e.push_back(spec.eigenvalues[i]);
        const double r = all[i] / spec.eigenvalues[i];
        out.ratios.push_back(r);
        out.max_deviation = std::max(out.max_deviation, std::abs(r - 1.0));
    }
    if (!out.ratios.empty()) out.first_ratio = out.ratios.front();
    return out;
}

PropertyReport tilde_properties(const TildeForms& forms) {
    PropertyReport out;
    bool first = true;
    double a2 = 0.0, b2 = 0.0, dh2 = 0.0;
    std::vector<double> aw2;
    out.positivity = out.comparable = out.finite_norms = true;
    for (const auto& t : forms.channels) {
        const QuadraticForm form = as_form(t);
        const PropertyReport r = check_alpha_properties(diagonalize_quadratic(form), form);
        if (first) {
            out = r;
            out.positivity = r.positivity;
            out.comparable = r.comparable;
            out.finite_norms = r.finite_norms;
            aw2.assign(r.alpha_weighted.size(), 0.0);
            first = false;
        } else {
            out.min_E_tilde = std::min(out.min_E_tilde, r.min_E_tilde);
            out.min_D = std::min(out.min_D, r.min_D);
            out.c = std::min(out.c, r.c);
            out.C = std::max(out.C, r.C);
            out.positivity = out.positivity && r.positivity;
            out.comparable = out.comparable && r.comparable;
            out.finite_norms = out.finite_norms && r.finite_norms;
        }
        a2 += t.multiplicity * r.A_minus_I * r.A_minus_I;
        b2 += t.multiplicity * r.B_minus_I * r.B_minus_I;
        dh2 += t.multiplicity * r.D_half_alpha * r.D_half_alpha;
        for (size_t i = 0; i < aw2.size(); ++i) aw2[i] += t.multiplicity * r.alpha_weighted[i] * r.alpha_weighted[i];
    }
    out.A_minus_I = std::sqrt(a2);
    out.B_minus_I = std::sqrt(b2);
    out.D_half_alpha = std::sqrt(dh2);
    for (size_t i = 0; i < aw2.size(); ++i) out.alpha_weighted[i] = std::sqrt(aw2[i]);
    return out;
}

double power_law_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("power_law_exponent: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw ValidationError("power_law_exponent: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace bogospec
