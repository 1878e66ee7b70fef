#include "bogospec/ebog.hpp"

#include "bogospec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bogospec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

const char* const kTermNames[] = {"T1", "T2", "T3", "T4", "T5", "T6", "Tcomm", "Tcubic"};

void require_supported(const OperatorBundle& b, const char* who) {
    if (b.basis.kind == Basis::Kind::Cartesian &&
        b.basis.cartesian.boundary == CartesianBasis::Boundary::Periodic) {
        std::ostringstream msg;
        msg << who << ": (-Delta)^{-1} is undefined on a periodic box";
        throw ValidationError(msg.str());
    }
    if (b.channels.empty()) {
        std::ostringstream msg;
        msg << who << ": operator bundle has no blocks";
        throw ValidationError(msg.str());
    }
}

Mat dense(const Mat& a) { return a; }

// Per-block data in the eigenbasis of H_GP restricted to range(Q).
struct PerpSpectrum {
    Vec h;      // eigenvalues of H_perp
    Mat Kh;     // 8 pi a0 phi0^2 in that eigenbasis
    Mat X;      // h^{1/2} Kh h^{1/2}
    Mat X2;     // X elementwise squared
    Mat K2;     // Kh elementwise squared
    Vec K2d;    // diagonal of Kh^2
    Vec omega;  // eigenvalues of h^2 + 2X
    Mat Zm;     // its eigenvectors
    Mat XZm;
    double sqrt_omega_sum = 0.0;
    double trace_K = 0.0;
};

PerpSpectrum perp_spectrum(const ChannelBlock& c, double g) {
    PerpSpectrum ps;
    const SymEig eh = sym_eig(c.H_perp);
    if (!(eh.values(0) > 0.0)) {
        std::ostringstream msg;
        msg << "H_GP on range(Q) is not positive definite in block l = " << c.l << " (smallest eigenvalue "
            << eh.values(0) << ")";
        throw NumericalError(msg.str());
    }
    ps.h = eh.values;
    const Mat Kp = c.perp.transpose() * (g * c.rho_diag).asDiagonal() * c.perp;
    ps.trace_K = Kp.trace();
    ps.Kh = eh.vectors.transpose() * Kp * eh.vectors;
    ps.Kh = 0.5 * (ps.Kh + ps.Kh.transpose());
    const Vec sh = ps.h.cwiseSqrt();
    ps.X = sh.asDiagonal() * ps.Kh * sh.asDiagonal();
    ps.X2 = ps.X.cwiseAbs2();
    ps.K2 = ps.Kh.cwiseAbs2();
    ps.K2d = ps.K2.rowwise().sum();
    Mat M = 2.0 * ps.X;
    M.diagonal() += ps.h.cwiseAbs2();
    const SymEig em = sym_eig(0.5 * (M + M.transpose()));
    ps.Zm = em.vectors;
    // The small eigenvalues of h^2 + 2X carry absolute errors of order eps |h|^2. Both
    // pieces are positive semidefinite, so Rayleigh quotients on the computed vectors
    // recover them to relative accuracy.
    ps.XZm = ps.X * ps.Zm;
    const Mat& XZ = ps.XZm;
    ps.omega = (ps.h.cwiseAbs2().transpose() * ps.Zm.cwiseAbs2()).transpose() +
               2.0 * ps.Zm.cwiseProduct(XZ).colwise().sum().transpose();
    ps.sqrt_omega_sum = ps.omega.cwiseSqrt().sum();
    return ps;
}

struct Node {
    double s, weight;  // weight includes ds/dt and sqrt(s)
};

std::vector<Node> s_nodes(const QuadratureSpec& q, int n) {
    std::vector<double> t, w;
    gauss_legendre(n, 0.0, 1.0, t, w);
    std::vector<Node> out;
    for (int i = 0; i < n; ++i) {
        const double r = t[i] / (1.0 - t[i]);
        const double s = q.scale * std::pow(r, q.power);
        const double ds = q.scale * q.power * std::pow(r, q.power - 1) / ((1.0 - t[i]) * (1.0 - t[i]));
        out.push_back({s, w[i] * ds * std::sqrt(s)});
    }
    return out;
}

// Integrand of the double-commutator term (up to the prefactor -1/pi).
double comm_integrand(const PerpSpectrum& ps, double s) {
    const Vec den = (s + ps.h.array().square()).matrix();
    const Vec a = ps.h.cwiseQuotient(den);
    const Vec b = a.cwiseQuotient(den);
    return 2.0 * b.dot(ps.K2 * a) - 2.0 * (a.array() * b.array() * ps.K2d.array()).sum();
}

// tr[(G X)^3 (s + h^2 + 2X)^{-1}] with G = (s + h^2)^{-1}. Expanding the full resolvent
// to third order gives an O(n^2) formula; `scale` bounds the size of its addends so the
// caller can detect cancellation.
double cubic_expansion(const PerpSpectrum& ps, double s, double& scale) {
    const Vec g = (s + ps.h.array().square()).inverse().matrix();
    const Vec g2 = g.cwiseAbs2();
    const double t0 = g.sum();
    const double t1 = 2.0 * (ps.X.diagonal().array() * g2.array()).sum();
    const double t2 = 4.0 * g2.dot(ps.X2 * g);
    const double t3 = (s + ps.omega.array()).inverse().sum();
    scale = (t0 + std::abs(t1) + t2 + t3) / 8.0;
    return (t0 - t1 + t2 - t3) / 8.0;
}

double cubic_direct(const PerpSpectrum& ps, double s) {
    const Vec g = (s + ps.h.array().square()).inverse().matrix();
    const Vec r = (s + ps.omega.array()).inverse().matrix();
    const Mat GX = g.asDiagonal() * ps.X;
    const Mat GXGX = GX * GX;
    const Mat GXGM = (g.asDiagonal() * ps.XZm * r.asDiagonal()) * ps.Zm.transpose();
    return GXGX.cwiseProduct(GXGM.transpose()).sum();
}

struct SIntegrals {
    double comm = 0.0, cubic = 0.0;
    int direct_nodes = 0;
};

SIntegrals s_integrals(const PerpSpectrum& ps, const std::vector<Node>& nodes, double tol) {
    SIntegrals out;
    std::vector<double> val(nodes.size()), scale(nodes.size());
    double estimate = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        out.comm += nodes[i].weight * comm_integrand(ps, nodes[i].s);
        val[i] = cubic_expansion(ps, nodes[i].s, scale[i]);
        estimate += nodes[i].weight * val[i];
    }
    // Replace nodes whose rounding error could exceed tol of the integral.
    const double n = static_cast<double>(ps.h.size());
    const double omega_max = ps.omega.size() ? ps.omega.maxCoeff() : 0.0;
    const double x3 = (ps.X * ps.X * ps.X).trace();
    double cubic = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        const double err = nodes[i].weight * 8.0 * n * kEps * scale[i];
        double v = val[i];
        if (err > tol * std::abs(estimate)) {
            const double s = nodes[i].s;
            if (s > 1e6 * omega_max) {
                v = x3 / (s * s * s * s);  // G, (s + M)^{-1} -> 1/s
            } else {
                v = cubic_direct(ps, s);
                ++out.direct_nodes;
            }
        }
        cubic += nodes[i].weight * v;
    }
    out.comm *= -1.0 / kPi;
    out.cubic = 4.0 / kPi * cubic;
    return out;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (nodes < 8) throw ValidationError("quadrature: need at least 8 nodes");
    if (!(scale > 0.0)) throw ValidationError("quadrature: scale must be positive");
    if (power < 2) throw ValidationError("quadrature: power must be at least 2");
    if (!(rounding_tol > 0.0)) throw ValidationError("quadrature: rounding tolerance must be positive");
}

double EBogResult::term(const std::string& name) const {
    for (const auto& [k, v] : terms)
        if (k == name) return v;
    throw ValidationError("unknown E_Bog term " + name);
}

double kappa_min(const OperatorBundle& b, double max_condition) {
    require_supported(b, "kappa_min");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& c : b.channels) {
        const Vec e = sym_eig(c.H).values;
        lo = std::min(lo, e(0));
        hi = std::max(hi, e(e.size() - 1));
    }
    for (double k = 0.125; k < 1e4; k *= 2.0)
        if ((hi + k * k) / (lo + k * k) <= max_condition && lo + k * k > 0.0) return k;
    throw NumericalError("kappa_min: no kappa below 1e4 satisfies the condition bound");
}

EBogResult ebog_kappa(const OperatorBundle& b, double kappa, const QuadratureSpec& quad) {
    require_supported(b, "ebog_kappa");
    quad.validate();
    if (!(kappa > 0.0)) throw ValidationError("ebog_kappa: kappa must be positive");

    EBogResult out;
    out.kappa = kappa;
    out.nodes = quad.nodes;
    std::vector<double> acc(8, 0.0);
    const double g = 8.0 * kPi * b.a0;
    const double k2 = kappa * kappa;

    // Condition monitor on the full blocks, including the condensate mode.
    for (const auto& c : b.channels) {
        const Vec e = sym_eig(c.H).values;
        const double cond = (e(e.size() - 1) + k2) / (e(0) + k2);
        if (!(e(0) + k2 > 0.0) || cond > 1e6) {
            std::ostringstream msg;
            msg << "ebog_kappa: H_GP + kappa^2 has condition number " << cond << " in block l = " << c.l
                << "; increase kappa above " << kappa_min(b);
            throw NumericalError(msg.str());
        }
        out.condition = std::max(out.condition, cond);
    }

    if (g == 0.0) {
        for (const char* name : kTermNames) out.terms.emplace_back(name, 0.0);
        out.block_totals.assign(b.channels.size(), 0.0);
        return out;
    }

    const auto nodes = s_nodes(quad, quad.nodes);
    const auto half = s_nodes(quad, quad.nodes / 2);
    double direct = 0.0, tail = 0.0;
    const double c24 = g * g / 4.0;
    for (const auto& c : b.channels) {
        const double m = c.multiplicity;
        const Mat L = dense(c.L);
        const SymEig el = sym_eig(L);
        if (!(el.values(0) > 0.0)) throw NumericalError("ebog_kappa: -Delta is not positive definite");
        const Vec& lam = el.values;
        const Mat& Z = el.vectors;
        const Vec rho2 = c.rho_diag.cwiseAbs2();
        // (Z^T rho^2 Z)_kk: weights for traces tr[rho f(L) rho] = sum_k f(lambda_k) d_k.
        const Vec dL = (Z.transpose() * rho2.asDiagonal() * Z).diagonal();
        const SymEig eH = sym_eig(c.H);
        const Vec dH = (eH.vectors.transpose() * rho2.asDiagonal() * eH.vectors).diagonal();

        std::vector<double> t(8, 0.0);
        for (Eigen::Index k = 0; k < lam.size(); ++k) {
            t[0] += k2 * c24 * dL(k) / (lam(k) * (lam(k) + k2));
            t[3] += c24 * (dL(k) / (lam(k) + k2) - dH(k) / (eH.values(k) + k2));
        }

        // Commutator and gradient terms with C = [phi0, -Delta] and the discrete
        // |grad phi0|^2 = -(1/2)[[-Delta, phi0], phi0].
        const Vec& phi = b.phi;
        const Mat R = Z * (lam.array() + k2).inverse().matrix().asDiagonal() * Z.transpose();
        const Mat C = phi.asDiagonal() * L - L * phi.asDiagonal();
        const Mat Rphi = R * phi.asDiagonal();
        const Mat Y = C * Rphi;
        t[1] = -c24 * (Y.cwiseProduct(R * Y)).sum();
        Mat G(L.rows(), L.cols());
        for (Eigen::Index i = 0; i < G.rows(); ++i)
            for (Eigen::Index j = 0; j < G.cols(); ++j) G(i, j) = -0.5 * L(i, j) * std::pow(phi(i) - phi(j), 2);
        t[2] = c24 * (Rphi.cwiseProduct(G * Rphi)).sum();

        const PerpSpectrum ps = perp_spectrum(c, g);
        if (c.l == 0) {
            const Vec p3 = c.rho_diag.cwiseProduct(b.v);
            const Vec pp = c.perp.transpose() * p3;
            const SymEig ehp = sym_eig(c.H_perp);
            const Vec proj = ehp.vectors.transpose() * pp;
            t[4] = c24 / k2 * p3.squaredNorm() + c24 * (proj.array().square() / (ehp.values.array() + k2)).sum();
        }
        for (Eigen::Index i = 0; i < ps.Kh.rows(); ++i)
            for (Eigen::Index j = 0; j < ps.Kh.cols(); ++j)
                t[5] -= k2 / 4.0 * ps.K2(i, j) / (ps.h(j) * (ps.h(j) + k2));

        const SIntegrals si = s_integrals(ps, nodes, quad.rounding_tol);
        const SIntegrals sh = s_integrals(ps, half, quad.rounding_tol);
        t[6] = si.comm;
        t[7] = si.cubic;
        out.direct_nodes += si.direct_nodes;
        tail += m * (std::abs(si.comm - sh.comm) + std::abs(si.cubic - sh.cubic));

        double block = 0.0;
        for (int i = 0; i < 8; ++i) {
            acc[i] += m * t[i];
            block += t[i];
        }
        out.block_totals.push_back(block);

        // Same block without kappa: half-trace of sqrt(omega) - H - K plus the counterterm.
        double d = 0.5 * (ps.sqrt_omega_sum - ps.h.sum() - ps.trace_K);
        for (Eigen::Index k = 0; k < lam.size(); ++k) d += c24 * dL(k) / lam(k);
        direct += m * d;
    }
    for (int i = 0; i < 8; ++i) {
        out.terms.emplace_back(kTermNames[i], acc[i]);
        out.total += acc[i];
    }
    out.tail_estimate = tail;
    out.direct = direct;
    out.closure_residual = std::abs(out.total - direct) / std::max(std::abs(direct), 1e-300);
    return out;
}

MollifiedResult ebog_mollified(const OperatorBundle& b, const std::vector<double>& delta,
                               const std::vector<int>& orders) {
    require_supported(b, "ebog_mollified");
    if (delta.empty()) throw ValidationError("ebog_mollified: empty delta list");
    const double h = b.basis.spacing();
    for (size_t i = 0; i < delta.size(); ++i) {
        if (!(delta[i] > 0.0)) throw ValidationError("ebog_mollified: delta values must be positive");
        if (i > 0 && !(delta[i] < delta[i - 1]))
            throw ValidationError("ebog_mollified: delta values must decrease");
        if (delta[i] < 2.0 * h) {
            std::ostringstream msg;
            msg << "ebog_mollified: delta = " << delta[i] << " is below two grid spacings (" << 2.0 * h << ")";
            throw ValidationError(msg.str());
        }
    }
    for (int p : orders)
        if (p <= 0) throw ValidationError("ebog_mollified: Richardson orders must be positive");

    MollifiedResult out;
    out.delta = delta;
    out.values.assign(delta.size(), 0.0);
    const double g = 8.0 * kPi * b.a0;
    if (g != 0.0) {
        const double c24 = g * g / 4.0;
        for (const auto& c : b.channels) {
            const double m = c.multiplicity;
            const SymEig el = sym_eig(dense(c.L));
            const Vec& lam = el.values;
            const Mat& Z = el.vectors;
            const Vec dL = (Z.transpose() * c.rho_diag.cwiseAbs2().asDiagonal() * Z).diagonal();
            const SymEig eh = sym_eig(c.H_perp);
            if (!(eh.values(0) > 0.0)) throw NumericalError("ebog_mollified: H_GP on range(Q) is not positive definite");
            const Mat hs = apply_fn(eh, [](double x) { return std::sqrt(x); });
            const Mat ZtP = Z.transpose() * (b.phi.asDiagonal() * c.perp);  // Z^T phi0 perp
            for (size_t i = 0; i < delta.size(); ++i) {
                const double d2 = delta[i] * delta[i];
                const Vec mol = (-0.5 * d2 * lam.array()).exp().matrix();
                // K_delta = 8 pi a0 perp^T phi0 1_delta phi0 perp
                Mat Kd = g * ZtP.transpose() * mol.asDiagonal() * ZtP;
                Kd = 0.5 * (Kd + Kd.transpose());
                Mat M = hs * (c.H_perp + 2.0 * Kd) * hs;
                const Vec om = sym_eig(0.5 * (M + M.transpose())).values;
                double v = 0.0;
                for (Eigen::Index k = 0; k < om.size(); ++k) v += std::sqrt(std::max(om(k), 0.0));
                v = 0.5 * (v - c.H_perp.trace() - Kd.trace());
                for (Eigen::Index k = 0; k < lam.size(); ++k) v += c24 * dL(k) * std::exp(-d2 * lam(k)) / lam(k);
                out.values[i] += m * v;
            }
        }
    }

    // Richardson: E(delta) = E0 + sum_j a_j delta^{p_j} through the smallest delta values.
    const size_t terms = std::min(orders.size(), delta.size() - 1);
    out.orders.assign(orders.begin(), orders.begin() + terms);
    const size_t first = delta.size() - terms - 1;
    Mat A(terms + 1, terms + 1);
    Vec y(terms + 1);
    for (size_t i = 0; i <= terms; ++i) {
        const double d = delta[first + i];
        A(i, 0) = 1.0;
        for (size_t j = 0; j < terms; ++j) A(i, j + 1) = std::pow(d, out.orders[j]);
        y(i) = out.values[first + i];
    }
    out.extrapolated = A.fullPivLu().solve(y)(0);

    for (size_t i = 2; i < delta.size(); ++i) {
        const double d1 = out.values[i - 2] - out.values[i - 1], d2 = out.values[i - 1] - out.values[i];
        if (d1 * d2 < 0.0) out.monotone = false;
    }
    if (delta.size() >= 3) {
        const size_t k = delta.size() - 1;
        const double d1 = out.values[k - 2] - out.values[k - 1], d2 = out.values[k - 1] - out.values[k];
        if (d1 != 0.0 && d2 != 0.0)
            out.observed_order = std::log(std::abs(d1 / d2)) / std::log(delta[k - 1] / delta[k]);
    }
    if (!out.monotone) out.warning = "mollified values are not monotone in delta; extrapolation unreliable";
    return out;
}

GroundEnergy ground_energy(long N, const GPState& state, double ebog_total) {
    GroundEnergy e;
    e.condensate = static_cast<double>(N) * state.E_GP;
    e.quartic = -4.0 * kPi * state.a0 * state.norm4;
    e.bogoliubov = ebog_total;
    e.total = e.condensate + e.quartic + e.bogoliubov;
    return e;
}

}  // namespace bogospec
