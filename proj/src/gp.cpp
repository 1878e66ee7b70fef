#include "bogospec/gp.hpp"

#include "bogospec/errors.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>

namespace bogospec {

namespace {

constexpr double kPi = std::numbers::pi;

double scaled_radius(const TrapPotential& t, double x, double y, double z) {
    const double a = t.axis_scale[0] * x, b = t.axis_scale[1] * y, c = t.axis_scale[2] * z;
    return std::sqrt(a * a + b * b + c * c);
}

}  // namespace

// ---------------------------------------------------------------- trap

TrapPotential TrapPotential::harmonic(double c) {
    TrapPotential t;
    t.kind = Kind::Harmonic;
    t.coefficient = c;
    t.validate();
    return t;
}

TrapPotential TrapPotential::polynomial(std::vector<double> coeffs) {
    TrapPotential t;
    t.kind = Kind::Polynomial;
    t.poly = std::move(coeffs);
    t.validate();
    return t;
}

TrapPotential TrapPotential::tabulated(std::vector<double> r, std::vector<double> v) {
    TrapPotential t;
    t.kind = Kind::Tabulated;
    t.table_r = std::move(r);
    t.table_v = std::move(v);
    t.validate();
    return t;
}

TrapPotential TrapPotential::none() {
    TrapPotential t;
    t.kind = Kind::None;
    return t;
}

double TrapPotential::radial(double r) const {
    switch (kind) {
        case Kind::None:
            return 0.0;
        case Kind::Harmonic:
            return coefficient * r * r;
        case Kind::Polynomial: {
            double acc = 0.0;
            for (size_t k = poly.size(); k-- > 0;) acc = acc * r + poly[k];
            return acc;
        }
        case Kind::Tabulated: {
            if (r <= table_r.front()) return table_v.front();
            if (r >= table_r.back()) return table_v.back();
            auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
            const size_t j = static_cast<size_t>(it - table_r.begin());
            const double t = (r - table_r[j - 1]) / (table_r[j] - table_r[j - 1]);
            return (1 - t) * table_v[j - 1] + t * table_v[j];
        }
    }
    return 0.0;
}

double TrapPotential::operator()(double x, double y, double z) const {
    return radial(scaled_radius(*this, x, y, z));
}

bool TrapPotential::isotropic() const {
    return axis_scale[0] == axis_scale[1] && axis_scale[1] == axis_scale[2];
}

double TrapPotential::length_scale() const {
    double quad = 0.0;
    if (kind == Kind::Harmonic) quad = coefficient;
    if (kind == Kind::Polynomial && poly.size() > 2) quad = poly[2];
    if (quad <= 0.0) return 0.0;
    const double s = *std::max_element(axis_scale.begin(), axis_scale.end());
    return std::pow(quad * s * s, -0.25);
}

void TrapPotential::validate() const {
    for (double s : axis_scale)
        if (!(s > 0.0)) throw ValidationError("trap: axis scales must be positive");
    if (kind == Kind::Harmonic && coefficient < 0.0) throw ValidationError("trap: negative harmonic coefficient");
    if (kind == Kind::Polynomial)
        for (double c : poly)
            if (c < 0.0) throw ValidationError("trap: polynomial coefficients must be nonnegative");
    if (kind == Kind::Tabulated) {
        if (table_r.size() < 2 || table_r.size() != table_v.size())
            throw ValidationError("trap: tabulated profile needs at least two (r, V) samples");
        for (size_t i = 0; i < table_v.size(); ++i) {
            if (table_v[i] < 0.0) throw ValidationError("trap: negative tabulated value");
            if (i > 0 && table_r[i] <= table_r[i - 1]) throw ValidationError("trap: radii must increase");
        }
    }
}

Vec trap_on_nodes(const TrapPotential& trap, const Basis& basis) {
    Vec out(basis.dim());
    if (basis.kind == Basis::Kind::Radial) {
        if (!trap.isotropic()) throw ValidationError("trap: anisotropic traps need a cartesian basis");
        const double s = trap.axis_scale[0];
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = trap.radial(s * basis.radial.r(i));
        return out;
    }
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        auto pt = basis.cartesian.point(i);
        out(i) = trap(pt[0], pt[1], pt[2]);
    }
    return out;
}

Vec GPState::rho() const { return phi.array().square(); }

// ---------------------------------------------------------------- solver

namespace {

// -Delta + V on symmetric coordinates, with a shifted solve for the implicit step.
class LinearPart {
public:
    LinearPart(const Basis& basis, const Vec& vext) : basis_(basis), vext_(vext) {
        if (basis.kind == Basis::Kind::Radial) {
            dense_ = basis.radial.laplacian(0);
        } else {
            sparse_ = basis.cartesian.laplacian();
        }
    }

    Vec apply(const Vec& v, const Vec& diag) const {
        Vec out = basis_.kind == Basis::Kind::Radial ? Vec(dense_ * v) : Vec(sparse_ * v);
        return out + (vext_ + diag).cwiseProduct(v);
    }

    double kinetic(const Vec& v) const {
        return basis_.kind == Basis::Kind::Radial ? v.dot(dense_ * v) : v.dot(sparse_ * v);
    }

    // Solve (I + tau (L + V + diag)) x = b.
    Vec implicit_step(const Vec& b, const Vec& diag, double tau) const {
        const Vec d = Vec::Ones(b.size()) + tau * (vext_ + diag);
        if (basis_.kind == Basis::Kind::Radial) {
            Mat a = tau * dense_;
            a.diagonal() += d;
            Eigen::LLT<Mat> llt(a);
            if (llt.info() != Eigen::Success) throw NumericalError("gp: implicit step matrix is not positive");
            return llt.solve(b);
        }
        SpMat a = tau * sparse_;
        for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += d(i);
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg(a);
        cg.setTolerance(1e-14);
        cg.setMaxIterations(10000);
        Vec x = cg.solve(b);
        if (cg.info() != Eigen::Success && cg.error() > 1e-10)
            throw NumericalError("gp: conjugate gradient did not converge in the implicit step");
        return x;
    }

private:
    const Basis& basis_;
    Vec vext_;
    Mat dense_;
    SpMat sparse_;
};

struct Energies {
    double E, eps, norm4, residual;
};

Energies evaluate(const LinearPart& lin, const Vec& v, const Vec& w, const Vec& vext, double a0) {
    const Vec rho = v.array().square() / w.array();
    const double norm4 = rho.dot(v.cwiseProduct(v));
    const double kin = lin.kinetic(v);
    const double pot = vext.dot(v.cwiseProduct(v));
    Energies e;
    e.norm4 = norm4;
    e.E = kin + pot + 4.0 * kPi * a0 * norm4;
    const Vec hv = lin.apply(v, 8.0 * kPi * a0 * rho);
    e.eps = v.dot(hv);
    e.residual = (hv - e.eps * v).norm();
    return e;
}

// E(x) - E(v) written through x - v, so the difference stays accurate when the
// two states nearly coincide.
double energy_change(const LinearPart& lin, const Vec& x, const Vec& v, const Vec& w, double a0) {
    const Vec dm = x - v, sm = x + v;
    const double lin_part = dm.dot(lin.apply(sm, Vec::Zero(x.size())));
    const Vec dsq = dm.cwiseProduct(sm);  // x^2 - v^2
    const Vec ssq = x.cwiseProduct(x) + v.cwiseProduct(v);
    const double quartic = (dsq.array() * ssq.array() / w.array()).sum();
    return lin_part + 4.0 * kPi * a0 * quartic;
}

Vec initial_guess(const Basis& basis, const TrapPotential& trap, const SolverOptions& opts) {
    const Vec r = basis.radii();
    const Vec w = basis.weights();
    double ell = trap.length_scale();
    const bool periodic = basis.kind == Basis::Kind::Cartesian &&
                          basis.cartesian.boundary == CartesianBasis::Boundary::Periodic;
    Vec v(r.size());
    std::mt19937_64 rng(opts.seed.value_or(0));
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double env = 1.0;
        if (!periodic) {
            const double width = ell > 0.0 ? ell : 0.25 * r.maxCoeff();
            env = std::exp(-0.5 * r(i) * r(i) / (width * width));
        }
        const double amp = opts.seed ? u(rng) : 1.0;
        v(i) = amp * env * std::sqrt(w(i));
    }
    return v / v.norm();
}

double boundary_value(const Basis& basis, const Vec& phi) {
    if (basis.kind == Basis::Kind::Radial) return std::abs(phi(phi.size() - 1));
    if (basis.cartesian.boundary == CartesianBasis::Boundary::Periodic) return 0.0;
    double b = 0.0;
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        if (basis.cartesian.on_boundary_layer(i)) b = std::max(b, std::abs(phi(i)));
    return b;
}

GPState run_solver(const TrapPotential& trap, double a0, const Basis& basis, const SolverOptions& opts) {
    const Vec vext = trap_on_nodes(trap, basis);
    const Vec w = basis.weights();
    LinearPart lin(basis, vext);

    GPState st;
    st.basis = basis;
    st.trap = trap;
    st.a0 = a0;

    Vec v = initial_guess(basis, trap, opts);
    Energies cur = evaluate(lin, v, w, vext, a0);
    std::deque<double> history{cur.E};
    double tau = opts.tau0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (cur.residual <= opts.tol && history.size() > 10 &&
            std::abs(history.back() - history.front()) <= opts.energy_tol)
            break;
        const Vec diag = 8.0 * kPi * a0 * (v.array().square() / w.array()).matrix();
        bool accepted = false;
        while (!accepted) {
            Vec x = lin.implicit_step(v, diag, tau);
            x /= x.norm();
            const double dE = energy_change(lin, x, v, w, a0);
            if (dE <= 1e-14) {
                st.max_energy_increase = std::max(st.max_energy_increase, dE);
                v = x;
                cur = evaluate(lin, v, w, vext, a0);
                tau = std::min(2.0 * tau, 1e8);
                accepted = true;
            } else {
                ++st.rejected_steps;
                tau *= 0.5;
                if (tau < 1e-12) throw NumericalError("gp: step size underflow in energy backtracking");
            }
        }
        history.push_back(cur.E);
        if (history.size() > 11) history.pop_front();
    }
    if (it >= opts.max_iter) {
        std::ostringstream msg;
        msg << "gp: no convergence after " << opts.max_iter << " iterations, residual " << cur.residual;
        throw NumericalError(msg.str());
    }
    if (v.sum() < 0.0) v = -v;
    st.v = v;
    st.phi = v.array() / w.array().sqrt();
    st.E_GP = cur.E;
    st.eps_GP = cur.eps;
    st.norm4 = cur.norm4;
    st.residual = cur.residual;
    st.iterations = it;
    st.boundary_value = boundary_value(basis, st.phi);
    st.min_phi = st.phi.minCoeff();
    return st;
}

}  // namespace

GPState minimize_gp(const TrapPotential& trap, double a0, const Basis& basis, const SolverOptions& opts) {
    trap.validate();
    if (!(a0 >= 0.0)) throw ValidationError("gp: scattering length must be nonnegative");
    const double ell = trap.length_scale();
    if (ell > 0.0 && basis.spacing() > ell / opts.min_nodes_per_length) {
        std::ostringstream msg;
        msg << "gp: spacing " << basis.spacing() << " does not resolve the trap length " << ell
            << " with " << opts.min_nodes_per_length << " nodes";
        throw ValidationError(msg.str());
    }
    GPState st = run_solver(trap, a0, basis, opts);
    if (opts.auto_expand && st.boundary_value > opts.boundary_tol) {
        Basis bigger;
        if (basis.kind == Basis::Kind::Radial) {
            const double r_max = 1.5 * basis.radial.r_max;
            bigger = Basis::make_radial(r_max, static_cast<int>(std::ceil(r_max / basis.radial.d)) - 1);
        } else {
            const auto& c = basis.cartesian;
            const int n = static_cast<int>(std::ceil(1.5 * (c.n + 1))) - 1;
            bigger = Basis::make_cartesian(n, 1.5 * c.half_width, c.boundary);
        }
        st = run_solver(trap, a0, bigger, opts);
        st.expanded = true;
    }
    if (basis.kind == Basis::Kind::Cartesian && trap.kind != TrapPotential::Kind::None && trap.floor > 0.0) {
        const Vec vext = trap_on_nodes(trap, st.basis);
        for (Eigen::Index i = 0; i < vext.size(); ++i)
            if (st.basis.cartesian.on_boundary_layer(i) && vext(i) < trap.floor)
                throw ValidationError("gp: trap does not reach the declared floor on the box boundary");
    }
    return st;
}

double gp_energy(const Vec& phi, const Basis& basis, const TrapPotential& trap, double a0) {
    const Vec w = basis.weights();
    const Vec v = phi.cwiseProduct(w.cwiseSqrt());
    if (std::abs(v.norm() - 1.0) > 1e-10) throw ValidationError("gp_energy: input is not normalized");
    const Vec vext = trap_on_nodes(trap, basis);
    LinearPart lin(basis, vext);
    return evaluate(lin, v, w, vext, a0).E;
}

// ---------------------------------------------------------------- decay

DecayReport check_decay(const GPState& st, const std::vector<double>& nu_list) {
    for (double nu : nu_list)
        if (!(nu > 0.0)) throw ValidationError("check_decay: decay rates must be positive");
    if (st.boundary_value > 1e-10) {
        std::ostringstream msg;
        msg << "check_decay: box too small, boundary value of phi is " << st.boundary_value;
        throw NumericalError(msg.str());
    }
    DecayReport rep;
    rep.nu = nu_list;
    rep.boundary_value = st.boundary_value;
    const Basis& b = st.basis;
    const Vec r = b.radii();
    const Eigen::Index n = r.size();

    Vec grad(n), lap(n);
    if (b.kind == Basis::Kind::Radial) {
        for (Eigen::Index i = 0; i < n; ++i) {
            grad(i) = std::abs(b.radial.derivative(st.v, r(i)));
            lap(i) = std::abs(b.radial.laplacian_value(st.v, r(i)));
        }
    } else {
        const auto& c = b.cartesian;
        const Vec lphi = c.laplacian() * st.phi;
        for (Eigen::Index idx = 0; idx < n; ++idx) {
            lap(idx) = std::abs(lphi(idx));
            const int k = static_cast<int>(idx % c.n), j = static_cast<int>((idx / c.n) % c.n),
                      i = static_cast<int>(idx / (static_cast<Eigen::Index>(c.n) * c.n));
            const bool periodic = c.boundary == CartesianBasis::Boundary::Periodic;
            auto at = [&](int a, int bb, int cc) {
                if (periodic) return st.phi(c.index((a + c.n) % c.n, (bb + c.n) % c.n, (cc + c.n) % c.n));
                if (a < 0 || bb < 0 || cc < 0 || a >= c.n || bb >= c.n || cc >= c.n) return 0.0;
                return st.phi(c.index(a, bb, cc));
            };
            const double gx = (at(i + 1, j, k) - at(i - 1, j, k)) / (2 * c.h);
            const double gy = (at(i, j + 1, k) - at(i, j - 1, k)) / (2 * c.h);
            const double gz = (at(i, j, k + 1) - at(i, j, k - 1)) / (2 * c.h);
            grad(idx) = std::sqrt(gx * gx + gy * gy + gz * gz);
        }
    }

    for (double nu : nu_list) {
        double cp = 0.0, cg = 0.0, cl = 0.0, arg = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (st.phi(i) < 1e-13) continue;
            const double e = std::exp(nu * r(i));
            if (st.phi(i) * e > cp) {
                cp = st.phi(i) * e;
                arg = r(i);
            }
            cg = std::max(cg, grad(i) * e);
            cl = std::max(cl, lap(i) * e);
        }
        rep.C_phi.push_back(cp);
        rep.C_grad.push_back(cg);
        rep.C_lap.push_back(cl);
        rep.argmax_phi.push_back(arg);
    }

    // phi_hat(p) with the e^{-2 pi i p x} convention, radial p or p along the first axis.
    const Vec w = b.weights();
    rep.p_max = 1.0 / (4.0 * b.spacing());
    const int np = 200;
    for (int k = 0; k <= np; ++k) {
        const double p = rep.p_max * k / np;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double kernel;
            if (b.kind == Basis::Kind::Radial) {
                const double x = 2.0 * kPi * p * r(i);
                kernel = x < 1e-8 ? 1.0 : std::sin(x) / x;
            } else {
                kernel = std::cos(2.0 * kPi * p * b.cartesian.point(i)[0]);
            }
            acc += w(i) * st.phi(i) * kernel;
        }
        rep.fourier_C = std::max(rep.fourier_C, std::abs(acc) * std::pow(1.0 + p, 3));
    }
    return rep;
}

}  // namespace bogospec
