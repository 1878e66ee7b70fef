#include "bogospec/scattering.hpp"

#include "bogospec/errors.hpp"
#include "bogospec/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bogospec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kInnerSteps = 4096;   // recorded sub-steps across the support
constexpr double kRelTol = 1e-13;
constexpr double kAbsTol = 1e-300;
constexpr long kMaxSteps = 5'000'000;

// sin(k x)/k, continuous at k = 0
double sin_over_k(double k, double x) {
    if (k * x < 1e-8) return x * (1.0 - (k * x) * (k * x) / 6.0);
    return std::sin(k * x) / k;
}

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
    return std::sin(x) / x;
}

// State (u, u', 4 pi int V u r, 4 pi int u r) for -u'' + (V/2) u = E u.
using State = std::array<double, 4>;

struct InnerResult {
    InnerSamples samples;
    double u_end = 0.0, du_end = 1.0;
    double I_end = 0.0, J_end = 0.0;
};

InnerResult integrate_inner(const RadialPotential& pot, double energy) {
    namespace ode = boost::numeric::odeint;
    InnerResult out;
    const double S = pot.support();
    if (pot.is_zero() || S <= 0.0) {
        out.u_end = 0.0;
        out.du_end = 1.0;
        return out;
    }

    std::vector<double> bps = pot.breakpoints();
    bps.push_back(0.0);
    bps.push_back(S);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    bps.erase(std::remove_if(bps.begin(), bps.end(), [&](double b) { return b < 0.0 || b > S; }),
              bps.end());

    // Sample points: uniform sub-steps, with every breakpoint included.
    std::vector<double> pts;
    for (int i = 0; i <= kInnerSteps; ++i) pts.push_back(S * i / kInnerSteps);
    pts.insert(pts.end(), bps.begin(), bps.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              pts.end());

    State x{0.0, 1.0, 0.0, 0.0};
    std::vector<double> log_scale{0.0};
    double ls = 0.0;
    out.samples.r.push_back(0.0);
    out.samples.u.push_back(0.0);
    out.samples.du.push_back(1.0);

    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(kAbsTol, kRelTol);
    long steps = 0;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1];
        // Evaluate V from inside the segment so a jump at a breakpoint is never straddled.
        const double lo = std::nextafter(a, b), hi = std::nextafter(b, a);
        auto rhs = [&](const State& y, State& dy, double r) {
            const double rr = std::clamp(r, a, b);
            const double v = pot(std::clamp(rr, lo, hi));
            dy[0] = y[1];
            dy[1] = (0.5 * v - energy) * y[0];
            dy[2] = 4.0 * kPi * v * y[0] * rr;
            dy[3] = 4.0 * kPi * y[0] * rr;
        };
        double t = a, dt = (b - a);
        while (t < b) {
            if (t + dt > b) dt = b - t;
            auto res = stepper.try_step(rhs, x, t, dt);
            if (res == ode::fail) {
                if (dt < 1e-15 * std::max(1.0, std::abs(t))) {
                    std::ostringstream msg;
                    msg << "scattering ODE: step-size underflow at r = " << t;
                    throw NumericalError(msg.str());
                }
                continue;
            }
            if (++steps > kMaxSteps) throw NumericalError("scattering ODE: step budget exhausted");
        }
        // Keep magnitudes bounded for strongly repulsive cores.
        double mag = std::max(std::abs(x[0]), std::abs(x[1]));
        if (mag > 1e100) {
            for (double& c : x) c /= mag;
            ls += std::log(mag);
        }
        out.samples.r.push_back(b);
        out.samples.u.push_back(x[0]);
        out.samples.du.push_back(x[1]);
        log_scale.push_back(ls);
    }
    // Bring every sample to the final scale.
    for (size_t i = 0; i < out.samples.r.size(); ++i) {
        double f = std::exp(log_scale[i] - ls);
        out.samples.u[i] *= f;
        out.samples.du[i] *= f;
    }
    out.u_end = x[0];
    out.du_end = x[1];
    out.I_end = x[2];
    out.J_end = x[3];
    return out;
}

// u and u' beyond the support, where V = 0.
void tail_values(double S, double u0, double du0, double energy, double r, double& u, double& du) {
    const double k = std::sqrt(std::max(energy, 0.0));
    const double x = r - S;
    u = u0 * std::cos(k * x) + du0 * sin_over_k(k, x);
    du = -u0 * k * std::sin(k * x) + du0 * std::cos(k * x);
}

// Cubic Hermite interpolation of u on the inner samples.
double inner_u(const InnerSamples& s, double r) {
    auto it = std::upper_bound(s.r.begin(), s.r.end(), r);
    size_t j = (it == s.r.begin()) ? 1 : static_cast<size_t>(it - s.r.begin());
    if (j >= s.r.size()) j = s.r.size() - 1;
    const double r0 = s.r[j - 1], r1 = s.r[j], h = r1 - r0;
    const double t = (r - r0) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * s.u[j - 1] + h10 * h * s.du[j - 1] + h01 * s.u[j] + h11 * h * s.du[j];
}

double u_at(const ScatteringSolution& sol, double r) {
    const double S = sol.potential.support();
    if (r >= S || sol.inner.r.empty()) {
        double u, du;
        tail_values(S, sol.u_end, sol.du_end, sol.energy, r, u, du);
        return u;
    }
    return inner_u(sol.inner, r);
}

void check_grid_covers(const RadialGrid& grid, double r, const char* what) {
    if (grid.r_max < r) {
        std::ostringstream msg;
        msg << what << ": grid r_max = " << grid.r_max << " does not cover r = " << r;
        throw ValidationError(msg.str());
    }
}

}  // namespace

// ---------------------------------------------------------------- potential

RadialPotential RadialPotential::zero() { return {}; }

RadialPotential RadialPotential::square_barrier(double V0, double R) {
    RadialPotential p;
    p.kind = Kind::SquareBarrier;
    p.V0 = V0;
    p.R = R;
    p.validate();
    return p;
}

RadialPotential RadialPotential::tabulated(std::vector<double> r, std::vector<double> v) {
    RadialPotential p;
    p.kind = Kind::Tabulated;
    p.table_r = std::move(r);
    p.table_v = std::move(v);
    p.validate();
    // Support: the node after the last positive sample (V decays linearly to it),
    // or the last node if the table ends on a positive value.
    p.R = 0.0;
    for (size_t i = 0; i < p.table_v.size(); ++i)
        if (p.table_v[i] > 0.0) p.R = (i + 1 < p.table_r.size()) ? p.table_r[i + 1] : p.table_r[i];
    if (p.R == 0.0) p.kind = Kind::Zero;
    return p;
}

RadialPotential RadialPotential::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open potential file " + path);
    std::vector<double> r, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a)) continue;
        if (!(ls >> b)) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": expected two columns";
            throw ValidationError(msg.str());
        }
        r.push_back(a);
        v.push_back(b);
    }
    return tabulated(std::move(r), std::move(v));
}

double RadialPotential::operator()(double r) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::SquareBarrier:
            return r < R ? V0 : 0.0;
        case Kind::Tabulated: {
            if (r <= table_r.front()) return table_v.front();
            if (r >= table_r.back()) return r > table_r.back() ? 0.0 : table_v.back();
            auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
            size_t j = static_cast<size_t>(it - table_r.begin());
            double t = (r - table_r[j - 1]) / (table_r[j] - table_r[j - 1]);
            return (1 - t) * table_v[j - 1] + t * table_v[j];
        }
    }
    return 0.0;
}

double RadialPotential::support() const { return kind == Kind::Zero ? 0.0 : R; }

bool RadialPotential::is_zero() const {
    if (kind == Kind::Zero) return true;
    if (kind == Kind::SquareBarrier) return V0 == 0.0;
    return std::all_of(table_v.begin(), table_v.end(), [](double v) { return v == 0.0; });
}

std::vector<double> RadialPotential::breakpoints() const {
    if (kind == Kind::SquareBarrier) return {R};
    if (kind == Kind::Tabulated) {
        std::vector<double> b;
        for (double r : table_r)
            if (r > 0.0 && r <= R) b.push_back(r);
        return b;
    }
    return {};
}

void RadialPotential::validate() const {
    if (kind == Kind::SquareBarrier) {
        if (V0 < 0.0) throw ValidationError("square barrier: negative amplitude");
        if (R <= 0.0) throw ValidationError("square barrier: support radius must be positive");
    }
    if (kind == Kind::Tabulated) {
        if (table_r.size() < 2 || table_r.size() != table_v.size())
            throw ValidationError("tabulated potential: need at least two (r, V) samples");
        for (size_t i = 0; i < table_r.size(); ++i) {
            if (table_v[i] < 0.0) {
                std::ostringstream msg;
                msg << "tabulated potential: negative sample V(" << table_r[i] << ") = " << table_v[i];
                throw ValidationError(msg.str());
            }
            if (table_r[i] < 0.0 || (i > 0 && table_r[i] <= table_r[i - 1]))
                throw ValidationError("tabulated potential: radii must be nonnegative and increasing");
        }
    }
}

// ---------------------------------------------------------------- grid

std::vector<double> RadialGrid::nodes() const {
    std::vector<double> r(n_points);
    const double h = r_max / n_points;
    if (spacing == Spacing::Uniform) {
        for (int i = 0; i < n_points; ++i) r[i] = (i + 1) * h;
    } else {
        const double r0 = 0.5 * h, ratio = std::pow(r_max / r0, 1.0 / (n_points - 1));
        for (int i = 0; i < n_points; ++i) r[i] = r0 * std::pow(ratio, i);
    }
    r.back() = r_max;
    return r;
}

void RadialGrid::validate() const {
    if (n_points < 64) throw ValidationError("radial grid: n_points must be at least 64");
    if (!(r_max > 0.0)) throw ValidationError("radial grid: r_max must be positive");
}

// ---------------------------------------------------------------- solution accessors

double ScatteringSolution::f_at(double r) const {
    if (neumann && r >= neumann->ellN) return 1.0;
    if (r <= 0.0) {
        if (inner.du.empty()) return 1.0;
        return inner.du.front() / norm;
    }
    return u_at(*this, r) / (norm * r);
}

double ScatteringSolution::w_at(double r) const {
    if (neumann && r >= neumann->ellN) return 0.0;
    return 1.0 - f_at(r);
}

// ---------------------------------------------------------------- solvers

ScatteringSolution solve_zero_energy(const RadialPotential& potential, const RadialGrid& grid) {
    potential.validate();
    grid.validate();
    check_grid_covers(grid, potential.support(), "solve_zero_energy");
    if (grid.r_max <= potential.support() && !potential.is_zero())
        throw ValidationError("solve_zero_energy: r_max must exceed the potential support");

    ScatteringSolution sol;
    sol.potential = potential;
    sol.grid = grid;
    sol.energy = 0.0;

    InnerResult in = integrate_inner(potential, 0.0);
    sol.inner = std::move(in.samples);
    sol.u_end = in.u_end;
    sol.du_end = in.du_end;
    sol.norm = in.du_end;
    const double S = potential.support();

    if (potential.is_zero()) {
        sol.a0 = sol.a0_tail = sol.a0_integral = sol.integral_Vf = 0.0;
    } else {
        sol.a0_tail = S - in.u_end / in.du_end;
        sol.integral_Vf = in.I_end / sol.norm;
        sol.a0_integral = sol.integral_Vf / (8.0 * kPi);
        sol.a0 = sol.a0_tail;
    }
    sol.r = grid.nodes();
    sol.f.resize(sol.r.size());
    for (size_t i = 0; i < sol.r.size(); ++i) sol.f[i] = sol.f_at(sol.r[i]);
    const double rm = grid.r_max;
    const double expected = 1.0 - sol.a0 / rm;
    sol.tail_residual = std::abs(sol.f_at(rm) - expected) / std::abs(expected);
    return sol;
}

ScatteringSolution solve_neumann(const RadialPotential& potential, double ell, int N,
                                 const RadialGrid& grid) {
    potential.validate();
    grid.validate();
    if (!(ell > 0.0 && ell < 1.0)) throw ValidationError("solve_neumann: ell must lie in (0, 1)");
    if (N <= 0) throw ValidationError("solve_neumann: N must be positive");
    const double B = N * ell;
    const double S = potential.support();
    if (B <= S) {
        std::ostringstream msg;
        msg << "solve_neumann: ball radius N*ell = " << B << " does not exceed the support R = " << S;
        throw ValidationError(msg.str());
    }
    check_grid_covers(grid, B, "solve_neumann");

    ScatteringSolution zero = solve_zero_energy(potential, grid);

    ScatteringSolution sol;
    sol.potential = potential;
    sol.grid = grid;
    sol.a0 = zero.a0;
    sol.a0_tail = zero.a0_tail;
    sol.a0_integral = zero.a0_integral;
    sol.integral_Vf = zero.integral_Vf;
    sol.tail_residual = zero.tail_residual;

    NeumannBlock nb;
    nb.ell = ell;
    nb.N = N;
    nb.ellN = B;

    if (potential.is_zero()) {
        sol.energy = 0.0;
        sol.u_end = 0.0;
        sol.du_end = 1.0;
        sol.norm = 1.0;
        nb.lambda = 0.0;
    } else {
        // Normalized Neumann mismatch B u'(B) - u(B) at trial energy.
        auto mismatch = [&](double lam) {
            InnerResult in = integrate_inner(potential, lam);
            double u, du;
            tail_values(S, in.u_end, in.du_end, lam, B, u, du);
            return (B * du - u) / (std::abs(u) + B * std::abs(du));
        };
        double lo = 0.0, hi = 10.0 * 3.0 * zero.a0 / (B * B * B);
        double f_lo = mismatch(lo);
        if (!(f_lo > 0.0)) throw NumericalError("solve_neumann: mismatch at zero energy is not positive");
        double f_hi = mismatch(hi);
        int expansions = 0;
        while (f_hi > 0.0) {
            lo = hi;
            hi *= 2.0;
            f_hi = mismatch(hi);
            if (++expansions > 60) throw NumericalError("solve_neumann: eigenvalue bracketing failed");
        }
        boost::uintmax_t iters = 200;
        auto root = boost::math::tools::bisect(mismatch, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                               iters);
        nb.lambda = 0.5 * (root.first + root.second);
        sol.energy = nb.lambda;

        InnerResult in = integrate_inner(potential, nb.lambda);
        sol.inner = std::move(in.samples);
        sol.u_end = in.u_end;
        sol.du_end = in.du_end;
        double uB, duB;
        tail_values(S, in.u_end, in.du_end, nb.lambda, B, uB, duB);
        sol.norm = uB / B;
        nb.residual = std::abs(B * duB - uB) / (std::abs(uB) + B * std::abs(duB));
        nb.integral_Vf = in.I_end / sol.norm;

        // 4 pi int_S^B r u(r) dr on the analytic tail.
        auto tail_ru = [&](double r) {
            double u, du;
            tail_values(S, in.u_end, in.du_end, nb.lambda, r, u, du);
            return r * u;
        };
        double J_tail = 0.0;
        const int panels = 64;
        for (int p = 0; p < panels; ++p) {
            double a = S + (B - S) * p / panels, b = S + (B - S) * (p + 1) / panels;
            J_tail += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(tail_ru, a, b, 10, 1e-15);
        }
        const double int_f = (in.J_end + 4.0 * kPi * J_tail) / sol.norm;
        nb.integral_w = 4.0 * kPi * B * B * B / 3.0 - int_f;
    }

    sol.neumann = nb;
    sol.r = grid.nodes();
    sol.f.resize(sol.r.size());
    sol.neumann->f.resize(sol.r.size());
    sol.neumann->w.resize(sol.r.size());
    for (size_t i = 0; i < sol.r.size(); ++i) {
        double fl = sol.f_at(sol.r[i]);
        sol.f[i] = fl;
        sol.neumann->f[i] = fl;
        sol.neumann->w[i] = 1.0 - fl;
    }
    return sol;
}

// ---------------------------------------------------------------- asymptotics

AsymptoticsReport check_asymptotics(const std::vector<ScatteringSolution>& solutions) {
    if (solutions.size() < 4) throw ValidationError("check_asymptotics: need at least 4 solutions");
    AsymptoticsReport rep;
    double bmin = 1e300, bmax = 0.0;
    for (const auto& s : solutions) {
        if (!s.neumann) throw ValidationError("check_asymptotics: solution without Neumann block");
        bmin = std::min(bmin, s.neumann->ellN);
        bmax = std::max(bmax, s.neumann->ellN);
    }
    // The fitted family 100..3000 spans a factor of 30, so that is the minimum accepted.
    if (bmax / bmin < 30.0 - 1e-9) throw ValidationError("check_asymptotics: N*ell must span at least a factor of 30");

    std::vector<const ScatteringSolution*> sorted;
    for (const auto& s : solutions) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->neumann->ellN < b->neumann->ellN; });

    const double a0 = sorted.front()->a0;
    rep.a0 = a0;
    rep.w_limit_target = 0.4 * kPi * a0;
    rep.trivial = (a0 == 0.0);

    for (const auto* s : sorted) {
        const auto& nb = *s->neumann;
        const double B = nb.ellN;
        rep.ellN.push_back(B);
        rep.lambda_scaled.push_back(nb.lambda * B * B * B);
        rep.integral_Vf_residual.push_back(std::abs(nb.integral_Vf - 8.0 * kPi * a0 * (1.0 + 1.5 * a0 / B)));
        rep.w_integral_scaled.push_back(nb.integral_w / (B * B));
        const double R = s->potential.support();
        double prev_w = 2.0;
        for (size_t i = 0; i < s->r.size(); ++i) {
            const double r = s->r[i];
            if (r > B) break;
            const double f = nb.f[i], w = nb.w[i];
            if (f < -1e-12 || f > 1.0 + 1e-12) rep.f_bounds_ok = false;
            if (r >= R) {
                if (w > prev_w + 1e-12) rep.w_monotone_ok = false;
                prev_w = w;
            }
            rep.C_w = std::max(rep.C_w, w * (r + 1.0));
        }
    }
    if (rep.trivial) return rep;

    const size_t m = rep.ellN.size();
    Mat A(m, 2), A1(m, 2);
    Vec y(m), yl(m), yw(m);
    for (size_t i = 0; i < m; ++i) {
        const double x = a0 / rep.ellN[i];
        A(i, 0) = x;
        A(i, 1) = x * x;
        y(i) = rep.lambda_scaled[i] / (3.0 * a0) - 1.0;
        A1(i, 0) = 1.0;
        A1(i, 1) = std::log(rep.ellN[i]);
        yl(i) = std::log(std::max(rep.integral_Vf_residual[i], 1e-300));
        yw(i) = rep.w_integral_scaled[i];
    }
    Vec c = A.colPivHouseholderQr().solve(y);
    rep.c1 = c(0);
    rep.c2 = c(1);
    Vec sl = A1.colPivHouseholderQr().solve(yl);
    rep.residual_exponent = sl(1);
    Mat Aw(m, 2);
    for (size_t i = 0; i < m; ++i) {
        Aw(i, 0) = 1.0;
        Aw(i, 1) = 1.0 / rep.ellN[i];
    }
    Vec cw = Aw.colPivHouseholderQr().solve(yw);
    rep.w_limit_extrapolated = cw(0);
    rep.w_limit = rep.w_integral_scaled.back();
    return rep;
}

// ---------------------------------------------------------------- transforms

namespace {

// 4 pi int_0^B g(r) sinc(q r) r^2 dr for every q, with g given on [0, S] by the
// inner samples and on [S, B] by the analytic tail. The integrand is sampled once.
template <class Inner, class Tail>
std::vector<double> radial_transform(const ScatteringSolution& sol, const std::vector<double>& qs, double B,
                                     Inner inner_g, Tail tail_g) {
    std::vector<double> x8, w8;
    gauss_legendre(8, x8, w8);
    const double S = sol.potential.support();
    std::vector<double> nodes, weights;
    const auto& rs = sol.inner.r;
    for (size_t j = 1; j < rs.size(); ++j) {
        const double a = rs[j - 1], b = rs[j];
        if (b <= a) continue;
        const double h = 0.5 * (b - a), m = 0.5 * (b + a);
        for (int k = 0; k < 8; ++k) {
            const double r = m + h * x8[k];
            nodes.push_back(r);
            weights.push_back(w8[k] * h * inner_g(r) * r * r);
        }
    }
    if (B > S) {
        double q_max = 0.0;
        for (double q : qs) q_max = std::max(q_max, q);
        const double width = q_max > 0.0 ? std::min(0.25 * 2.0 * kPi / q_max, (B - S) / 8.0) : (B - S) / 8.0;
        const int panels = std::max(8, static_cast<int>(std::ceil((B - S) / width)));
        const double pw = (B - S) / panels;
        for (int p = 0; p < panels; ++p) {
            const double m = S + (p + 0.5) * pw, h = 0.5 * pw;
            for (int k = 0; k < 8; ++k) {
                const double r = m + h * x8[k];
                nodes.push_back(r);
                weights.push_back(w8[k] * h * tail_g(r) * r * r);
            }
        }
    }
    std::vector<double> out;
    out.reserve(qs.size());
    for (double q : qs) {
        double acc = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * sinc(q * nodes[i]);
        out.push_back(4.0 * kPi * acc);
    }
    return out;
}

void check_aliasing(const ScatteringSolution& sol, double q) {
    double hmax = 0.0;
    for (size_t j = 1; j < sol.inner.r.size(); ++j) hmax = std::max(hmax, sol.inner.r[j] - sol.inner.r[j - 1]);
    if (q * hmax > 0.5) {
        std::ostringstream msg;
        msg << "transform aliasing: inner sample spacing " << hmax << " too coarse for wavenumber " << q;
        throw NumericalError(msg.str());
    }
}

}  // namespace

std::vector<double> w_hat_angular(const ScatteringSolution& sol, const std::vector<double>& qs) {
    if (!sol.neumann) throw ValidationError("w transform requires a Neumann solution");
    if (sol.potential.is_zero()) return std::vector<double>(qs.size(), 0.0);
    for (double q : qs) check_aliasing(sol, q);
    const double B = sol.neumann->ellN;
    const double S = sol.potential.support();
    auto g_in = [&](double r) { return 1.0 - inner_u(sol.inner, r) / (sol.norm * r); };
    auto g_out = [&](double r) {
        double u, du;
        tail_values(S, sol.u_end, sol.du_end, sol.energy, r, u, du);
        return 1.0 - u / (sol.norm * r);
    };
    return radial_transform(sol, qs, B, g_in, g_out);
}

std::vector<double> Vf_hat_angular(const ScatteringSolution& sol, const std::vector<double>& qs) {
    if (sol.potential.is_zero()) return std::vector<double>(qs.size(), 0.0);
    for (double q : qs) check_aliasing(sol, q);
    const double S = sol.potential.support();
    auto g_in = [&](double r) { return sol.potential(r) * inner_u(sol.inner, r) / (sol.norm * r); };
    auto g_out = [](double) { return 0.0; };
    return radial_transform(sol, qs, S, g_in, g_out);
}

double w_hat_angular(const ScatteringSolution& sol, double q) { return w_hat_angular(sol, std::vector<double>{q})[0]; }

double Vf_hat_angular(const ScatteringSolution& sol, double q) { return Vf_hat_angular(sol, std::vector<double>{q})[0]; }

FourierReport fourier_w(const ScatteringSolution& solution, const std::vector<double>& p_list) {
    if (!solution.neumann) throw ValidationError("fourier_w: solution has no Neumann block");
    FourierReport rep;
    for (double p : p_list) {
        if (!(p > 0.0)) throw ValidationError("fourier_w: p values must be positive");
        const double v = w_hat_angular(solution, 2.0 * kPi * p);
        rep.p.push_back(p);
        rep.w_hat.push_back(v);
        rep.C = std::max(rep.C, std::abs(v) * p * p);
    }
    return rep;
}

}  // namespace bogospec
