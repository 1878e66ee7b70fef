#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bogospec {

struct RadialPotential {
    enum class Kind { SquareBarrier, Tabulated, Zero };

    Kind kind = Kind::Zero;
    double V0 = 0.0;  // barrier height
    double R = 0.0;   // support radius
    std::vector<double> table_r, table_v;  // tabulated samples, linear interpolation

    static RadialPotential zero();
    static RadialPotential square_barrier(double V0, double R);
    static RadialPotential tabulated(std::vector<double> r, std::vector<double> v);
    // Two whitespace-separated columns (r, V), '#' starts a comment.
    static RadialPotential load(const std::string& path);

    double operator()(double r) const;
    double support() const;
    bool is_zero() const;
    // Points where V is not smooth; the integrator never steps across them.
    std::vector<double> breakpoints() const;
    void validate() const;
};

struct RadialGrid {
    enum class Spacing { Uniform, LogUniform };

    double r_max = 10.0;
    int n_points = 512;
    Spacing spacing = Spacing::Uniform;

    // Uniform: r_i = (i + 1) h, ending at r_max. Log-uniform: geometric nodes from h/2 to r_max.
    std::vector<double> nodes() const;
    void validate() const;
};

// Dense samples of u = r f and u' on [0, support], scaled like u_end below,
// used to evaluate the profile anywhere inside the potential range.
struct InnerSamples {
    std::vector<double> r, u, du;
};

struct NeumannBlock {
    double ell = 0.0;
    int N = 0;
    double ellN = 0.0;
    double lambda = 0.0;
    double integral_Vf = 0.0;  // integral of V f_ell over the ball
    double integral_w = 0.0;   // integral of w_ell over the ball
    double residual = 0.0;     // relative Neumann mismatch at r = ellN
    std::vector<double> f, w;  // on grid nodes (nodes beyond ellN: f = 1, w = 0)
};

struct ScatteringSolution {
    RadialPotential potential;
    RadialGrid grid;
    std::vector<double> r, f;
    double a0 = 0.0;
    double a0_tail = 0.0;      // from the linear tail u ~ C (r - a0)
    double a0_integral = 0.0;  // from (1/8pi) integral V f
    double integral_Vf = 0.0;
    double tail_residual = 0.0;  // relative residual of f against 1 - a0/r at r_max
    std::optional<NeumannBlock> neumann;

    // Solution of the ODE at the solved energy, normalized so that f(r) is
    // u(r)/(norm r). Outside the support the solution is analytic.
    InnerSamples inner;
    double energy = 0.0;  // 0 for the zero-energy problem, lambda for Neumann
    double u_end = 0.0, du_end = 0.0;  // u, u' at support end, same scale as inner
    double norm = 1.0;                 // f = u / (norm r)

    double f_at(double r) const;
    double w_at(double r) const;  // 1 - f_ell for Neumann solutions, 0 beyond ellN
};

ScatteringSolution solve_zero_energy(const RadialPotential& potential, const RadialGrid& grid);

ScatteringSolution solve_neumann(const RadialPotential& potential, double ell, int N,
                                 const RadialGrid& grid);

struct AsymptoticsReport {
    bool trivial = false;
    double a0 = 0.0;
    std::vector<double> ellN, lambda_scaled, integral_Vf_residual, w_integral_scaled;
    double c1 = 0.0, c2 = 0.0;         // lambda (N l)^3/(3 a0) = 1 + c1 a0/(Nl) + c2 (a0/(Nl))^2
    double residual_exponent = 0.0;    // slope of log residual of integral V f_ell vs log(N l)
    double w_limit = 0.0;              // (1/(N l)^2) integral w_ell at the largest N l
    double w_limit_extrapolated = 0.0; // fit L + b/(N l)
    double w_limit_target = 0.0;       // (2/5) pi a0
    double C_w = 0.0;                  // sup_r w_ell(r) (r + 1)
    bool f_bounds_ok = true;           // 0 <= f_ell <= 1 on the grid
    bool w_monotone_ok = true;         // w_ell nonincreasing on [R, N l]
};

AsymptoticsReport check_asymptotics(const std::vector<ScatteringSolution>& solutions);

struct FourierReport {
    std::vector<double> p, w_hat;
    double C = 0.0;  // sup |w_hat(p)| p^2 over p_list
};

// Transform with the e^{-2 pi i p x} convention.
FourierReport fourier_w(const ScatteringSolution& solution, const std::vector<double>& p_list);

// Three-dimensional transforms in the angular-frequency convention e^{-i q x},
// used to build convolution kernels.
double w_hat_angular(const ScatteringSolution& solution, double q);
double Vf_hat_angular(const ScatteringSolution& solution, double q);
std::vector<double> w_hat_angular(const ScatteringSolution& solution, const std::vector<double>& q);
std::vector<double> Vf_hat_angular(const ScatteringSolution& solution, const std::vector<double>& q);

}  // namespace bogospec
