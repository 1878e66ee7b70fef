#include "bogospec/basis.hpp"

#include "bogospec/errors.hpp"

#include <cmath>
#include <numbers>

namespace bogospec {

namespace {
constexpr double kPi = std::numbers::pi;
}

RadialBasis::RadialBasis(double r_max_, int n_) : r_max(r_max_), n(n_) {
    if (n < 16) throw ValidationError("radial basis: need at least 16 nodes");
    if (!(r_max > 0.0)) throw ValidationError("radial basis: r_max must be positive");
    d = r_max / (n + 1);
    r.resize(n);
    w.resize(n);
    p.resize(n);
    U.resize(n, n);
    const double c = std::sqrt(2.0 / (n + 1));
    for (int i = 0; i < n; ++i) {
        r(i) = (i + 1) * d;
        w(i) = 4.0 * kPi * r(i) * r(i) * d;
        p(i) = (i + 1) * kPi / r_max;
        for (int k = 0; k < n; ++k) U(i, k) = c * std::sin((i + 1.0) * (k + 1.0) * kPi / (n + 1));
    }
}

Mat RadialBasis::laplacian(int l) const {
    Mat t = U * p.array().square().matrix().asDiagonal() * U.transpose();
    if (l > 0) t.diagonal().array() += l * (l + 1.0) / r.array().square();
    return 0.5 * (t + t.transpose());
}

namespace {

// Coefficients of u = r phi in the continuous sine functions sqrt(2/r_max) sin(p r).
Vec sine_coefficients(const RadialBasis& b, const Vec& v) {
    Vec u = v / std::sqrt(4.0 * kPi * b.d);
    // sqrt(2/r_max) sin(p_k r_i) = U_ik / sqrt(d)
    return std::sqrt(b.d) * (b.U.transpose() * u);
}

}  // namespace

double RadialBasis::value(const Vec& v, double radius) const {
    if (radius >= r_max) return 0.0;
    Vec c = sine_coefficients(*this, v);
    const double s = std::sqrt(2.0 / r_max);
    if (radius < 1e-12) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += c(k) * s * p(k);
        return acc;
    }
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += c(k) * s * std::sin(p(k) * radius);
    return acc / radius;
}

std::vector<double> RadialBasis::values(const Vec& v, const std::vector<double>& radii) const {
    const Vec c = sine_coefficients(*this, v) * std::sqrt(2.0 / r_max);
    std::vector<double> out(radii.size(), 0.0);
    for (size_t j = 0; j < radii.size(); ++j) {
        const double radius = radii[j];
        if (radius >= r_max) continue;
        double acc = 0.0;
        if (radius < 1e-12) {
            for (int k = 0; k < n; ++k) acc += c(k) * p(k);
            out[j] = acc;
        } else {
            for (int k = 0; k < n; ++k) acc += c(k) * std::sin(p(k) * radius);
            out[j] = acc / radius;
        }
    }
    return out;
}

double RadialBasis::derivative(const Vec& v, double radius) const {
    Vec c = sine_coefficients(*this, v);
    const double s = std::sqrt(2.0 / r_max);
    double u = 0.0, du = 0.0;
    for (int k = 0; k < n; ++k) {
        u += c(k) * s * std::sin(p(k) * radius);
        du += c(k) * s * p(k) * std::cos(p(k) * radius);
    }
    return (du * radius - u) / (radius * radius);
}

double RadialBasis::laplacian_value(const Vec& v, double radius) const {
    Vec c = sine_coefficients(*this, v);
    const double s = std::sqrt(2.0 / r_max);
    double d2u = 0.0;
    for (int k = 0; k < n; ++k) d2u -= c(k) * s * p(k) * p(k) * std::sin(p(k) * radius);
    return d2u / radius;
}

CartesianBasis::CartesianBasis(int n_, double half_width_, Boundary boundary_)
    : boundary(boundary_), n(n_), half_width(half_width_) {
    if (n < 4) throw ValidationError("cartesian basis: need at least 4 nodes per axis");
    if (!(half_width > 0.0)) throw ValidationError("cartesian basis: half width must be positive");
    x.resize(n);
    if (boundary == Boundary::Dirichlet) {
        h = 2.0 * half_width / (n + 1);
        for (int i = 0; i < n; ++i) x(i) = -half_width + (i + 1) * h;
    } else {
        h = 2.0 * half_width / n;
        for (int i = 0; i < n; ++i) x(i) = -half_width + i * h;
    }
}

std::array<double, 3> CartesianBasis::point(Eigen::Index idx) const {
    const int k = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int i = static_cast<int>(idx / (static_cast<Eigen::Index>(n) * n));
    return {x(i), x(j), x(k)};
}

bool CartesianBasis::on_boundary_layer(Eigen::Index idx) const {
    const int k = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int i = static_cast<int>(idx / (static_cast<Eigen::Index>(n) * n));
    auto edge = [&](int a) { return a == 0 || a == n - 1; };
    return edge(i) || edge(j) || edge(k);
}

Mat CartesianBasis::laplacian_1d() const {
    Mat t = Mat::Zero(n, n);
    if (boundary == Boundary::Dirichlet) {
        for (int i = 0; i < n; ++i) {
            t(i, i) = 2.0 / (h * h);
            if (i > 0) t(i, i - 1) = -1.0 / (h * h);
            if (i + 1 < n) t(i, i + 1) = -1.0 / (h * h);
        }
        return t;
    }
    // Fourier-spectral second derivative: (1/n) sum_m q_m^2 cos(q_m (x_i - x_j)).
    const double period = 2.0 * half_width;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int m = -(n - 1) / 2; m <= n / 2; ++m) {
                const double q = 2.0 * kPi * m / period;
                acc += q * q * std::cos(q * (i - j) * h);
            }
            t(i, j) = acc / n;
        }
    return 0.5 * (t + t.transpose());
}

SpMat CartesianBasis::laplacian() const {
    const Mat t = laplacian_1d();
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Eigen::Index row = index(i, j, k);
                for (int m = 0; m < n; ++m) {
                    if (t(i, m) != 0.0) trip.emplace_back(row, index(m, j, k), t(i, m));
                    if (t(j, m) != 0.0) trip.emplace_back(row, index(i, m, k), t(j, m));
                    if (t(k, m) != 0.0) trip.emplace_back(row, index(i, j, m), t(k, m));
                }
            }
    SpMat l(dim(), dim());
    l.setFromTriplets(trip.begin(), trip.end());
    return l;
}

Basis Basis::make_radial(double r_max, int n) {
    Basis b;
    b.kind = Kind::Radial;
    b.radial = RadialBasis(r_max, n);
    return b;
}

Basis Basis::make_cartesian(int n, double half_width, CartesianBasis::Boundary boundary) {
    Basis b;
    b.kind = Kind::Cartesian;
    b.cartesian = CartesianBasis(n, half_width, boundary);
    return b;
}

Eigen::Index Basis::dim() const { return kind == Kind::Radial ? radial.n : cartesian.dim(); }

Vec Basis::weights() const {
    if (kind == Kind::Radial) return radial.w;
    const double h = cartesian.h;
    return Vec::Constant(cartesian.dim(), h * h * h);
}

Vec Basis::radii() const {
    if (kind == Kind::Radial) return radial.r;
    Vec r(cartesian.dim());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        auto pt = cartesian.point(i);
        r(i) = std::sqrt(pt[0] * pt[0] + pt[1] * pt[1] + pt[2] * pt[2]);
    }
    return r;
}

double Basis::spacing() const { return kind == Kind::Radial ? radial.d : cartesian.h; }

}  // namespace bogospec
