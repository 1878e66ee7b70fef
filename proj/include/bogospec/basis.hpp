#pragma once

#include "bogospec/linalg.hpp"

#include <Eigen/Sparse>

#include <array>
#include <vector>

namespace bogospec {

using SpMat = Eigen::SparseMatrix<double>;

// Sine discrete-variable basis for u = r phi on (0, r_max] with u(r_max) = 0.
// Nodes r_i = i d (i = 1..n, d = r_max/(n+1)). Vectors are stored in symmetric
// coordinates v_i = sqrt(w_i) phi(r_i) with volume weights w_i = 4 pi r_i^2 d, so
// Euclidean inner products approximate L2(R^3) ones.
struct RadialBasis {
    double r_max = 0.0;
    int n = 0;
    double d = 0.0;
    Vec r, w;
    Mat U;  // orthogonal sine transform, U = U^T = U^{-1}
    Vec p;  // wavenumbers k pi / r_max of the sine modes

    RadialBasis() = default;
    RadialBasis(double r_max, int n);

    // -Delta restricted to angular momentum l, acting on symmetric coordinates.
    Mat laplacian(int l) const;

    // Sine-series evaluation of phi, phi' and Delta phi (s-wave) from symmetric coordinates.
    double value(const Vec& v, double radius) const;
    double derivative(const Vec& v, double radius) const;
    double laplacian_value(const Vec& v, double radius) const;
    // phi at many radii, sharing one sine transform.
    std::vector<double> values(const Vec& v, const std::vector<double>& radii) const;
};

// Tensor grid on the cube [-L, L]^3. Dirichlet grids use the 7-point Laplacian
// with nodes -L + (i+1) h, h = 2L/(n+1); periodic grids use the Fourier-spectral
// Laplacian with nodes -L + i h, h = 2L/n.
struct CartesianBasis {
    enum class Boundary { Dirichlet, Periodic };

    Boundary boundary = Boundary::Dirichlet;
    int n = 0;
    double half_width = 0.0;
    double h = 0.0;
    Vec x;  // one-dimensional node coordinates

    CartesianBasis() = default;
    CartesianBasis(int n, double half_width, Boundary boundary);

    Eigen::Index dim() const { return static_cast<Eigen::Index>(n) * n * n; }
    Eigen::Index index(int i, int j, int k) const { return (static_cast<Eigen::Index>(i) * n + j) * n + k; }
    std::array<double, 3> point(Eigen::Index idx) const;
    bool on_boundary_layer(Eigen::Index idx) const;

    SpMat laplacian() const;
    Mat laplacian_1d() const;
};

struct Basis {
    enum class Kind { Radial, Cartesian };

    Kind kind = Kind::Radial;
    RadialBasis radial;
    CartesianBasis cartesian;

    static Basis make_radial(double r_max, int n);
    static Basis make_cartesian(int n, double half_width, CartesianBasis::Boundary boundary);

    Eigen::Index dim() const;
    Vec weights() const;
    Vec radii() const;  // |x| of every node
    // Spacing used for resolution checks.
    double spacing() const;
};

}  // namespace bogospec
