#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bogospec {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct SymEig {
    Vec values;   // ascending
    Mat vectors;  // columns
};

SymEig sym_eig(const Mat& a);

// f(A) for symmetric A given its eigendecomposition.
template <class F>
Mat apply_fn(const SymEig& e, F f) {
    Vec fv(e.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
    return e.vectors * fv.asDiagonal() * e.vectors.transpose();
}

template <class F>
Mat apply_fn(const Mat& a, F f) {
    return apply_fn(sym_eig(a), f);
}

// Symmetric PSD square root. Eigenvalues in [-1e-10*|S|, 0) are clamped to zero;
// anything more negative is a ValidationError.
Mat matrix_sqrt(const Mat& s);

double hs_norm(const Mat& a);
double symmetry_defect(const Mat& a);  // max |A - A^T|
double spectral_norm_sym(const Mat& a);

// Orthonormal basis (n x n-1) of the orthogonal complement of unit vector v,
// built from a Householder reflection.
Mat complement_basis(const Vec& v);

// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Same rule mapped to [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace bogospec
