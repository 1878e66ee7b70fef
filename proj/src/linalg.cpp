#include "bogospec/linalg.hpp"

#include "bogospec/errors.hpp"

#include <cmath>
#include <sstream>

namespace bogospec {

SymEig sym_eig(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Mat matrix_sqrt(const Mat& s) {
    if (s.size() == 0) return s;
    SymEig e = sym_eig(0.5 * (s + s.transpose()));
    double scale = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
    if (e.values(0) < -1e-10 * scale) {
        std::ostringstream msg;
        msg << "matrix_sqrt: input is indefinite, smallest eigenvalue " << e.values(0);
        throw ValidationError(msg.str());
    }
    return apply_fn(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

double hs_norm(const Mat& a) { return a.norm(); }

double symmetry_defect(const Mat& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

double spectral_norm_sym(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat complement_basis(const Vec& v) {
    const Eigen::Index n = v.size();
    Vec u = v / v.norm();
    // Reflect u onto -sign(u0) e0 to keep the Householder vector well conditioned.
    double s = u(0) >= 0 ? 1.0 : -1.0;
    Vec h = u;
    h(0) += s;
    h /= h.norm();
    Mat p = Mat::Identity(n, n) - 2.0 * h * h.transpose();
    return p.rightCols(n - 1);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    Mat j = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k, k - 1) = b;
        j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(j);
    x.resize(n);
    w.resize(n);
    for (int k = 0; k < n; ++k) {
        x[k] = es.eigenvalues()(k);
        double v0 = es.eigenvectors()(0, k);
        w[k] = 2.0 * v0 * v0;
    }
    // Symmetrize to remove eigensolver noise in the node pairs.
    for (int k = 0; k < n / 2; ++k) {
        double xs = 0.5 * (x[n - 1 - k] - x[k]);
        double ws = 0.5 * (w[n - 1 - k] + w[k]);
        x[k] = -xs;
        x[n - 1 - k] = xs;
        w[k] = ws;
        w[n - 1 - k] = ws;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    gauss_legendre(n, x, w);
    double h = 0.5 * (b - a), m = 0.5 * (b + a);
    for (int k = 0; k < n; ++k) {
        x[k] = m + h * x[k];
        w[k] *= h;
    }
}

}  // namespace bogospec
