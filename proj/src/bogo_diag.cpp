#include "bogospec/bogo_diag.hpp"

#include "bogospec/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace bogospec {

namespace {

double min_eig(const Mat& a) { return sym_eig(0.5 * (a + a.transpose())).values(0); }

void require_positive(const Mat& a, const char* name) {
    const double lo = min_eig(a);
    if (!(lo > 0.0)) {
        std::ostringstream msg;
        msg << "quadratic form: " << name << " is not positive definite, smallest eigenvalue " << lo;
        throw ValidationError(msg.str());
    }
}

}  // namespace

void QuadraticForm::validate() const {
    if (Phi.rows() != Phi.cols() || Gamma.rows() != Gamma.cols() || Phi.rows() != Gamma.rows())
        throw ValidationError("quadratic form: Phi and Gamma must be square and of equal size");
    if (Phi.rows() == 0) throw ValidationError("quadratic form: empty");
    const double scale = std::max(1.0, Phi.cwiseAbs().maxCoeff());
    if (symmetry_defect(Phi) > 1e-12 * scale || symmetry_defect(Gamma) > 1e-12 * scale)
        throw ValidationError("quadratic form: Phi and Gamma must be symmetric");
    require_positive(Phi - Gamma, "Phi - Gamma");
    require_positive(Phi + Gamma, "Phi + Gamma");
}

BogoliubovDiagonalization diagonalize_quadratic(const QuadraticForm& form) {
    form.validate();
    const Eigen::Index n = form.Phi.rows();
    const Mat I = Mat::Identity(n, n);
    BogoliubovDiagonalization out;
    out.D = 0.5 * (form.D() + form.D().transpose());

    const SymEig ed = sym_eig(out.D);
    const Mat d_half = apply_fn(ed, [](double x) { return std::sqrt(x); });
    const Mat d_mhalf = apply_fn(ed, [](double x) { return 1.0 / std::sqrt(x); });
    Mat sq = d_half * (out.D + 2.0 * form.Gamma) * d_half;
    sq = 0.5 * (sq + sq.transpose());
    const SymEig es = sym_eig(sq);
    if (!(es.values(0) > 0.0)) throw NumericalError("bogoliubov: E~^2 lost positivity");
    out.E_tilde = apply_fn(es, [](double x) { return std::sqrt(x); });
    out.e_tilde = es.values.cwiseSqrt();
    const Mat e_mhalf = apply_fn(es, [](double x) { return std::pow(x, -0.25); });
    const Mat e_half = apply_fn(es, [](double x) { return std::pow(x, 0.25); });
    out.A = d_half * e_mhalf;
    out.B = d_mhalf * e_half;

    Mat aat = out.A * out.A.transpose();
    aat = 0.5 * (aat + aat.transpose());
    const SymEig ea = sym_eig(aat);
    out.alpha = apply_fn(ea, [](double x) { return 0.5 * std::log(std::max(x, 1e-14)); });

    Eigen::JacobiSVD<Mat> svd(out.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.W = svd.matrixU() * svd.matrixV().transpose();

    // tr[D^{1/2} E~ D^{-1/2}] = tr E~, so the shift reduces to the eigenvalue sum.
    out.ground_shift = 0.5 * (out.e_tilde.sum() - form.Phi.trace());

    out.square_defect = (out.E_tilde * out.E_tilde - sq).norm() / sq.norm();
    out.symplectic_defect = (out.A.transpose() * out.B - I).norm();
    out.w_defect = (out.W.transpose() * out.W - I).norm();
    const Mat e2a = apply_fn(out.alpha, [](double x) { return std::exp(2.0 * x); });
    out.alpha_defect = (aat - e2a).norm() / aat.norm();
    return out;
}

std::vector<double> bogoliubov_spectrum(const BogoliubovDiagonalization& diag) {
    return {diag.e_tilde.data(), diag.e_tilde.data() + diag.e_tilde.size()};
}

PropertyReport check_alpha_properties(const BogoliubovDiagonalization& diag, const QuadraticForm& form) {
    (void)form;
    PropertyReport rep;
    const Eigen::Index n = diag.D.rows();
    const Mat I = Mat::Identity(n, n);
    const SymEig ed = sym_eig(diag.D);
    rep.min_E_tilde = diag.e_tilde(0);
    rep.min_D = ed.values(0);
    rep.positivity = rep.min_E_tilde > 0.0 && rep.min_D > 0.0;

    const Mat d_inv = apply_fn(ed, [](double x) { return 1.0 / x; });
    Mat ratio = d_inv * diag.E_tilde * diag.E_tilde * d_inv;
    const Vec rv = sym_eig(0.5 * (ratio + ratio.transpose())).values;
    rep.c = rv(0);
    rep.C = rv(rv.size() - 1);
    rep.comparable = rep.c > 0.0 && std::isfinite(rep.C);

    rep.A_minus_I = hs_norm(diag.A - I);
    rep.B_minus_I = hs_norm(diag.B - I);
    bool finite = std::isfinite(rep.A_minus_I) && std::isfinite(rep.B_minus_I);
    rep.beta = {0.0, 0.5, 0.9, 0.99};
    for (double b : rep.beta) {
        const Mat db = apply_fn(ed, [b](double x) { return std::pow(x, 0.5 * b); });
        const double v = hs_norm(db * diag.alpha * db);
        rep.alpha_weighted.push_back(v);
        if (b <= 0.9) finite = finite && std::isfinite(v);
    }
    const Mat dh = apply_fn(ed, [](double x) { return std::sqrt(x); });
    rep.D_half_alpha = hs_norm(dh * diag.alpha);
    rep.finite_norms = finite && std::isfinite(rep.D_half_alpha);
    return rep;
}

}  // namespace bogospec
