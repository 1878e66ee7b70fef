#pragma once

#include "bogospec/linalg.hpp"

#include <vector>

namespace bogospec {

// sum Phi_ij a*_i a_j + (1/2) sum Gamma_ij (a*_i a*_j + a_i a_j), real symmetric blocks.
struct QuadraticForm {
    Mat Phi, Gamma;

    int n() const { return static_cast<int>(Phi.rows()); }
    Mat D() const { return Phi - Gamma; }
    // Shapes, symmetry to 1e-12, and positivity of Phi - Gamma and Phi + Gamma.
    void validate() const;
};

struct BogoliubovDiagonalization {
    Mat D;        // Phi - Gamma
    Mat E_tilde;  // (D^{1/2} (D + 2 Gamma) D^{1/2})^{1/2}
    Vec e_tilde;  // its eigenvalues, ascending
    Mat A, B;     // A = D^{1/2} E~^{-1/2}, B = D^{-1/2} E~^{1/2}
    Mat alpha;    // log |A*| = (1/2) log(A A^T)
    Mat W;        // orthogonal factor of A = W |A|
    double ground_shift = 0.0;

    // Invariant residuals, measured at construction.
    double square_defect = 0.0;   // |E~^2 - D^{1/2}(D+2G)D^{1/2}| / |E~^2|
    double symplectic_defect = 0.0;  // |A^T B - I|
    double w_defect = 0.0;        // |W^T W - I|
    double alpha_defect = 0.0;    // |A A^T - e^{2 alpha}| / |A A^T|
};

BogoliubovDiagonalization diagonalize_quadratic(const QuadraticForm& form);

std::vector<double> bogoliubov_spectrum(const BogoliubovDiagonalization& diag);

struct PropertyReport {
    double min_E_tilde = 0.0, min_D = 0.0;  // (a)
    double c = 0.0, C = 0.0;                // (b) extreme eigenvalues of D^{-1} E~^2 D^{-1}
    double A_minus_I = 0.0, B_minus_I = 0.0;  // (d) Hilbert-Schmidt norms
    std::vector<double> beta;                  // (e)
    std::vector<double> alpha_weighted;        // |D^{beta/2} alpha D^{beta/2}|_HS
    double D_half_alpha = 0.0;                 // |D^{1/2} alpha|_HS
    bool positivity = false, comparable = false, finite_norms = false;
    bool all_pass() const { return positivity && comparable && finite_norms; }
};

PropertyReport check_alpha_properties(const BogoliubovDiagonalization& diag, const QuadraticForm& form);

}  // namespace bogospec
