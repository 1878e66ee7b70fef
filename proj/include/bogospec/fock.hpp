#pragma once

#include "bogospec/basis.hpp"
#include "bogospec/bogo_diag.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace bogospec {

// Occupation vectors of up to three modes with total occupation <= N_max, in
// lexicographic order.
struct FockBasis {
    int n_modes = 0;
    int N_max = 0;
    std::vector<std::array<int, 3>> states;

    FockBasis() = default;
    FockBasis(int n_modes, int N_max);

    Eigen::Index dim() const { return static_cast<Eigen::Index>(states.size()); }
    // -1 if the vector lies outside the truncation.
    Eigen::Index index(const std::array<int, 3>& occ) const;
    static long expected_dim(int n_modes, int N_max);

private:
    std::vector<Eigen::Index> offsets_;  // lookup table indexed by (n0, n1, n2)
};

struct FockHamiltonian {
    FockBasis basis;
    SpMat H;
};

FockHamiltonian build_fock_hamiltonian(const QuadraticForm& form, int N_max);

// k lowest eigenvalues, ascending. Dense below dimension 4000, shift-invert
// subspace iteration above.
std::vector<double> oracle_spectrum(const FockHamiltonian& ham, int k, Eigen::Index dense_limit = 4000);

struct CertifiedSpectrum {
    std::vector<double> values;
    int N_max = 0;       // truncation at which the levels were accepted
    double shift = 0.0;  // max change against N_max + 10
};

// Raises N_max in steps of 10 from N_start until the k lowest levels move by at
// most tol between N_max and N_max + 10.
CertifiedSpectrum certified_spectrum(const QuadraticForm& form, int k, int N_start = 20, double tol = 1e-8);

struct ComparisonReport {
    double ground_residual = 0.0;  // |oracle ground - ground shift|
    double gap_distance = 0.0;     // sorted multiset distance of the excitation gaps
    std::vector<double> oracle_gaps, predicted_gaps;
};

ComparisonReport compare_spectrum(const std::vector<double>& oracle, const BogoliubovDiagonalization& diag,
                                  int k);

// Random symmetric (Phi, Gamma) with min eig(Phi - Gamma) >= 0.2 |Phi|.
QuadraticForm random_admissible_form(int n_modes, std::mt19937_64& rng);

}  // namespace bogospec
