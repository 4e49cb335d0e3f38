#pragma once

// Dense complex matrices: SVD, singular-value truncation, Moore-Penrose
// pseudo-inverse and spectra. Decompositions are delegated to Eigen.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dynspec {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// A = U diag(singular_values) V^*, singular values nonincreasing.
struct SvdFactors {
    ComplexMatrix U;
    RealVector singular_values;
    ComplexMatrix V;

    ComplexMatrix reconstruct() const;
};

bool all_finite(const ComplexMatrix& A);

SvdFactors svd(const ComplexMatrix& A);

/// Keeps singular values in [gamma, inf) and zeroes the rest.
ComplexMatrix truncate_singular(const ComplexMatrix& A, double gamma);

/// Moore-Penrose inverse from the SVD, inverting singular values above
/// max(rows, cols) * eps * sigma_max.
ComplexMatrix pseudo_inverse(const ComplexMatrix& A);

double spectral_norm(const ComplexMatrix& A);

/// Exponentiation by squaring.
ComplexMatrix matrix_power(const ComplexMatrix& A, std::uint64_t exponent);

/// All eigenvalues with algebraic multiplicity.
std::vector<std::complex<double>> eigenvalues(const ComplexMatrix& A);

/// Component of a vector in one generalized eigenspace.
struct EigenComponent {
    std::complex<double> eigenvalue;  // cluster mean
    int multiplicity = 0;             // algebraic
    ComplexVector component;          // theta_alpha
};

/// Splits theta along the generalized eigenspaces of M. Eigenvalues closer
/// than cluster_tol are treated as one.
std::vector<EigenComponent> generalized_eigen_components(const ComplexMatrix& M,
                                                         const ComplexVector& theta,
                                                         double cluster_tol = 1e-6);

/// {alpha^k : | |alpha^k| - lambda | <= 1e-8 and ||theta_alpha|| > 1e-8},
/// duplicates merged.
std::vector<std::complex<double>> distinct_eigen_oracle(const ComplexMatrix& M,
                                                        const ComplexVector& theta,
                                                        std::int64_t k, double lambda);

struct EigenPair {
    std::size_t reference;
    std::size_t estimate;
    double distance;
};

/// Greedy nearest-neighbour pairing in C. Candidate pairs are taken in
/// order of distance, then reference magnitude, then reference real part.
std::vector<EigenPair> match_eigenvalues(std::span<const std::complex<double>> estimates,
                                         std::span<const std::complex<double>> references);

}  // namespace dynspec
