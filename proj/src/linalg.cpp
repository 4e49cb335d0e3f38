#include "dynspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "dynspec/errors.hpp"

namespace dynspec {

ComplexMatrix SvdFactors::reconstruct() const {
    const auto k = singular_values.size();
    return U.leftCols(k) * singular_values.cast<std::complex<double>>().asDiagonal() *
           V.leftCols(k).adjoint();
}

bool all_finite(const ComplexMatrix& A) {
    for (Eigen::Index c = 0; c < A.cols(); ++c)
        for (Eigen::Index r = 0; r < A.rows(); ++r)
            if (!std::isfinite(A(r, c).real()) || !std::isfinite(A(r, c).imag())) return false;
    return true;
}

SvdFactors svd(const ComplexMatrix& A) {
    if (!all_finite(A)) throw DomainError("svd: non-finite entries");
    Eigen::JacobiSVD<ComplexMatrix> solver(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

ComplexMatrix truncate_singular(const ComplexMatrix& A, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("truncate_singular: gamma must be positive");
    auto f = svd(A);
    for (Eigen::Index i = 0; i < f.singular_values.size(); ++i)
        if (!(f.singular_values(i) >= gamma)) f.singular_values(i) = 0.0;
    return f.reconstruct();
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& A) {
    const auto f = svd(A);
    const auto k = f.singular_values.size();
    ComplexMatrix out = ComplexMatrix::Zero(A.cols(), A.rows());
    if (k == 0) return out;
    const double cutoff = static_cast<double>(std::max(A.rows(), A.cols())) *
                          std::numeric_limits<double>::epsilon() * f.singular_values(0);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double s = f.singular_values(i);
        if (s > cutoff && s > 0.0) out += (f.V.col(i) / s) * f.U.col(i).adjoint();
    }
    return out;
}

double spectral_norm(const ComplexMatrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> solver(A);
    return solver.singularValues()(0);
}

ComplexMatrix matrix_power(const ComplexMatrix& A, std::uint64_t exponent) {
    if (A.rows() != A.cols()) throw DomainError("matrix_power: matrix not square");
    ComplexMatrix result = ComplexMatrix::Identity(A.rows(), A.cols());
    ComplexMatrix base = A;
    while (exponent > 0) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1u;
        if (exponent > 0) base = base * base;
    }
    return result;
}

std::vector<std::complex<double>> eigenvalues(const ComplexMatrix& A) {
    if (A.rows() != A.cols()) throw DomainError("eigenvalues: matrix not square");
    if (!all_finite(A)) throw DomainError("eigenvalues: non-finite entries");
    if (A.size() == 0) return {};
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(A, false);
    if (solver.info() != Eigen::Success) throw DomainError("eigenvalues: solver did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<EigenComponent> generalized_eigen_components(const ComplexMatrix& M,
                                                         const ComplexVector& theta,
                                                         double cluster_tol) {
    if (M.rows() != M.cols()) throw DomainError("generalized_eigen_components: M not square");
    if (theta.size() != M.rows())
        throw DomainError("generalized_eigen_components: theta dimension mismatch");
    const auto d = M.rows();
    const auto ev = eigenvalues(M);

    struct Cluster {
        std::complex<double> sum;
        int count;
    };
    std::vector<Cluster> clusters;
    for (const auto& lam : ev) {
        auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
            return std::abs(c.sum / static_cast<double>(c.count) - lam) <= cluster_tol;
        });
        if (it == clusters.end())
            clusters.push_back({lam, 1});
        else {
            it->sum += lam;
            ++it->count;
        }
    }

    // Basis of each generalized eigenspace: the right singular vectors of
    // (M - alpha I)^d belonging to its `multiplicity` smallest singular values.
    ComplexMatrix basis(d, d);
    Eigen::Index col = 0;
    std::vector<EigenComponent> out;
    for (const auto& c : clusters) {
        const std::complex<double> alpha = c.sum / static_cast<double>(c.count);
        ComplexMatrix shifted = M - alpha * ComplexMatrix::Identity(d, d);
        const ComplexMatrix power = matrix_power(shifted, static_cast<std::uint64_t>(d));
        Eigen::JacobiSVD<ComplexMatrix> solver(power, Eigen::ComputeFullV);
        basis.middleCols(col, c.count) = solver.matrixV().rightCols(c.count);
        out.push_back({alpha, c.count, ComplexVector()});
        col += c.count;
    }
    const ComplexVector coeffs = basis.fullPivLu().solve(theta);
    col = 0;
    for (auto& comp : out) {
        comp.component = basis.middleCols(col, comp.multiplicity) *
                         coeffs.segment(col, comp.multiplicity);
        col += comp.multiplicity;
    }
    return out;
}

std::vector<std::complex<double>> distinct_eigen_oracle(const ComplexMatrix& M,
                                                        const ComplexVector& theta,
                                                        std::int64_t k, double lambda) {
    if (k < 1) throw DomainError("distinct_eigen_oracle: k must be positive");
    if (lambda < 0.0) throw DomainError("distinct_eigen_oracle: lambda must be nonnegative");
    constexpr double kTol = 1e-8;
    std::vector<std::complex<double>> out;
    for (const auto& comp : generalized_eigen_components(M, theta)) {
        if (comp.component.norm() <= kTol) continue;
        const std::complex<double> beta =
            std::polar(std::pow(std::abs(comp.eigenvalue), static_cast<double>(k)),
                       static_cast<double>(k) * std::arg(comp.eigenvalue));
        if (std::abs(std::abs(beta) - lambda) > kTol) continue;
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const auto& z) { return std::abs(z - beta) <= 1e-6; });
        if (!seen) out.push_back(beta);
    }
    // Real part descending, then imaginary ascending, on a 1e-9 grid so that
    // equal real parts differing in the last bits order stably.
    auto key = [](const std::complex<double>& z) {
        return std::make_tuple(-std::llround(z.real() * 1e9), std::llround(z.imag() * 1e9));
    };
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    return out;
}

std::vector<EigenPair> match_eigenvalues(std::span<const std::complex<double>> estimates,
                                         std::span<const std::complex<double>> references) {
    std::vector<EigenPair> candidates;
    candidates.reserve(estimates.size() * references.size());
    for (std::size_t r = 0; r < references.size(); ++r)
        for (std::size_t e = 0; e < estimates.size(); ++e)
            candidates.push_back({r, e, std::abs(estimates[e] - references[r])});
    std::stable_sort(candidates.begin(), candidates.end(), [&](const EigenPair& a, const EigenPair& b) {
        const auto& ra = references[a.reference];
        const auto& rb = references[b.reference];
        return std::make_tuple(a.distance, std::abs(ra), ra.real()) <
               std::make_tuple(b.distance, std::abs(rb), rb.real());
    });
    std::vector<bool> ref_used(references.size(), false), est_used(estimates.size(), false);
    std::vector<EigenPair> out;
    for (const auto& c : candidates) {
        if (ref_used[c.reference] || est_used[c.estimate]) continue;
        ref_used[c.reference] = est_used[c.estimate] = true;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.reference < b.reference; });
    return out;
}

}  // namespace dynspec
