#include "dynspec/oracles.hpp"

#include <cmath>

#include "dynspec/errors.hpp"
#include "dynspec/numerics.hpp"

namespace dynspec::oracles {
namespace {

ComplexMatrix arm_rows(const RealMatrix& M, std::span<const RealVector> arms) {
    const auto d = M.rows();
    ComplexMatrix X(d, d);
    const ComplexMatrix Mc = M.cast<Complex>();
    for (Eigen::Index k = 0; k < d; ++k) {
        const ComplexMatrix P = matrix_power(Mc, static_cast<std::uint64_t>(2 * k * d + 1));
        X.row(k) = arms[static_cast<std::size_t>(k)].cast<Complex>().transpose() * P;
    }
    return X;
}

void check_shapes(const RealMatrix& M, const RealVector& theta, std::span<const RealVector> arms) {
    if (M.rows() != M.cols()) throw DomainError("oracle: M not square");
    if (theta.size() != M.rows()) throw DomainError("oracle: theta dimension mismatch");
    if (static_cast<Eigen::Index>(arms.size()) != M.rows()) throw DomainError("oracle: need d arms");
    for (const auto& a : arms)
        if (a.size() != M.rows()) throw DomainError("oracle: arm dimension mismatch");
}

}  // namespace

ComplexMatrix structured_weyl_matrix(const RealMatrix& M, const RealVector& theta,
                                     std::span<const RealVector> arms, std::int64_t N,
                                     std::int64_t L, std::int64_t s) {
    check_shapes(M, theta, arms);
    const auto d = M.rows();
    const ComplexMatrix Mc = M.cast<Complex>();
    const ComplexMatrix X = arm_rows(M, arms);

    ComplexMatrix K(d, d);
    ComplexVector col = theta.cast<Complex>();
    for (Eigen::Index l = 0; l < d; ++l) {
        K.col(l) = col;
        col = Mc * col;
    }

    const ComplexMatrix step = matrix_power(Mc, static_cast<std::uint64_t>(2 * d * d));
    std::vector<ComplexMatrix> powers;
    powers.reserve(static_cast<std::size_t>(N));
    ComplexMatrix P = ComplexMatrix::Identity(d, d);
    for (std::int64_t j = 0; j < N; ++j) {
        powers.push_back(P);
        P = P * step;
    }
    const ComplexMatrix W = weyl_matrix_sum(powers, L);
    const ComplexMatrix tail = matrix_power(Mc, static_cast<std::uint64_t>(s * d + N - 1));
    return X * W * tail * K;
}

ComplexMatrix target_matrix(const RealMatrix& M, const RealVector& theta, std::span<const RealVector> arms) {
    check_shapes(M, theta, arms);
    const auto d = M.rows();
    const ComplexMatrix Mc = M.cast<Complex>();
    std::vector<ComplexVector> columns;
    std::vector<Complex> scales;
    for (const auto& comp : generalized_eigen_components(Mc, theta.cast<Complex>())) {
        if (comp.component.norm() <= 1e-8 || std::abs(std::abs(comp.eigenvalue) - 1.0) > 1e-8) continue;
        ComplexVector y(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            const Complex weight = std::pow(comp.eigenvalue, static_cast<int>(2 * k * d + 1));
            y(k) = weight * arms[static_cast<std::size_t>(k)].cast<Complex>().dot(comp.component);
        }
        columns.push_back(y);
        scales.push_back(std::pow(comp.eigenvalue, static_cast<int>(d)));
    }
    if (columns.empty()) return ComplexMatrix::Zero(d, d);
    ComplexMatrix Y(d, static_cast<Eigen::Index>(columns.size()));
    ComplexVector D(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        Y.col(static_cast<Eigen::Index>(i)) = columns[i];
        D(static_cast<Eigen::Index>(i)) = scales[i];
    }
    return Y * D.asDiagonal() * pseudo_inverse(Y);
}

std::vector<double> noiseless_rewards(const RealMatrix& M, const RealVector& theta,
                                      std::span<const RealVector> arm_sequence) {
    std::vector<double> out;
    out.reserve(arm_sequence.size());
    RealVector state = theta;
    for (const auto& x : arm_sequence) {
        out.push_back(state.dot(x));
        state = M * state;
    }
    return out;
}

}  // namespace dynspec::oracles
