#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

#include "fracstep/errors.hpp"

namespace fracstep {

template <typename Scalar>
struct QuadratureRule {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b, a, b > -1,
/// by the Golub-Welsch eigenvalue method. a = b = 0 gives Gauss-Legendre.
template <typename Scalar>
QuadratureRule<Scalar> gauss_jacobi(std::size_t points, Scalar a, Scalar b) {
    if (points == 0) throw Error(ErrorKind::Domain, "Gauss rule needs at least one point");
    if (!(a > Scalar(-1)) || !(b > Scalar(-1)))
        throw Error(ErrorKind::Domain, "Jacobi exponents must exceed -1");
    using std::exp;
    using std::lgamma;
    using std::log;
    using std::sqrt;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const auto n = static_cast<Eigen::Index>(points);
    const Scalar ab = a + b;

    Matrix jacobi = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar k = static_cast<Scalar>(i);
        const Scalar s = Scalar(2) * k + ab;
        jacobi(i, i) = (i == 0) ? (b - a) / (ab + Scalar(2)) : (b * b - a * a) / (s * (s + Scalar(2)));
        if (i + 1 < n) {
            const Scalar m = k + Scalar(1);
            const Scalar t = Scalar(2) * m + ab;
            // m = 1 is written separately so that a + b = -1 stays finite.
            const Scalar beta = (i == 0)
                ? Scalar(4) * (Scalar(1) + a) * (Scalar(1) + b) / (t * t * (t + Scalar(1)))
                : Scalar(4) * m * (m + a) * (m + b) * (m + ab) / (t * t * (t + Scalar(1)) * (t - Scalar(1)));
            jacobi(i, i + 1) = jacobi(i + 1, i) = sqrt(beta);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
    const Scalar log_mu0 = (ab + Scalar(1)) * log(Scalar(2)) + lgamma(a + Scalar(1)) +
                           lgamma(b + Scalar(1)) - lgamma(ab + Scalar(2));
    QuadratureRule<Scalar> rule;
    rule.nodes = eig.eigenvalues();
    rule.weights = exp(log_mu0) * eig.eigenvectors().row(0).transpose().array().square();
    return rule;
}

template <typename Scalar>
QuadratureRule<Scalar> gauss_legendre(std::size_t points) {
    return gauss_jacobi<Scalar>(points, Scalar(0), Scalar(0));
}

} // namespace fracstep
