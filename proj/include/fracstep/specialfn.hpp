#pragma once

#include <cmath>
#include <string>

#include "fracstep/errors.hpp"

namespace fracstep {

/// omega_beta(t) = t^(beta-1) / Gamma(beta), the Riemann-Liouville kernel.
template <typename Scalar>
Scalar omega(Scalar beta, Scalar t) {
    if (!(beta > Scalar(0))) throw Error(ErrorKind::Domain, "omega: beta must be positive");
    if (!(t > Scalar(0))) throw Error(ErrorKind::Domain, "omega: t must be positive");
    using std::exp;
    using std::lgamma;
    using std::log;
    using std::pow;
    using std::tgamma;
    if (beta == Scalar(1)) return Scalar(1);
    if (beta < Scalar(100)) return pow(t, beta - Scalar(1)) / tgamma(beta);
    return exp((beta - Scalar(1)) * log(t) - lgamma(beta));
}

/// omega_beta(base + h) - omega_beta(base) for base >= 0, h > 0, without the
/// cancellation of the naive difference when h << base. omega_beta(0) is
/// taken as 0, which is the antiderivative convention for beta > 1.
template <typename Scalar>
Scalar omega_diff(Scalar beta, Scalar base, Scalar h) {
    using std::expm1;
    using std::log1p;
    if (base == Scalar(0)) return omega(beta, h);
    return omega(beta, base) * expm1((beta - Scalar(1)) * log1p(h / base));
}

struct MLEvalConfig {
    double abs_tol = 1e-14;
    int max_terms = 2000;
};

/// Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(1 + k alpha) for
/// 0 < alpha <= 1 and real z.
///
/// The power series is used wherever its terms stay small enough for the
/// requested absolute tolerance. For large negative arguments the series is
/// useless in double arithmetic (for alpha = 1/2 and z = -50 the largest
/// term is about e^2500 while the value is about 0.011), so the completely
/// monotone Laplace representation
///   E_alpha(-x) = sin(alpha pi)/(alpha pi) * x * int_0^inf exp(-v^(1/alpha)) / (v^2 + 2 v x cos(alpha pi) + x^2) dv
/// is integrated by adaptive Gauss-Kronrod quadrature instead. For large
/// positive arguments the result grows like exp(z^(1/alpha))/alpha and may
/// overflow to +inf; use log_mittag_leffler there.
double mittag_leffler(double alpha, double z, const MLEvalConfig& cfg = {});

/// ln E_alpha(z) for z >= 0, finite even when E_alpha(z) overflows.
double log_mittag_leffler(double alpha, double z, const MLEvalConfig& cfg = {});

/// E_alpha(z) - 1 for z >= 0 without cancellation at small z.
double mittag_leffler_excess(double alpha, double z, const MLEvalConfig& cfg = {});

} // namespace fracstep
