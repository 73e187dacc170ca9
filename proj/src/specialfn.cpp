#include "fracstep/specialfn.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace fracstep {
namespace {

// Past this value of z^(1/alpha) the exponential mode exp(z^(1/alpha))/alpha
// dominates the algebraic remainder of E_alpha(z) by a factor above e^36.
constexpr double kExponentialRegime = 36.0;
// Largest series term tolerated on the negative axis; rounding of the terms
// then stays around 1e-15 in absolute terms.
constexpr double kMaxAlternatingTerm = 8.0;

/// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw Error(ErrorKind::Domain, "Mittag-Leffler order must lie in (0, 1]");
}

double log_term(double alpha, double log_abs_z, int k) {
    return k * log_abs_z - std::lgamma(1.0 + k * alpha);
}

/// sum_{k>=1} z^k / Gamma(1 + k alpha), i.e. E_alpha(z) - 1.
double series_excess(double alpha, double z, const MLEvalConfig& cfg) {
    const double log_abs_z = std::log(std::abs(z));
    CompensatedSum acc;
    int small_run = 0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= cfg.max_terms; ++k) {
        const double magnitude = std::exp(log_term(alpha, log_abs_z, k));
        const double term = (z < 0.0 && (k % 2 == 1)) ? -magnitude : magnitude;
        acc.add(term);
        const double total = std::abs(1.0 + acc.value());
        const bool decaying = magnitude <= previous;
        previous = magnitude;
        if (decaying && magnitude < cfg.abs_tol && magnitude < total * 1e-16)
            ++small_run;
        else if (decaying && z > 0.0 && magnitude < total * 1e-17)
            ++small_run;
        else
            small_run = 0;
        if (small_run >= 3) return acc.value();
    }
    throw Error(ErrorKind::NonConvergence,
                "Mittag-Leffler series did not converge within " + std::to_string(cfg.max_terms) +
                    " terms");
}

/// Largest |z|^k / Gamma(1 + k alpha) over k >= 1.
double max_series_term(double alpha, double abs_z) {
    const double log_abs_z = std::log(abs_z);
    double best = -std::numeric_limits<double>::infinity();
    double previous = best;
    for (int k = 1;; ++k) {
        const double lt = log_term(alpha, log_abs_z, k);
        best = std::max(best, lt);
        if (lt < previous || k > 100000) break;
        previous = lt;
    }
    return std::exp(best);
}

/// E_alpha(-x) for x > 0, 0 < alpha < 1, from the Laplace representation.
double negative_axis_integral(double alpha, double x) {
    using boost::math::quadrature::gauss_kronrod;
    const double pi = std::numbers::pi;
    const double c = std::cos(alpha * pi);
    const double inv_alpha = 1.0 / alpha;
    auto integrand = [&](double v) {
        if (v <= 0.0) return 1.0 / (x * x);
        return std::exp(-std::pow(v, inv_alpha)) / (v * v + 2.0 * v * x * c + x * x);
    };
    // exp(-v^(1/alpha)) underflows beyond this point.
    const double v_end = std::pow(745.0, alpha);
    std::vector<double> breaks{0.0, std::min(1.0, v_end), v_end};
    // Near alpha = 1 the denominator has a narrow dip of width x sin(alpha pi) at v = -x cos(alpha pi).
    const double v_peak = -x * c;
    const double width = x * std::sin(alpha * pi);
    for (double b : {v_peak - width, v_peak, v_peak + width})
        if (b > 0.0 && b < v_end) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double err = 0.0;
        integral += gauss_kronrod<double, 61>::integrate(integrand, breaks[i], breaks[i + 1], 12,
                                                         1e-13, &err);
    }
    return std::sin(alpha * pi) / (alpha * pi) * x * integral;
}

} // namespace

double mittag_leffler(double alpha, double z, const MLEvalConfig& cfg) {
    check_alpha(alpha);
    if (!(cfg.abs_tol > 0.0) || cfg.max_terms < 1)
        throw Error(ErrorKind::Domain, "MLEvalConfig needs abs_tol > 0 and max_terms >= 1");
    if (std::isnan(z)) throw Error(ErrorKind::Domain, "Mittag-Leffler argument is NaN");
    if (z == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(z);
    if (z > 0.0) {
        const double log_value = log_mittag_leffler(alpha, z, cfg);
        return log_value > 709.0 ? std::exp(log_value) : 1.0 + mittag_leffler_excess(alpha, z, cfg);
    }
    const double x = -z;
    if (max_series_term(alpha, x) <= kMaxAlternatingTerm) return 1.0 + series_excess(alpha, z, cfg);
    return negative_axis_integral(alpha, x);
}

double log_mittag_leffler(double alpha, double z, const MLEvalConfig& cfg) {
    check_alpha(alpha);
    if (!(z >= 0.0)) throw Error(ErrorKind::Domain, "log_mittag_leffler needs z >= 0");
    if (z == 0.0) return 0.0;
    if (alpha == 1.0) return z;
    const double growth = std::pow(z, 1.0 / alpha);
    if (growth > kExponentialRegime) return growth - std::log(alpha);
    return std::log1p(series_excess(alpha, z, cfg));
}

double mittag_leffler_excess(double alpha, double z, const MLEvalConfig& cfg) {
    check_alpha(alpha);
    if (std::isnan(z)) throw Error(ErrorKind::Domain, "Mittag-Leffler argument is NaN");
    if (z == 0.0) return 0.0;
    if (alpha == 1.0) return std::expm1(z);
    if (z < 0.0) {
        if (max_series_term(alpha, -z) <= kMaxAlternatingTerm) return series_excess(alpha, z, cfg);
        return negative_axis_integral(alpha, -z) - 1.0;
    }
    const double growth = std::pow(z, 1.0 / alpha);
    if (growth > kExponentialRegime) return std::exp(growth - std::log(alpha)) - 1.0;
    return series_excess(alpha, z, cfg);
}

} // namespace fracstep
