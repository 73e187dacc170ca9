#include "fracstep/soe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracstep/errors.hpp"
#include "fracstep/gauss.hpp"
#include "fracstep/specialfn.hpp"

namespace fracstep {
namespace {

/// Log-spaced certification grid: points_per_octave points per dyadic
/// interval of [delta_t, T], both endpoints included.
std::vector<double> certification_grid(double delta_t, double T, int points_per_octave) {
    const int octaves = std::max(1, static_cast<int>(std::ceil(std::log2(T / delta_t))));
    const int count = octaves * points_per_octave;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count) + 1);
    const double log_lo = std::log(delta_t);
    const double log_hi = std::log(T);
    for (int i = 0; i <= count; ++i)
        grid.push_back(std::exp(log_lo + (log_hi - log_lo) * i / count));
    grid.front() = delta_t;
    grid.back() = T;
    return grid;
}

double evaluate(const Eigen::VectorXd& nodes, const Eigen::VectorXd& weights, double t) {
    return (weights.array() * (-nodes.array() * t).exp()).sum();
}

double residual_on(const Eigen::VectorXd& nodes, const Eigen::VectorXd& weights, double alpha,
                   const std::vector<double>& grid) {
    double worst = 0.0;
    for (double t : grid)
        worst = std::max(worst, std::abs(omega(1.0 - alpha, t) - evaluate(nodes, weights, t)));
    return worst;
}

struct Layout {
    double first_cut;   // right end of the Gauss-Jacobi interval [0, first_cut]
    int octaves;        // number of dyadic intervals after it
};

Layout choose_layout(double alpha, double eps, double delta_t, double T) {
    const double prefactor = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
    Layout layout{};
    layout.first_cut = std::exp2(std::floor(std::log2(1.0 / T)));
    // Tail bound: prefactor * int_M^inf exp(-theta dt) theta^(alpha-1) <= prefactor M^(alpha-1) exp(-M dt)/dt.
    double upper = layout.first_cut;
    layout.octaves = 0;
    while (true) {
        const double tail = prefactor * std::pow(upper, alpha - 1.0) * std::exp(-upper * delta_t) / delta_t;
        if (tail <= 0.25 * eps) break;
        upper *= 2.0;
        ++layout.octaves;
        if (layout.octaves > 2000) throw Error(ErrorKind::ToleranceUnreachable, "SOE tail cut-off diverged");
    }
    return layout;
}

void assemble(double alpha, const Layout& layout, std::size_t q, Eigen::VectorXd& nodes,
              Eigen::VectorXd& weights) {
    const double prefactor = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
    const auto total = static_cast<Eigen::Index>(q * (static_cast<std::size_t>(layout.octaves) + 1));
    nodes.resize(total);
    weights.resize(total);
    Eigen::Index pos = 0;

    // [0, A]: int_0^A f(theta) theta^(alpha-1) = (A/2)^alpha int_{-1}^{1} f(A(1+x)/2) (1+x)^(alpha-1) dx
    const auto jacobi = gauss_jacobi<double>(q, 0.0, alpha - 1.0);
    const double a_cut = layout.first_cut;
    for (Eigen::Index i = 0; i < jacobi.nodes.size(); ++i, ++pos) {
        nodes[pos] = 0.5 * a_cut * (1.0 + jacobi.nodes[i]);
        weights[pos] = prefactor * std::pow(0.5 * a_cut, alpha) * jacobi.weights[i];
    }
    const auto legendre = gauss_legendre<double>(q);
    double lo = a_cut;
    for (int j = 0; j < layout.octaves; ++j) {
        const double hi = 2.0 * lo;
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (Eigen::Index i = 0; i < legendre.nodes.size(); ++i, ++pos) {
            const double theta = mid + half * legendre.nodes[i];
            nodes[pos] = theta;
            weights[pos] = prefactor * half * legendre.weights[i] * std::pow(theta, alpha - 1.0);
        }
        lo = hi;
    }
}

} // namespace

SOEApprox build_soe(double alpha, double eps, double delta_t, double T, const SoeBuildOptions& options) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "SOE needs 0 < alpha < 1");
    if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "SOE tolerance must be positive");
    if (!(delta_t > 0.0)) throw Error(ErrorKind::Domain, "SOE cut-off delta_t must be positive");
    if (!(T > delta_t)) throw Error(ErrorKind::Domain, "SOE horizon T must exceed delta_t");
    if (options.points_per_octave < 2) throw Error(ErrorKind::Domain, "certification grid too coarse");

    SOEApprox approx;
    approx.alpha = alpha;
    approx.eps = eps;
    approx.delta_t = delta_t;
    approx.T = T;
    const auto grid = certification_grid(delta_t, T, options.points_per_octave);

    if (eps >= omega(1.0 - alpha, delta_t)) {
        // Any positive sum below omega on the window is within eps.
        approx.nodes = Eigen::VectorXd::Constant(1, 1e-3 / T);
        approx.weights = Eigen::VectorXd::Constant(1, omega(1.0 - alpha, T) * std::exp(-1e-3));
        approx.certified_error = residual_on(approx.nodes, approx.weights, alpha, grid);
        return approx;
    }

    const Layout layout = choose_layout(alpha, eps, delta_t, T);
    const std::size_t intervals = static_cast<std::size_t>(layout.octaves) + 1;
    for (std::size_t q = 1; q * intervals <= options.node_budget; ++q) {
        Eigen::VectorXd nodes;
        Eigen::VectorXd weights;
        assemble(alpha, layout, q, nodes, weights);
        const double residual = residual_on(nodes, weights, alpha, grid);
        if (residual <= eps) {
            approx.nodes = std::move(nodes);
            approx.weights = std::move(weights);
            approx.certified_error = residual;
            return approx;
        }
    }
    throw Error(ErrorKind::ToleranceUnreachable,
                "SOE certification failed within a budget of " + std::to_string(options.node_budget) + " nodes");
}

double soe_residual(const SOEApprox& approx, int points_per_octave) {
    return residual_on(approx.nodes, approx.weights, approx.alpha,
                       certification_grid(approx.delta_t, approx.T, points_per_octave));
}

double soe_eval(const SOEApprox& approx, double t) {
    if (!(t >= approx.delta_t && t <= approx.T))
        throw Error(ErrorKind::OutOfWindow, "SOE evaluated outside its certified window");
    return evaluate(approx.nodes, approx.weights, t);
}

double fast_l1_eps_threshold(double alpha, double T) {
    return std::min(omega(1.0 - alpha, T) / 3.0, alpha * omega(2.0 - alpha, 1.0));
}

bool satisfies_fast_l1_condition(const SOEApprox& approx) {
    return approx.eps <= fast_l1_eps_threshold(approx.alpha, approx.T);
}

void require_fast_l1_certificate(const SOEApprox& approx, double alpha, double min_step, double final_time) {
    if (std::abs(alpha - approx.alpha) > 1e-14)
        throw Error(ErrorKind::SoeNotCertified, "SOE was built for a different fractional order");
    if (!(approx.delta_t <= min_step * (1.0 + 1e-12)) || !(approx.T >= final_time * (1.0 - 1e-12)))
        throw Error(ErrorKind::SoeNotCertified, "SOE window does not cover [min step, T]");
    if (!satisfies_fast_l1_condition(approx))
        throw Error(ErrorKind::SoeNotCertified,
                    "SOE tolerance exceeds min{omega_{1-alpha}(T)/3, alpha omega_{2-alpha}(1)}");
}

namespace {
/// exp(-x) and (1 - exp(-x))/x, the latter accurate as x -> 0.
void decay_factors(const Eigen::VectorXd& nodes, double tau, Eigen::ArrayXd& decay, Eigen::ArrayXd& average) {
    const Eigen::ArrayXd x = nodes.array() * tau;
    decay = (-x).exp();
    average = x.unaryExpr([](double v) { return v == 0.0 ? 1.0 : -std::expm1(-v) / v; });
}
} // namespace

Eigen::VectorXd history_update(const SOEApprox& approx, const Eigen::VectorXd& history, double u_incr,
                               double tau_k) {
    if (history.size() != approx.nodes.size())
        throw Error(ErrorKind::LengthMismatch, "history length differs from SOE node count");
    Eigen::ArrayXd decay, average;
    decay_factors(approx.nodes, tau_k, decay, average);
    return (decay * history.array() + average * u_incr).matrix();
}

Eigen::MatrixXd history_update(const SOEApprox& approx, const Eigen::MatrixXd& history,
                               const Eigen::RowVectorXd& u_incr, double tau_k) {
    if (history.rows() != approx.nodes.size() || history.cols() != u_incr.size())
        throw Error(ErrorKind::LengthMismatch, "history shape does not match SOE nodes and state size");
    Eigen::ArrayXd decay, average;
    decay_factors(approx.nodes, tau_k, decay, average);
    return decay.matrix().asDiagonal() * history + average.matrix() * u_incr;
}

} // namespace fracstep
