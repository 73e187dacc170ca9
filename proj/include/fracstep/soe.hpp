#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <string_view>

namespace fracstep {

/// Sum-of-exponentials approximation
///   omega_{1-alpha}(t) ~ sum_l weights[l] * exp(-nodes[l] * t),  t in [delta_t, T],
/// with all nodes and weights positive and a certified uniform error eps.
struct SOEApprox {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    double eps = 0.0;
    double delta_t = 0.0;
    double T = 0.0;
    double alpha = 0.0;
    /// Largest residual seen on the certification grid (<= eps).
    double certified_error = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(nodes.size()); }
};

struct SoeBuildOptions {
    std::size_t node_budget = 512;
    int points_per_octave = 40;
};

/// Builds the approximation from the Laplace representation
///   omega_{1-alpha}(t) = sin(pi alpha)/pi * int_0^inf exp(-theta t) theta^(alpha-1) dtheta
/// split into [0, ~1/T] (Gauss-Jacobi, absorbing theta^(alpha-1)) and dyadic
/// intervals [2^j, 2^(j+1)] (Gauss-Legendre) up to a tail cut-off chosen at
/// t = delta_t. The per-interval node count grows until the certification
/// grid passes. Throws ToleranceUnreachable past options.node_budget nodes.
SOEApprox build_soe(double alpha, double eps, double delta_t, double T,
                    const SoeBuildOptions& options = {});

/// Max |omega_{1-alpha}(t) - sum| over the certification grid of [delta_t, T].
double soe_residual(const SOEApprox& approx, int points_per_octave = 40);

/// sum_l w_l exp(-theta_l t); throws OutOfWindow outside [delta_t, T].
double soe_eval(const SOEApprox& approx, double t);

/// The fast-L1 tolerance condition eps <= min{omega_{1-alpha}(T)/3, alpha omega_{2-alpha}(1)}.
double fast_l1_eps_threshold(double alpha, double T);
bool satisfies_fast_l1_condition(const SOEApprox& approx);

/// Throws SoeNotCertified unless the approximation was built for `alpha`,
/// its window covers [min_step, final_time] and it meets the tolerance condition.
void require_fast_l1_certificate(const SOEApprox& approx, double alpha, double min_step, double final_time);

/// One step of the history recurrence
///   H_l(t_k) = exp(-theta_l tau_k) H_l(t_{k-1}) + (1 - exp(-theta_l tau_k)) / (theta_l tau_k) * (u^k - u^{k-1}).
Eigen::VectorXd history_update(const SOEApprox& approx, const Eigen::VectorXd& history,
                               double u_incr, double tau_k);

/// Vector-valued states: one row of `history` per exponential node.
Eigen::MatrixXd history_update(const SOEApprox& approx, const Eigen::MatrixXd& history,
                               const Eigen::RowVectorXd& u_incr, double tau_k);

std::string soe_to_json(const SOEApprox& approx);
SOEApprox soe_from_json(std::string_view text);

} // namespace fracstep
