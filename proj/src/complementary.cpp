#include "fracstep/complementary.hpp"

#include <algorithm>
#include <cmath>

#include "fracstep/specialfn.hpp"

namespace fracstep {
namespace {

class Recorder {
public:
    Recorder(BoundReport& report, const BoundOptions& options) : report_(report), options_(options) {}

    /// Records lhs <= rhs with the absolute-or-relative slack.
    void expect_le(const char* check, std::size_t n, std::size_t index, double lhs, double rhs) {
        judge(check, n, index, lhs, rhs, std::max(1.0, std::abs(rhs)));
    }
    /// Same, for quantities that were rescaled by a common positive factor.
    void expect_le_relative(const char* check, std::size_t n, std::size_t index, double lhs, double rhs) {
        judge(check, n, index, lhs, rhs, std::abs(rhs));
    }

private:
    void judge(const char* check, std::size_t n, std::size_t index, double lhs, double rhs, double scale) {
        ++report_.checks;
        const double excess = (lhs - rhs) / scale;
        report_.worst_excess = std::max(report_.worst_excess, excess);
        if (!(lhs - rhs <= options_.slack * scale)) {
            ++report_.violation_count;
            if (report_.violations.size() < options_.max_recorded)
                report_.violations.push_back({check, n, index, lhs, rhs});
        }
    }

    BoundReport& report_;
    const BoundOptions& options_;
};

void check_sizes(const ComplementaryTable& ctable, const TimeMesh& mesh) {
    if (ctable.size() != mesh.size()) throw Error(ErrorKind::LengthMismatch, "table and mesh differ in size");
}

} // namespace

BoundReport check_complementary_bounds(const ComplementaryTable& ctable, const TimeMesh& mesh, double alpha,
                                       double pi_a, const BoundOptions& options) {
    check_sizes(ctable, mesh);
    BoundReport report;
    Recorder record(report, options);
    const std::size_t N = mesh.size();
    const double gamma = std::tgamma(2.0 - alpha);
    std::vector<double> kernel_at_nodes(N + 1, 0.0);
    for (std::size_t j = 1; j <= N; ++j) kernel_at_nodes[j] = omega(1.0 - alpha, mesh.t(j));
    for (std::size_t n = 1; n <= N; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            const double p = ctable(n, n - k);
            record.expect_le("nonnegative", n, k, -p, 0.0);
            record.expect_le("entry_bound", n, k, p, pi_a * gamma * std::pow(mesh.tau(k), alpha));
        }
        record.expect_le("weighted_sum", n, 0, ctable.weighted_sum(n, kernel_at_nodes), pi_a);
    }
    return report;
}

BoundReport check_complementary_growth(const ComplementaryTable& ctable, const TimeMesh& mesh, double alpha,
                                       double pi_a, double rho, const GrowthCheckOptions& options) {
    check_sizes(ctable, mesh);
    BoundReport report;
    Recorder record(report, options.base);
    const std::size_t N = mesh.size();
    const double inflation = std::max(1.0, rho);

    std::vector<double> derivative(N + 1, 0.0);
    for (int k = 1; k <= options.max_power; ++k) {
        for (std::size_t j = 1; j <= N; ++j) derivative[j] = omega(1.0 + (k - 1) * alpha, mesh.t(j));
        const bool concave = k * alpha <= 1.0;
        for (std::size_t n = 1; n <= N; ++n) {
            double before = 0.0;
            for (std::size_t j = 1; j < n; ++j) before += ctable(n, n - j) * derivative[j];
            const double v_n = omega(1.0 + k * alpha, mesh.t(n));
            record.expect_le("power_sum_to_n_minus_1", n, static_cast<std::size_t>(k), before,
                             inflation * pi_a * v_n);
            if (concave)
                record.expect_le("power_sum_to_n", n, static_cast<std::size_t>(k), ctable.weighted_sum(n, derivative),
                                 pi_a * v_n);
        }
    }

    std::vector<double> log_e(N + 1, 0.0);
    std::vector<double> scaled(N + 1, 0.0);
    for (std::size_t m = 0; m < options.mus.size(); ++m) {
        const double mu = options.mus[m];
        if (!(mu > 0.0)) throw Error(ErrorKind::Domain, "Mittag-Leffler test needs mu > 0");
        for (std::size_t j = 1; j <= N; ++j)
            log_e[j] = log_mittag_leffler(alpha, mu * std::pow(mesh.t(j), alpha));
        for (std::size_t n = 1; n <= N; ++n) {
            // Both sides divided by E_alpha(mu t_n^alpha), which can overflow.
            const double z_n = mu * std::pow(mesh.t(n), alpha);
            for (std::size_t j = 1; j < n; ++j) scaled[j] = std::exp(log_e[j] - log_e[n]);
            double lhs = 0.0;
            for (std::size_t j = 1; j < n; ++j) lhs += ctable(n, n - j) * scaled[j];
            const double excess_fraction =
                log_e[n] < 700.0 ? mittag_leffler_excess(alpha, z_n) * std::exp(-log_e[n]) : -std::expm1(-log_e[n]);
            const double rhs = pi_a * inflation * excess_fraction / mu;
            record.expect_le_relative("mittag_leffler", n, m, lhs, rhs);
        }
    }
    return report;
}

} // namespace fracstep
