#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracstep/errors.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/soe.hpp"
#include "fracstep/specialfn.hpp"

namespace fracstep {

enum class Scheme { L1, FastL1, Alikhanov, BDF2, BDF2Recombined };

std::string_view to_string(Scheme scheme) noexcept;
/// Accepts "l1", "fast-l1", "alikhanov", "bdf2", "bdf2-recombined" (and '_' spellings).
Scheme scheme_from_string(std::string_view name);

/// Discrete convolution kernels A^(n)_{n-k} of
///   (D_tau^alpha v)^(n-theta) = sum_{k=1}^n A^(n)_{n-k} (v^k - v^{k-1}),  1 <= n <= N.
/// Row n holds the n coefficients indexed by lag j = n - k = 0..n-1.
template <typename Scalar>
class BasicKernelTable {
public:
    using Row = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicKernelTable(Scheme scheme, Scalar alpha, Scalar theta, std::optional<Scalar> pi_a,
                     std::vector<Row> rows)
        : scheme_(scheme), alpha_(alpha), theta_(theta), pi_a_(pi_a), rows_(std::move(rows)) {
        for (std::size_t n = 1; n <= rows_.size(); ++n)
            if (static_cast<std::size_t>(rows_[n - 1].size()) != n)
                throw Error(ErrorKind::LengthMismatch, "kernel row " + std::to_string(n) + " must have " +
                                                           std::to_string(n) + " entries");
    }

    std::size_t size() const { return rows_.size(); }
    std::size_t entry_count() const { return size() * (size() + 1) / 2; }

    /// A^(n)_lag, 1 <= n <= N, 0 <= lag < n.
    Scalar operator()(std::size_t n, std::size_t lag) const {
        return rows_[n - 1][static_cast<Eigen::Index>(lag)];
    }
    /// A^(n)_1, with the convention A^(1)_1 = 0.
    Scalar lag_one(std::size_t n) const { return n >= 2 ? (*this)(n, 1) : Scalar(0); }
    const Row& row(std::size_t n) const { return rows_[n - 1]; }

    Scheme scheme() const { return scheme_; }
    Scalar alpha() const { return alpha_; }
    Scalar theta() const { return theta_; }
    /// The scheme's proven constant in the kernel lower bound, when one is known.
    std::optional<Scalar> pi_a() const { return pi_a_; }

    /// sum_{k=1}^n A^(n)_{n-k} (v^k - v^{k-1}) for a sequence v^0..v^n (or longer).
    template <typename Value>
    Value apply(std::size_t n, std::span<const Value> v) const {
        Value acc = Value(v[n] - v[n - 1]) * (*this)(n, 0);
        for (std::size_t k = 1; k < n; ++k) acc += Value(v[k] - v[k - 1]) * (*this)(n, n - k);
        return acc;
    }

private:
    Scheme scheme_;
    Scalar alpha_;
    Scalar theta_;
    std::optional<Scalar> pi_a_;
    std::vector<Row> rows_;
};

using KernelTable = BasicKernelTable<double>;

namespace detail {

template <typename Scalar>
void check_order(Scalar alpha) {
    if (!(alpha > Scalar(0) && alpha < Scalar(1)))
        throw Error(ErrorKind::Domain, "fractional order must lie in (0, 1)");
}

/// (1/h) int_{base}^{base+h} omega_{1-alpha}(u) du.
template <typename Scalar>
Scalar interval_mean(Scalar alpha, Scalar base, Scalar h) {
    return omega_diff(Scalar(2) - alpha, base, h) / h;
}

/// int_{base}^{base+h} (c - u) omega_{1-alpha}(u) du with c = base + h/2.
/// Positive since omega_{1-alpha} decreases. Far from the singularity the
/// closed form cancels badly (the result is O(h^3)), so with eta = h/(2c)
/// small the binomial series of (1+x)^(-alpha) is used: only odd powers
/// survive the symmetric integration and all their terms share one sign.
template <typename Scalar>
Scalar first_moment(Scalar alpha, Scalar base, Scalar h) {
    using std::abs;
    const Scalar c = base + h / Scalar(2);
    const Scalar eta = h / (Scalar(2) * c);
    if (eta > Scalar(0.5)) {
        const Scalar zeroth = omega_diff(Scalar(2) - alpha, base, h);
        const Scalar first = omega_diff(Scalar(3) - alpha, base, h);
        return c * zeroth - (Scalar(1) - alpha) * first;
    }
    // I = -(c^(2-alpha)/Gamma(1-alpha)) sum_{m odd} binom(-alpha, m) 2 eta^(m+2)/(m+2)
    Scalar binom = Scalar(1);
    Scalar eta_pow = eta * eta;
    Scalar sum = Scalar(0);
    for (int m = 1; m < 400; ++m) {
        binom *= (-alpha - Scalar(m - 1)) / Scalar(m);
        eta_pow *= eta;
        if (m % 2 == 0) continue;
        const Scalar term = binom * Scalar(2) * eta_pow / Scalar(m + 2);
        sum += term;
        if (abs(term) <= std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2) * abs(sum)) break;
    }
    const Scalar scale = (Scalar(1) - alpha) * c * omega(Scalar(2) - alpha, c);
    return -scale * sum;
}

} // namespace detail

/// Nonuniform L1 kernels A^(n)_{n-k} = (1/tau_k) int_{t_{k-1}}^{t_k} omega_{1-alpha}(t_n - s) ds.
template <typename Scalar>
BasicKernelTable<Scalar> l1_kernel(const BasicTimeMesh<Scalar>& mesh, Scalar alpha) {
    detail::check_order(alpha);
    const std::size_t N = mesh.size();
    std::vector<typename BasicKernelTable<Scalar>::Row> rows(N);
    for (std::size_t n = 1; n <= N; ++n) {
        auto& row = rows[n - 1];
        row.resize(static_cast<Eigen::Index>(n));
        for (std::size_t k = 1; k <= n; ++k)
            row[static_cast<Eigen::Index>(n - k)] =
                detail::interval_mean(alpha, mesh.t(n) - mesh.t(k), mesh.tau(k));
    }
    return BasicKernelTable<Scalar>(Scheme::L1, alpha, Scalar(0), Scalar(1), std::move(rows));
}

/// Nonuniform Alikhanov (L2-1_sigma) kernels at the offset t_{n-theta}, theta = alpha/2:
/// quadratic interpolation on [t_{k-1}, t_k] for k < n, linear on [t_{n-1}, t_{n-theta}].
template <typename Scalar>
BasicKernelTable<Scalar> alikhanov_kernel(const BasicTimeMesh<Scalar>& mesh, Scalar alpha) {
    detail::check_order(alpha);
    const Scalar theta = alpha / Scalar(2);
    const std::size_t N = mesh.size();
    std::vector<typename BasicKernelTable<Scalar>::Row> rows(N);
    std::vector<Scalar> coeff;
    for (std::size_t n = 1; n <= N; ++n) {
        coeff.assign(n + 1, Scalar(0)); // coeff[k] multiplies v^k - v^{k-1}
        const Scalar tau_n = mesh.tau(n);
        coeff[n] += omega(Scalar(2) - alpha, (Scalar(1) - theta) * tau_n) / tau_n;
        for (std::size_t k = 1; k < n; ++k) {
            const Scalar tau_k = mesh.tau(k);
            const Scalar base = (mesh.t(n) - mesh.t(k)) - theta * tau_n; // t_{n-theta} - t_k
            const Scalar a_hat = detail::interval_mean(alpha, base, tau_k);
            const Scalar b_hat = Scalar(2) / (tau_k * (tau_k + mesh.tau(k + 1))) *
                                 detail::first_moment(alpha, base, tau_k);
            coeff[k] += a_hat - b_hat;
            coeff[k + 1] += mesh.rho(k) * b_hat;
        }
        auto& row = rows[n - 1];
        row.resize(static_cast<Eigen::Index>(n));
        for (std::size_t k = 1; k <= n; ++k) row[static_cast<Eigen::Index>(n - k)] = coeff[k];
    }
    return BasicKernelTable<Scalar>(Scheme::Alikhanov, alpha, theta, Scalar(11) / Scalar(4), std::move(rows));
}

/// Caputo BDF2-like kernels (theta = 0): row 1 is the L1 row; for n >= 2 the
/// quadratic interpolant through t_{k-1}, t_k, t_{k+1} is used on every
/// [t_{k-1}, t_k], k < n, and the one through t_{n-2}, t_{n-1}, t_n on the
/// last interval. No lower-bound constant is known.
template <typename Scalar>
BasicKernelTable<Scalar> bdf2_kernel(const BasicTimeMesh<Scalar>& mesh, Scalar alpha) {
    detail::check_order(alpha);
    const std::size_t N = mesh.size();
    std::vector<typename BasicKernelTable<Scalar>::Row> rows(N);
    std::vector<Scalar> coeff;
    for (std::size_t n = 1; n <= N; ++n) {
        coeff.assign(n + 1, Scalar(0));
        const Scalar tau_n = mesh.tau(n);
        coeff[n] += omega(Scalar(2) - alpha, tau_n) / tau_n;
        if (n >= 2) {
            for (std::size_t k = 1; k < n; ++k) {
                const Scalar tau_k = mesh.tau(k);
                const Scalar base = mesh.t(n) - mesh.t(k);
                const Scalar a = detail::interval_mean(alpha, base, tau_k);
                const Scalar b = Scalar(2) / (tau_k * (tau_k + mesh.tau(k + 1))) *
                                 detail::first_moment(alpha, base, tau_k);
                coeff[k] += a - b;
                coeff[k + 1] += mesh.rho(k) * b;
            }
            const Scalar tau_prev = mesh.tau(n - 1);
            const Scalar b0 = Scalar(2) / (tau_prev * (tau_prev + tau_n)) *
                              detail::first_moment(alpha, Scalar(0), tau_n);
            coeff[n] += mesh.rho(n - 1) * b0;
            coeff[n - 1] -= b0;
        }
        auto& row = rows[n - 1];
        row.resize(static_cast<Eigen::Index>(n));
        for (std::size_t k = 1; k <= n; ++k) row[static_cast<Eigen::Index>(n - k)] = coeff[k];
    }
    return BasicKernelTable<Scalar>(Scheme::BDF2, alpha, Scalar(0), std::nullopt, std::move(rows));
}

template <typename Scalar>
struct Recombination {
    BasicKernelTable<Scalar> table;
    Scalar eta;
};

/// Variable-weights recombination of the uniform-mesh BDF2 kernels with
/// v-bar^k = v^k - eta v^{k-1}:
///   A-bar^(n)_{n-k} = sum_{j=k}^n A^(n)_{n-j} eta^(j-k),  eta = (1 - A_1/A_0)/2,
/// where A_0, A_1 come from the first row of the translation-invariant part
/// (row 3, or row N when N < 3). Throws NonUniformMesh on graded meshes.
template <typename Scalar>
Recombination<Scalar> bdf2_recombine(const BasicKernelTable<Scalar>& table, const BasicTimeMesh<Scalar>& mesh) {
    if (table.scheme() != Scheme::BDF2)
        throw Error(ErrorKind::Domain, "recombination applies to BDF2 kernels only");
    if (table.size() != mesh.size()) throw Error(ErrorKind::LengthMismatch, "kernel table and mesh disagree");
    if (table.size() < 2) throw Error(ErrorKind::Domain, "recombination needs N >= 2");
    if (!mesh.is_uniform(Scalar(1e-12)))
        throw Error(ErrorKind::NonUniformMesh, "BDF2 recombination is only available on uniform meshes");
    const std::size_t ref = std::min<std::size_t>(3, table.size());
    const Scalar eta = (Scalar(1) - table(ref, 1) / table(ref, 0)) / Scalar(2);
    std::vector<typename BasicKernelTable<Scalar>::Row> rows(table.size());
    for (std::size_t n = 1; n <= table.size(); ++n) {
        auto& row = rows[n - 1];
        row.resize(static_cast<Eigen::Index>(n));
        Scalar acc = Scalar(0);
        for (std::size_t lag = 0; lag < n; ++lag) {
            acc = eta * acc + table(n, lag);
            row[static_cast<Eigen::Index>(lag)] = acc;
        }
    }
    return {BasicKernelTable<Scalar>(Scheme::BDF2Recombined, table.alpha(), Scalar(0), std::nullopt, std::move(rows)),
            eta};
}

/// Two-level fast L1 kernels: the exact L1 diagonal plus, for lags >= 1,
/// the interval means of the exponential sum approximating omega_{1-alpha}.
template <typename Scalar>
BasicKernelTable<Scalar> fast_l1_kernel(const BasicTimeMesh<Scalar>& mesh, Scalar alpha, const SOEApprox& soe) {
    detail::check_order(alpha);
    using std::exp;
    using std::expm1;
    require_fast_l1_certificate(soe, static_cast<double>(alpha), static_cast<double>(mesh.min_step()),
                                static_cast<double>(mesh.final_time()));
    const std::size_t N = mesh.size();
    const auto q = static_cast<Eigen::Index>(soe.size());
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> nodes = soe.nodes.cast<Scalar>().array();
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> weights = soe.weights.cast<Scalar>().array();

    // Per-interval averages (1 - exp(-theta tau_k)) / (theta tau_k), shared by every row.
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> averages(q, static_cast<Eigen::Index>(N));
    for (std::size_t k = 1; k <= N; ++k)
        for (Eigen::Index l = 0; l < q; ++l) {
            const Scalar x = nodes[l] * mesh.tau(k);
            averages(l, static_cast<Eigen::Index>(k - 1)) = x == Scalar(0) ? Scalar(1) : -expm1(-x) / x;
        }

    std::vector<typename BasicKernelTable<Scalar>::Row> rows(N);
    for (std::size_t n = 1; n <= N; ++n) {
        auto& row = rows[n - 1];
        row.resize(static_cast<Eigen::Index>(n));
        row[0] = omega(Scalar(2) - alpha, mesh.tau(n)) / mesh.tau(n);
        for (std::size_t k = 1; k < n; ++k) {
            const Scalar gap = mesh.t(n) - mesh.t(k);
            row[static_cast<Eigen::Index>(n - k)] =
                (weights * (-nodes * gap).exp() * averages.col(static_cast<Eigen::Index>(k - 1))).sum();
        }
    }
    return BasicKernelTable<Scalar>(Scheme::FastL1, alpha, Scalar(0), Scalar(3) / Scalar(2), std::move(rows));
}

/// Assumption audit of a kernel table.
struct AssumptionReport {
    bool a1_holds = true;
    /// Largest positivity or monotonicity defect, in absolute units (0 if none).
    double a1_worst_violation = 0.0;
    std::size_t a1_worst_row = 0;
    std::size_t a1_worst_lag = 0;
    /// Smallest pi_A for which the kernel lower bound holds on every (k, n):
    ///   max [int_{t_{k-1}}^{t_k} omega_{1-alpha}(t_n - s) ds] / (tau_k A^(n)_{n-k}),
    /// +inf if some entry is non-positive.
    double a2_pi_estimate = 0.0;
    double pi_a_claim = 0.0;
    bool a2_holds_for_claim = false;
};

struct AuditOptions {
    /// Monotonicity slack relative to A^(n)_0 (0 gives the strict check).
    double monotone_slack = 1e-13;
};

template <typename Scalar>
AssumptionReport verify_assumptions(const BasicKernelTable<Scalar>& table, const BasicTimeMesh<Scalar>& mesh,
                                    double pi_a_claim, const AuditOptions& options = {}) {
    if (table.size() != mesh.size()) throw Error(ErrorKind::LengthMismatch, "kernel table and mesh disagree");
    AssumptionReport report;
    report.pi_a_claim = pi_a_claim;
    const Scalar alpha = table.alpha();
    auto record = [&](double defect, std::size_t n, std::size_t lag) {
        if (defect > report.a1_worst_violation) {
            report.a1_worst_violation = defect;
            report.a1_worst_row = n;
            report.a1_worst_lag = lag;
        }
    };
    double estimate = 0.0;
    for (std::size_t n = 1; n <= table.size(); ++n) {
        const double diag = static_cast<double>(table(n, 0));
        for (std::size_t lag = 0; lag < n; ++lag) {
            const double a = static_cast<double>(table(n, lag));
            if (!(a > 0.0)) {
                report.a1_holds = false;
                record(-a + (a == 0.0 ? std::numeric_limits<double>::min() : 0.0), n, lag);
            }
            if (lag + 1 < n) {
                const double rise = static_cast<double>(table(n, lag + 1)) - a;
                if (rise > options.monotone_slack * std::abs(diag)) report.a1_holds = false;
                if (rise > 0.0) record(rise, n, lag + 1);
            }
            if (!(a > 0.0)) {
                estimate = std::numeric_limits<double>::infinity();
                continue;
            }
            const std::size_t k = n - lag;
            const double mean = static_cast<double>(detail::interval_mean(alpha, mesh.t(n) - mesh.t(k), mesh.tau(k)));
            estimate = std::max(estimate, mean / a);
        }
    }
    // Rounding-level rises that passed the slack are not violations.
    if (report.a1_holds) report.a1_worst_violation = 0.0, report.a1_worst_row = 0, report.a1_worst_lag = 0;
    report.a2_pi_estimate = estimate;
    report.a2_holds_for_claim = estimate <= pi_a_claim;
    return report;
}

/// CSV body "n,lag,value" (one line per entry, rows in order).
template <typename Scalar>
std::string kernel_table_to_csv(const BasicKernelTable<Scalar>& table, std::string_view value_name = "value") {
    std::ostringstream out;
    out.precision(17);
    out << "n,lag," << value_name << '\n';
    for (std::size_t n = 1; n <= table.size(); ++n)
        for (std::size_t lag = 0; lag < n; ++lag)
            out << n << ',' << lag << ',' << static_cast<double>(table(n, lag)) << '\n';
    return out.str();
}

} // namespace fracstep
