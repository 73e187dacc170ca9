#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracstep/errors.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/mesh.hpp"

namespace fracstep {

/// Complementary kernels P^(n)_j, 0 <= j < n, characterised by
///   sum_{j=m}^n P^(n)_{n-j} A^(j)_{j-m} = 1  for 1 <= m <= n <= N.
template <typename Scalar>
class BasicComplementaryTable {
public:
    using Row = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit BasicComplementaryTable(std::vector<Row> rows) : rows_(std::move(rows)) {}

    std::size_t size() const { return rows_.size(); }
    /// P^(n)_j, 1 <= n <= N, 0 <= j < n.
    Scalar operator()(std::size_t n, std::size_t j) const { return rows_[n - 1][static_cast<Eigen::Index>(j)]; }
    const Row& row(std::size_t n) const { return rows_[n - 1]; }

    /// sum_{j=1}^n P^(n)_{n-j} g[j] for a sequence indexed from 1 (g[0] unused).
    template <typename Sequence>
    Scalar weighted_sum(std::size_t n, const Sequence& g) const {
        Scalar acc = Scalar(0);
        for (std::size_t j = 1; j <= n; ++j) acc += (*this)(n, n - j) * static_cast<Scalar>(g[j]);
        return acc;
    }

private:
    std::vector<Row> rows_;
};

using ComplementaryTable = BasicComplementaryTable<double>;

/// P^(n)_0 = 1/A^(n)_0,
/// P^(n)_j = (1/A^(n-j)_0) sum_{k=0}^{j-1} (A^(n-k)_{j-k-1} - A^(n-k)_{j-k}) P^(n)_k.
template <typename Scalar>
BasicComplementaryTable<Scalar> build_complementary(const BasicKernelTable<Scalar>& table) {
    const std::size_t N = table.size();
    for (std::size_t n = 1; n <= N; ++n)
        if (!(table(n, 0) > Scalar(0)))
            throw Error(ErrorKind::ZeroDiagonal, "A^(" + std::to_string(n) + ")_0 is not positive");
    std::vector<typename BasicComplementaryTable<Scalar>::Row> rows(N);
    for (std::size_t n = 1; n <= N; ++n) {
        auto& p = rows[n - 1];
        p.resize(static_cast<Eigen::Index>(n));
        p[0] = Scalar(1) / table(n, 0);
        for (std::size_t j = 1; j < n; ++j) {
            Scalar acc = Scalar(0);
            for (std::size_t k = 0; k < j; ++k)
                acc += (table(n - k, j - k - 1) - table(n - k, j - k)) * p[static_cast<Eigen::Index>(k)];
            p[static_cast<Eigen::Index>(j)] = acc / table(n - j, 0);
        }
    }
    return BasicComplementaryTable<Scalar>(std::move(rows));
}

struct IdentityReport {
    double max_residual = 0.0;
    std::size_t worst_m = 0;
    std::size_t worst_n = 0;
    std::size_t pairs_checked = 0;
    bool sampled = false;
};

struct IdentityOptions {
    /// All pairs (m, n) are checked up to this N; beyond it, 10 N random pairs.
    std::size_t full_check_limit = 256;
    std::uint64_t seed = 20180101;
};

/// max |sum_{j=m}^n P^(n)_{n-j} A^(j)_{j-m} - 1| over the checked pairs.
template <typename Scalar>
IdentityReport identity_residual(const BasicComplementaryTable<Scalar>& ctable, const BasicKernelTable<Scalar>& table,
                                 const IdentityOptions& options = {}) {
    if (ctable.size() != table.size()) throw Error(ErrorKind::LengthMismatch, "tables differ in size");
    const std::size_t N = table.size();
    IdentityReport report;
    auto check = [&](std::size_t m, std::size_t n) {
        Scalar acc = Scalar(0);
        for (std::size_t j = m; j <= n; ++j) acc += ctable(n, n - j) * table(j, j - m);
        using std::abs;
        const double residual = static_cast<double>(abs(acc - Scalar(1)));
        ++report.pairs_checked;
        if (!(residual <= report.max_residual)) {
            report.max_residual = residual;
            report.worst_m = m;
            report.worst_n = n;
        }
    };
    if (N <= options.full_check_limit) {
        for (std::size_t n = 1; n <= N; ++n)
            for (std::size_t m = 1; m <= n; ++m) check(m, n);
        return report;
    }
    report.sampled = true;
    std::mt19937_64 engine(options.seed);
    std::uniform_int_distribution<std::size_t> pick(1, N);
    for (std::size_t i = 0; i < 10 * N; ++i) {
        std::size_t a = pick(engine), b = pick(engine);
        if (a > b) std::swap(a, b);
        check(a, b);
    }
    return report;
}

template <typename Scalar>
std::string complementary_to_csv(const BasicComplementaryTable<Scalar>& ctable) {
    std::ostringstream out;
    out.precision(17);
    out << "n,lag,value\n";
    for (std::size_t n = 1; n <= ctable.size(); ++n)
        for (std::size_t j = 0; j < n; ++j) out << n << ',' << j << ',' << static_cast<double>(ctable(n, j)) << '\n';
    return out.str();
}

/// One failed inequality: lhs <= rhs did not hold within the slack.
struct BoundViolation {
    std::string check;
    std::size_t n = 0;
    std::size_t index = 0; // j, k or the test-function index, depending on the check
    double lhs = 0.0;
    double rhs = 0.0;
};

struct BoundReport {
    std::size_t checks = 0;
    std::size_t violation_count = 0;
    /// The first violations found (at most max_recorded).
    std::vector<BoundViolation> violations;
    /// Largest lhs - rhs seen, relative to max(1, |rhs|); negative means slack everywhere.
    double worst_excess = -std::numeric_limits<double>::infinity();

    bool passed() const { return violation_count == 0; }
};

struct BoundOptions {
    /// lhs <= rhs is accepted when lhs - rhs <= slack * max(1, |rhs|).
    double slack = 1e-10;
    std::size_t max_recorded = 50;
};

/// Nonnegativity of P, the per-entry bound P^(n)_{n-k} <= pi_A Gamma(2-alpha) tau_k^alpha
/// and sum_{j=1}^n P^(n)_{n-j} omega_{1-alpha}(t_j) <= pi_A.
BoundReport check_complementary_bounds(const ComplementaryTable& ctable, const TimeMesh& mesh, double alpha,
                                       double pi_a, const BoundOptions& options = {});

struct GrowthCheckOptions {
    BoundOptions base;
    int max_power = 5;                  // test functions omega_{1+k alpha}, k = 1..max_power
    std::vector<double> mus{0.5, 2.0, 10.0};
};

/// For v_k = omega_{1+k alpha} (whose Caputo derivative is omega_{1+(k-1)alpha}):
///   sum_{j<n} P^(n)_{n-j} omega_{1+(k-1)alpha}(t_j) <= max(1, rho) pi_A omega_{1+k alpha}(t_n),
/// the same sum up to j = n without the factor max(1, rho) when k alpha <= 1, and
///   sum_{j<n} P^(n)_{n-j} E_alpha(mu t_j^alpha) <= pi_A max(1, rho) (E_alpha(mu t_n^alpha) - 1)/mu.
BoundReport check_complementary_growth(const ComplementaryTable& ctable, const TimeMesh& mesh, double alpha,
                                       double pi_a, double rho, const GrowthCheckOptions& options = {});

} // namespace fracstep
