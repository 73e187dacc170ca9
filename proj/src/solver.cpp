#include "fracstep/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fracstep/errors.hpp"
#include "fracstep/gronwall.hpp"
#include "fracstep/specialfn.hpp"

namespace fracstep {

double caputo_of_power(double alpha, double sigma, double t) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "caputo_of_power needs 0 < alpha < 1");
    if (!(sigma > 0.0)) throw Error(ErrorKind::Domain, "caputo_of_power needs sigma > 0");
    if (!(t > 0.0)) throw Error(ErrorKind::Domain, "caputo_of_power needs t > 0");
    const double ratio = sigma < 100.0 ? std::tgamma(sigma + 1.0) / std::tgamma(sigma + 1.0 - alpha)
                                       : std::exp(std::lgamma(sigma + 1.0) - std::lgamma(sigma + 1.0 - alpha));
    return ratio * std::pow(t, sigma - alpha);
}

// ---- memories ---------------------------------------------------------------

void ConvolutionMemory::reset(Eigen::Index dim) {
    dim_ = dim;
    increments_.clear();
}

Eigen::VectorXd ConvolutionMemory::history(std::size_t n) const {
    if (n > table_.size() || increments_.size() + 1 < n)
        throw Error(ErrorKind::LengthMismatch, "history requested beyond the recorded steps");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim_);
    for (std::size_t k = 1; k < n; ++k) acc += table_(n, n - k) * increments_[k - 1];
    return acc;
}

void ConvolutionMemory::record(std::size_t n, const Eigen::VectorXd& increment) {
    if (n != increments_.size() + 1 || increment.size() != dim_)
        throw Error(ErrorKind::LengthMismatch, "increments must be recorded in order with a fixed dimension");
    increments_.push_back(increment);
}

std::size_t ConvolutionMemory::stored_values() const {
    return increments_.size() * static_cast<std::size_t>(dim_);
}

SoeMemory::SoeMemory(const TimeMesh& mesh, double alpha, const SOEApprox& soe)
    : mesh_(mesh), alpha_(alpha), soe_(soe) {
    require_fast_l1_certificate(soe, alpha, mesh.min_step(), mesh.final_time());
}

void SoeMemory::reset(Eigen::Index dim) {
    history_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(soe_.size()), dim);
}

double SoeMemory::diagonal(std::size_t n) const {
    return omega(2.0 - alpha_, mesh_.tau(n)) / mesh_.tau(n);
}

Eigen::VectorXd SoeMemory::history(std::size_t n) const {
    const Eigen::VectorXd weights =
        (soe_.weights.array() * (-soe_.nodes.array() * mesh_.tau(n)).exp()).matrix();
    return history_.transpose() * weights;
}

void SoeMemory::record(std::size_t n, const Eigen::VectorXd& increment) {
    if (increment.size() != history_.cols())
        throw Error(ErrorKind::LengthMismatch, "increment dimension differs from the history");
    history_ = history_update(soe_, history_, increment.transpose(), mesh_.tau(n));
}

// ---- spatial operator and stepping -----------------------------------------

Eigen::VectorXd Tridiagonal::apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = diag.cwiseProduct(v);
    const Eigen::Index m = v.size();
    if (m > 1) {
        out.head(m - 1) += off.cwiseProduct(v.tail(m - 1));
        out.tail(m - 1) += off.cwiseProduct(v.head(m - 1));
    }
    return out;
}

Tridiagonal dirichlet_laplacian(double length, std::size_t interior) {
    if (interior == 0) throw Error(ErrorKind::Domain, "finite differences need at least one interior point");
    if (!(length > 0.0)) throw Error(ErrorKind::Domain, "domain length must be positive");
    const double h = length / static_cast<double>(interior + 1);
    const auto m = static_cast<Eigen::Index>(interior);
    return {Eigen::VectorXd::Constant(m, 2.0 / (h * h)), Eigen::VectorXd::Constant(m - 1, -1.0 / (h * h))};
}

Eigen::VectorXd solve_shifted(const Tridiagonal& op, double diag_shift, double scale, const Eigen::VectorXd& rhs) {
    const Eigen::Index m = rhs.size();
    if (op.diag.size() != m || op.off.size() != std::max<Eigen::Index>(m - 1, 0))
        throw Error(ErrorKind::LengthMismatch, "operator and right-hand side differ in size");
    Eigen::VectorXd upper(std::max<Eigen::Index>(m - 1, 0));
    Eigen::VectorXd x(m);
    double pivot = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double d = diag_shift + scale * op.diag[i];
        const double lower = i > 0 ? scale * op.off[i - 1] : 0.0;
        pivot = d - (i > 0 ? lower * upper[i - 1] : 0.0);
        const double size = std::abs(d) + std::abs(lower) + (i + 1 < m ? std::abs(scale * op.off[i]) : 0.0);
        if (!(std::abs(pivot) > 1e-14 * size) || !std::isfinite(pivot))
            throw Error(ErrorKind::SingularSystem, "implicit step matrix is singular");
        if (i + 1 < m) upper[i] = scale * op.off[i] / pivot;
        x[i] = (rhs[i] - (i > 0 ? lower * x[i - 1] : 0.0)) / pivot;
    }
    for (Eigen::Index i = m - 2; i >= 0; --i) x[i] -= upper[i] * x[i + 1];
    return x;
}

std::vector<Eigen::VectorXd> integrate(const Tridiagonal& op, double kappa, const TimeMesh& mesh,
                                       HistoryMemory& memory, const Eigen::VectorXd& u0,
                                       const std::function<Eigen::VectorXd(std::size_t, double)>& forcing) {
    const std::size_t N = mesh.size();
    const double theta = memory.theta();
    memory.reset(u0.size());
    std::vector<Eigen::VectorXd> u;
    u.reserve(N + 1);
    u.push_back(u0);
    for (std::size_t n = 1; n <= N; ++n) {
        const Eigen::VectorXd& prev = u.back();
        const double a0 = memory.diagonal(n);
        const Eigen::VectorXd shifted_prev = op.apply(prev) - kappa * prev;
        Eigen::VectorXd rhs = a0 * prev - memory.history(n) - theta * shifted_prev;
        if (forcing) rhs += forcing(n, mesh.offset_node(n, theta));
        Eigen::VectorXd next = solve_shifted(op, a0 - (1.0 - theta) * kappa, 1.0 - theta, rhs);
        memory.record(n, next - prev);
        u.push_back(std::move(next));
    }
    return u;
}

// ---- single mode ---------------------------------------------------------------

SingleModeProblem single_mode_relaxation(double alpha, double lambda, double u0) {
    SingleModeProblem p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.u0 = u0;
    return p;
}

SingleModeProblem single_mode_power(double alpha, double lambda, double kappa, double sigma) {
    SingleModeProblem p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.kappa = kappa;
    p.u0 = 1.0;
    p.psi = [=](double t) {
        return caputo_of_power(alpha, sigma, t) + (lambda - kappa) * (1.0 + std::pow(t, sigma));
    };
    p.exact = [=](double t) { return 1.0 + std::pow(t, sigma); };
    return p;
}

SingleModeSolution solve_single_mode(const SingleModeProblem& problem, const TimeMesh& mesh, HistoryMemory& memory) {
    if (std::abs(problem.alpha - memory.alpha()) > 1e-14)
        throw Error(ErrorKind::Domain, "problem and kernels use different fractional orders");
    Tridiagonal op{Eigen::VectorXd::Constant(1, problem.lambda), Eigen::VectorXd(0)};
    std::function<Eigen::VectorXd(std::size_t, double)> forcing;
    if (problem.psi)
        forcing = [&](std::size_t, double t) { return Eigen::VectorXd::Constant(1, problem.psi(t)); };
    const auto u = integrate(op, problem.kappa, mesh, memory, Eigen::VectorXd::Constant(1, problem.u0), forcing);

    std::function<double(double)> exact = problem.exact;
    if (!exact) {
        if (problem.psi) throw Error(ErrorKind::Domain, "forced single-mode problems need an exact solution");
        const double rate = problem.lambda - problem.kappa;
        exact = [&, rate](double t) {
            return t == 0.0 ? problem.u0 : problem.u0 * mittag_leffler(problem.alpha, -rate * std::pow(t, problem.alpha));
        };
    }
    SingleModeSolution out;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double t = mesh.t(n);
        out.t.push_back(t);
        out.u.push_back(u[n][0]);
        out.exact.push_back(exact(t));
        out.error.push_back(std::abs(out.u.back() - out.exact.back()));
        if (n > 0) out.max_error = std::max(out.max_error, out.error.back());
    }
    out.final_error = out.error.back();
    return out;
}

SingleModeSolution solve_single_mode(const SingleModeProblem& problem, const TimeMesh& mesh, const KernelTable& table) {
    if (table.size() != mesh.size()) throw Error(ErrorKind::LengthMismatch, "kernel table and mesh differ in size");
    ConvolutionMemory memory(table);
    return solve_single_mode(problem, mesh, memory);
}

// ---- finite differences in one dimension ----------------------------------------

double discrete_l2(const Eigen::VectorXd& v, double h) {
    return std::sqrt(h * v.squaredNorm());
}

FDProblem1D fd1d_manufactured(double alpha, double length, std::size_t interior, double kappa, double sigma) {
    FDProblem1D p;
    p.alpha = alpha;
    p.length = length;
    p.interior = interior;
    p.kappa = kappa;
    const double k = std::numbers::pi / length;
    p.u0 = [=](double x) { return std::sin(k * x); };
    p.exact = [=](double x, double t) { return (1.0 + std::pow(t, sigma)) * std::sin(k * x); };
    p.psi = [=](double x, double t) {
        return std::sin(k * x) * (caputo_of_power(alpha, sigma, t) + (k * k - kappa) * (1.0 + std::pow(t, sigma)));
    };
    return p;
}

FDSolution solve_fd1d(const FDProblem1D& problem, const TimeMesh& mesh, HistoryMemory& memory) {
    if (std::abs(problem.alpha - memory.alpha()) > 1e-14)
        throw Error(ErrorKind::Domain, "problem and kernels use different fractional orders");
    const Tridiagonal op = dirichlet_laplacian(problem.length, problem.interior);
    const auto m = static_cast<Eigen::Index>(problem.interior);
    FDSolution out;
    out.h = problem.length / static_cast<double>(problem.interior + 1);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(m, out.h, out.h * static_cast<double>(m));

    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(m);
    if (problem.u0)
        for (Eigen::Index i = 0; i < m; ++i) u0[i] = problem.u0(x[i]);
    std::function<Eigen::VectorXd(std::size_t, double)> forcing;
    if (problem.psi)
        forcing = [&](std::size_t, double t) {
            Eigen::VectorXd f(m);
            for (Eigen::Index i = 0; i < m; ++i) f[i] = problem.psi(x[i], t);
            return f;
        };
    out.u = integrate(op, problem.kappa, mesh, memory, u0, forcing);
    for (std::size_t n = 0; n < out.u.size(); ++n) {
        out.t.push_back(mesh.t(n));
        out.l2_norm.push_back(discrete_l2(out.u[n], out.h));
        if (problem.exact) {
            Eigen::VectorXd diff(m);
            for (Eigen::Index i = 0; i < m; ++i) diff[i] = out.u[n][i] - problem.exact(x[i], mesh.t(n));
            out.l2_error.push_back(discrete_l2(diff, out.h));
            out.max_error.push_back(diff.lpNorm<Eigen::Infinity>());
            out.worst_l2_error = std::max(out.worst_l2_error, out.l2_error.back());
            out.worst_max_error = std::max(out.worst_max_error, out.max_error.back());
        }
    }
    return out;
}

FDSolution solve_fd1d(const FDProblem1D& problem, const TimeMesh& mesh, const KernelTable& table) {
    if (table.size() != mesh.size()) throw Error(ErrorKind::LengthMismatch, "kernel table and mesh differ in size");
    ConvolutionMemory memory(table);
    return solve_fd1d(problem, mesh, memory);
}

// ---- stability --------------------------------------------------------------------

namespace {

double theta_threshold(const KernelTable& table, std::size_t n) {
    const double a0 = table(n, 0);
    const double a1 = table.lag_one(n);
    return (a0 - a1) / (2.0 * a0 - a1);
}

} // namespace

StabilityReport check_stability(const FDSolution& solution, const TimeMesh& mesh, const KernelTable& table,
                                const ComplementaryTable& ctable, const std::vector<double>& psi_norms, double kappa,
                                double pi_a, double rho) {
    const std::size_t N = mesh.size();
    if (solution.u.size() != N + 1 || table.size() != N || ctable.size() != N || psi_norms.size() != N)
        throw Error(ErrorKind::LengthMismatch, "stability data differ in length");
    const double alpha = table.alpha();
    const double theta = table.theta();
    StabilityReport report;
    report.norms = solution.l2_norm;
    report.step_restriction_ok = check_step_restriction(mesh, alpha, pi_a, 2.0 * kappa);

    std::vector<double> g(N + 1, 0.0);
    for (std::size_t j = 1; j <= N; ++j) g[j] = 2.0 * psi_norms[j - 1];
    std::vector<double> squares(N + 1);
    for (std::size_t n = 0; n <= N; ++n) squares[n] = solution.l2_norm[n] * solution.l2_norm[n];

    const double inflation = std::max(1.0, rho);
    double running_max = 0.0;
    report.envelope.assign(N + 1, 0.0);
    report.envelope[0] = solution.l2_norm[0];
    for (std::size_t n = 1; n <= N; ++n) {
        running_max = std::max(running_max, ctable.weighted_sum(n, g));
        const double factor = 2.0 * mittag_leffler(alpha, 4.0 * inflation * pi_a * kappa * std::pow(mesh.t(n), alpha));
        report.envelope[n] = factor * (solution.l2_norm[0] + running_max);
        report.worst_ratio = std::max(report.worst_ratio, solution.l2_norm[n] / report.envelope[n]);
        if (!(solution.l2_norm[n] <= report.envelope[n] * (1.0 + 1e-12))) report.envelope_ok = false;

        if (theta > theta_threshold(table, n)) report.theta_condition = false;
        const Eigen::VectorXd offset = (1.0 - theta) * solution.u[n] + theta * solution.u[n - 1];
        const double offset_norm = discrete_l2(offset, solution.h);
        const double lhs = table.apply(n, std::span<const double>(squares));
        const double rhs = 2.0 * kappa * offset_norm * offset_norm + 2.0 * offset_norm * psi_norms[n - 1];
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        const double excess = (lhs - rhs) / scale;
        report.worst_hypothesis_excess = std::max(report.worst_hypothesis_excess, excess);
        if (excess > 1e-9) report.hypothesis_ok = false;
    }
    return report;
}

// ---- energy inequalities ---------------------------------------------------------

EnergyReport check_energy_lemmas(const KernelTable& table, const EnergyOptions& options) {
    const std::size_t N = table.size();
    const double theta = table.theta();
    EnergyReport report;
    report.d.resize(N);
    report.theta_n.resize(N);
    for (std::size_t n = 1; n <= N; ++n) {
        const double a0 = table(n, 0);
        const double a1 = table.lag_one(n);
        if (a0 == a1)
            throw Error(ErrorKind::DegenerateKernel, "A^(" + std::to_string(n) + ")_0 equals A^(n)_1");
        const double d = (2.0 * a0 - a1) / (a0 * (a0 - a1));
        const double th = (a0 - a1) / (2.0 * a0 - a1);
        report.d[n - 1] = d;
        report.theta_n[n - 1] = th;
        if (!(d > 0.0 && d < 1.0 / a0)) ++report.d_range_failures;
        if (!(th > 0.0 && th < 0.5)) ++report.theta_range_failures;
        if (theta > th) ++report.theta_condition_failures;
    }

    std::mt19937_64 engine(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index dim = options.dim;
    std::vector<Eigen::VectorXd> v(N + 1, Eigen::VectorXd(dim));
    std::vector<double> sq(N + 1);
    auto judge = [&](double lhs, double rhs, double scale, std::size_t& count, double& worst) {
        ++report.checks;
        const double defect = (rhs - lhs) / std::max(scale, 1e-300);
        worst = std::max(worst, defect);
        if (defect > options.relative_slack) ++count;
    };
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        ++report.trials;
        // Alternate independent vectors with slowly varying walks (small increments).
        const bool walk = trial % 2 == 1;
        for (std::size_t k = 0; k <= N; ++k)
            for (Eigen::Index i = 0; i < dim; ++i)
                v[k][i] = (walk && k > 0) ? v[k - 1][i] + 0.05 * normal(engine) : normal(engine);
        for (std::size_t k = 0; k <= N; ++k) sq[k] = v[k].squaredNorm();
        for (std::size_t n = 1; n <= N; ++n) {
            Eigen::VectorXd D = Eigen::VectorXd::Zero(dim);
            for (std::size_t k = 1; k <= n; ++k) D += table(n, n - k) * (v[k] - v[k - 1]);
            const double S = table.apply(n, std::span<const double>(sq));
            const double a0 = table(n, 0);
            const double a1 = table.lag_one(n);
            const double DD = D.squaredNorm();

            const double first = 2.0 * D.dot(v[n]);
            judge(first, S + DD / a0, std::abs(first) + std::abs(S) + DD / a0, report.violations_a1_first,
                  report.worst_a1_first);
            const double second = 2.0 * D.dot(v[n - 1]);
            judge(second, S - DD / (a0 - a1), std::abs(second) + std::abs(S) + std::abs(DD / (a0 - a1)),
                  report.violations_a1_second, report.worst_a1_second);
            const Eigen::VectorXd offset = (1.0 - theta) * v[n] + theta * v[n - 1];
            const double combined = 2.0 * D.dot(offset);
            const double correction = report.d[n - 1] * (report.theta_n[n - 1] - theta) * DD;
            judge(combined, S + correction, std::abs(combined) + std::abs(S) + std::abs(correction),
                  report.violations_41, report.worst_41);
        }
    }
    return report;
}

// ---- orders ---------------------------------------------------------------------------

std::vector<double> estimate_order(const std::vector<double>& errors, const std::vector<double>& steps) {
    if (errors.size() < 2) throw Error(ErrorKind::Domain, "order estimation needs at least two errors");
    if (steps.size() != errors.size()) throw Error(ErrorKind::LengthMismatch, "errors and step counts differ");
    for (double e : errors)
        if (!(e > 0.0)) throw Error(ErrorKind::NonPositiveError, "order estimation needs positive errors");
    std::vector<double> orders;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        orders.push_back(std::log(errors[i] / errors[i + 1]) / std::log(steps[i + 1] / steps[i]));
    return orders;
}

std::vector<double> estimate_order(const std::vector<double>& errors) {
    std::vector<double> steps(errors.size());
    for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = std::ldexp(1.0, static_cast<int>(i));
    return estimate_order(errors, steps);
}

} // namespace fracstep
