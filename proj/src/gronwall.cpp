#include "fracstep/gronwall.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracstep/errors.hpp"
#include "fracstep/specialfn.hpp"

namespace fracstep {

double step_restriction_threshold(double alpha, double pi_a, double Lambda) {
    if (!(Lambda > 0.0)) return std::numeric_limits<double>::infinity();
    return std::pow(2.0 * pi_a * std::tgamma(2.0 - alpha) * Lambda, -1.0 / alpha);
}

bool check_step_restriction(const TimeMesh& mesh, double alpha, double pi_a, double Lambda) {
    return mesh.max_step() <= step_restriction_threshold(alpha, pi_a, Lambda);
}

GronwallCertificate gronwall_bound(const GronwallProblem& problem, const ComplementaryTable& ctable,
                                   const TimeMesh& mesh, double alpha, double pi_a, double rho) {
    const std::size_t N = mesh.size();
    if (ctable.size() != N || problem.g.size() != N || problem.lambdas.size() != N)
        throw Error(ErrorKind::LengthMismatch, "Gronwall data, complementary table and mesh differ in length");
    if (!(problem.v0 >= 0.0)) throw Error(ErrorKind::Domain, "Gronwall v0 must be non-negative");
    double lambda_sum = 0.0;
    for (double l : problem.lambdas) lambda_sum += l;
    if (problem.Lambda < lambda_sum - 1e-14 * std::abs(lambda_sum))
        throw Error(ErrorKind::Domain, "Lambda must dominate the sum of the lambdas");
    const bool simple = !(problem.Lambda > 0.0);
    if (simple && std::any_of(problem.lambdas.begin(), problem.lambdas.end(), [](double l) { return l > 0.0; }))
        throw Error(ErrorKind::Domain, "the Lambda <= 0 branch needs non-positive lambdas");
    if (!simple && std::any_of(problem.lambdas.begin(), problem.lambdas.end(), [](double l) { return l < 0.0; }))
        throw Error(ErrorKind::Domain, "the Lambda > 0 branch needs non-negative lambdas");

    GronwallCertificate cert;
    cert.simple_branch = simple;
    cert.step_restriction_ok = check_step_restriction(mesh, alpha, pi_a, problem.Lambda);
    if (!cert.step_restriction_ok)
        throw Error(ErrorKind::StepRestrictionViolated,
                    "maximum step " + std::to_string(mesh.max_step()) + " exceeds the Gronwall restriction " +
                        std::to_string(step_restriction_threshold(alpha, pi_a, problem.Lambda)));

    std::vector<double> g(N + 1, 0.0);
    std::copy(problem.g.begin(), problem.g.end(), g.begin() + 1);
    const double inflation = std::max(1.0, rho);
    const double gamma = std::tgamma(1.0 - alpha);
    cert.bound.resize(N);
    cert.envelope_factor.resize(N);
    cert.weaker_bound.resize(N);
    double running_max = 0.0;
    double weighted_max = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const double p_sum = ctable.weighted_sum(n, g);
        running_max = std::max(running_max, p_sum);
        weighted_max = std::max(weighted_max, std::pow(mesh.t(n), alpha) * g[n]);
        const double weaker = problem.v0 + pi_a * gamma * weighted_max;
        if (simple) {
            cert.envelope_factor[n - 1] = 1.0;
            cert.bound[n - 1] =
                problem.v0 + (problem.form == GronwallForm::Linear ? p_sum : running_max);
            cert.weaker_bound[n - 1] = weaker;
        } else {
            const double factor =
                2.0 * mittag_leffler(alpha, 2.0 * inflation * pi_a * problem.Lambda * std::pow(mesh.t(n), alpha));
            cert.envelope_factor[n - 1] = factor;
            cert.bound[n - 1] = factor * (problem.v0 + running_max);
            cert.weaker_bound[n - 1] = factor * weaker;
        }
    }
    return cert;
}

double exchange_identity_residual(const ComplementaryTable& ctable, const KernelTable& table,
                                  std::span<const double> v) {
    const std::size_t N = table.size();
    if (ctable.size() != N || v.size() < N + 1)
        throw Error(ErrorKind::LengthMismatch, "sequence shorter than the kernel table");
    std::vector<double> derivative(N + 1, 0.0);
    for (std::size_t j = 1; j <= N; ++j) derivative[j] = table.apply(j, v);
    double worst = 0.0;
    for (std::size_t n = 1; n <= N; ++n)
        worst = std::max(worst, std::abs(ctable.weighted_sum(n, derivative) - (v[n] - v[0])));
    return worst;
}

namespace {

/// Random positive test sequence v^0..v^N from one of a few families.
std::vector<double> draw_sequence(std::mt19937_64& engine, const TimeMesh& mesh, double alpha) {
    const std::size_t N = mesh.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(N + 1);
    const int family = static_cast<int>(unit(engine) * 3.0);
    v[0] = 0.05 + unit(engine);
    switch (family) {
    case 0: // independent values
        for (std::size_t n = 1; n <= N; ++n) v[n] = 0.05 + 2.0 * unit(engine);
        break;
    case 1: // increasing walk
        for (std::size_t n = 1; n <= N; ++n) v[n] = v[n - 1] + std::abs(normal(engine)) * (0.1 + mesh.tau(n));
        break;
    default: { // Mittag-Leffler growth with multiplicative noise
        const double mu = 0.5 + 3.0 * unit(engine);
        for (std::size_t n = 1; n <= N; ++n)
            v[n] = v[0] * mittag_leffler(alpha, mu * std::pow(mesh.t(n), alpha)) * (1.0 + 0.2 * (unit(engine) - 0.5));
        break;
    }
    }
    return v;
}

/// lambdas with a few nonzero leading entries and their sum (the Lambda used).
std::vector<double> draw_lambdas(std::mt19937_64& engine, std::size_t N, double Lambda, bool nonpositive) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> lambdas(N, 0.0);
    const std::size_t active = std::min<std::size_t>(N, 1 + static_cast<std::size_t>(unit(engine) * 3.0));
    std::vector<double> share(active);
    double total = 0.0;
    for (auto& s : share) total += (s = 0.1 + unit(engine));
    const double budget = Lambda * (0.5 + 0.5 * unit(engine));
    for (std::size_t l = 0; l < active; ++l) lambdas[l] = budget * share[l] / total;
    if (nonpositive)
        for (auto& l : lambdas) l = -std::abs(l);
    return lambdas;
}

GronwallReport run_trials(const ComplementaryTable& ctable, const TimeMesh& mesh, const KernelTable& table,
                          const GronwallTrialOptions& options, GronwallForm form) {
    const std::size_t N = mesh.size();
    if (ctable.size() != N || table.size() != N)
        throw Error(ErrorKind::LengthMismatch, "tables and mesh differ in size");
    const double alpha = table.alpha();
    const double theta = table.theta();
    const double rho = options.rho < 0.0 ? mesh.max_ratio() : options.rho;
    std::mt19937_64 engine(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    GronwallReport report;
    report.seed = options.seed;
    // Largest Lambda allowed by the step restriction, kept clear of rounding at the boundary.
    const double lambda_max = 0.999 / (2.0 * options.pi_a * std::tgamma(2.0 - alpha) * std::pow(mesh.max_step(), alpha));

    std::vector<double> v_theta(N + 1, 0.0);
    std::vector<double> squares(N + 1, 0.0);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        ++report.trials;
        GronwallProblem problem;
        problem.form = form;
        problem.theta = theta;
        const double Lambda = options.nonpositive_lambda ? 1.0 + 3.0 * unit(engine)
                                                         : std::min(lambda_max, options.lambda_cap) * unit(engine);
        problem.lambdas = draw_lambdas(engine, N, Lambda, options.nonpositive_lambda);
        double lambda_sum = 0.0;
        for (double l : problem.lambdas) lambda_sum += l;
        problem.Lambda = options.nonpositive_lambda ? lambda_sum : std::max(lambda_sum, Lambda * unit(engine));

        // The slack construction divides by v^{n-theta}; the families are bounded away from 0.
        const std::vector<double> v = draw_sequence(engine, mesh, alpha);
        problem.v0 = v[0];
        for (std::size_t k = 1; k <= N; ++k) {
            v_theta[k] = (1.0 - theta) * v[k] + theta * v[k - 1];
            squares[k] = v[k] * v[k];
        }
        squares[0] = v[0] * v[0];
        problem.g.assign(N, 0.0);
        for (std::size_t n = 1; n <= N; ++n) {
            if (form == GronwallForm::Quadratic) {
                double lhs = table.apply(n, std::span<const double>(squares));
                for (std::size_t k = 1; k <= n; ++k) lhs -= problem.lambdas[n - k] * v_theta[k] * v_theta[k];
                problem.g[n - 1] = std::max(0.0, lhs / v_theta[n]);
            } else {
                double lhs = table.apply(n, std::span<const double>(v));
                for (std::size_t k = 1; k <= n; ++k) lhs -= problem.lambdas[n - k] * v_theta[k];
                problem.g[n - 1] = std::max(0.0, lhs);
            }
        }
        const GronwallCertificate cert = gronwall_bound(problem, ctable, mesh, alpha, options.pi_a, rho);
        bool weaker_ok = true;
        for (std::size_t n = 1; n <= N; ++n) {
            ++report.checks;
            const double bound = cert.bound[n - 1];
            report.worst_ratio = std::max(report.worst_ratio, v[n] / bound);
            if (!(v[n] <= bound * (1.0 + options.relative_slack))) {
                ++report.violation_count;
                if (report.violations.size() < 20) report.violations.push_back({trial, n, v[n], bound});
            }
            if (!(cert.weaker_bound[n - 1] * (1.0 + options.relative_slack) >= bound)) weaker_ok = false;
        }
        if (!weaker_ok) ++report.weaker_bound_failures;
    }
    return report;
}

} // namespace

GronwallReport verify_gronwall_quadratic(const ComplementaryTable& ctable, const TimeMesh& mesh,
                                         const KernelTable& table, const GronwallTrialOptions& options) {
    return run_trials(ctable, mesh, table, options, GronwallForm::Quadratic);
}

GronwallReport verify_gronwall_linear(const ComplementaryTable& ctable, const TimeMesh& mesh,
                                      const KernelTable& table, const GronwallTrialOptions& options) {
    return run_trials(ctable, mesh, table, options, GronwallForm::Linear);
}

std::string gronwall_report_to_json(const GronwallReport& report) {
    nlohmann::json doc;
    doc["trials"] = report.trials;
    doc["checks"] = report.checks;
    doc["violations"] = report.violation_count;
    doc["weaker_bound_failures"] = report.weaker_bound_failures;
    doc["worst_ratio"] = report.worst_ratio;
    doc["seed"] = report.seed;
    doc["passed"] = report.passed();
    auto& list = doc["first_violations"] = nlohmann::json::array();
    for (const auto& v : report.violations)
        list.push_back({{"trial", v.trial}, {"n", v.n}, {"value", v.value}, {"bound", v.bound}});
    return doc.dump(2);
}

} // namespace fracstep
