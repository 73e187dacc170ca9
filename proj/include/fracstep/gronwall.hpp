#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fracstep/complementary.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/mesh.hpp"

namespace fracstep {

enum class GronwallForm {
    Quadratic, // sum A nabla (v^k)^2 <= sum lambda_{n-k} (v^{k-theta})^2 + v^{n-theta} g^n
    Linear,    // sum A nabla v^k     <= sum lambda_{n-k} v^{k-theta} + g^n
};

struct GronwallProblem {
    std::vector<double> lambdas; // lambda_l, l = 0..N-1
    std::vector<double> g;       // g[n-1] = g^n, n = 1..N
    double v0 = 0.0;
    double Lambda = 0.0;
    double theta = 0.0;
    GronwallForm form = GronwallForm::Quadratic;
};

struct GronwallCertificate {
    /// bound[n-1] = B_n.
    std::vector<double> bound;
    /// envelope_factor[n-1] = 2 E_alpha(2 max(1, rho) pi_A Lambda t_n^alpha); 1 on the Lambda <= 0 branch.
    std::vector<double> envelope_factor;
    /// The same bound with the P-weighted sums of g replaced by pi_A Gamma(1-alpha) max_j t_j^alpha g^j.
    std::vector<double> weaker_bound;
    bool step_restriction_ok = true;
    bool simple_branch = false;
};

/// (2 pi_A Gamma(2-alpha) Lambda)^(-1/alpha), or +inf when Lambda <= 0.
double step_restriction_threshold(double alpha, double pi_a, double Lambda);
bool check_step_restriction(const TimeMesh& mesh, double alpha, double pi_a, double Lambda);

/// Gronwall bound for v^n given the hypothesis data. For Lambda > 0:
///   B_n = 2 E_alpha(2 max(1, rho) pi_A Lambda t_n^alpha) (v^0 + max_{k<=n} sum_j P^(k)_{k-j} g^j).
/// For Lambda <= 0 (non-positive lambdas) the simple forms hold without step restriction:
/// v^0 + max_k sum P g (quadratic) and v^0 + sum_j P^(n)_{n-j} g^j (linear).
/// Throws StepRestrictionViolated when Lambda > 0 and the maximum step is too large.
GronwallCertificate gronwall_bound(const GronwallProblem& problem, const ComplementaryTable& ctable,
                                   const TimeMesh& mesh, double alpha, double pi_a, double rho);

/// max_n |sum_j P^(n)_{n-j} sum_k A^(j)_{j-k} nabla v^k - (v^n - v^0)| for v^0..v^N.
double exchange_identity_residual(const ComplementaryTable& ctable, const KernelTable& table,
                                  std::span<const double> v);

struct GronwallTrialOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double pi_a = 1.0;
    /// A3 ratio bound; negative means "use the mesh's max ratio".
    double rho = -1.0;
    /// Draw non-positive lambdas with Lambda <= 0 (the restriction-free branch).
    bool nonpositive_lambda = false;
    /// Largest Lambda drawn on the positive branch, on top of the step restriction.
    double lambda_cap = 4.0;
    /// v^n <= B_n (1 + relative_slack) counts as satisfied.
    double relative_slack = 1e-10;
};

struct GronwallViolation {
    std::size_t trial = 0;
    std::size_t n = 0;
    double value = 0.0;
    double bound = 0.0;
};

struct GronwallReport {
    std::size_t trials = 0;
    std::size_t checks = 0;
    std::size_t violation_count = 0;
    std::vector<GronwallViolation> violations; // first few
    /// max over trials and n of v^n / B_n.
    double worst_ratio = 0.0;
    /// Trials whose weaker (Gamma(1-alpha)) bound fell below the P-sum bound.
    std::size_t weaker_bound_failures = 0;
    std::uint64_t seed = 0;

    bool passed() const { return violation_count == 0 && weaker_bound_failures == 0; }
};

/// Random non-negative sequences v with g^n chosen as the exact slack of the
/// quadratic hypothesis (so it holds with equality wherever the slack is
/// non-negative), checked against gronwall_bound.
GronwallReport verify_gronwall_quadratic(const ComplementaryTable& ctable, const TimeMesh& mesh,
                                         const KernelTable& table, const GronwallTrialOptions& options);

/// As above for the linear hypothesis.
GronwallReport verify_gronwall_linear(const ComplementaryTable& ctable, const TimeMesh& mesh,
                                      const KernelTable& table, const GronwallTrialOptions& options);

std::string gronwall_report_to_json(const GronwallReport& report);

} // namespace fracstep
