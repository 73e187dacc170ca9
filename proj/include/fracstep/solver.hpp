#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "fracstep/complementary.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/soe.hpp"

namespace fracstep {

/// Caputo derivative of t^sigma: Gamma(sigma+1)/Gamma(sigma+1-alpha) t^(sigma-alpha).
double caputo_of_power(double alpha, double sigma, double t);

/// Storage of the past increments nabla u^k and evaluation of the history
/// part sum_{k<n} A^(n)_{n-k} nabla u^k of the discrete Caputo derivative.
class HistoryMemory {
public:
    virtual ~HistoryMemory() = default;
    /// Forget everything; the state dimension is fixed from here on.
    virtual void reset(Eigen::Index dim) = 0;
    /// A^(n)_0.
    virtual double diagonal(std::size_t n) const = 0;
    /// sum_{k=1}^{n-1} A^(n)_{n-k} nabla u^k, given increments 1..n-1 were recorded.
    virtual Eigen::VectorXd history(std::size_t n) const = 0;
    /// Record nabla u^n = u^n - u^{n-1}.
    virtual void record(std::size_t n, const Eigen::VectorXd& increment) = 0;
    virtual double theta() const = 0;
    virtual double alpha() const = 0;
    /// Number of stored scalars (the fast path keeps this independent of n).
    virtual std::size_t stored_values() const = 0;
};

/// Direct O(n) convolution against a kernel table.
class ConvolutionMemory final : public HistoryMemory {
public:
    explicit ConvolutionMemory(const KernelTable& table) : table_(table) {}
    void reset(Eigen::Index dim) override;
    double diagonal(std::size_t n) const override { return table_(n, 0); }
    Eigen::VectorXd history(std::size_t n) const override;
    void record(std::size_t n, const Eigen::VectorXd& increment) override;
    double theta() const override { return table_.theta(); }
    double alpha() const override { return table_.alpha(); }
    std::size_t stored_values() const override;

private:
    const KernelTable& table_;
    Eigen::Index dim_ = 0;
    std::vector<Eigen::VectorXd> increments_;
};

/// Fast L1: exact L1 diagonal plus the exponential-sum histories
/// H_l(t_k) = exp(-theta_l tau_k) H_l(t_{k-1}) + (1 - exp(-theta_l tau_k))/(theta_l tau_k) nabla u^k.
class SoeMemory final : public HistoryMemory {
public:
    /// Throws SoeNotCertified unless soe covers [min step, T] and meets the fast-L1 tolerance condition.
    SoeMemory(const TimeMesh& mesh, double alpha, const SOEApprox& soe);
    void reset(Eigen::Index dim) override;
    double diagonal(std::size_t n) const override;
    Eigen::VectorXd history(std::size_t n) const override;
    void record(std::size_t n, const Eigen::VectorXd& increment) override;
    double theta() const override { return 0.0; }
    double alpha() const override { return alpha_; }
    std::size_t stored_values() const override { return static_cast<std::size_t>(history_.size()); }

private:
    const TimeMesh& mesh_;
    double alpha_;
    const SOEApprox& soe_;
    Eigen::MatrixXd history_; // one row per exponential node
};

/// Symmetric tridiagonal spatial operator L (diag, off-diagonal); a 1x1
/// operator is the single-mode reduction with L = lambda_L.
struct Tridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off; // size dim-1
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

/// -d^2/dx^2 on (0, length) with homogeneous Dirichlet data, `interior` grid points.
Tridiagonal dirichlet_laplacian(double length, std::size_t interior);

/// Solves (diag_shift I + scale L) x = rhs by the Thomas algorithm.
/// Throws SingularSystem on a vanishing pivot.
Eigen::VectorXd solve_shifted(const Tridiagonal& op, double diag_shift, double scale, const Eigen::VectorXd& rhs);

/// Time-stepping for D u + L u = kappa u + psi with the offset scheme
///   [A_0 + (1-theta)(L - kappa)] u^n = A_0 u^{n-1} - sum_{k<n} A_{n-k} nabla u^k
///                                     - theta (L - kappa) u^{n-1} + psi(t_{n-theta}).
/// forcing(n, t) returns psi at t = t_{n-theta}. Returns u^0..u^N.
std::vector<Eigen::VectorXd> integrate(const Tridiagonal& op, double kappa, const TimeMesh& mesh,
                                       HistoryMemory& memory, const Eigen::VectorXd& u0,
                                       const std::function<Eigen::VectorXd(std::size_t, double)>& forcing);

struct SingleModeProblem {
    double alpha = 0.5;
    double lambda = 1.0;
    double kappa = 0.0;
    double u0 = 1.0;
    /// Forcing psi(t); empty means psi = 0.
    std::function<double(double)> psi;
    /// Exact solution; empty means u0 E_alpha(-(lambda - kappa) t^alpha), valid for psi = 0.
    std::function<double(double)> exact;
};

/// psi = 0, exact solution u0 E_alpha(-lambda t^alpha) (singular at t = 0).
SingleModeProblem single_mode_relaxation(double alpha, double lambda, double u0 = 1.0);
/// Smooth manufactured solution u = 1 + t^sigma with the matching forcing.
SingleModeProblem single_mode_power(double alpha, double lambda, double kappa, double sigma);

struct SingleModeSolution {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> exact;
    std::vector<double> error;
    double max_error = 0.0;
    double final_error = 0.0;
};

SingleModeSolution solve_single_mode(const SingleModeProblem& problem, const TimeMesh& mesh, HistoryMemory& memory);
SingleModeSolution solve_single_mode(const SingleModeProblem& problem, const TimeMesh& mesh, const KernelTable& table);

struct FDProblem1D {
    double alpha = 0.5;
    double length = 1.0;
    std::size_t interior = 31;
    double kappa = 0.0;
    std::function<double(double, double)> psi;   // psi(x, t); empty means 0
    std::function<double(double)> u0;            // empty means 0
    std::function<double(double, double)> exact; // optional
};

/// u = (1 + t^sigma) sin(pi x / length) with the forcing from the exact
/// spatial derivative, so the error measures the full discretisation.
FDProblem1D fd1d_manufactured(double alpha, double length, std::size_t interior, double kappa, double sigma);

struct FDSolution {
    double h = 0.0;
    std::vector<double> t;
    std::vector<Eigen::VectorXd> u;
    std::vector<double> l2_norm;   // sqrt(h sum u_i^2)
    std::vector<double> l2_error;  // empty unless an exact solution is known
    std::vector<double> max_error;
    double worst_l2_error = 0.0;
    double worst_max_error = 0.0;
};

FDSolution solve_fd1d(const FDProblem1D& problem, const TimeMesh& mesh, HistoryMemory& memory);
FDSolution solve_fd1d(const FDProblem1D& problem, const TimeMesh& mesh, const KernelTable& table);

/// sqrt(h sum v_i^2).
double discrete_l2(const Eigen::VectorXd& v, double h);

struct StabilityReport {
    std::vector<double> norms;
    std::vector<double> envelope;
    bool envelope_ok = true;
    double worst_ratio = 0.0; // max ||u^n|| / envelope_n
    /// theta <= theta^(n) on every row (the energy argument needs it).
    bool theta_condition = true;
    /// Per-step energy hypothesis sum A nabla ||u||^2 <= 2 kappa ||u^{n-theta}||^2 + 2 ||u^{n-theta}|| ||psi||.
    bool hypothesis_ok = true;
    double worst_hypothesis_excess = 0.0; // relative
    /// The Gronwall step restriction for Lambda = 2 kappa.
    bool step_restriction_ok = true;
};

/// Checks a finite-difference run against
///   ||u^n|| <= 2 E_alpha(4 max(1, rho) pi_A kappa t_n^alpha)
///              (||u^0|| + 2 max_k sum_j P^(k)_{k-j} ||psi(t_{j-theta})||).
/// psi_norms[j-1] = ||psi(t_{j-theta})||.
StabilityReport check_stability(const FDSolution& solution, const TimeMesh& mesh, const KernelTable& table,
                                const ComplementaryTable& ctable, const std::vector<double>& psi_norms, double kappa,
                                double pi_a, double rho);

struct EnergyReport {
    std::vector<double> d;       // d_n
    std::vector<double> theta_n; // theta^(n)
    std::size_t trials = 0;
    std::size_t checks = 0;
    std::size_t violations_a1_first = 0;  // pairing with v^n
    std::size_t violations_a1_second = 0; // pairing with v^{n-1}
    std::size_t violations_41 = 0;
    /// Largest (rhs - lhs)/scale seen for each inequality lhs >= rhs.
    double worst_a1_first = -1.0;
    double worst_a1_second = -1.0;
    double worst_41 = -1.0;
    /// Rows where 0 < d_n < 1/A_0 or 0 < theta^(n) < 1/2 fails.
    std::size_t d_range_failures = 0;
    std::size_t theta_range_failures = 0;
    /// Rows with theta > theta^(n).
    std::size_t theta_condition_failures = 0;

    bool inequalities_hold() const { return violations_a1_first + violations_a1_second + violations_41 == 0; }
};

struct EnergyOptions {
    Eigen::Index dim = 8;
    std::size_t trials = 1000;
    std::uint64_t seed = 7;
    double relative_slack = 1e-12;
};

/// Randomised check of the two energy inequalities for the discrete Caputo
/// derivative (pairings with v^n and v^{n-1}, A^(1)_1 := 0) and of the
/// offset form with d_n = (2A_0 - A_1)/(A_0 (A_0 - A_1)),
/// theta^(n) = (A_0 - A_1)/(2A_0 - A_1). Throws DegenerateKernel if A_0 = A_1.
EnergyReport check_energy_lemmas(const KernelTable& table, const EnergyOptions& options = {});

/// order_i = log2(e_i / e_{i+1}) for errors at N0, 2N0, 4N0, ...
std::vector<double> estimate_order(const std::vector<double>& errors);
/// order_i = log(e_i / e_{i+1}) / log(N_{i+1} / N_i).
std::vector<double> estimate_order(const std::vector<double>& errors, const std::vector<double>& steps);

} // namespace fracstep
