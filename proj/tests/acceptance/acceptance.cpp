// Acceptance runner: one PASS/FAIL line per criterion, details indented below.
//
//   acceptance              run every criterion
//   acceptance --criterion 4

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracstep/complementary.hpp"
#include "fracstep/gronwall.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/soe.hpp"
#include "fracstep/solver.hpp"

using namespace fracstep;

namespace {

constexpr double kFastEps = 1e-10;
const std::vector<std::size_t> kSizes{16, 64, 256};
const std::vector<double> kAlphas{0.3, 0.5, 0.7};

struct MeshCase {
    std::string name;
    TimeMesh mesh;
};

std::vector<MeshCase> mesh_family(std::size_t N) {
    return {{"uniform", TimeMesh::graded(N, 1.0, 1.0)},
            {"graded2", TimeMesh::graded(N, 2.0, 1.0)},
            {"graded3", TimeMesh::graded(N, 3.0, 1.0)},
            {"random", quasi_uniform_mesh(N, 1.0, 0.6, 42 + N)}};
}

/// One (scheme, mesh, N, alpha) cell of the test grid.
struct Cell {
    Scheme scheme;
    std::string mesh_name;
    TimeMesh mesh;
    double alpha;
    KernelTable table;
    /// The proven constant, or the audited estimate for the recombined kernels.
    double pi_a;

    std::string label() const {
        std::ostringstream out;
        out << to_string(scheme) << '/' << mesh_name << "/N=" << mesh.size() << "/alpha=" << alpha;
        return out.str();
    }
};

KernelTable build_table(Scheme scheme, const TimeMesh& mesh, double alpha) {
    switch (scheme) {
    case Scheme::L1: return l1_kernel(mesh, alpha);
    case Scheme::Alikhanov: return alikhanov_kernel(mesh, alpha);
    case Scheme::FastL1: return fast_l1_kernel(mesh, alpha, build_soe(alpha, kFastEps, mesh.min_step(), mesh.final_time()));
    case Scheme::BDF2: return bdf2_kernel(mesh, alpha);
    case Scheme::BDF2Recombined: return bdf2_recombine(bdf2_kernel(mesh, alpha), mesh).table;
    }
    throw Error(ErrorKind::Domain, "unknown scheme");
}

/// Every cell of the grid shared by criteria 1 to 4. The recombined kernels exist on uniform meshes only.
void for_each_cell(const std::function<void(const Cell&)>& visit) {
    const Scheme schemes[] = {Scheme::L1, Scheme::FastL1, Scheme::Alikhanov, Scheme::BDF2Recombined};
    for (std::size_t N : kSizes)
        for (const auto& mc : mesh_family(N))
            for (double alpha : kAlphas)
                for (Scheme s : schemes) {
                    if (s == Scheme::BDF2Recombined && mc.name != "uniform") continue;
                    KernelTable table = build_table(s, mc.mesh, alpha);
                    const double pi = table.pi_a() ? *table.pi_a()
                                                   : verify_assumptions(table, mc.mesh, 0.0).a2_pi_estimate;
                    visit(Cell{s, mc.name, mc.mesh, alpha, std::move(table), pi});
                }
}

void detail(const std::string& text) { std::cout << "    " << text << '\n'; }

std::string fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3e", v);
    return buffer;
}

std::string short_fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%g", v);
    return buffer;
}

bool report(int id, const std::string& title, bool ok, const std::string& summary) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " (" << summary << ")\n";
    return ok;
}

// ---- criteria -----------------------------------------------------------------------

bool criterion1() {
    double worst = 0.0;
    std::string worst_cell;
    std::size_t cells = 0;
    for_each_cell([&](const Cell& c) {
        ++cells;
        const auto r = identity_residual(build_complementary(c.table), c.table);
        if (r.max_residual >= worst) {
            worst = r.max_residual;
            worst_cell = c.label();
        }
    });
    detail("worst residual " + fmt(worst) + " at " + worst_cell);
    return report(1, "sum P A = 1 on every cell", worst <= 1e-11,
                  std::to_string(cells) + " cells, max residual " + fmt(worst) + " <= 1e-11");
}

bool criterion2() {
    bool ok = true;
    std::map<Scheme, double> worst;
    std::size_t audited = 0;
    for (std::size_t N : kSizes)
        for (const auto& mc : mesh_family(N))
            for (double alpha : kAlphas)
                for (Scheme s : {Scheme::L1, Scheme::Alikhanov, Scheme::FastL1}) {
                    const bool ratio_ok = mc.mesh.max_ratio() <= 1.75;
                    if (s == Scheme::Alikhanov && !ratio_ok) continue;
                    const double limit = s == Scheme::L1 ? 1.0 + 1e-10 : s == Scheme::Alikhanov ? 2.75 : 1.5;
                    const auto r = verify_assumptions(build_table(s, mc.mesh, alpha), mc.mesh, limit);
                    ++audited;
                    worst[s] = std::max(worst[s], r.a2_pi_estimate);
                    if (!r.a1_holds || !(r.a2_pi_estimate <= limit)) {
                        ok = false;
                        detail(std::string(to_string(s)) + " fails on " + mc.name + " N=" + std::to_string(N) +
                               " alpha=" + short_fmt(alpha) + ": a1=" + (r.a1_holds ? "yes" : "no") +
                               " pi estimate " + fmt(r.a2_pi_estimate));
                    }
                }
    detail("largest pi_A estimates: l1 " + fmt(worst[Scheme::L1]) + ", alikhanov " + fmt(worst[Scheme::Alikhanov]) +
           ", fast-l1 " + fmt(worst[Scheme::FastL1]));
    return report(2, "A1 and A2 audits for l1, alikhanov, fast-l1", ok,
                  std::to_string(audited) + " tables; limits 1+1e-10, 11/4, 3/2");
}

bool criterion3() {
    std::size_t checks = 0, violations = 0, cells = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for_each_cell([&](const Cell& c) {
        ++cells;
        const auto ctable = build_complementary(c.table);
        const auto a = check_complementary_bounds(ctable, c.mesh, c.alpha, c.pi_a);
        const auto b = check_complementary_growth(ctable, c.mesh, c.alpha, c.pi_a, c.mesh.max_ratio());
        checks += a.checks + b.checks;
        violations += a.violation_count + b.violation_count;
        worst = std::max({worst, a.worst_excess, b.worst_excess});
        for (const auto& v : a.violations) detail(c.label() + " " + v.check + " n=" + std::to_string(v.n));
        for (const auto& v : b.violations) detail(c.label() + " " + v.check + " n=" + std::to_string(v.n));
    });
    detail("largest relative excess " + fmt(worst) + " (negative means strict)");
    return report(3, "complementary kernel bounds", violations == 0,
                  std::to_string(cells) + " cells, " + std::to_string(checks) + " inequalities, " +
                      std::to_string(violations) + " violations beyond 1e-10");
}

bool criterion4() {
    std::size_t cells = 0, checks = 0, violations = 0, weaker = 0;
    double worst_ratio = 0.0;
    for_each_cell([&](const Cell& c) {
        ++cells;
        const auto ctable = build_complementary(c.table);
        GronwallTrialOptions options;
        options.trials = 100;
        options.seed = 1000 + cells;
        options.pi_a = c.pi_a;
        for (bool nonpositive : {false, true}) {
            options.nonpositive_lambda = nonpositive;
            for (const auto& r : {verify_gronwall_quadratic(ctable, c.mesh, c.table, options),
                                  verify_gronwall_linear(ctable, c.mesh, c.table, options)}) {
                checks += r.checks;
                violations += r.violation_count;
                weaker += r.weaker_bound_failures;
                worst_ratio = std::max(worst_ratio, r.worst_ratio);
                if (!r.passed()) detail(c.label() + (nonpositive ? " (Lambda <= 0)" : "") + " violated");
            }
        }
    });
    detail("largest v^n / B_n " + fmt(worst_ratio));
    return report(4, "Gronwall bounds, quadratic and linear, both Lambda branches", violations == 0 && weaker == 0,
                  std::to_string(cells) + " cells x 4 x 100 trials, " + std::to_string(checks) + " checks, " +
                      std::to_string(violations) + " violations, " + std::to_string(weaker) +
                      " weaker-bound failures");
}

bool criterion5() {
    EnergyOptions options;
    options.trials = 1000;
    options.dim = 8;
    std::size_t inequality_violations = 0, d_fail = 0, theta_fail = 0, rows = 0, cells = 0, cond_fail = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (double alpha : kAlphas)
        for (const auto& mc : mesh_family(64))
            for (Scheme s : {Scheme::L1, Scheme::FastL1, Scheme::Alikhanov, Scheme::BDF2Recombined}) {
                if (s == Scheme::BDF2Recombined && mc.name != "uniform") continue;
                const KernelTable table = build_table(s, mc.mesh, alpha);
                if (!verify_assumptions(table, mc.mesh, 0.0).a1_holds) continue;
                ++cells;
                options.seed = 7 + cells;
                const auto r = check_energy_lemmas(table, options);
                inequality_violations += r.violations_a1_first + r.violations_a1_second + r.violations_41;
                worst = std::max({worst, r.worst_a1_first, r.worst_a1_second, r.worst_41});
                d_fail += r.d_range_failures;
                theta_fail += r.theta_range_failures;
                cond_fail += r.theta_condition_failures;
                rows += r.d.size();
            }
    const bool inequalities = inequality_violations == 0;
    detail(std::string(inequalities ? "ok " : "BAD ") + "energy inequalities: " + std::to_string(inequality_violations) +
           " violations in " + std::to_string(cells) + " cells x 1000 trials, largest relative defect " + fmt(worst));
    detail(std::string(cond_fail == 0 ? "ok " : "BAD ") + "theta <= theta^(n) on every row: " +
           std::to_string(cond_fail) + " failures");
    detail(std::string(d_fail == 0 ? "ok " : "BAD ") + "d_n < 1/A_0: fails on " + std::to_string(d_fail) + " of " +
           std::to_string(rows) + " rows");
    detail(std::string(theta_fail == 0 ? "ok " : "BAD ") + "theta^(n) < 1/2: fails on " + std::to_string(theta_fail) +
           " of " + std::to_string(rows) + " rows");
    return report(5, "energy inequalities and the d_n, theta^(n) ranges",
                  inequalities && d_fail == 0 && theta_fail == 0,
                  inequalities ? "inequalities hold; range claims do not" : "inequality violations");
}

bool criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::size_t> Ns{64, 128, 256, 512, 1024};
    bool ok = true;
    auto study = [&](const std::string& name, Scheme s, const SingleModeProblem& p, double gamma, double target,
                     double tol) {
        std::vector<double> errors;
        for (std::size_t N : Ns) {
            const auto mesh = TimeMesh::graded(N, gamma, 1.0);
            errors.push_back(solve_single_mode(p, mesh, build_table(s, mesh, p.alpha)).max_error);
        }
        const double order = estimate_order(errors).back();
        const bool pass = std::abs(order - target) <= tol;
        ok = ok && pass;
        detail((pass ? "ok  " : "BAD ") + name + " alpha=" + short_fmt(p.alpha) + ": order " + fmt(order) + ", target " +
               short_fmt(target) + " +- " + short_fmt(tol));
    };
    for (double alpha : kAlphas) {
        const auto smooth = single_mode_power(alpha, 1.0, 0.0, 3.0);
        const auto singular = single_mode_relaxation(alpha, 1.0);
        study("l1 smooth uniform", Scheme::L1, smooth, 1.0, 2.0 - alpha, 0.15);
        study("alikhanov smooth uniform", Scheme::Alikhanov, smooth, 1.0, 2.0, 0.15);
        study("l1 singular uniform", Scheme::L1, singular, 1.0, alpha, 0.1);
        study("l1 singular graded", Scheme::L1, singular, (2.0 - alpha) / alpha, 2.0 - alpha, 0.2);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report(6, "observed temporal orders", ok && seconds < 60.0,
                  "N = 64..1024, finest pair, " + fmt(seconds) + " s");
}

bool criterion7() {
    const double alpha = 0.5, eps = 1e-8;
    const auto mesh = TimeMesh::graded(512, 1.0, 1.0);
    const auto soe = build_soe(alpha, eps, mesh.min_step(), 1.0);
    double diff = 0.0;
    for (double lambda : {0.5, 2.0, 10.0}) {
        const auto p = single_mode_relaxation(alpha, lambda);
        SoeMemory fast(mesh, alpha, soe);
        const auto a = solve_single_mode(p, mesh, fast);
        const auto b = solve_single_mode(p, mesh, l1_kernel(mesh, alpha));
        for (std::size_t n = 0; n <= mesh.size(); ++n) diff = std::max(diff, std::abs(a.u[n] - b.u[n]));
    }
    const auto smooth = single_mode_power(alpha, 1.0, 0.0, 3.0);
    {
        SoeMemory fast(mesh, alpha, soe);
        const auto a = solve_single_mode(smooth, mesh, fast);
        const auto b = solve_single_mode(smooth, mesh, l1_kernel(mesh, alpha));
        for (std::size_t n = 0; n <= mesh.size(); ++n) diff = std::max(diff, std::abs(a.u[n] - b.u[n]));
    }
    // Memory: the same approximation drives meshes of different lengths with identical storage.
    std::vector<std::size_t> stored;
    for (std::size_t N : {64u, 128u, 512u}) {
        const auto m = TimeMesh::graded(N, 1.0, 1.0);
        SoeMemory memory(m, alpha, soe);
        solve_single_mode(smooth, m, memory);
        stored.push_back(memory.stored_values());
    }
    const bool constant = std::all_of(stored.begin(), stored.end(), [&](std::size_t s) { return s == soe.size(); });
    const auto reference = build_soe(alpha, eps, 1e-3, 1.0);
    detail("max trajectory difference " + fmt(diff) + " over 512 steps");
    detail("stored history values for N = 64, 128, 512: " + std::to_string(stored[0]) + ", " +
           std::to_string(stored[1]) + ", " + std::to_string(stored[2]));
    detail("Nq for (alpha 0.5, eps 1e-8, dt 1e-3, T 1) = " + std::to_string(reference.size()));
    return report(7, "fast L1 against direct L1", diff <= 1e-6 && constant && reference.size() <= 200,
                  "diff " + fmt(diff) + " <= 1e-6, Nq " + std::to_string(reference.size()) + " <= 200");
}

bool criterion8() {
    bool ok = true;
    for (std::size_t N : kSizes) {
        const auto mesh = TimeMesh::graded(N, 1.0, 1.0);
        const auto raw = verify_assumptions(bdf2_kernel(mesh, 0.9), mesh, 0.0);
        const auto first = bdf2_kernel(mesh, 0.9);
        ok = ok && !raw.a1_holds;
        detail(std::string(raw.a1_holds ? "BAD " : "ok  ") + "raw alpha=0.9 N=" + std::to_string(N) +
               ": A1 fails at row " + std::to_string(raw.a1_worst_row) + " lag " + std::to_string(raw.a1_worst_lag) +
               ", A^(2)_1 = " + fmt(first.lag_one(std::min<std::size_t>(2, N))));
        for (double alpha : kAlphas) {
            const auto rec = bdf2_recombine(bdf2_kernel(mesh, alpha), mesh);
            const auto r = verify_assumptions(rec.table, mesh, 0.0);
            const bool pass = r.a1_holds && rec.eta > 0.0 && rec.eta < 2.0 / 3.0;
            ok = ok && pass;
            if (N == kSizes.back() || !pass)
                detail(std::string(pass ? "ok  " : "BAD ") + "recombined alpha=" + short_fmt(alpha) + " N=" +
                       std::to_string(N) + ": eta " + fmt(rec.eta) + ", A1 " + (r.a1_holds ? "holds" : "fails"));
        }
    }
    return report(8, "BDF2 probe and recombination", ok, "uniform meshes N = 16, 64, 256");
}

bool criterion9() {
    bool ok = true;
    std::size_t runs = 0;
    const double kappa = 1.0;
    for (double alpha : {0.5, 0.7})
        for (Scheme s : {Scheme::L1, Scheme::Alikhanov})
            for (double gamma : {1.0, 2.0}) {
                // The smallest mesh on which the Gronwall step restriction for Lambda = 2 kappa holds.
                std::optional<TimeMesh> mesh;
                const double pi = s == Scheme::L1 ? 1.0 : 2.75;
                for (std::size_t N = 64; N <= 4096 && !mesh; N *= 2) {
                    auto m = TimeMesh::graded(N, gamma, 1.0);
                    if (check_step_restriction(m, alpha, pi, 2.0 * kappa)) mesh = std::move(m);
                }
                if (!mesh) continue;
                const auto table = build_table(s, *mesh, alpha);
                const auto ctable = build_complementary(table);
                FDProblem1D p;
                p.alpha = alpha;
                p.interior = 31;
                p.kappa = kappa;
                p.u0 = [](double x) { return std::sin(M_PI * x) - 0.3 * std::sin(4.0 * M_PI * x); };
                p.psi = [](double x, double t) { return std::cos(7.0 * t) * (1.0 + x) - 0.5; };
                const auto sol = solve_fd1d(p, *mesh, table);
                std::vector<double> psi_norms;
                for (std::size_t n = 1; n <= mesh->size(); ++n) {
                    Eigen::VectorXd f(31);
                    const double t = mesh->offset_node(n, table.theta());
                    for (Eigen::Index i = 0; i < 31; ++i) f[i] = p.psi(sol.h * static_cast<double>(i + 1), t);
                    psi_norms.push_back(discrete_l2(f, sol.h));
                }
                const auto st = check_stability(sol, *mesh, table, ctable, psi_norms, kappa, pi, mesh->max_ratio());
                const bool pass = st.envelope_ok && st.theta_condition && st.step_restriction_ok;
                ok = ok && pass;
                ++runs;
                detail(std::string(pass ? "ok  " : "BAD ") + std::string(to_string(s)) + " alpha=" + short_fmt(alpha) +
                       " gamma=" + short_fmt(gamma) + " N=" + std::to_string(mesh->size()) + ": max ||u^n||/envelope " +
                       fmt(st.worst_ratio) + ", energy hypothesis " + (st.hypothesis_ok ? "holds" : "fails"));
            }
    return report(9, "finite-difference norms inside the stability envelope", ok && runs > 0,
                  std::to_string(runs) + " runs with kappa = 1");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9};
    bool all = true;
    for (int id = 1; id <= 9; ++id) {
        if (only != 0 && id != only) continue;
        try {
            all = criteria[static_cast<std::size_t>(id - 1)]() && all;
        } catch (const std::exception& e) {
            report(id, "aborted", false, e.what());
            all = false;
        }
    }
    return all ? 0 : 1;
}
