// fracstep: experiment runner for the discrete Caputo kernels, their
// complementary kernels, the Gronwall bounds and the subdiffusion solvers.
//
// Exit codes: 0 success, 2 invalid input, 3 a checked property was violated,
// 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "fracstep/complementary.hpp"
#include "fracstep/gronwall.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/soe.hpp"
#include "fracstep/solver.hpp"
#include "fracstep/specialfn.hpp"

namespace {

using namespace fracstep;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitViolation = 3;
constexpr int kExitNumerical = 4;

/// Ordered record of the effective configuration, echoed into every artifact.
class Echo {
public:
    explicit Echo(std::string command) { add("command", std::move(command)); }

    template <typename T>
    void add(const std::string& key, const T& value) {
        if constexpr (std::is_floating_point_v<T>) {
            // Shortest text that reads back to the same double.
            char buffer[64];
            const auto end = std::to_chars(buffer, buffer + sizeof buffer, value).ptr;
            entries_.emplace_back(key, std::string(buffer, end));
        } else {
            std::ostringstream out;
            out << value;
            entries_.emplace_back(key, out.str());
        }
    }
    void add_timestamp() {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buffer[32];
        std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        add("timestamp", std::string(buffer));
    }

    std::string comment_block() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += "# " + k + "=" + v + "\n";
        return out;
    }
    json as_json() const {
        json doc = json::object();
        for (const auto& [k, v] : entries_) doc[k] = v;
        return doc;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Domain, "cannot write '" + path + "'");
    out << text;
}

struct SchemeOptions {
    std::string scheme = "l1";
    std::string mesh = "graded:64,1,1";
    double alpha = 0.5;
    double eps = 1e-10;
};

void add_scheme_options(CLI::App* cmd, SchemeOptions& o) {
    cmd->add_option("--scheme", o.scheme, "l1 | fast-l1 | alikhanov | bdf2 | bdf2-recombined")->capture_default_str();
    cmd->add_option("--mesh", o.mesh, "graded:N,gamma,T | uniform:N,T | random:N,seed[,min_fraction[,T]] | file:path")
        ->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "fractional order in (0, 1)")->capture_default_str();
    cmd->add_option("--eps", o.eps, "SOE tolerance for fast-l1")->capture_default_str();
}

void echo_scheme(Echo& echo, const SchemeOptions& o) {
    echo.add("scheme", o.scheme);
    echo.add("mesh", o.mesh);
    echo.add("alpha", o.alpha);
    if (scheme_from_string(o.scheme) == Scheme::FastL1) echo.add("eps", o.eps);
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "--alpha must lie in (0, 1)");
}

struct BuiltKernels {
    KernelTable table;
    std::optional<SOEApprox> soe;
    std::optional<double> eta;
};

BuiltKernels build_kernels(Scheme scheme, const TimeMesh& mesh, double alpha, double eps) {
    switch (scheme) {
    case Scheme::L1: return {l1_kernel(mesh, alpha), std::nullopt, std::nullopt};
    case Scheme::Alikhanov: return {alikhanov_kernel(mesh, alpha), std::nullopt, std::nullopt};
    case Scheme::BDF2: return {bdf2_kernel(mesh, alpha), std::nullopt, std::nullopt};
    case Scheme::BDF2Recombined: {
        auto rec = bdf2_recombine(bdf2_kernel(mesh, alpha), mesh);
        return {std::move(rec.table), std::nullopt, rec.eta};
    }
    case Scheme::FastL1: {
        SOEApprox soe = build_soe(alpha, eps, mesh.min_step(), mesh.final_time());
        KernelTable table = fast_l1_kernel(mesh, alpha, soe);
        return {std::move(table), std::move(soe), std::nullopt};
    }
    }
    throw Error(ErrorKind::Domain, "unknown scheme");
}

/// pi_A used by the bound checks: the proven constant, or the audited estimate when none is known.
double effective_pi(const KernelTable& table, const TimeMesh& mesh) {
    if (table.pi_a()) return *table.pi_a();
    return verify_assumptions(table, mesh, 0.0).a2_pi_estimate;
}

// ---- subcommands -------------------------------------------------------------------

struct KernelsDump {
    SchemeOptions s;
    bool complementary = false;
    std::string out;
};

int run_kernels_dump(const KernelsDump& o, bool timestamp) {
    require_alpha(o.s.alpha);
    const TimeMesh mesh = parse_mesh_spec(o.s.mesh);
    const BuiltKernels k = build_kernels(scheme_from_string(o.s.scheme), mesh, o.s.alpha, o.s.eps);
    Echo echo("kernels dump");
    echo_scheme(echo, o.s);
    echo.add("table", o.complementary ? "complementary" : "kernel");
    echo.add("entries", k.table.entry_count());
    if (k.soe) echo.add("soe_nodes", k.soe->size());
    if (k.eta) echo.add("eta", *k.eta);
    if (timestamp) echo.add_timestamp();
    const std::string body =
        o.complementary ? complementary_to_csv(build_complementary(k.table)) : kernel_table_to_csv(k.table);
    emit(o.out, echo.comment_block() + body);
    return kExitOk;
}

struct Audit {
    SchemeOptions s;
    double pi = -1.0;
    double rho_bound = 1.75;
    std::string out;
};

int run_audit(const Audit& o, bool timestamp) {
    require_alpha(o.s.alpha);
    const TimeMesh mesh = parse_mesh_spec(o.s.mesh);
    const BuiltKernels k = build_kernels(scheme_from_string(o.s.scheme), mesh, o.s.alpha, o.s.eps);
    const double claim = o.pi > 0.0 ? o.pi : k.table.pi_a().value_or(std::numeric_limits<double>::infinity());
    const AssumptionReport r = verify_assumptions(k.table, mesh, claim);
    const MeshReport m = check_a3(mesh, o.rho_bound);
    Echo echo("audit");
    echo_scheme(echo, o.s);
    echo.add("rho_bound", o.rho_bound);
    if (timestamp) echo.add_timestamp();
    json doc;
    doc["config"] = echo.as_json();
    doc["a1_holds"] = r.a1_holds;
    doc["a1_worst_violation"] = r.a1_worst_violation;
    doc["a1_worst_row"] = r.a1_worst_row;
    doc["a1_worst_lag"] = r.a1_worst_lag;
    doc["a2_pi_estimate"] = r.a2_pi_estimate;
    doc["pi_a_claim"] = std::isfinite(claim) ? json(claim) : json(nullptr);
    doc["a2_holds_for_claim"] = r.a2_holds_for_claim;
    doc["max_step"] = m.max_step;
    doc["max_ratio"] = m.max_ratio;
    doc["satisfies_a3"] = m.satisfies_a3;
    if (k.soe) doc["soe_nodes"] = k.soe->size();
    if (k.eta) doc["eta"] = *k.eta;
    emit(o.out, doc.dump(2) + "\n");
    return kExitOk;
}

struct GronwallVerify {
    SchemeOptions s;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::string form = "both";
    bool nonpositive = false;
    std::string out;
};

int run_gronwall_verify(const GronwallVerify& o, bool timestamp) {
    require_alpha(o.s.alpha);
    if (o.form != "quadratic" && o.form != "linear" && o.form != "both")
        throw Error(ErrorKind::Domain, "--form must be quadratic, linear or both");
    const TimeMesh mesh = parse_mesh_spec(o.s.mesh);
    const BuiltKernels k = build_kernels(scheme_from_string(o.s.scheme), mesh, o.s.alpha, o.s.eps);
    const ComplementaryTable ctable = build_complementary(k.table);
    GronwallTrialOptions options;
    options.trials = o.trials;
    options.seed = o.seed;
    options.pi_a = effective_pi(k.table, mesh);
    options.nonpositive_lambda = o.nonpositive;
    Echo echo("gronwall verify");
    echo_scheme(echo, o.s);
    echo.add("trials", o.trials);
    echo.add("seed", o.seed);
    echo.add("form", o.form);
    echo.add("nonpositive_lambda", o.nonpositive ? "true" : "false");
    echo.add("pi_a", options.pi_a);
    if (timestamp) echo.add_timestamp();
    json doc;
    doc["config"] = echo.as_json();
    bool passed = true;
    if (o.form != "linear") {
        const auto r = verify_gronwall_quadratic(ctable, mesh, k.table, options);
        doc["quadratic"] = json::parse(gronwall_report_to_json(r));
        passed = passed && r.passed();
    }
    if (o.form != "quadratic") {
        const auto r = verify_gronwall_linear(ctable, mesh, k.table, options);
        doc["linear"] = json::parse(gronwall_report_to_json(r));
        passed = passed && r.passed();
    }
    doc["passed"] = passed;
    emit(o.out, doc.dump(2) + "\n");
    return passed ? kExitOk : kExitViolation;
}

struct Solve {
    SchemeOptions s;
    std::string problem = "single-mode";
    double lambda = 1.0;
    double kappa = 0.0;
    double u0 = 1.0;
    double sigma = 0.0; // > 0 selects the manufactured solution
    std::size_t interior = 31;
    double length = 1.0;
    std::string out;
};

int run_solve(const Solve& o, bool timestamp) {
    require_alpha(o.s.alpha);
    const TimeMesh mesh = parse_mesh_spec(o.s.mesh);
    const Scheme scheme = scheme_from_string(o.s.scheme);
    const BuiltKernels k = build_kernels(scheme, mesh, o.s.alpha, o.s.eps);
    std::unique_ptr<HistoryMemory> memory;
    if (scheme == Scheme::FastL1)
        memory = std::make_unique<SoeMemory>(mesh, o.s.alpha, *k.soe);
    else
        memory = std::make_unique<ConvolutionMemory>(k.table);

    Echo echo("solve");
    echo.add("problem", o.problem);
    echo_scheme(echo, o.s);
    echo.add("kappa", o.kappa);
    if (o.sigma > 0.0) echo.add("sigma", o.sigma);
    std::ostringstream body;
    body << std::setprecision(17);
    int status = kExitOk;

    if (o.problem == "single-mode") {
        echo.add("lambda", o.lambda);
        if (!(o.sigma > 0.0)) echo.add("u0", o.u0);
        if (!(o.sigma > 0.0) && o.kappa != 0.0)
            throw Error(ErrorKind::Domain, "the relaxation problem has kappa = 0; use --sigma for a forced run");
        const SingleModeProblem p = o.sigma > 0.0 ? single_mode_power(o.s.alpha, o.lambda, o.kappa, o.sigma)
                                                  : single_mode_relaxation(o.s.alpha, o.lambda, o.u0);
        const SingleModeSolution sol = solve_single_mode(p, mesh, *memory);
        echo.add("max_error", sol.max_error);
        echo.add("history_values", memory->stored_values());
        body << "n,t_n,u,exact,error\n";
        for (std::size_t n = 0; n < sol.t.size(); ++n)
            body << n << ',' << sol.t[n] << ',' << sol.u[n] << ',' << sol.exact[n] << ',' << sol.error[n] << '\n';
    } else if (o.problem == "fd1d") {
        echo.add("interior", o.interior);
        echo.add("length", o.length);
        const double sigma = o.sigma > 0.0 ? o.sigma : 1.0;
        const FDProblem1D p = fd1d_manufactured(o.s.alpha, o.length, o.interior, o.kappa, sigma);
        const FDSolution sol = solve_fd1d(p, mesh, *memory);
        // Forcing norms at the offset nodes for the stability envelope.
        const double theta = memory->theta();
        std::vector<double> psi_norms;
        for (std::size_t n = 1; n <= mesh.size(); ++n) {
            Eigen::VectorXd f(static_cast<Eigen::Index>(o.interior));
            for (Eigen::Index i = 0; i < f.size(); ++i)
                f[i] = p.psi(sol.h * static_cast<double>(i + 1), mesh.offset_node(n, theta));
            psi_norms.push_back(discrete_l2(f, sol.h));
        }
        const ComplementaryTable ctable = build_complementary(k.table);
        const StabilityReport st = check_stability(sol, mesh, k.table, ctable, psi_norms, o.kappa,
                                                   effective_pi(k.table, mesh), mesh.max_ratio());
        echo.add("worst_l2_error", sol.worst_l2_error);
        echo.add("envelope_ok", st.envelope_ok ? "true" : "false");
        echo.add("theta_condition", st.theta_condition ? "true" : "false");
        echo.add("step_restriction_ok", st.step_restriction_ok ? "true" : "false");
        body << "n,t_n,l2_norm,envelope,l2_error,max_error\n";
        for (std::size_t n = 0; n < sol.t.size(); ++n)
            body << n << ',' << sol.t[n] << ',' << sol.l2_norm[n] << ',' << st.envelope[n] << ','
                 << sol.l2_error[n] << ',' << sol.max_error[n] << '\n';
        if (!st.envelope_ok) status = kExitViolation;
    } else {
        throw Error(ErrorKind::Domain, "--problem must be single-mode or fd1d");
    }
    if (timestamp) echo.add_timestamp();
    emit(o.out, echo.comment_block() + body.str());
    return status;
}

struct Converge {
    SchemeOptions s;
    std::string gamma = "1";
    std::vector<std::size_t> Ns{32, 64, 128, 256};
    bool singular = false;
    double lambda = 1.0;
    double sigma = 3.0;
    double T = 1.0;
    std::string out;
};

int run_converge(const Converge& o, bool timestamp) {
    require_alpha(o.s.alpha);
    const Scheme scheme = scheme_from_string(o.s.scheme);
    const double gamma = o.gamma == "auto" ? (2.0 - o.s.alpha) / o.s.alpha : std::stod(o.gamma);
    if (o.Ns.size() < 2) throw Error(ErrorKind::Domain, "--Ns needs at least two step counts");
    const SingleModeProblem p = o.singular ? single_mode_relaxation(o.s.alpha, o.lambda)
                                           : single_mode_power(o.s.alpha, o.lambda, 0.0, o.sigma);
    std::vector<double> errors, steps;
    for (std::size_t N : o.Ns) {
        const TimeMesh mesh = TimeMesh::graded(N, gamma, o.T);
        const BuiltKernels k = build_kernels(scheme, mesh, o.s.alpha, o.s.eps);
        errors.push_back(solve_single_mode(p, mesh, k.table).max_error);
        steps.push_back(static_cast<double>(N));
    }
    const std::vector<double> orders = estimate_order(errors, steps);

    Echo echo("converge");
    echo.add("scheme", o.s.scheme);
    echo.add("alpha", o.s.alpha);
    echo.add("gamma", gamma);
    echo.add("T", o.T);
    echo.add("solution", o.singular ? "E_alpha(-lambda t^alpha)" : "1 + t^sigma");
    echo.add("lambda", o.lambda);
    if (!o.singular) echo.add("sigma", o.sigma);
    if (scheme == Scheme::FastL1) echo.add("eps", o.s.eps);
    if (timestamp) echo.add_timestamp();

    std::ostringstream csv;
    csv << std::setprecision(17) << "N,error,order\n";
    std::ostringstream text;
    text << std::setw(8) << "N" << std::setw(16) << "error" << std::setw(10) << "order" << '\n';
    for (std::size_t i = 0; i < errors.size(); ++i) {
        csv << o.Ns[i] << ',' << errors[i] << ',';
        text << std::setw(8) << o.Ns[i] << std::setw(16) << std::scientific << std::setprecision(6) << errors[i];
        if (i > 0) {
            csv << orders[i - 1];
            text << std::setw(10) << std::fixed << std::setprecision(4) << orders[i - 1];
        }
        csv << '\n';
        text << std::defaultfloat << '\n';
    }
    std::cout << echo.comment_block() << text.str();
    if (!o.out.empty()) emit(o.out, echo.comment_block() + csv.str());
    return kExitOk;
}

struct Mlf {
    double alpha = 0.5;
    std::vector<double> z;
};

int run_mlf(const Mlf& o) {
    std::cout << std::setprecision(17) << "z,E_alpha(z)\n";
    for (double z : o.z) std::cout << z << ',' << mittag_leffler(o.alpha, z) << '\n';
    return kExitOk;
}

struct SoeBuild {
    double alpha = 0.5;
    double eps = 1e-8;
    double dt = 1e-3;
    double T = 1.0;
    std::string out;
};

int run_soe_build(const SoeBuild& o, bool timestamp) {
    const SOEApprox soe = build_soe(o.alpha, o.eps, o.dt, o.T);
    json doc = json::parse(soe_to_json(soe));
    Echo echo("soe build");
    echo.add("alpha", o.alpha);
    echo.add("eps", o.eps);
    echo.add("delta_t", o.dt);
    echo.add("T", o.T);
    if (timestamp) echo.add_timestamp();
    doc["config"] = echo.as_json();
    doc["size"] = soe.size();
    doc["fast_l1_condition"] = satisfies_fast_l1_condition(soe);
    emit(o.out, doc.dump(2) + "\n");
    return kExitOk;
}

/// Appends "--key value" for every key of a flat JSON config file that was
/// not given on the command line, so flags override the file.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Domain, "cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Domain, std::string("config file: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::Domain, "config file must hold a flat JSON object");
    for (const auto& [key, value] : doc.items()) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) joined += (joined.empty() ? "" : ",") + (item.is_string() ? item.get<std::string>() : item.dump());
            args.push_back(flag);
            args.push_back(joined);
        } else if (value.is_string()) {
            args.push_back(flag);
            args.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            args.push_back(flag);
            args.push_back(value.dump());
        } else {
            throw Error(ErrorKind::Domain, "config key '" + key + "' must be a scalar or an array");
        }
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Caputo kernels, complementary kernels, Gronwall bounds and subdiffusion solvers"};
    app.require_subcommand(1);
    std::string config_path;
    bool timestamp = false;
    app.add_option("--config", config_path, "flat JSON file with option values (flags take precedence)");
    app.add_flag("--timestamp", timestamp, "record the wall-clock time in artifact headers");

    KernelsDump dump;
    auto* kernels = app.add_subcommand("kernels", "kernel tables");
    kernels->require_subcommand(1);
    auto* dump_cmd = kernels->add_subcommand("dump", "write a kernel table as CSV (n,lag,value)");
    add_scheme_options(dump_cmd, dump.s);
    dump_cmd->add_flag("--complementary", dump.complementary, "write the complementary kernels instead");
    dump_cmd->add_option("--out", dump.out, "output file (default stdout)");

    Audit audit;
    auto* audit_cmd = app.add_subcommand("audit", "check positivity, monotonicity and the kernel lower bound");
    add_scheme_options(audit_cmd, audit.s);
    audit_cmd->add_option("--pi", audit.pi, "claimed pi_A (default: the scheme's constant)");
    audit_cmd->add_option("--rho", audit.rho_bound, "step-ratio bound")->capture_default_str();
    audit_cmd->add_option("--out", audit.out, "output file (default stdout)");

    GronwallVerify gv;
    auto* gronwall = app.add_subcommand("gronwall", "discrete fractional Gronwall inequality");
    gronwall->require_subcommand(1);
    auto* verify_cmd = gronwall->add_subcommand("verify", "randomised check of the Gronwall bounds");
    add_scheme_options(verify_cmd, gv.s);
    verify_cmd->add_option("--trials", gv.trials, "number of random sequences")->capture_default_str();
    verify_cmd->add_option("--seed", gv.seed, "random seed")->capture_default_str();
    verify_cmd->add_option("--form", gv.form, "quadratic | linear | both")->capture_default_str();
    verify_cmd->add_flag("--nonpositive", gv.nonpositive, "draw non-positive lambdas (Lambda <= 0 branch)");
    verify_cmd->add_option("--out", gv.out, "output file (default stdout)");

    Solve solve;
    auto* solve_cmd = app.add_subcommand("solve", "run the time-stepping scheme");
    add_scheme_options(solve_cmd, solve.s);
    solve_cmd->add_option("--problem", solve.problem, "single-mode | fd1d")->capture_default_str();
    solve_cmd->add_option("--lambda", solve.lambda, "eigenvalue of the single mode")->capture_default_str();
    solve_cmd->add_option("--kappa", solve.kappa, "reaction coefficient")->capture_default_str();
    solve_cmd->add_option("--u0", solve.u0, "initial value of the single mode")->capture_default_str();
    solve_cmd->add_option("--sigma", solve.sigma, "manufactured solution 1 + t^sigma (single mode) or (1 + t^sigma) sin(pi x/L)");
    solve_cmd->add_option("--interior", solve.interior, "interior grid points (fd1d)")->capture_default_str();
    solve_cmd->add_option("--length", solve.length, "domain length (fd1d)")->capture_default_str();
    solve_cmd->add_option("--out", solve.out, "output file (default stdout)");

    Converge conv;
    auto* conv_cmd = app.add_subcommand("converge", "observed orders of the single-mode problem");
    conv_cmd->add_option("--scheme", conv.s.scheme, "kernel scheme")->capture_default_str();
    conv_cmd->add_option("--alpha", conv.s.alpha, "fractional order")->capture_default_str();
    conv_cmd->add_option("--eps", conv.s.eps, "SOE tolerance for fast-l1")->capture_default_str();
    conv_cmd->add_option("--gamma", conv.gamma, "mesh grading, or 'auto' for (2-alpha)/alpha")->capture_default_str();
    conv_cmd->add_option("--Ns", conv.Ns, "step counts")->delimiter(',');
    conv_cmd->add_flag("--singular", conv.singular, "use u = E_alpha(-lambda t^alpha) instead of 1 + t^sigma");
    conv_cmd->add_option("--lambda", conv.lambda, "eigenvalue")->capture_default_str();
    conv_cmd->add_option("--sigma", conv.sigma, "power of the smooth solution")->capture_default_str();
    conv_cmd->add_option("--T", conv.T, "final time")->capture_default_str();
    conv_cmd->add_option("--out", conv.out, "CSV output file");

    Mlf mlf;
    auto* mlf_cmd = app.add_subcommand("mlf", "evaluate the Mittag-Leffler function");
    mlf_cmd->add_option("--alpha", mlf.alpha, "order in (0, 1]")->capture_default_str();
    mlf_cmd->add_option("--z", mlf.z, "arguments")->delimiter(',')->required();

    SoeBuild sb;
    auto* soe = app.add_subcommand("soe", "sum-of-exponentials approximations");
    soe->require_subcommand(1);
    auto* soe_build_cmd = soe->add_subcommand("build", "build and certify an SOE approximation");
    soe_build_cmd->add_option("--alpha", sb.alpha, "fractional order")->capture_default_str();
    soe_build_cmd->add_option("--eps", sb.eps, "absolute tolerance")->capture_default_str();
    soe_build_cmd->add_option("--dt", sb.dt, "cut-off time")->capture_default_str();
    soe_build_cmd->add_option("--T", sb.T, "horizon")->capture_default_str();
    soe_build_cmd->add_option("--out", sb.out, "output file (default stdout)");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    } catch (const Error& e) {
        std::cerr << "fracstep: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (*dump_cmd) return run_kernels_dump(dump, timestamp);
        if (*audit_cmd) return run_audit(audit, timestamp);
        if (*verify_cmd) return run_gronwall_verify(gv, timestamp);
        if (*solve_cmd) return run_solve(solve, timestamp);
        if (*conv_cmd) return run_converge(conv, timestamp);
        if (*mlf_cmd) return run_mlf(mlf);
        if (*soe_build_cmd) return run_soe_build(sb, timestamp);
    } catch (const Error& e) {
        std::cerr << "fracstep: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.is_numerical() ? kExitNumerical : kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "fracstep: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
