#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "fracstep/solver.hpp"
#include "fracstep/specialfn.hpp"

using namespace fracstep;

TEST_SUITE("solver") {

TEST_CASE("Caputo derivative of powers") {
    CHECK(caputo_of_power(0.5, 1.0, 1.0) == doctest::Approx(1.1283791671).epsilon(1e-10));
    CHECK_THROWS_AS(caputo_of_power(0.3, 0.0, 2.0), Error);
    CHECK(caputo_of_power(0.5, 2.0, 4.0) == doctest::Approx(2.0 / std::tgamma(2.5) * 8.0).epsilon(1e-14));
}

TEST_CASE("tridiagonal solve against a dense factorisation") {
    const auto op = dirichlet_laplacian(1.0, 9);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(9, 9);
    for (int i = 0; i < 9; ++i) {
        dense(i, i) = op.diag[i];
        if (i + 1 < 9) dense(i, i + 1) = dense(i + 1, i) = op.off[i];
    }
    const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(9, -1.0, 2.0);
    const Eigen::VectorXd x = solve_shifted(op, 2.5, 0.3, rhs);
    const Eigen::MatrixXd system = 2.5 * Eigen::MatrixXd::Identity(9, 9) + 0.3 * dense;
    CHECK((system * x - rhs).norm() <= 1e-12);
    CHECK((op.apply(x) - dense * x).norm() <= 1e-10);

    Tridiagonal singular{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_AS(solve_shifted(singular, 0.0, 1.0, Eigen::VectorXd::Ones(2)), Error);
}

TEST_CASE("zero operator keeps the initial value") {
    const auto mesh = TimeMesh::graded(16, 2.0, 1.0);
    auto p = single_mode_relaxation(0.5, 0.0, 2.0);
    for (const auto& table : {l1_kernel(mesh, 0.5), alikhanov_kernel(mesh, 0.5)}) {
        const auto sol = solve_single_mode(p, mesh, table);
        for (double u : sol.u) CHECK(u == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("zero data gives a zero trajectory") {
    FDProblem1D p;
    p.alpha = 0.5;
    p.interior = 15;
    const auto mesh = TimeMesh::graded(10, 1.0, 1.0);
    const auto sol = solve_fd1d(p, mesh, l1_kernel(mesh, 0.5));
    for (double norm : sol.l2_norm) CHECK(norm == 0.0);
}

TEST_CASE("temporal orders on a smooth solution") {
    for (double alpha : {0.3, 0.5, 0.7}) {
        CAPTURE(alpha);
        const auto p = single_mode_power(alpha, 1.0, 0.0, 3.0);
        std::vector<double> e_l1, e_ali;
        for (std::size_t N : {128u, 256u, 512u}) {
            const auto mesh = TimeMesh::graded(N, 1.0, 1.0);
            e_l1.push_back(solve_single_mode(p, mesh, l1_kernel(mesh, alpha)).max_error);
            e_ali.push_back(solve_single_mode(p, mesh, alikhanov_kernel(mesh, alpha)).max_error);
        }
        CHECK(std::abs(estimate_order(e_l1).back() - (2.0 - alpha)) <= 0.15);
        CHECK(std::abs(estimate_order(e_ali).back() - 2.0) <= 0.15);
    }
}

TEST_CASE("singular solution and mesh grading") {
    const double alpha = 0.5;
    const auto p = single_mode_relaxation(alpha, 1.0);
    std::vector<double> uniform, graded;
    for (std::size_t N : {128u, 256u, 512u}) {
        const auto um = TimeMesh::graded(N, 1.0, 1.0);
        const auto gm = TimeMesh::graded(N, (2.0 - alpha) / alpha, 1.0);
        uniform.push_back(solve_single_mode(p, um, l1_kernel(um, alpha)).max_error);
        graded.push_back(solve_single_mode(p, gm, l1_kernel(gm, alpha)).max_error);
    }
    CHECK(std::abs(estimate_order(uniform).back() - alpha) <= 0.1);
    CHECK(std::abs(estimate_order(graded).back() - (2.0 - alpha)) <= 0.2);
}

TEST_CASE("fast and direct L1 trajectories agree") {
    const double alpha = 0.5;
    const auto mesh = TimeMesh::graded(512, 1.0, 1.0);
    const auto soe = build_soe(alpha, 1e-8, mesh.min_step(), 1.0);
    const auto p = single_mode_relaxation(alpha, 2.0);
    SoeMemory fast(mesh, alpha, soe);
    const auto a = solve_single_mode(p, mesh, fast);
    const auto b = solve_single_mode(p, mesh, l1_kernel(mesh, alpha));
    double diff = 0.0;
    for (std::size_t n = 0; n <= 512; ++n) diff = std::max(diff, std::abs(a.u[n] - b.u[n]));
    CHECK(diff <= 1e-6);
    CHECK(fast.stored_values() == soe.size());

    // The fast kernel table and the recurrence are the same operator.
    const auto c = solve_single_mode(p, mesh, fast_l1_kernel(mesh, alpha, soe));
    for (std::size_t n = 0; n <= 512; ++n) CHECK(c.u[n] == doctest::Approx(a.u[n]).epsilon(1e-11));
}

TEST_CASE("history memory shares the table operator") {
    const auto mesh = TimeMesh::graded(20, 2.0, 1.0);
    const auto table = alikhanov_kernel(mesh, 0.4);
    ConvolutionMemory memory(table);
    memory.reset(1);
    std::vector<double> v{0.3};
    for (std::size_t n = 1; n <= 20; ++n) {
        v.push_back(std::cos(static_cast<double>(n)));
        const double direct = table.apply(n, std::span<const double>(v));
        const double split = memory.history(n)[0] + memory.diagonal(n) * (v[n] - v[n - 1]);
        CHECK(split == doctest::Approx(direct).epsilon(1e-13));
        memory.record(n, Eigen::VectorXd::Constant(1, v[n] - v[n - 1]));
    }
    CHECK(memory.stored_values() == 20);
}

TEST_CASE("spatial order of the finite-difference solver") {
    const double alpha = 0.5;
    const auto mesh = TimeMesh::graded(256, 1.0, 1.0);
    const auto table = alikhanov_kernel(mesh, alpha);
    std::vector<double> errors;
    for (std::size_t M : {7u, 15u, 31u}) {
        const auto p = fd1d_manufactured(alpha, 1.0, M, 0.0, 2.0);
        errors.push_back(solve_fd1d(p, mesh, table).worst_l2_error);
    }
    CHECK(std::abs(estimate_order(errors).back() - 2.0) <= 0.1);
}

TEST_CASE("stability envelope on a reaction problem") {
    const double alpha = 0.5;
    const auto mesh = TimeMesh::graded(200, 2.0, 1.0);
    const auto table = l1_kernel(mesh, alpha);
    const auto ctable = build_complementary(table);
    FDProblem1D p;
    p.alpha = alpha;
    p.interior = 31;
    p.kappa = 1.0;
    p.u0 = [](double x) { return std::sin(M_PI * x) + 0.5 * std::sin(3.0 * M_PI * x); };
    p.psi = [](double x, double t) { return std::cos(5.0 * t) * x * (1.0 - x); };
    const auto sol = solve_fd1d(p, mesh, table);
    std::vector<double> psi_norms;
    for (std::size_t n = 1; n <= mesh.size(); ++n) {
        Eigen::VectorXd f(31);
        for (int i = 0; i < 31; ++i) f[i] = p.psi(sol.h * (i + 1), mesh.t(n));
        psi_norms.push_back(discrete_l2(f, sol.h));
    }
    const auto st = check_stability(sol, mesh, table, ctable, psi_norms, 1.0, 1.0, mesh.max_ratio());
    CHECK(st.step_restriction_ok);
    CHECK(st.theta_condition);
    CHECK(st.hypothesis_ok);
    CHECK(st.envelope_ok);
    CHECK(st.worst_ratio < 1.0);
}

TEST_CASE("energy inequalities") {
    const auto mesh = TimeMesh::graded(32, 2.0, 1.0);
    EnergyOptions options;
    options.trials = 200;
    for (const auto& table : {l1_kernel(mesh, 0.5), alikhanov_kernel(mesh, 0.5)}) {
        const auto r = check_energy_lemmas(table, options);
        CHECK(r.inequalities_hold());
        CHECK(r.theta_condition_failures == 0);
        CHECK(r.d.size() == 32);
        for (std::size_t n = 1; n <= 32; ++n) {
            const double a0 = table(n, 0), a1 = table.lag_one(n);
            CHECK(r.d[n - 1] == doctest::Approx((2.0 * a0 - a1) / (a0 * (a0 - a1))));
            CHECK(r.theta_n[n - 1] == doctest::Approx((a0 - a1) / (2.0 * a0 - a1)));
        }
    }
}

TEST_CASE("order estimation") {
    CHECK(estimate_order({0.04, 0.01})[0] == doctest::Approx(2.0));
    CHECK(estimate_order({0.1, 0.1})[0] == doctest::Approx(0.0));
    CHECK(estimate_order({0.09, 0.01}, {10.0, 30.0})[0] == doctest::Approx(2.0));
    CHECK_THROWS_AS(estimate_order({0.1, 0.0}), Error);
    CHECK_THROWS_AS(estimate_order({0.1}), Error);
}

}
