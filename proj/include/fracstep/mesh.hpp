#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracstep/errors.hpp"

namespace fracstep {

/// Strictly increasing time levels 0 = t_0 < t_1 < ... < t_N = T.
///
/// Nodes are the source of truth. Steps tau_n = t_n - t_{n-1} and ratios
/// rho_k = tau_k / tau_{k+1} are derived once at construction; all
/// accessors use the 1-based indices of the time-stepping literature.
/// Immutable after construction.
template <typename Scalar>
class BasicTimeMesh {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// t_n = (n/N)^gamma T. gamma = 1 gives the uniform mesh.
    static BasicTimeMesh graded(std::size_t steps, Scalar gamma, Scalar final_time) {
        if (steps == 0) throw Error(ErrorKind::InvalidMesh, "graded mesh needs N >= 1");
        if (!(gamma >= Scalar(1)))
            throw Error(ErrorKind::InvalidMesh, "graded mesh needs gamma >= 1");
        if (!(final_time > Scalar(0)) || !std::isfinite(static_cast<double>(final_time)))
            throw Error(ErrorKind::InvalidMesh, "graded mesh needs T > 0");
        Vector nodes(steps + 1);
        const Scalar n_total = static_cast<Scalar>(steps);
        for (std::size_t n = 0; n <= steps; ++n) {
            using std::pow;
            nodes[n] = pow(static_cast<Scalar>(n) / n_total, gamma) * final_time;
        }
        nodes[steps] = final_time;
        return from_nodes(std::move(nodes));
    }

    static BasicTimeMesh from_nodes(Vector nodes) {
        if (nodes.size() < 2) throw Error(ErrorKind::InvalidMesh, "mesh needs at least two nodes");
        for (Eigen::Index i = 0; i < nodes.size(); ++i)
            if (!std::isfinite(static_cast<double>(nodes[i])))
                throw Error(ErrorKind::InvalidMesh, "mesh nodes must be finite");
        const Scalar last = nodes[nodes.size() - 1];
        using std::abs;
        if (nodes[0] != Scalar(0)) {
            if (nodes[0] < Scalar(0) && abs(nodes[0]) > Scalar(1e-14) * abs(last))
                throw Error(ErrorKind::InvalidMesh, "first mesh node is negative");
            if (abs(nodes[0]) > Scalar(1e-14) * abs(last))
                throw Error(ErrorKind::InvalidMesh, "first mesh node must be 0");
            nodes[0] = Scalar(0);
        }
        for (Eigen::Index i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw Error(ErrorKind::InvalidMesh,
                            "mesh nodes are not strictly increasing at index " + std::to_string(i));
        return BasicTimeMesh(std::move(nodes));
    }

    static BasicTimeMesh from_nodes(std::span<const Scalar> nodes) {
        Vector v(static_cast<Eigen::Index>(nodes.size()));
        std::copy(nodes.begin(), nodes.end(), v.data());
        return from_nodes(std::move(v));
    }

    static BasicTimeMesh from_nodes(const std::vector<Scalar>& nodes) {
        return from_nodes(std::span<const Scalar>(nodes));
    }

    /// Number of steps N.
    std::size_t size() const { return static_cast<std::size_t>(nodes_.size() - 1); }
    Scalar final_time() const { return nodes_[nodes_.size() - 1]; }

    Scalar t(std::size_t n) const { return nodes_[static_cast<Eigen::Index>(n)]; }
    /// tau_n for 1 <= n <= N.
    Scalar tau(std::size_t n) const { return steps_[static_cast<Eigen::Index>(n - 1)]; }
    /// rho_k = tau_k / tau_{k+1} for 1 <= k <= N-1.
    Scalar rho(std::size_t k) const { return ratios_[static_cast<Eigen::Index>(k - 1)]; }
    /// t_{n-theta} = theta t_{n-1} + (1-theta) t_n.
    Scalar offset_node(std::size_t n, Scalar theta) const {
        return theta * t(n - 1) + (Scalar(1) - theta) * t(n);
    }

    const Vector& nodes() const { return nodes_; }
    const Vector& steps() const { return steps_; }
    const Vector& ratios() const { return ratios_; }

    Scalar max_step() const { return steps_.maxCoeff(); }
    Scalar min_step() const { return steps_.minCoeff(); }
    /// Largest rho_k, or 0 for a single-step mesh.
    Scalar max_ratio() const { return ratios_.size() ? ratios_.maxCoeff() : Scalar(0); }

    bool is_uniform(Scalar rel_tol = Scalar(1e-12)) const {
        const Scalar ref = steps_[0];
        using std::abs;
        return ((steps_.array() - ref).abs() <= rel_tol * ref).all();
    }

    template <typename Other>
    BasicTimeMesh<Other> cast() const {
        return BasicTimeMesh<Other>::from_nodes(nodes_.template cast<Other>().eval());
    }

private:
    explicit BasicTimeMesh(Vector nodes) : nodes_(std::move(nodes)) {
        const Eigen::Index n = nodes_.size() - 1;
        steps_ = nodes_.tail(n) - nodes_.head(n);
        ratios_ = steps_.head(n - 1).cwiseQuotient(steps_.tail(n - 1));
    }

    Vector nodes_;
    Vector steps_;
    Vector ratios_;
};

using TimeMesh = BasicTimeMesh<double>;

struct MeshReport {
    double max_step = 0.0;
    double max_ratio = 0.0;
    double rho_bound = 0.0;
    bool satisfies_a3 = false;
};

/// Local step-ratio condition: every rho_k <= rho_bound.
template <typename Scalar>
MeshReport check_a3(const BasicTimeMesh<Scalar>& mesh, Scalar rho_bound) {
    MeshReport report;
    report.max_step = static_cast<double>(mesh.max_step());
    report.max_ratio = static_cast<double>(mesh.max_ratio());
    report.rho_bound = static_cast<double>(rho_bound);
    report.satisfies_a3 = (mesh.ratios().array() <= rho_bound).all();
    return report;
}

/// Random mesh with steps drawn uniformly from [min_fraction, 1] (before
/// rescaling to [0, T]); every ratio is then at most 1 / min_fraction.
TimeMesh quasi_uniform_mesh(std::size_t steps, double final_time, double min_fraction,
                            std::uint64_t seed);

/// Parse "graded:N,gamma,T", "uniform:N,T", "random:N,seed[,min_fraction[,T]]"
/// or "file:<path>" (plain text, or JSON when the path ends in .json).
TimeMesh parse_mesh_spec(std::string_view spec);

std::string mesh_to_text(const TimeMesh& mesh);
TimeMesh mesh_from_text(std::string_view text);
std::string mesh_to_json(const TimeMesh& mesh);
TimeMesh mesh_from_json(std::string_view text);

} // namespace fracstep
