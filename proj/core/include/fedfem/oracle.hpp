#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "fedfem/solver.hpp"

namespace fedfem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Explicitly assembled conductivity operator, used only for verification.
/// K is symmetric positive semidefinite with K * 1 = 0, so F = -K T.
struct GlobalOperator {
    SparseMatrix stiffness;
    Eigen::VectorXd capacity;  ///< lumped M c
};

/// Assembles K from element contributions scale * B^T D B and the lumped
/// capacity. TD materials are frozen at `temperature` (per node), or at the
/// model's initial temperature when omitted.
GlobalOperator assemble_global_K(const PrecomputedModel& model,
                                 std::optional<std::span<const double>> temperature = std::nullopt);

/// Same, built from mesh and material alone.
GlobalOperator assemble_global_K(const Mesh& mesh, const MaterialModel& material,
                                 std::span<const double> temperature);

/// Backward-Euler reference solver:
///   (C/dt + K) T_next = Q(T) + (C/dt) T,  Dirichlet rows pinned to T_r,
/// with convection/radiation and TD properties lagged at the current T.
/// TI systems are factored once; TD systems are refactored every step.
class ImplicitOracle {
public:
    ImplicitOracle(const PrecomputedModel& model, double dt);

    void step(std::span<const double> t, std::span<double> t_next);
    std::vector<double> step(std::span<const double> t);

    double dt() const noexcept { return dt_; }

private:
    void factor(std::span<const double> t);

    const PrecomputedModel* model_;
    double dt_;
    std::vector<int> free_index_;  ///< node -> free dof, or -1 for Dirichlet nodes
    std::vector<NodeIndex> free_nodes_;
    SparseMatrix coupling_;        ///< K restricted to free rows, Dirichlet columns
    Eigen::VectorXd capacity_;     ///< free-node M c / dt at the last factorization
    Eigen::SimplicialLDLT<SparseMatrix> solver_;
    bool factored_ = false;
    bool analyzed_ = false;
    std::vector<double> q_;
    Eigen::VectorXd dirichlet_values_;
    Eigen::VectorXd rhs_;
};

/// One implicit step from `t` with a temporary oracle.
std::vector<double> implicit_step(const PrecomputedModel& model, std::span<const double> t, double dt);

/// Solves K T = Q on the free nodes with Q evaluated at `t` (TI materials).
/// One-point hex8 meshes leave zero-energy modes in K, so the system is solved by
/// conjugate gradients preconditioned with C, started from `t`. The iterates never
/// change the C-weighted zero-energy content of `t`, so the result is the state
/// both time integrators converge to from `t`.
std::vector<double> steady_solve(const PrecomputedModel& model, std::span<const double> t);

/// sqrt( sum (ref_i - t_i)^2 / sum ref_i^2 ). Throws ConfigError on a zero reference.
double error_metric(std::span<const double> reference, std::span<const double> t);

struct PatchTestOptions {
    /// Field prescribed on boundary nodes: a.x + b.y + c.z + d.
    Eigen::Vector4d field{200.0, 100.0, 200.0, 0.0};
    double steady_tolerance = 1e-10;
    double initial_temperature = 0.0;
    double dt_fraction = 0.5;  ///< fraction of the gershgorin critical step
};

struct PatchTestResult {
    double max_error = 0.0;  ///< max |T - field| over interior nodes, degC
    std::size_t steps = 0;
    std::size_t interior_nodes = 0;
    std::vector<double> temperature;
};

/// Runs the explicit solver to steady state with every boundary node pinned to the
/// linear field and no sources. Throws ConfigError if the mesh has no interior node.
PatchTestResult patch_test(std::shared_ptr<const Mesh> mesh, const PatchTestOptions& options = {});

/// T_amp sin(pi x / L) exp(-alpha pi^2 t / L^2).
double sine_decay_reference(double x, double t, double alpha, double length, double amplitude);

/// Largest eigenvalue of diag(1/(M c)) (K + boundary film terms) on free nodes by
/// power iteration on the symmetric scaled operator, tolerance 1e-8 on the
/// Rayleigh quotient.
StabilityEstimate dense_eigen_estimate(const PrecomputedModel& model);

}  // namespace fedfem
