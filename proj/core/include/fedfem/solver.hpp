#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedfem/boundary.hpp"
#include "fedfem/element_kernels.hpp"
#include "fedfem/material.hpp"
#include "fedfem/mesh.hpp"

namespace fedfem {

enum class StabilityMethod { gershgorin, dense_eigen };

std::string_view to_string(StabilityMethod m) noexcept;

struct StabilityEstimate {
    double lambda_max = 0.0;   ///< upper bound (gershgorin) or largest eigenvalue (dense), 1/s
    double critical_dt = 0.0;  ///< 2 / lambda_max; +inf when no free node carries load
    StabilityMethod method = StabilityMethod::gershgorin;
};

struct PrecomputeOptions {
    /// Refuse to build a model whose dt exceeds `safety * critical_dt`.
    bool strict_stability = false;
    double safety = 0.9;
    /// Temperature used for the TD stability estimate. Without it only the
    /// table extremes (max conductivity row, min specific heat) are checked.
    std::optional<double> initial_temperature;
};

/// Everything computed once before stepping. Immutable afterwards.
struct PrecomputedModel {
    std::shared_ptr<const Mesh> mesh;
    MaterialModel material;
    BoundaryLoads boundary;
    double dt = 0.0;
    GForm form = GForm::temperature_independent;
    int nodes_per_element = 4;

    /// TI: k*k entries per element (row-major scale B^T D B).
    /// TD: k*3 entries per element (row-major scale B^T).
    std::vector<double> g;
    /// TD only: 3*k entries per element (row-major B).
    std::vector<double> gradient;
    std::vector<double> element_scale;

    std::vector<double> nodal_mass;
    /// dt / (M c) for TI, dt / M for TD.
    std::vector<double> coefficient;
    /// Constant specific heat for TI models; unused for TD.
    double specific_heat = 0.0;

    std::optional<double> initial_temperature;
    StabilityEstimate stability;
    std::vector<std::string> warnings;

    std::size_t num_nodes() const noexcept { return nodal_mass.size(); }
    bool temperature_dependent() const noexcept { return form == GForm::temperature_dependent; }
};

/// Stage (i): kernels, G matrices, lumped mass, coefficients, nodal areas and the
/// stability estimate. A dt above `safety * critical_dt` adds a warning, or throws
/// ConfigError in strict mode.
PrecomputedModel precompute(std::shared_ptr<const Mesh> mesh, const MaterialModel& material,
                            const BoundarySpec& spec, double dt, const PrecomputeOptions& options = {});

struct SimulationState {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<double> temperature;
    std::vector<double> conduction;  ///< F at the last step, W
    std::vector<double> source;      ///< Q at the last step, W
    std::vector<double> previous;    ///< temperatures before the last step
    std::vector<double> workspace;   ///< TD scratch: nodal conductivity components
};

/// Stage (ii): uniform initial field with Dirichlet values applied.
SimulationState initial_state(const PrecomputedModel& model, double initial_temperature);
SimulationState initial_state(const PrecomputedModel& model, std::span<const double> initial_temperature);

/// Element-by-element conduction loads F = sum_e F_e at temperatures `t`. No
/// global matrix is formed. `workspace` must hold 6 * num_nodes entries for TD models.
void scatter_loads(const PrecomputedModel& model, std::span<const double> t, std::span<double> f,
                   std::span<double> workspace);
std::vector<double> scatter_loads(const PrecomputedModel& model, std::span<const double> t);

/// One explicit step: loads at current T, per-node update, Dirichlet overwrite,
/// time = step * dt. Throws NumericalError naming the step and node when a
/// temperature becomes non-finite.
void step(const PrecomputedModel& model, SimulationState& state);

/// True iff max |next - prev| <= tolerance.
bool steady_state_check(std::span<const double> prev, std::span<const double> next, double tolerance);

struct Schedule {
    std::optional<double> duration;  ///< seconds; ceil(duration / dt) steps
    bool stop_on_steady = false;
    double steady_tolerance = 1e-3;
    std::size_t snapshot_every = 0;  ///< 0 disables snapshots
    std::optional<std::size_t> max_steps;
};

struct RunSummary {
    std::size_t steps = 0;
    double final_time = 0.0;
    std::optional<std::size_t> steady_step;
    double mean_step_ms = 0.0;
    double max_step_ms = 0.0;
    double total_ms = 0.0;
};

using SnapshotObserver = std::function<void(const SimulationState&)>;

/// Stages (ii)-(iii). The observer sees step 0, every `snapshot_every` steps, and
/// the final state. `state` holds the final state on return.
RunSummary run(const PrecomputedModel& model, SimulationState& state, const Schedule& schedule,
               const SnapshotObserver& observer = {});

/// gershgorin: max_k sum_j |K_kj| / (M_k c_k) over free nodes, accumulated per element.
/// dense_eigen: largest eigenvalue of diag(1/(M c)) K on the free nodes by power
/// iteration (meshes up to 2000 nodes).
StabilityEstimate estimate_critical_dt(const PrecomputedModel& model,
                                       StabilityMethod method = StabilityMethod::gershgorin);

/// Sum over nodes of M_k c_k(T_k) T_k.
double thermal_energy(const PrecomputedModel& model, std::span<const double> t);

}  // namespace fedfem
