#include "fedfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "fedfem/errors.hpp"
#include "fedfem/oracle.hpp"

namespace fedfem {

std::string_view to_string(StabilityMethod m) noexcept {
    return m == StabilityMethod::gershgorin ? "gershgorin" : "dense-eigen";
}

namespace {

// Row-major copy of an Eigen block into flat storage.
template <class Matrix>
void append_row_major(std::vector<double>& out, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
}

template <int K>
void scatter_ti(const PrecomputedModel& model, std::span<const double> t, std::span<double> f) {
    const NodeIndex* conn = model.mesh->connectivity().data();
    const double* g = model.g.data();
    const std::size_t elements = model.mesh->num_elements();
    for (std::size_t e = 0; e < elements; ++e, conn += K, g += K * K) {
        double te[K];
        for (int j = 0; j < K; ++j) te[j] = t[conn[j]];
        for (int i = 0; i < K; ++i) {
            double s = 0.0;
            for (int j = 0; j < K; ++j) s += g[i * K + j] * te[j];
            f[conn[i]] -= s;
        }
    }
}

template <int K>
void scatter_td(const PrecomputedModel& model, std::span<const double> t, std::span<double> f,
                std::span<double> nodal_k) {
    const std::size_t n = model.num_nodes();
    for (std::size_t v = 0; v < n; ++v) {
        const auto k = model.material.conductivity_components(t[v]);
        std::copy(k.begin(), k.end(), nodal_k.begin() + static_cast<std::ptrdiff_t>(6 * v));
    }
    const NodeIndex* conn = model.mesh->connectivity().data();
    const double* g = model.g.data();
    const double* b = model.gradient.data();
    const std::size_t elements = model.mesh->num_elements();
    constexpr double kInv = 1.0 / K;
    for (std::size_t e = 0; e < elements; ++e, conn += K, g += 3 * K, b += 3 * K) {
        double te[K];
        double d[6] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        for (int j = 0; j < K; ++j) {
            te[j] = t[conn[j]];
            const double* kn = nodal_k.data() + 6 * static_cast<std::size_t>(conn[j]);
            for (int c = 0; c < 6; ++c) d[c] += kn[c];
        }
        for (double& c : d) c *= kInv;
        double grad[3] = {0.0, 0.0, 0.0};
        for (int r = 0; r < 3; ++r) {
            for (int j = 0; j < K; ++j) grad[r] += b[r * K + j] * te[j];
        }
        // d = (k11, k22, k33, k12, k13, k23)
        const double flux[3] = {d[0] * grad[0] + d[3] * grad[1] + d[4] * grad[2],
                                d[3] * grad[0] + d[1] * grad[1] + d[5] * grad[2],
                                d[4] * grad[0] + d[5] * grad[1] + d[2] * grad[2]};
        for (int i = 0; i < K; ++i) {
            f[conn[i]] -= g[i * 3] * flux[0] + g[i * 3 + 1] * flux[1] + g[i * 3 + 2] * flux[2];
        }
    }
}

std::vector<char> dirichlet_mask(const PrecomputedModel& model) {
    std::vector<char> fixed(model.num_nodes(), 0);
    for (const auto& [node, value] : model.boundary.dirichlet()) fixed[node] = 1;
    return fixed;
}

/// Gershgorin bound of diag(1/(M c)) K on free nodes. `conductivity_of(e)`
/// returns the element tensor; `capacity_of(v)` the nodal M c.
template <class ConductivityFn, class CapacityFn>
double gershgorin_lambda(const PrecomputedModel& model, ConductivityFn conductivity_of, CapacityFn capacity_of,
                         std::span<const double> film_temperature) {
    const Mesh& mesh = *model.mesh;
    std::vector<double> row(model.num_nodes(), 0.0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const ElementKernel kernel = element_kernel(mesh, e);
        const ElementMatrix ke = kernel.scale * kernel.B.transpose() * conductivity_of(e) * kernel.B;
        const auto nodes = mesh.element(e);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            row[nodes[i]] += ke.row(static_cast<Eigen::Index>(i)).cwiseAbs().sum();
        }
    }
    model.boundary.add_film_terms(film_temperature, row);
    const auto fixed = dirichlet_mask(model);
    double lambda = 0.0;
    for (std::size_t v = 0; v < row.size(); ++v) {
        if (!fixed[v]) lambda = std::max(lambda, row[v] / capacity_of(v));
    }
    return lambda;
}

}  // namespace

PrecomputedModel precompute(std::shared_ptr<const Mesh> mesh, const MaterialModel& material,
                            const BoundarySpec& spec, double dt, const PrecomputeOptions& options) {
    if (!mesh) throw ConfigError("precompute: no mesh");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");

    PrecomputedModel model{
        .mesh = mesh,
        .material = material,
        .boundary = BoundaryLoads(spec, *mesh),
        .dt = dt,
        .form = material.is_temperature_dependent() ? GForm::temperature_dependent : GForm::temperature_independent,
        .nodes_per_element = mesh->nodes_per_element(),
    };
    model.initial_temperature = options.initial_temperature;

    const std::size_t elements = mesh->num_elements();
    const auto k = static_cast<std::size_t>(model.nodes_per_element);
    model.element_scale.reserve(elements);
    std::optional<Eigen::Matrix3d> constant_d;
    if (!model.temperature_dependent()) {
        constant_d = material.conductivity_at(material.conductivity().temperature(0));
        model.g.reserve(elements * k * k);
    } else {
        model.g.reserve(elements * k * 3);
        model.gradient.reserve(elements * k * 3);
    }
    for (std::size_t e = 0; e < elements; ++e) {
        const ElementKernel kernel = element_kernel(*mesh, e);
        const GMatrix g = build_G(kernel, constant_d);
        append_row_major(model.g, g.values);
        if (model.temperature_dependent()) append_row_major(model.gradient, g.gradient);
        model.element_scale.push_back(kernel.scale);
    }

    model.nodal_mass = lump_thermal_mass(*mesh, material.density());
    if (model.temperature_dependent()) {
        model.coefficient = coefficient_matrix(model.nodal_mass, dt);
    } else {
        model.specific_heat = material.specific_heat().row(0)[0];
        model.coefficient = coefficient_matrix(model.nodal_mass, dt, model.specific_heat);
    }

    model.stability = estimate_critical_dt(model, StabilityMethod::gershgorin);
    if (dt > options.safety * model.stability.critical_dt) {
        std::ostringstream msg;
        msg << "time step " << dt << " s exceeds " << options.safety << " x estimated critical step "
            << model.stability.critical_dt << " s";
        if (options.strict_stability) throw ConfigError(msg.str());
        model.warnings.push_back(msg.str());
    }
    return model;
}

SimulationState initial_state(const PrecomputedModel& model, double initial_temperature) {
    const std::vector<double> t(model.num_nodes(), initial_temperature);
    return initial_state(model, t);
}

SimulationState initial_state(const PrecomputedModel& model, std::span<const double> initial_temperature) {
    const std::size_t n = model.num_nodes();
    if (initial_temperature.size() != n) throw ConfigError("initial temperature vector has the wrong length");
    SimulationState state;
    state.temperature.assign(initial_temperature.begin(), initial_temperature.end());
    for (std::size_t v = 0; v < n; ++v) {
        if (!std::isfinite(state.temperature[v])) throw ConfigError("initial temperature is not finite");
    }
    model.boundary.apply_dirichlet(state.temperature);
    state.conduction.assign(n, 0.0);
    state.source.assign(n, 0.0);
    state.previous = state.temperature;
    if (model.temperature_dependent()) state.workspace.assign(6 * n, 0.0);
    return state;
}

void scatter_loads(const PrecomputedModel& model, std::span<const double> t, std::span<double> f,
                   std::span<double> workspace) {
    std::fill(f.begin(), f.end(), 0.0);
    const bool hex = model.nodes_per_element == 8;
    if (model.temperature_dependent()) {
        if (workspace.size() < 6 * model.num_nodes()) throw ConfigError("scatter_loads: workspace too small");
        hex ? scatter_td<8>(model, t, f, workspace) : scatter_td<4>(model, t, f, workspace);
    } else {
        hex ? scatter_ti<8>(model, t, f) : scatter_ti<4>(model, t, f);
    }
}

std::vector<double> scatter_loads(const PrecomputedModel& model, std::span<const double> t) {
    std::vector<double> f(model.num_nodes());
    std::vector<double> workspace(model.temperature_dependent() ? 6 * model.num_nodes() : 0);
    scatter_loads(model, t, f, workspace);
    return f;
}

void step(const PrecomputedModel& model, SimulationState& state) {
    auto& t = state.temperature;
    const std::size_t n = t.size();
    std::copy(t.begin(), t.end(), state.previous.begin());

    scatter_loads(model, t, state.conduction, state.workspace);
    try {
        model.boundary.assemble(t, state.source);
    } catch (const NumericalError& err) {
        throw NumericalError("step " + std::to_string(state.step + 1) + ": " + err.what());
    }

    const double* a = model.coefficient.data();
    const double* f = state.conduction.data();
    const double* q = state.source.data();
    double check = 0.0;
    if (model.temperature_dependent()) {
        const PropertyTable& c = model.material.specific_heat();
        for (std::size_t v = 0; v < n; ++v) {
            t[v] += a[v] / c.evaluate_scalar(t[v]) * (f[v] + q[v]);
            check += t[v];
        }
    } else {
        for (std::size_t v = 0; v < n; ++v) {
            t[v] += a[v] * (f[v] + q[v]);
            check += t[v];
        }
    }
    if (!std::isfinite(check)) {
        const auto bad = std::ranges::find_if(t, [](double x) { return !std::isfinite(x); });
        const std::string where = bad == t.end() ? "nodal temperatures overflow"
                                                 : "node " + std::to_string(bad - t.begin() + 1) +
                                                       " has a non-finite temperature";
        throw NumericalError("instability at step " + std::to_string(state.step + 1) + ": " + where);
    }
    model.boundary.apply_dirichlet(t);
    ++state.step;
    state.time = static_cast<double>(state.step) * model.dt;
}

bool steady_state_check(std::span<const double> prev, std::span<const double> next, double tolerance) {
    if (prev.size() != next.size()) throw ConfigError("steady_state_check: length mismatch");
    for (std::size_t i = 0; i < prev.size(); ++i) {
        if (!(std::abs(next[i] - prev[i]) <= tolerance)) return false;
    }
    return true;
}

RunSummary run(const PrecomputedModel& model, SimulationState& state, const Schedule& schedule,
               const SnapshotObserver& observer) {
    std::optional<std::size_t> target = schedule.max_steps;
    if (schedule.duration) {
        if (!(*schedule.duration > 0.0)) throw ConfigError("duration must be positive");
        const double ratio = *schedule.duration / model.dt;
        auto steps = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(static_cast<double>(steps) - ratio) > 1e-9 * ratio) steps = static_cast<std::size_t>(std::ceil(ratio));
        target = target ? std::min(*target, steps) : steps;
    }
    if (!target && !schedule.stop_on_steady) throw ConfigError("schedule needs a duration or stop_on_steady");

    using Clock = std::chrono::steady_clock;
    RunSummary summary;
    const bool snapshots = observer && schedule.snapshot_every > 0;
    std::size_t last_observed = std::numeric_limits<std::size_t>::max();
    if (snapshots) {
        observer(state);
        last_observed = state.step;
    }
    const auto start = Clock::now();
    std::size_t taken = 0;
    while (!target || taken < *target) {
        const auto t0 = Clock::now();
        step(model, state);
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        ++taken;
        summary.max_step_ms = std::max(summary.max_step_ms, ms);
        if (snapshots && state.step % schedule.snapshot_every == 0) {
            observer(state);
            last_observed = state.step;
        }
        if (schedule.stop_on_steady && steady_state_check(state.previous, state.temperature, schedule.steady_tolerance)) {
            summary.steady_step = state.step;
            break;
        }
    }
    summary.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (snapshots && last_observed != state.step) observer(state);
    summary.steps = taken;
    summary.final_time = state.time;
    summary.mean_step_ms = taken > 0 ? summary.total_ms / static_cast<double>(taken) : 0.0;
    return summary;
}

StabilityEstimate estimate_critical_dt(const PrecomputedModel& model, StabilityMethod method) {
    if (method == StabilityMethod::dense_eigen) return dense_eigen_estimate(model);

    const MaterialModel& material = model.material;
    const std::size_t n = model.num_nodes();
    const double film_t = model.initial_temperature.value_or(-std::numeric_limits<double>::infinity());
    const std::vector<double> film(n, film_t);
    double lambda = 0.0;
    if (!model.temperature_dependent()) {
        const Eigen::Matrix3d d = material.conductivity_at(material.conductivity().temperature(0));
        lambda = gershgorin_lambda(
            model, [&](std::size_t) { return d; },
            [&](std::size_t v) { return model.nodal_mass[v] * model.specific_heat; }, film);
    } else {
        if (model.initial_temperature) {
            const double t0 = *model.initial_temperature;
            const Eigen::Matrix3d d = material.conductivity_at(t0);
            const double c = nodal_specific_heat(material, t0);
            lambda = gershgorin_lambda(
                model, [&](std::size_t) { return d; }, [&](std::size_t v) { return model.nodal_mass[v] * c; }, film);
        }
        // Worst case over the table: every conductivity row against the smallest c.
        const double c_min = material.min_specific_heat();
        for (std::size_t r = 0; r < material.conductivity().rows(); ++r) {
            const Eigen::Matrix3d d = conductivity_tensor(material.conductivity().row(r), material.symmetry());
            lambda = std::max(lambda, gershgorin_lambda(
                                          model, [&](std::size_t) { return d; },
                                          [&](std::size_t v) { return model.nodal_mass[v] * c_min; }, film));
        }
    }
    StabilityEstimate est;
    est.method = StabilityMethod::gershgorin;
    est.lambda_max = lambda;
    est.critical_dt = lambda > 0.0 ? 2.0 / lambda : std::numeric_limits<double>::infinity();
    return est;
}

double thermal_energy(const PrecomputedModel& model, std::span<const double> t) {
    double energy = 0.0;
    for (std::size_t v = 0; v < t.size(); ++v) {
        const double c = model.temperature_dependent() ? nodal_specific_heat(model.material, t[v]) : model.specific_heat;
        energy += model.nodal_mass[v] * c * t[v];
    }
    return energy;
}

}  // namespace fedfem
