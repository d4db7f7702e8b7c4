#include "fedfem/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fedfem/errors.hpp"

namespace fedfem {

namespace {

using Triplet = Eigen::Triplet<double>;

std::vector<double> uniform_temperature(const PrecomputedModel& model) {
    double t0 = model.initial_temperature.value_or(model.material.conductivity().temperature(0));
    return std::vector<double>(model.num_nodes(), t0);
}

struct Partition {
    std::vector<int> free_index;
    std::vector<NodeIndex> free_nodes;
    Eigen::VectorXd dirichlet_values;  // indexed by node, zero for free nodes
};

Partition partition(const PrecomputedModel& model) {
    Partition p;
    const std::size_t n = model.num_nodes();
    p.free_index.assign(n, 0);
    p.dirichlet_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (const auto& [node, value] : model.boundary.dirichlet()) {
        p.free_index[node] = -1;
        p.dirichlet_values[node] = value;
    }
    int next = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (p.free_index[v] >= 0) {
            p.free_index[v] = next++;
            p.free_nodes.push_back(static_cast<NodeIndex>(v));
        }
    }
    return p;
}

/// Splits K into the free-free block plus the free-Dirichlet coupling.
void split(const SparseMatrix& k, const std::vector<int>& free_index, std::size_t n_free, SparseMatrix& kff,
           SparseMatrix& kfd) {
    std::vector<Triplet> ff;
    std::vector<Triplet> fd;
    for (int col = 0; col < k.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
            const int r = free_index[static_cast<std::size_t>(it.row())];
            if (r < 0) continue;
            const int c = free_index[static_cast<std::size_t>(col)];
            if (c >= 0) {
                ff.emplace_back(r, c, it.value());
            } else {
                fd.emplace_back(r, col, it.value());
            }
        }
    }
    const auto nf = static_cast<Eigen::Index>(n_free);
    kff.resize(nf, nf);
    kff.setFromTriplets(ff.begin(), ff.end());
    kfd.resize(nf, k.cols());
    kfd.setFromTriplets(fd.begin(), fd.end());
}

}  // namespace

GlobalOperator assemble_global_K(const Mesh& mesh, const MaterialModel& material, std::span<const double> temperature) {
    if (temperature.size() != mesh.num_nodes()) throw ConfigError("assemble_global_K: temperature length mismatch");
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    const auto k = static_cast<std::size_t>(mesh.nodes_per_element());
    std::vector<Triplet> triplets;
    triplets.reserve(mesh.num_elements() * k * k);
    std::vector<double> te(k);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto nodes = mesh.element(e);
        for (std::size_t i = 0; i < k; ++i) te[i] = temperature[nodes[i]];
        const Eigen::Matrix3d d = element_conductivity(material, te);
        const ElementKernel kernel = element_kernel(mesh, e);
        const ElementMatrix ke = kernel.scale * kernel.B.transpose() * d * kernel.B;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                triplets.emplace_back(static_cast<int>(nodes[i]), static_cast<int>(nodes[j]),
                                      ke(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
    }
    GlobalOperator op;
    op.stiffness.resize(n, n);
    op.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    const std::vector<double> mass = lump_thermal_mass(mesh, material.density());
    op.capacity.resize(n);
    for (Eigen::Index v = 0; v < n; ++v) {
        const auto i = static_cast<std::size_t>(v);
        op.capacity[v] = mass[i] * nodal_specific_heat(material, temperature[i]);
    }
    return op;
}

GlobalOperator assemble_global_K(const PrecomputedModel& model, std::optional<std::span<const double>> temperature) {
    if (temperature) return assemble_global_K(*model.mesh, model.material, *temperature);
    const std::vector<double> t = uniform_temperature(model);
    return assemble_global_K(*model.mesh, model.material, t);
}

// ---------------------------------------------------------------------------

ImplicitOracle::ImplicitOracle(const PrecomputedModel& model, double dt) : model_(&model), dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("implicit oracle: time step must be positive");
    Partition p = partition(model);
    free_index_ = std::move(p.free_index);
    free_nodes_ = std::move(p.free_nodes);
    dirichlet_values_ = std::move(p.dirichlet_values);
    q_.resize(model.num_nodes());
    rhs_.resize(static_cast<Eigen::Index>(free_nodes_.size()));
}

void ImplicitOracle::factor(std::span<const double> t) {
    const GlobalOperator op = assemble_global_K(*model_->mesh, model_->material, t);
    SparseMatrix kff;
    split(op.stiffness, free_index_, free_nodes_.size(), kff, coupling_);
    const auto nf = static_cast<Eigen::Index>(free_nodes_.size());
    capacity_.resize(nf);
    for (Eigen::Index i = 0; i < nf; ++i) capacity_[i] = op.capacity[free_nodes_[static_cast<std::size_t>(i)]] / dt_;
    SparseMatrix system = kff;
    system.diagonal() += capacity_;
    if (!analyzed_) {
        solver_.analyzePattern(system);
        analyzed_ = true;
    }
    solver_.factorize(system);
    if (solver_.info() != Eigen::Success) throw NumericalError("implicit oracle: factorization failed");
    factored_ = true;
}

void ImplicitOracle::step(std::span<const double> t, std::span<double> t_next) {
    if (!factored_ || model_->temperature_dependent()) factor(t);
    model_->boundary.assemble(t, q_);
    const Eigen::VectorXd lifted = coupling_ * dirichlet_values_;
    for (std::size_t i = 0; i < free_nodes_.size(); ++i) {
        const NodeIndex v = free_nodes_[i];
        const auto r = static_cast<Eigen::Index>(i);
        rhs_[r] = q_[v] + capacity_[r] * t[v] - lifted[r];
    }
    const Eigen::VectorXd x = solver_.solve(rhs_);
    for (std::size_t v = 0; v < t.size(); ++v) {
        const int f = free_index_[v];
        t_next[v] = f >= 0 ? x[f] : dirichlet_values_[static_cast<Eigen::Index>(v)];
    }
}

std::vector<double> ImplicitOracle::step(std::span<const double> t) {
    std::vector<double> out(t.size());
    step(t, out);
    return out;
}

std::vector<double> implicit_step(const PrecomputedModel& model, std::span<const double> t, double dt) {
    ImplicitOracle oracle(model, dt);
    return oracle.step(t);
}

std::vector<double> steady_solve(const PrecomputedModel& model, std::span<const double> t) {
    const Partition p = partition(model);
    if (p.free_nodes.size() == model.num_nodes()) {
        throw NumericalError("steady solve needs at least one Dirichlet node");
    }
    const GlobalOperator op = assemble_global_K(*model.mesh, model.material, t);
    SparseMatrix kff;
    SparseMatrix kfd;
    split(op.stiffness, p.free_index, p.free_nodes.size(), kff, kfd);
    std::vector<double> q(model.num_nodes());
    model.boundary.assemble(t, q);
    const Eigen::VectorXd lifted = kfd * p.dirichlet_values;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(p.free_nodes.size()));
    for (std::size_t i = 0; i < p.free_nodes.size(); ++i) {
        rhs[static_cast<Eigen::Index>(i)] = q[p.free_nodes[i]] - lifted[static_cast<Eigen::Index>(i)];
    }
    std::vector<double> out(t.begin(), t.end());
    if (!p.free_nodes.empty()) {
        const auto nf = static_cast<Eigen::Index>(p.free_nodes.size());
        Eigen::VectorXd inv_c(nf);
        Eigen::VectorXd x(nf);
        for (Eigen::Index i = 0; i < nf; ++i) {
            const NodeIndex v = p.free_nodes[static_cast<std::size_t>(i)];
            inv_c[i] = 1.0 / op.capacity[v];
            x[i] = t[v];
        }
        const double scale = rhs.norm() + (kff.cwiseAbs() * x.cwiseAbs()).norm();
        const double tolerance = 1e-13 * scale;
        Eigen::VectorXd r = rhs - kff * x;
        Eigen::VectorXd z = inv_c.cwiseProduct(r);
        Eigen::VectorXd d = z;
        double rz = r.dot(z);
        const Eigen::Index max_iterations = 20 * nf + 100;
        Eigen::Index iter = 0;
        for (; iter < max_iterations && r.norm() > tolerance; ++iter) {
            const Eigen::VectorXd kd = kff * d;
            const double alpha = rz / d.dot(kd);
            x += alpha * d;
            // A load with a zero-energy component leaves a residual CG cannot remove.
            if (std::abs(alpha) * d.cwiseAbs().maxCoeff() <= 1e-15 * x.cwiseAbs().maxCoeff()) break;
            r -= alpha * kd;
            if (iter % 50 == 49) r = rhs - kff * x;
            z = inv_c.cwiseProduct(r);
            const double rz_next = r.dot(z);
            d = z + (rz_next / rz) * d;
            rz = rz_next;
        }
        if ((rhs - kff * x).norm() > 1e4 * tolerance) {
            throw NumericalError("steady solve: no steady state reachable (residual stalled after " +
                                 std::to_string(iter) + " iterations)");
        }
        for (Eigen::Index i = 0; i < nf; ++i) out[p.free_nodes[static_cast<std::size_t>(i)]] = x[i];
    }
    for (const auto& [node, value] : model.boundary.dirichlet()) out[node] = value;
    return out;
}

double error_metric(std::span<const double> reference, std::span<const double> t) {
    if (reference.size() != t.size()) throw ConfigError("error_metric: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = reference[i] - t[i];
        num += d * d;
        den += reference[i] * reference[i];
    }
    if (!(den > 0.0)) throw ConfigError("error_metric: reference field has zero norm");
    return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------

PatchTestResult patch_test(std::shared_ptr<const Mesh> mesh, const PatchTestOptions& options) {
    if (!mesh) throw ConfigError("patch_test: no mesh");
    const std::vector<NodeIndex> boundary = boundary_nodes(*mesh);
    std::vector<char> on_boundary(mesh->num_nodes(), 0);
    for (const NodeIndex v : boundary) on_boundary[v] = 1;
    const auto interior = static_cast<std::size_t>(std::ranges::count(on_boundary, 0));
    if (interior == 0) throw ConfigError("patch test needs at least one interior node");

    auto field = [&](const Point& x) {
        return options.field[0] * x[0] + options.field[1] * x[1] + options.field[2] * x[2] + options.field[3];
    };

    // One single-node Dirichlet set per boundary node carries the linear field.
    Mesh::NodeSets node_sets = mesh->node_sets();
    BoundarySpec spec;
    for (const NodeIndex v : boundary) {
        std::string name = "patch-boundary-" + std::to_string(v + 1);
        while (node_sets.contains(name)) name += "_";
        node_sets.emplace(name, std::vector<NodeIndex>{v});
        spec.records.emplace_back(DirichletBC{name, field(mesh->node(v))});
    }
    auto pinned = std::make_shared<const Mesh>(mesh->kind(), mesh->nodes(), mesh->connectivity(),
                                               std::move(node_sets), mesh->facet_sets());

    const MaterialModel material(1000.0, PropertyTable::constant(2000.0), PropertyTable::constant(200.0),
                                 SymmetryClass::isotropic);
    const PrecomputedModel probe = precompute(pinned, material, spec, 1.0);
    const double dt = options.dt_fraction * probe.stability.critical_dt;
    const PrecomputedModel model = precompute(pinned, material, spec, dt);

    SimulationState state = initial_state(model, options.initial_temperature);
    Schedule schedule;
    schedule.stop_on_steady = true;
    schedule.steady_tolerance = options.steady_tolerance;
    schedule.max_steps = 50'000'000;
    const RunSummary summary = run(model, state, schedule);

    PatchTestResult result;
    result.steps = summary.steps;
    result.interior_nodes = interior;
    for (std::size_t v = 0; v < mesh->num_nodes(); ++v) {
        if (!on_boundary[v]) result.max_error = std::max(result.max_error, std::abs(state.temperature[v] - field(mesh->node(v))));
    }
    result.temperature = std::move(state.temperature);
    return result;
}

double sine_decay_reference(double x, double t, double alpha, double length, double amplitude) {
    constexpr double pi = std::numbers::pi;
    return amplitude * std::sin(pi * x / length) * std::exp(-alpha * pi * pi * t / (length * length));
}

StabilityEstimate dense_eigen_estimate(const PrecomputedModel& model) {
    constexpr std::size_t kMaxNodes = 2000;
    if (model.num_nodes() > kMaxNodes) {
        throw ConfigError("dense-eigen stability estimate is limited to " + std::to_string(kMaxNodes) + " nodes");
    }
    const std::vector<double> t = uniform_temperature(model);
    const GlobalOperator op = assemble_global_K(model, t);
    std::vector<double> film(model.num_nodes(), 0.0);
    const std::vector<double> film_t(model.num_nodes(), model.initial_temperature.value_or(-std::numeric_limits<double>::infinity()));
    model.boundary.add_film_terms(film_t, film);

    const Partition p = partition(model);
    SparseMatrix kff;
    SparseMatrix kfd;
    split(op.stiffness, p.free_index, p.free_nodes.size(), kff, kfd);
    const auto nf = static_cast<Eigen::Index>(p.free_nodes.size());
    StabilityEstimate est;
    est.method = StabilityMethod::dense_eigen;
    if (nf == 0) {
        est.critical_dt = std::numeric_limits<double>::infinity();
        return est;
    }
    Eigen::VectorXd inv_sqrt(nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
        const NodeIndex v = p.free_nodes[static_cast<std::size_t>(i)];
        kff.coeffRef(i, i) += film[v];
        inv_sqrt[i] = 1.0 / std::sqrt(op.capacity[v]);
    }
    // S = C^-1/2 K C^-1/2 is symmetric and similar to C^-1 K.
    const SparseMatrix s = inv_sqrt.asDiagonal() * kff * inv_sqrt.asDiagonal();

    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(nf);
    for (Eigen::Index i = 0; i < nf; ++i) x[i] = dist(rng);
    x.normalize();
    double rq = 0.0;
    constexpr std::size_t kMaxIterations = 2'000'000;
    for (std::size_t it = 0; it < kMaxIterations; ++it) {
        const Eigen::VectorXd y = s * x;
        const double next = x.dot(y);
        const double norm = y.norm();
        if (!(norm > 0.0)) {
            rq = 0.0;
            break;
        }
        x = y / norm;
        const bool converged = it > 0 && std::abs(next - rq) <= 1e-8 * std::abs(next);
        rq = next;
        if (converged) break;
    }
    est.lambda_max = rq;
    est.critical_dt = rq > 0.0 ? 2.0 / rq : std::numeric_limits<double>::infinity();
    return est;
}

}  // namespace fedfem
