#include "fedfem/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fedfem/element_kernels.hpp"
#include "fedfem/errors.hpp"

namespace fedfem {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

void validate(const BoundarySpec& spec, const Mesh& mesh) {
    std::vector<double> prescribed(mesh.num_nodes(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& record : spec.records) {
        std::visit(Overloaded{
                       [&](const DirichletBC& r) {
                           require_finite(r.temperature, "Dirichlet temperature");
                           for (const NodeIndex v : mesh.node_set(r.node_set)) {
                               if (!std::isnan(prescribed[v]) && prescribed[v] != r.temperature) {
                                   std::ostringstream msg;
                                   msg << "node " << v + 1 << " is prescribed both " << prescribed[v] << " and "
                                       << r.temperature << " by overlapping Dirichlet sets";
                                   throw ConfigError(msg.str());
                               }
                               prescribed[v] = r.temperature;
                           }
                       },
                       [&](const FluxBC& r) {
                           require_finite(r.watts_per_node, "flux");
                           (void)mesh.node_set(r.node_set);
                       },
                       [&](const ConvectionBC& r) {
                           require_finite(r.ambient, "convection ambient temperature");
                           if (!(r.h >= 0.0) || !std::isfinite(r.h)) throw ConfigError("convection h must be >= 0");
                           (void)mesh.facet_set(r.facet_set);
                       },
                       [&](const RadiationBC& r) {
                           require_finite(r.ambient, "radiation ambient temperature");
                           require_finite(r.absolute_zero, "radiation absolute zero");
                           if (!(r.emissivity >= 0.0 && r.emissivity <= 1.0)) {
                               throw ConfigError("radiation emissivity must lie in [0, 1]");
                           }
                           if (!(r.stefan_boltzmann > 0.0) || !std::isfinite(r.stefan_boltzmann)) {
                               throw ConfigError("Stefan-Boltzmann constant must be positive");
                           }
                           if (!(r.ambient > r.absolute_zero)) {
                               throw ConfigError("radiation ambient temperature must exceed absolute zero");
                           }
                           (void)mesh.facet_set(r.facet_set);
                       },
                   },
                   record);
    }
}

std::vector<double> lump_thermal_mass(const Mesh& mesh, double density) {
    std::vector<double> mass(mesh.num_nodes(), 0.0);
    const double share = 1.0 / mesh.nodes_per_element();
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const double m = density * mesh.element_volume(e) * share;
        for (const NodeIndex v : mesh.element(e)) mass[v] += m;
    }
    return mass;
}

std::vector<double> coefficient_matrix(std::span<const double> nodal_mass, double dt,
                                       std::optional<double> constant_specific_heat) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
    const double c = constant_specific_heat.value_or(1.0);
    if (!(c > 0.0)) throw ConfigError("specific heat must be positive");
    std::vector<double> a(nodal_mass.size());
    for (std::size_t i = 0; i < nodal_mass.size(); ++i) {
        if (!(nodal_mass[i] > 0.0)) {
            throw ConfigError("node " + std::to_string(i + 1) + " has no mass (it belongs to no element)");
        }
        a[i] = dt / (nodal_mass[i] * c);
    }
    return a;
}

double radiation_load(double stefan_boltzmann, double emissivity, double absolute_zero, double ambient,
                      double temperature, double area) {
    if (!(temperature > absolute_zero)) {
        std::ostringstream msg;
        msg << "radiating node temperature " << temperature << " degC is at or below absolute zero";
        throw NumericalError(msg.str());
    }
    const double body = temperature - absolute_zero;
    const double env = ambient - absolute_zero;
    const double body2 = body * body;
    const double env2 = env * env;
    return -stefan_boltzmann * emissivity * (body2 * body2 - env2 * env2) * area;
}

BoundaryLoads::BoundaryLoads(const BoundarySpec& spec, const Mesh& mesh) {
    validate(spec, mesh);
    auto area_of = [&](const std::string& name) -> const NodalArea& {
        auto it = nodal_areas_.find(name);
        if (it == nodal_areas_.end()) it = nodal_areas_.emplace(name, nodal_area(mesh, name)).first;
        return it->second;
    };
    for (const auto& record : spec.records) {
        std::visit(Overloaded{
                       [&](const DirichletBC& r) {
                           for (const NodeIndex v : mesh.node_set(r.node_set)) dirichlet_.emplace_back(v, r.temperature);
                       },
                       [&](const FluxBC& r) { flux_.push_back({mesh.node_set(r.node_set), r.watts_per_node}); },
                       [&](const ConvectionBC& r) {
                           const NodalArea& a = area_of(r.facet_set);
                           convection_.push_back({a.nodes, a.area_per_node, r.h, r.ambient});
                       },
                       [&](const RadiationBC& r) {
                           const NodalArea& a = area_of(r.facet_set);
                           radiation_.push_back({a.nodes, a.area_per_node, r.emissivity, r.ambient, r.absolute_zero,
                                                 r.stefan_boltzmann});
                       },
                   },
                   record);
    }
    std::ranges::sort(dirichlet_);
    const auto dup = std::ranges::unique(dirichlet_);
    dirichlet_.erase(dup.begin(), dup.end());
}

void BoundaryLoads::assemble(std::span<const double> t, std::span<double> q) const {
    std::fill(q.begin(), q.end(), 0.0);
    for (const auto& g : flux_) {
        for (const NodeIndex v : g.nodes) q[v] += g.watts;
    }
    for (const auto& g : convection_) {
        for (const NodeIndex v : g.nodes) q[v] += convection_load(g.h, g.ambient, t[v], g.area);
    }
    for (const auto& g : radiation_) {
        for (const NodeIndex v : g.nodes) {
            try {
                q[v] += radiation_load(g.stefan_boltzmann, g.emissivity, g.absolute_zero, g.ambient, t[v], g.area);
            } catch (const NumericalError& err) {
                throw NumericalError("node " + std::to_string(v + 1) + ": " + err.what());
            }
        }
    }
}

void BoundaryLoads::add_film_terms(std::span<const double> t, std::span<double> diagonal) const {
    for (const auto& g : convection_) {
        for (const NodeIndex v : g.nodes) diagonal[v] += g.h * g.area;
    }
    for (const auto& g : radiation_) {
        for (const NodeIndex v : g.nodes) {
            const double body = std::max(t[v], g.ambient) - g.absolute_zero;
            diagonal[v] += 4.0 * g.stefan_boltzmann * g.emissivity * g.area * body * body * body;
        }
    }
}

std::vector<double> assemble_Q(const BoundarySpec& spec, const Mesh& mesh, std::span<const double> t) {
    const BoundaryLoads loads(spec, mesh);
    std::vector<double> q(mesh.num_nodes());
    loads.assemble(t, q);
    return q;
}

}  // namespace fedfem
