#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fedfem/mesh.hpp"

namespace fedfem {

inline constexpr double kStefanBoltzmann = 5.67e-8;  // W m^-2 K^-4
inline constexpr double kAbsoluteZeroCelsius = -273.15;

/// Prescribed temperature on every node of a node set.
struct DirichletBC {
    std::string node_set;
    double temperature = 0.0;
};

/// Concentrated heat flow added to every node of a node set (W per node).
struct FluxBC {
    std::string node_set;
    double watts_per_node = 0.0;
};

/// Concentrated film condition on the nodes of a facet set.
struct ConvectionBC {
    std::string facet_set;
    double h = 0.0;        ///< W/(m^2 degC)
    double ambient = 0.0;  ///< degC
};

/// Concentrated radiation-to-ambient condition on the nodes of a facet set.
struct RadiationBC {
    std::string facet_set;
    double emissivity = 0.0;
    double ambient = 0.0;                         ///< degC
    double absolute_zero = kAbsoluteZeroCelsius;  ///< degC
    double stefan_boltzmann = kStefanBoltzmann;
};

using BoundaryRecord = std::variant<DirichletBC, FluxBC, ConvectionBC, RadiationBC>;

/// Boundary-condition records. Faces without a record are adiabatic.
struct BoundarySpec {
    std::vector<BoundaryRecord> records;
};

/// Checks parameter ranges and that every referenced set exists.
/// Overlapping Dirichlet sets are accepted only when they prescribe the same value.
void validate(const BoundarySpec& spec, const Mesh& mesh);

/// Equal split of rho * V_e over the nodes of each element.
std::vector<double> lump_thermal_mass(const Mesh& mesh, double density);

/// Per-node dt / M (no specific heat) or dt / (M c) when `constant_specific_heat` is given.
/// Throws ConfigError on dt <= 0 or a massless node.
std::vector<double> coefficient_matrix(std::span<const double> nodal_mass, double dt,
                                       std::optional<double> constant_specific_heat = std::nullopt);

/// -h (T - T_a) a. Negative when the node is hotter than ambient.
constexpr double convection_load(double h, double ambient, double temperature, double area) noexcept {
    return -h * (temperature - ambient) * area;
}

/// -sigma eps [(T - T_z)^4 - (T_a - T_z)^4] a. Throws NumericalError if T <= T_z.
double radiation_load(double stefan_boltzmann, double emissivity, double absolute_zero, double ambient,
                      double temperature, double area);

/// Boundary records resolved against a mesh: node lists, nodal areas and the
/// Dirichlet table. Assembling Q from this is allocation-free.
class BoundaryLoads {
public:
    BoundaryLoads(const BoundarySpec& spec, const Mesh& mesh);

    /// Overwrites `q` with the net nodal source vector at temperatures `t`.
    /// Dirichlet records contribute nothing here.
    void assemble(std::span<const double> t, std::span<double> q) const;

    /// Dirichlet nodes (ascending, unique) with their prescribed values.
    const std::vector<std::pair<NodeIndex, double>>& dirichlet() const noexcept { return dirichlet_; }
    void apply_dirichlet(std::span<double> t) const noexcept {
        for (const auto& [node, value] : dirichlet_) t[node] = value;
    }

    const std::map<std::string, NodalArea, std::less<>>& nodal_areas() const noexcept { return nodal_areas_; }
    bool has_nonlinear_terms() const noexcept { return !radiation_.empty(); }

    /// Adds -dQ/dT per node at temperatures `t` to `diagonal`: h a for convection,
    /// 4 sigma eps a (T - T_z)^3 for radiation (evaluated at max(T, T_a)).
    void add_film_terms(std::span<const double> t, std::span<double> diagonal) const;

private:
    struct FluxGroup {
        std::vector<NodeIndex> nodes;
        double watts = 0.0;
    };
    struct ConvectionGroup {
        std::vector<NodeIndex> nodes;
        double area;
        double h;
        double ambient;
    };
    struct RadiationGroup {
        std::vector<NodeIndex> nodes;
        double area;
        double emissivity;
        double ambient;
        double absolute_zero;
        double stefan_boltzmann;
    };

    std::map<std::string, NodalArea, std::less<>> nodal_areas_;
    std::vector<FluxGroup> flux_;
    std::vector<ConvectionGroup> convection_;
    std::vector<RadiationGroup> radiation_;
    std::vector<std::pair<NodeIndex, double>> dirichlet_;
};

/// Convenience wrapper building BoundaryLoads once and assembling Q at `t`.
std::vector<double> assemble_Q(const BoundarySpec& spec, const Mesh& mesh, std::span<const double> t);

}  // namespace fedfem
