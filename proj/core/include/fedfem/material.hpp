#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fedfem {

enum class SymmetryClass { isotropic, orthotropic, anisotropic };

/// Number of values per table row: 1, 3 (k11 k22 k33) or 6 (k11 k22 k33 k12 k13 k23).
constexpr int arity(SymmetryClass s) noexcept {
    switch (s) {
        case SymmetryClass::isotropic: return 1;
        case SymmetryClass::orthotropic: return 3;
        case SymmetryClass::anisotropic: return 6;
    }
    return 0;
}

std::string_view to_string(SymmetryClass s) noexcept;

/// Up to six property values of one table row, unused entries zero.
using PropertyValues = std::array<double, 6>;

/// Symmetric conductivity in Voigt-like order (k11, k22, k33, k12, k13, k23).
using SymmetricTensor = std::array<double, 6>;

/// Piecewise-linear table of temperature (degC) -> value(s).
/// Temperatures strictly increase; outside the range the end rows apply.
class PropertyTable {
public:
    /// `values` is row-major with `arity` entries per row.
    PropertyTable(std::vector<double> temperatures, std::vector<double> values, int arity);

    static PropertyTable constant(std::span<const double> row);
    static PropertyTable constant(double value) { return constant(std::span<const double>(&value, 1)); }

    int arity() const noexcept { return arity_; }
    std::size_t rows() const noexcept { return temperatures_.size(); }
    bool is_constant() const noexcept { return rows() == 1; }

    double temperature(std::size_t row) const { return temperatures_[row]; }
    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * static_cast<std::size_t>(arity_), static_cast<std::size_t>(arity_)};
    }

    PropertyValues evaluate(double temperature) const;
    double evaluate_scalar(double temperature) const { return evaluate(temperature)[0]; }

private:
    std::vector<double> temperatures_;
    std::vector<double> values_;
    int arity_;
};

inline PropertyValues eval_property(const PropertyTable& table, double temperature) {
    return table.evaluate(temperature);
}

/// Builds the symmetric 3x3 tensor from one table row. Throws MaterialError
/// when the arity does not match or the tensor is not positive semidefinite.
Eigen::Matrix3d conductivity_tensor(std::span<const double> row, SymmetryClass symmetry);

SymmetricTensor symmetric_components(std::span<const double> row, SymmetryClass symmetry) noexcept;
Eigen::Matrix3d to_matrix(const SymmetricTensor& k) noexcept;

/// Homogeneous material: density, c(T) and k_ij(T).
class MaterialModel {
public:
    MaterialModel(double density, PropertyTable specific_heat, PropertyTable conductivity,
                  SymmetryClass symmetry);

    double density() const noexcept { return density_; }
    const PropertyTable& specific_heat() const noexcept { return specific_heat_; }
    const PropertyTable& conductivity() const noexcept { return conductivity_; }
    SymmetryClass symmetry() const noexcept { return symmetry_; }

    bool is_temperature_dependent() const noexcept {
        return !specific_heat_.is_constant() || !conductivity_.is_constant();
    }

    SymmetricTensor conductivity_components(double temperature) const noexcept {
        const auto v = conductivity_.evaluate(temperature);
        return symmetric_components(std::span<const double>(v.data(), static_cast<std::size_t>(arity(symmetry_))),
                                    symmetry_);
    }
    Eigen::Matrix3d conductivity_at(double temperature) const { return to_matrix(conductivity_components(temperature)); }

    double min_specific_heat() const noexcept;

private:
    double density_;
    PropertyTable specific_heat_;
    PropertyTable conductivity_;
    SymmetryClass symmetry_;
};

/// Mean of the conductivity tensors evaluated at each element node temperature.
Eigen::Matrix3d element_conductivity(const MaterialModel& material, std::span<const double> nodal_temperatures);

inline double nodal_specific_heat(const MaterialModel& material, double temperature) {
    return material.specific_heat().evaluate_scalar(temperature);
}

}  // namespace fedfem
