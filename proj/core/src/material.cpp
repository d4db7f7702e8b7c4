#include "fedfem/material.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/LU>

#include "fedfem/errors.hpp"

namespace fedfem {

std::string_view to_string(SymmetryClass s) noexcept {
    switch (s) {
        case SymmetryClass::isotropic: return "isotropic";
        case SymmetryClass::orthotropic: return "orthotropic";
        case SymmetryClass::anisotropic: return "anisotropic";
    }
    return "unknown";
}

PropertyTable::PropertyTable(std::vector<double> temperatures, std::vector<double> values, int arity)
    : temperatures_(std::move(temperatures)), values_(std::move(values)), arity_(arity) {
    if (arity_ != 1 && arity_ != 3 && arity_ != 6) {
        throw MaterialError("property table arity must be 1, 3 or 6, got " + std::to_string(arity_));
    }
    if (temperatures_.empty()) throw MaterialError("property table needs at least one row");
    if (values_.size() != temperatures_.size() * static_cast<std::size_t>(arity_)) {
        throw MaterialError("property table has " + std::to_string(values_.size()) + " values for " +
                            std::to_string(temperatures_.size()) + " rows of arity " + std::to_string(arity_));
    }
    for (std::size_t i = 0; i < temperatures_.size(); ++i) {
        if (!std::isfinite(temperatures_[i])) throw MaterialError("property table temperature is not finite");
        if (i > 0 && !(temperatures_[i] > temperatures_[i - 1])) {
            throw MaterialError("property table temperatures must be strictly increasing");
        }
    }
    for (const double v : values_) {
        if (!std::isfinite(v)) throw MaterialError("property table value is not finite");
    }
}

PropertyTable PropertyTable::constant(std::span<const double> row) {
    return PropertyTable({0.0}, std::vector<double>(row.begin(), row.end()), static_cast<int>(row.size()));
}

PropertyValues PropertyTable::evaluate(double temperature) const {
    PropertyValues out{};
    const auto a = static_cast<std::size_t>(arity_);
    std::size_t lo = 0;
    double w = 0.0;  // weight of row lo + 1
    if (rows() > 1 && temperature > temperatures_.front()) {
        if (temperature >= temperatures_.back()) {
            lo = rows() - 1;
        } else {
            const auto it = std::upper_bound(temperatures_.begin(), temperatures_.end(), temperature);
            lo = static_cast<std::size_t>(it - temperatures_.begin()) - 1;
            w = (temperature - temperatures_[lo]) / (temperatures_[lo + 1] - temperatures_[lo]);
        }
    }
    const double* r0 = values_.data() + lo * a;
    if (w == 0.0) {
        std::copy(r0, r0 + a, out.begin());
        return out;
    }
    const double* r1 = r0 + a;
    for (std::size_t i = 0; i < a; ++i) out[i] = r0[i] + w * (r1[i] - r0[i]);
    return out;
}

SymmetricTensor symmetric_components(std::span<const double> row, SymmetryClass symmetry) noexcept {
    switch (symmetry) {
        case SymmetryClass::isotropic: return {row[0], row[0], row[0], 0.0, 0.0, 0.0};
        case SymmetryClass::orthotropic: return {row[0], row[1], row[2], 0.0, 0.0, 0.0};
        case SymmetryClass::anisotropic: return {row[0], row[1], row[2], row[3], row[4], row[5]};
    }
    return {};
}

Eigen::Matrix3d to_matrix(const SymmetricTensor& k) noexcept {
    Eigen::Matrix3d d;
    d << k[0], k[3], k[4],
         k[3], k[1], k[5],
         k[4], k[5], k[2];
    return d;
}

Eigen::Matrix3d conductivity_tensor(std::span<const double> row, SymmetryClass symmetry) {
    if (static_cast<int>(row.size()) != arity(symmetry)) {
        throw MaterialError(std::string(to_string(symmetry)) + " conductivity needs " +
                            std::to_string(arity(symmetry)) + " values, got " + std::to_string(row.size()));
    }
    const Eigen::Matrix3d d = to_matrix(symmetric_components(row, symmetry));
    // Principal minors: three diagonal, three 2x2, the determinant.
    constexpr double kTol = -1e-12;
    const double m1[3] = {d(0, 0), d(1, 1), d(2, 2)};
    const double m2[3] = {d(0, 0) * d(1, 1) - d(0, 1) * d(0, 1), d(0, 0) * d(2, 2) - d(0, 2) * d(0, 2),
                          d(1, 1) * d(2, 2) - d(1, 2) * d(1, 2)};
    const bool psd = m1[0] >= kTol && m1[1] >= kTol && m1[2] >= kTol && m2[0] >= kTol && m2[1] >= kTol &&
                     m2[2] >= kTol && d.determinant() >= kTol;
    if (!psd) throw MaterialError("conductivity tensor is not positive semidefinite");
    return d;
}

MaterialModel::MaterialModel(double density, PropertyTable specific_heat, PropertyTable conductivity,
                             SymmetryClass symmetry)
    : density_(density),
      specific_heat_(std::move(specific_heat)),
      conductivity_(std::move(conductivity)),
      symmetry_(symmetry) {
    if (!(density_ > 0.0) || !std::isfinite(density_)) throw MaterialError("density must be positive");
    if (specific_heat_.arity() != 1) throw MaterialError("specific heat table must be scalar");
    for (std::size_t r = 0; r < specific_heat_.rows(); ++r) {
        if (!(specific_heat_.row(r)[0] > 0.0)) throw MaterialError("specific heat must be positive");
    }
    if (conductivity_.arity() != arity(symmetry_)) {
        throw MaterialError(std::string(to_string(symmetry_)) + " conductivity table needs " +
                            std::to_string(arity(symmetry_)) + " values per row");
    }
    for (std::size_t r = 0; r < conductivity_.rows(); ++r) (void)conductivity_tensor(conductivity_.row(r), symmetry_);
}

double MaterialModel::min_specific_heat() const noexcept {
    double c = specific_heat_.row(0)[0];
    for (std::size_t r = 1; r < specific_heat_.rows(); ++r) c = std::min(c, specific_heat_.row(r)[0]);
    return c;
}

Eigen::Matrix3d element_conductivity(const MaterialModel& material, std::span<const double> nodal_temperatures) {
    if (std::ranges::adjacent_find(nodal_temperatures, std::not_equal_to<>{}) == nodal_temperatures.end()) {
        return material.conductivity_at(nodal_temperatures.front());
    }
    SymmetricTensor sum{};
    for (const double t : nodal_temperatures) {
        const auto k = material.conductivity_components(t);
        for (std::size_t i = 0; i < 6; ++i) sum[i] += k[i];
    }
    const double inv = 1.0 / static_cast<double>(nodal_temperatures.size());
    for (double& v : sum) v *= inv;
    return to_matrix(sum);
}

}  // namespace fedfem
