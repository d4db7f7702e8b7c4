#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "fedfem/mesh.hpp"

namespace fedfem {

/// Elements with volume or centre det(J) at or below this value are rejected (m^3).
inline constexpr double kDegenerateVolume = 1e-14;

/// 3 x k temperature-gradient matrix, k = 4 or 8.
using GradientMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic, Eigen::ColMajor, 3, 8>;
using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 8, 8>;
using ElementVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;

struct ElementKernel {
    ElementKind kind = ElementKind::tet4;
    GradientMatrix B;    ///< maps nodal temperatures to the element temperature gradient (1/m)
    double scale = 0.0;  ///< tet volume, or 8*det(J) at the hex centre (m^3)
};

double tet_signed_volume(std::span<const Point> coords);

/// Jacobian d(x,y,z)/d(xi,eta,zeta) of the trilinear map at the element centre.
/// Rows index the natural coordinate, columns the physical one.
Eigen::Matrix3d hex_center_jacobian(std::span<const Point> coords);

/// Linear tetrahedron: constant B, scale = V. Throws MeshError for V <= 1e-14
/// (including inverted elements).
ElementKernel tet4_kernel(std::span<const Point> coords);

/// Reduced-integration hexahedron: B and det(J) at (xi,eta,zeta) = 0, scale = 8 det(J).
ElementKernel hex8_center_kernel(std::span<const Point> coords);

ElementKernel element_kernel(const Mesh& mesh, std::size_t e);

enum class GForm {
    temperature_dependent,    ///< scale * B^T, k x 3; conductivity applied per step
    temperature_independent,  ///< scale * B^T D B, k x k
};

struct GMatrix {
    GForm form = GForm::temperature_dependent;
    ElementMatrix values;     ///< k x 3 (TD) or k x k (TI)
    GradientMatrix gradient;  ///< B, kept for the TD load product; empty for TI
};

/// Pre-computed element matrix. Without `conductivity` the TD form is built,
/// otherwise the TI form. Throws MaterialError if `conductivity` is not symmetric.
GMatrix build_G(const ElementKernel& kernel, const std::optional<Eigen::Matrix3d>& conductivity = std::nullopt);

/// Element nodal conduction loads (W), -G D B T_e for TD or -G T_e for TI.
///
/// The minus sign makes conduction move heat from hot to cold nodes; the
/// entries always sum to zero. TD requires `conductivity`, TI forbids it.
ElementVector element_load(const GMatrix& g, const std::optional<Eigen::Matrix3d>& conductivity,
                           std::span<const double> nodal_temperatures);

}  // namespace fedfem
