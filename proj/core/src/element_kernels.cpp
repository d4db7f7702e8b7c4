#include "fedfem/element_kernels.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "fedfem/errors.hpp"

namespace fedfem {

namespace {

// Natural coordinates of the hex8 corners: bottom face counter-clockwise, then top.
constexpr std::array<std::array<double, 3>, 8> kHexCorners{{
    {-1.0, -1.0, -1.0},
    {1.0, -1.0, -1.0},
    {1.0, 1.0, -1.0},
    {-1.0, 1.0, -1.0},
    {-1.0, -1.0, 1.0},
    {1.0, -1.0, 1.0},
    {1.0, 1.0, 1.0},
    {-1.0, 1.0, 1.0},
}};

void require_count(std::span<const Point> coords, std::size_t expected, const char* what) {
    if (coords.size() != expected) {
        throw MeshError(std::string(what) + " expects " + std::to_string(expected) + " nodes, got " +
                        std::to_string(coords.size()));
    }
}

}  // namespace

double tet_signed_volume(std::span<const Point> coords) {
    require_count(coords, 4, "tet4");
    Eigen::Matrix3d edges;
    edges.col(0) = coords[1] - coords[0];
    edges.col(1) = coords[2] - coords[0];
    edges.col(2) = coords[3] - coords[0];
    return edges.determinant() / 6.0;
}

Eigen::Matrix3d hex_center_jacobian(std::span<const Point> coords) {
    require_count(coords, 8, "hex8");
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < 8; ++i) {
        for (int r = 0; r < 3; ++r) {
            // dN_i/d(natural_r) at the centre is corner_r / 8.
            jac.row(r) += (kHexCorners[i][static_cast<std::size_t>(r)] / 8.0) * coords[i].transpose();
        }
    }
    return jac;
}

ElementKernel tet4_kernel(std::span<const Point> coords) {
    require_count(coords, 4, "tet4");
    Eigen::Matrix3d jac;  // columns: d x / d(natural_a)
    jac.col(0) = coords[1] - coords[0];
    jac.col(1) = coords[2] - coords[0];
    jac.col(2) = coords[3] - coords[0];
    const double volume = jac.determinant() / 6.0;
    if (volume < -kDegenerateVolume) {
        throw MeshError("tet4 element has negative orientation (volume " + std::to_string(volume) + ")");
    }
    if (volume <= kDegenerateVolume) {
        throw MeshError("degenerate tet4 element (volume " + std::to_string(volume) + ")");
    }
    // Row a of the inverse is the gradient of natural coordinate a.
    const Eigen::Matrix3d inv = jac.inverse();
    ElementKernel kernel;
    kernel.kind = ElementKind::tet4;
    kernel.B.resize(3, 4);
    kernel.B.col(0) = -(inv.row(0) + inv.row(1) + inv.row(2)).transpose();
    kernel.B.col(1) = inv.row(0).transpose();
    kernel.B.col(2) = inv.row(1).transpose();
    kernel.B.col(3) = inv.row(2).transpose();
    kernel.scale = volume;
    return kernel;
}

ElementKernel hex8_center_kernel(std::span<const Point> coords) {
    const Eigen::Matrix3d jac = hex_center_jacobian(coords);
    const double det = jac.determinant();
    if (det <= kDegenerateVolume) {
        throw MeshError("hex8 element has non-positive centre Jacobian (det " + std::to_string(det) + ")");
    }
    Eigen::Matrix<double, 3, 8> natural;
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t r = 0; r < 3; ++r) {
            natural(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = kHexCorners[i][r] / 8.0;
        }
    }
    ElementKernel kernel;
    kernel.kind = ElementKind::hex8;
    kernel.B = jac.inverse() * natural;
    kernel.scale = 8.0 * det;
    return kernel;
}

ElementKernel element_kernel(const Mesh& mesh, std::size_t e) {
    const auto nodes = mesh.element(e);
    std::array<Point, 8> coords;
    for (std::size_t i = 0; i < nodes.size(); ++i) coords[i] = mesh.node(nodes[i]);
    const std::span<const Point> view(coords.data(), nodes.size());
    return mesh.kind() == ElementKind::tet4 ? tet4_kernel(view) : hex8_center_kernel(view);
}

GMatrix build_G(const ElementKernel& kernel, const std::optional<Eigen::Matrix3d>& conductivity) {
    GMatrix g;
    if (!conductivity) {
        g.form = GForm::temperature_dependent;
        g.values = kernel.scale * kernel.B.transpose();
        g.gradient = kernel.B;
        return g;
    }
    const Eigen::Matrix3d& d = *conductivity;
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * d.cwiseAbs().maxCoeff()) {
        throw MaterialError("conductivity tensor is not symmetric");
    }
    g.form = GForm::temperature_independent;
    g.values = kernel.scale * kernel.B.transpose() * d * kernel.B;
    return g;
}

ElementVector element_load(const GMatrix& g, const std::optional<Eigen::Matrix3d>& conductivity,
                           std::span<const double> nodal_temperatures) {
    const auto k = static_cast<std::size_t>(g.values.rows());
    if (nodal_temperatures.size() != k) {
        throw ConfigError("element_load: " + std::to_string(nodal_temperatures.size()) +
                          " nodal temperatures for a " + std::to_string(k) + "-node element");
    }
    const Eigen::Map<const Eigen::VectorXd> t(nodal_temperatures.data(), static_cast<Eigen::Index>(k));
    if (g.form == GForm::temperature_independent) {
        if (conductivity) throw ConfigError("element_load: TI-form G already contains the conductivity");
        return -(g.values * t);
    }
    if (!conductivity) throw ConfigError("element_load: TD-form G requires the element conductivity");
    const Eigen::Vector3d gradient = g.gradient * t;
    return -(g.values * (*conductivity * gradient));
}

}  // namespace fedfem
