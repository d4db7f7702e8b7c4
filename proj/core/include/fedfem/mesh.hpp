#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fedfem {

using NodeIndex = std::uint32_t;
using Point = Eigen::Vector3d;

enum class ElementKind { tet4, hex8 };

constexpr int nodes_per_element(ElementKind kind) noexcept { return kind == ElementKind::tet4 ? 4 : 8; }

std::string_view to_string(ElementKind kind) noexcept;

/// Boundary facet: a triangle (3 nodes) or a quad (4 nodes), 0-based node indices.
class Facet {
public:
    Facet() = default;
    Facet(std::initializer_list<NodeIndex> nodes);
    explicit Facet(std::span<const NodeIndex> nodes);

    std::span<const NodeIndex> nodes() const noexcept { return {nodes_.data(), size_}; }
    std::size_t size() const noexcept { return size_; }
    NodeIndex operator[](std::size_t i) const noexcept { return nodes_[i]; }

    friend bool operator==(const Facet& a, const Facet& b) noexcept;

private:
    std::array<NodeIndex, 4> nodes_{};
    std::size_t size_ = 0;
};

/// Unstructured 3-D mesh of one element kind with named node and facet sets.
///
/// Immutable once constructed. The constructor checks every invariant:
/// connectivity references existing nodes, each element has positive volume
/// (tet4) or positive centre Jacobian determinant (hex8) above 1e-14, set members
/// are unique, and facets are non-degenerate.
class Mesh {
public:
    using NodeSets = std::map<std::string, std::vector<NodeIndex>, std::less<>>;
    using FacetSets = std::map<std::string, std::vector<Facet>, std::less<>>;

    Mesh(ElementKind kind, std::vector<Point> nodes, std::vector<NodeIndex> connectivity,
         NodeSets node_sets = {}, FacetSets facet_sets = {});

    ElementKind kind() const noexcept { return kind_; }
    int nodes_per_element() const noexcept { return fedfem::nodes_per_element(kind_); }

    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_elements() const noexcept { return connectivity_.size() / nodes_per_element(); }

    const Point& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Point>& nodes() const noexcept { return nodes_; }

    std::span<const NodeIndex> element(std::size_t e) const {
        const auto k = static_cast<std::size_t>(nodes_per_element());
        return {connectivity_.data() + e * k, k};
    }
    /// Flat connectivity, `nodes_per_element()` entries per element.
    const std::vector<NodeIndex>& connectivity() const noexcept { return connectivity_; }

    const NodeSets& node_sets() const noexcept { return node_sets_; }
    const FacetSets& facet_sets() const noexcept { return facet_sets_; }

    /// Throws ConfigError if absent.
    const std::vector<NodeIndex>& node_set(std::string_view name) const;
    const std::vector<Facet>& facet_set(std::string_view name) const;

    /// Tet volume or hex reduced-integration scale 8*det(J).
    double element_volume(std::size_t e) const;
    double total_volume() const;

    friend bool operator==(const Mesh& a, const Mesh& b);

private:
    ElementKind kind_;
    std::vector<Point> nodes_;
    std::vector<NodeIndex> connectivity_;
    NodeSets node_sets_;
    FacetSets facet_sets_;
};

/// Parses the text mesh format (`mesh-version 1`, 1-based ids).
Mesh parse_mesh(std::string_view text);

/// Writes `mesh` in the text format; parse_mesh(serialize_mesh(m)) == m.
std::string serialize_mesh(const Mesh& mesh);

Mesh read_mesh_file(const std::filesystem::path& path);
void write_mesh_file(const Mesh& mesh, const std::filesystem::path& path);

/// Triangle area, or a quad as triangles (1,2,3) + (1,3,4). Throws MeshError on zero area.
double facet_area(const Facet& facet, const Mesh& mesh);
double facet_area(const Facet& facet, std::span<const Point> nodes);

/// Uniform per-node tributary area of a facet set.
struct NodalArea {
    double area_per_node = 0.0;
    double total_area = 0.0;
    std::vector<NodeIndex> nodes;  ///< unique nodes of the set, ascending
};

/// Total facet area of the set divided by its unique node count.
NodalArea nodal_area(const Mesh& mesh, std::string_view facet_set);

/// Nodes lying on element faces that belong to exactly one element, ascending.
std::vector<NodeIndex> boundary_nodes(const Mesh& mesh);

}  // namespace fedfem
