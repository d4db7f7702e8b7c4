#include "fedfem/mesh_generator.hpp"

#include <algorithm>
#include <string>

#include "fedfem/element_kernels.hpp"
#include "fedfem/errors.hpp"

namespace fedfem {

namespace {

struct Face {
    const char* name;
    int axis;
    bool high;
};

constexpr std::array<Face, 6> kFaces{{
    {"xmin", 0, false},
    {"xmax", 0, true},
    {"ymin", 1, false},
    {"ymax", 1, true},
    {"zmin", 2, false},
    {"zmax", 2, true},
}};

}  // namespace

Mesh generate_box_mesh(ElementKind kind, std::array<std::size_t, 3> counts, std::array<double, 3> lengths) {
    for (int a = 0; a < 3; ++a) {
        if (counts[static_cast<std::size_t>(a)] < 2) throw ConfigError("box mesh needs at least 2 nodes per axis");
        if (!(lengths[static_cast<std::size_t>(a)] > 0.0)) throw ConfigError("box mesh lengths must be positive");
    }
    const auto [nx, ny, nz] = counts;
    auto id = [&](std::size_t i, std::size_t j, std::size_t k) { return static_cast<NodeIndex>(i + nx * (j + ny * k)); };

    std::vector<Point> nodes;
    nodes.reserve(nx * ny * nz);
    for (std::size_t k = 0; k < nz; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                nodes.emplace_back(lengths[0] * static_cast<double>(i) / static_cast<double>(nx - 1),
                                   lengths[1] * static_cast<double>(j) / static_cast<double>(ny - 1),
                                   lengths[2] * static_cast<double>(k) / static_cast<double>(nz - 1));
            }
        }
    }

    std::vector<NodeIndex> connectivity;
    const std::size_t cells = (nx - 1) * (ny - 1) * (nz - 1);
    connectivity.reserve(cells * (kind == ElementKind::hex8 ? 8 : 24));

    // Kuhn split: every monotone path 000 -> 111 through the cube corners.
    static constexpr std::array<std::array<int, 3>, 6> kPaths{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

    for (std::size_t k = 0; k + 1 < nz; ++k) {
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                auto corner = [&](std::array<std::size_t, 3> o) { return id(i + o[0], j + o[1], k + o[2]); };
                if (kind == ElementKind::hex8) {
                    for (const auto& o : std::array<std::array<std::size_t, 3>, 8>{
                             {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}}) {
                        connectivity.push_back(corner(o));
                    }
                    continue;
                }
                for (const auto& path : kPaths) {
                    std::array<std::size_t, 3> o{0, 0, 0};
                    std::array<NodeIndex, 4> tet{};
                    tet[0] = corner(o);
                    for (std::size_t s = 0; s < 3; ++s) {
                        o[static_cast<std::size_t>(path[s])] = 1;
                        tet[s + 1] = corner(o);
                    }
                    const std::array<Point, 4> pts{nodes[tet[0]], nodes[tet[1]], nodes[tet[2]], nodes[tet[3]]};
                    if (tet_signed_volume(pts) < 0.0) std::swap(tet[1], tet[2]);
                    connectivity.insert(connectivity.end(), tet.begin(), tet.end());
                }
            }
        }
    }

    Mesh::NodeSets node_sets;
    Mesh::FacetSets facet_sets;
    std::vector<NodeIndex> all_boundary;
    std::vector<Facet> all_facets;
    for (const Face& face : kFaces) {
        const auto axis = static_cast<std::size_t>(face.axis);
        const std::size_t u_axis = (axis + 1) % 3;
        const std::size_t v_axis = (axis + 2) % 3;
        const std::size_t fixed = face.high ? counts[axis] - 1 : 0;
        auto node_at = [&](std::size_t u, std::size_t v) {
            std::array<std::size_t, 3> ijk{};
            ijk[axis] = fixed;
            ijk[u_axis] = u;
            ijk[v_axis] = v;
            return id(ijk[0], ijk[1], ijk[2]);
        };
        std::vector<NodeIndex> members;
        for (std::size_t v = 0; v < counts[v_axis]; ++v) {
            for (std::size_t u = 0; u < counts[u_axis]; ++u) members.push_back(node_at(u, v));
        }
        std::ranges::sort(members);

        // (u, v) is right-handed with the +axis normal, so this order faces +axis.
        std::vector<Facet> facets;
        for (std::size_t v = 0; v + 1 < counts[v_axis]; ++v) {
            for (std::size_t u = 0; u + 1 < counts[u_axis]; ++u) {
                std::array<NodeIndex, 4> q{node_at(u, v), node_at(u + 1, v), node_at(u + 1, v + 1), node_at(u, v + 1)};
                if (!face.high) std::swap(q[1], q[3]);
                if (kind == ElementKind::hex8) {
                    facets.emplace_back(std::span<const NodeIndex>(q));
                } else {
                    // q[0] and q[2] are the low and high corners, the Kuhn face diagonal.
                    facets.push_back(Facet{q[0], q[1], q[2]});
                    facets.push_back(Facet{q[0], q[2], q[3]});
                }
            }
        }
        all_boundary.insert(all_boundary.end(), members.begin(), members.end());
        all_facets.insert(all_facets.end(), facets.begin(), facets.end());
        node_sets.emplace(face.name, std::move(members));
        facet_sets.emplace(face.name, std::move(facets));
    }
    std::ranges::sort(all_boundary);
    const auto dup = std::ranges::unique(all_boundary);
    all_boundary.erase(dup.begin(), dup.end());
    node_sets.emplace("boundary", std::move(all_boundary));
    facet_sets.emplace("boundary", std::move(all_facets));

    return Mesh(kind, std::move(nodes), std::move(connectivity), std::move(node_sets), std::move(facet_sets));
}

}  // namespace fedfem
