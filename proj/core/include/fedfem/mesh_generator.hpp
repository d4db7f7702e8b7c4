#pragma once

#include <array>

#include "fedfem/mesh.hpp"

namespace fedfem {

/// Structured box [0,Lx] x [0,Ly] x [0,Lz] with `nodes[i]` nodes along axis i.
///
/// hex8 meshes use one hexahedron per cell; tet4 meshes split every cell into six
/// tetrahedra around its (0,0,0)-(1,1,1) diagonal, which is conforming across cells.
/// Node sets and facet sets named xmin, xmax, ymin, ymax, zmin, zmax and boundary
/// are attached (quads for hex8, matching triangle pairs for tet4).
Mesh generate_box_mesh(ElementKind kind, std::array<std::size_t, 3> nodes, std::array<double, 3> lengths);

/// Cube of side `size` with `n` nodes per edge.
inline Mesh generate_cube_mesh(ElementKind kind, std::size_t n, double size) {
    return generate_box_mesh(kind, {n, n, n}, {size, size, size});
}

}  // namespace fedfem
