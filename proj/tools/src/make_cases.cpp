// Writes the meshes referenced by the configs in cases/.
#include <cmath>
#include <filesystem>
#include <iostream>

#include "fedfem/mesh_generator.hpp"

namespace {

using namespace fedfem;

// Copy of `mesh` with extra node sets.
Mesh with_node_sets(const Mesh& mesh, Mesh::NodeSets extra) {
    Mesh::NodeSets sets = mesh.node_sets();
    sets.merge(extra);
    return Mesh(mesh.kind(), mesh.nodes(), mesh.connectivity(), std::move(sets), mesh.facet_sets());
}

// Union of the named sets, each node once.
std::vector<NodeIndex> set_union(const Mesh& mesh, std::initializer_list<const char*> names) {
    std::vector<bool> seen(mesh.num_nodes(), false);
    std::vector<NodeIndex> out;
    for (const char* name : names)
        for (NodeIndex i : mesh.node_set(name))
            if (!seen[i]) {
                seen[i] = true;
                out.push_back(i);
            }
    return out;
}

// 0.1 m tet cube; "heated" = front, top and both sides (xmax, zmax, ymin, ymax).
Mesh cube() {
    const Mesh base = generate_cube_mesh(ElementKind::tet4, 11, 0.1);
    return with_node_sets(base, {{"heated", set_union(base, {"xmax", "zmax", "ymin", "ymax"})}});
}

// 0.2 x 0.03 x 0.05 m tet plate; "source" = top-face nodes within 3 mm of the face centre.
Mesh plate() {
    const Mesh base = generate_box_mesh(ElementKind::tet4, {41, 7, 11}, {0.2, 0.03, 0.05});
    std::vector<NodeIndex> source;
    for (NodeIndex i : base.node_set("zmax")) {
        const Point& p = base.node(i);
        if (std::hypot(p[0] - 0.1, p[1] - 0.015) <= 0.003 + 1e-12) source.push_back(i);
    }
    return with_node_sets(base, {{"source", source}});
}

}  // namespace

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("cases");
    try {
        fs::create_directories(dir);
        write_mesh_file(cube(), dir / "cube.mesh");
        write_mesh_file(plate(), dir / "plate.mesh");
        write_mesh_file(generate_box_mesh(ElementKind::hex8, {31, 9, 5}, {0.2, 0.05, 0.025}), dir / "td_plate.mesh");
        write_mesh_file(generate_cube_mesh(ElementKind::tet4, 9, 0.05), dir / "film_cube.mesh");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::cout << "meshes written to " << dir.string() << '\n';
    return 0;
}
