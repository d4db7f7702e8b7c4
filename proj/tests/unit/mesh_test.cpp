#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <Eigen/Geometry>

#include "fedfem/errors.hpp"
#include "fedfem/mesh.hpp"
#include "fedfem/mesh_generator.hpp"
#include "fixtures.hpp"

using namespace fedfem;
using fedfem::testing::jittered_box;

namespace {

double cross_area(const Point& a, const Point& b, const Point& c) {
    const Point u = b - a;
    const Point v = c - a;
    const double x = u[1] * v[2] - u[2] * v[1];
    const double y = u[2] * v[0] - u[0] * v[2];
    const double z = u[0] * v[1] - u[1] * v[0];
    return 0.5 * std::sqrt(x * x + y * y + z * z);
}

Mesh quad_strip(int quads) {
    // Hex column along x with a facet set of `quads` top quads.
    std::vector<Point> nodes;
    for (int i = 0; i <= quads; ++i) {
        for (const auto& [y, z] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}) {
            nodes.emplace_back(static_cast<double>(i), y, z);
        }
    }
    std::vector<NodeIndex> conn;
    std::vector<Facet> top;
    for (int i = 0; i < quads; ++i) {
        const auto a = static_cast<NodeIndex>(4 * i);
        const auto b = static_cast<NodeIndex>(4 * (i + 1));
        // bottom face (z = 0) ccw from +z: (a0, b0, b1, a1), top above
        conn.insert(conn.end(), {a, b, b + 1, a + 1, a + 3, b + 3, b + 2, a + 2});
        top.push_back(Facet{a + 3, b + 3, b + 2, a + 2});
    }
    return Mesh(ElementKind::hex8, nodes, conn, {}, {{"top", top}});
}

}  // namespace

TEST(ParseMesh, ReferenceTetHasVolumeOneSixth) {
    const Mesh m = fedfem::testing::reference_tet();
    EXPECT_EQ(m.kind(), ElementKind::tet4);
    EXPECT_EQ(m.num_nodes(), 4u);
    ASSERT_EQ(m.num_elements(), 1u);
    EXPECT_NEAR(m.element_volume(0), 1.0 / 6.0, 1e-15);
}

TEST(ParseMesh, WrongNodeCountOnElementLineIsSyntaxError) {
    const char* text = R"(mesh-version 1
nodes 8
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
5 0 0 1
6 1 0 1
7 1 1 1
8 0 1 1
elements tet4 1
1 1 2 3 4 5 6 7 8
)";
    try {
        (void)parse_mesh(text);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 12u);
        EXPECT_GT(e.column(), 1u);
    }
}

TEST(ParseMesh, UnitHexTopFacetHasUnitArea) {
    const Mesh m = fedfem::testing::unit_hex();
    const auto& top = m.facet_set("top");
    ASSERT_EQ(top.size(), 1u);
    const Facet& f = top[0];
    const double oracle = cross_area(m.node(f[0]), m.node(f[1]), m.node(f[2])) +
                          cross_area(m.node(f[0]), m.node(f[2]), m.node(f[3]));
    EXPECT_DOUBLE_EQ(facet_area(f, m), oracle);
    EXPECT_DOUBLE_EQ(oracle, 1.0);
}

TEST(ParseMesh, CommentsAndBlankLinesAreIgnored) {
    const char* text = R"(# a comment
mesh-version 1   # trailing

nodes 4
1 0 0 0
2 1 0 0 # end
3 0 1 0
4 0 0 1
elements tet4 1
1 1 2 3 4
nodeset base 3
1 2
3
)";
    const Mesh m = parse_mesh(text);
    EXPECT_EQ(m.node_set("base"), (std::vector<NodeIndex>{0, 1, 2}));
}

TEST(ParseMesh, RejectsMissingHeader) { EXPECT_THROW((void)parse_mesh("nodes 0\n"), ParseError); }

TEST(ParseMesh, RejectsUnsupportedVersion) {
    EXPECT_THROW((void)parse_mesh("mesh-version 2\nnodes 0\n"), ParseError);
}

TEST(ParseMesh, RejectsNonContiguousNodeIds) {
    const char* text = "mesh-version 1\nnodes 4\n1 0 0 0\n2 1 0 0\n4 0 1 0\n3 0 0 1\nelements tet4 1\n1 1 2 3 4\n";
    EXPECT_THROW((void)parse_mesh(text), ParseError);
}

TEST(ParseMesh, RejectsConnectivityOutOfRange) {
    const char* text = "mesh-version 1\nnodes 4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\nelements tet4 1\n1 1 2 3 5\n";
    EXPECT_THROW((void)parse_mesh(text), ParseError);
}

TEST(ParseMesh, RejectsDegenerateElement) {
    const char* text = "mesh-version 1\nnodes 4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 1 1 0\nelements tet4 1\n1 1 2 3 4\n";
    EXPECT_THROW((void)parse_mesh(text), MeshError);
}

TEST(ParseMesh, RejectsInvertedTet) {
    const char* text = "mesh-version 1\nnodes 4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\nelements tet4 1\n1 1 3 2 4\n";
    EXPECT_THROW((void)parse_mesh(text), MeshError);
}

TEST(ParseMesh, RejectsDuplicateSetName) {
    std::string text = fedfem::testing::kReferenceTet;
    text += "nodeset a 1\n1\nnodeset a 1\n2\n";
    EXPECT_THROW((void)parse_mesh(text), ParseError);
}

TEST(ParseMesh, RejectsDuplicateSetMember) {
    std::string text = fedfem::testing::kReferenceTet;
    text += "nodeset a 2\n1 1\n";
    EXPECT_THROW((void)parse_mesh(text), MeshError);
}

TEST(ParseMesh, RejectsMixedElementKinds) {
    std::string text = fedfem::testing::kReferenceTet;
    text += "elements hex8 0\n";
    EXPECT_THROW((void)parse_mesh(text), ParseError);
}

TEST(ParseMesh, RejectsBadFacetArity) {
    std::string text = fedfem::testing::kReferenceTet;
    text += "facetset f 1\n2 1 2\n";
    EXPECT_THROW((void)parse_mesh(text), ParseError);
}

TEST(ParseMesh, ReportsLineAndColumnOfBadToken) {
    const char* text = "mesh-version 1\nnodes 1\n1 0 x 0\n";
    try {
        (void)parse_mesh(text);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 5u);
    }
}

TEST(FacetArea, RightTriangle) {
    const std::vector<Point> nodes{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    EXPECT_DOUBLE_EQ(facet_area(Facet{0, 1, 2}, nodes), 0.5);
}

TEST(FacetArea, UnitSquare) {
    const std::vector<Point> nodes{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    EXPECT_DOUBLE_EQ(facet_area(Facet{0, 1, 2, 3}, nodes), 1.0);
}

TEST(FacetArea, ScalingByTwoQuadruplesArea) {
    std::vector<Point> nodes{{0.3, 0.1, 0.2}, {1.1, 0.4, 0.0}, {0.2, 0.9, 0.5}};
    const double a = facet_area(Facet{0, 1, 2}, nodes);
    for (auto& p : nodes) p *= 2.0;
    EXPECT_NEAR(facet_area(Facet{0, 1, 2}, nodes), 4.0 * a, 1e-14);
}

TEST(FacetArea, NonPlanarQuadUsesFixedSplit) {
    const std::vector<Point> nodes{{0, 0, 0}, {1, 0, 0}, {1, 1, 0.5}, {0, 1, 0}};
    const double oracle = cross_area(nodes[0], nodes[1], nodes[2]) + cross_area(nodes[0], nodes[2], nodes[3]);
    EXPECT_NEAR(facet_area(Facet{0, 1, 2, 3}, nodes), oracle, 1e-15);
}

TEST(FacetArea, DegenerateFacetThrows) {
    const std::vector<Point> nodes{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    EXPECT_THROW((void)facet_area(Facet{0, 1, 2}, nodes), MeshError);
}

TEST(FacetArea, FacetNeedsThreeOrFourNodes) {
    EXPECT_THROW((Facet{0, 1}), MeshError);
    EXPECT_THROW((Facet{0, 1, 2, 3, 4}), MeshError);
}

TEST(NodalArea, SingleQuadGivesQuarter) {
    const NodalArea a = nodal_area(quad_strip(1), "top");
    EXPECT_DOUBLE_EQ(a.area_per_node, 0.25);
    EXPECT_EQ(a.nodes.size(), 4u);
}

TEST(NodalArea, TwoAdjacentQuadsShareAnEdge) {
    const NodalArea a = nodal_area(quad_strip(2), "top");
    EXPECT_EQ(a.nodes.size(), 6u);
    EXPECT_NEAR(a.area_per_node, 2.0 / 6.0, 1e-15);
}

TEST(NodalArea, TotalAreaOverUniqueNodeCount) {
    // A 6 x 6 node face sized so the per-node share is 8.655e-6 m^2.
    const std::size_t n = 6;
    const double side = static_cast<double>(n) * std::sqrt(8.655e-6);
    const Mesh m = generate_box_mesh(ElementKind::hex8, {n, n, 3}, {side, side, 0.01});
    const NodalArea a = nodal_area(m, "zmax");
    EXPECT_EQ(a.nodes.size(), n * n);
    EXPECT_NEAR(a.area_per_node, 8.655e-6, 1e-12 * 8.655e-6);
}

TEST(NodalArea, EmptySetThrows) {
    const Mesh base = fedfem::testing::reference_tet();
    const Mesh m(base.kind(), base.nodes(), base.connectivity(), {}, {{"empty", {}}});
    EXPECT_THROW((void)nodal_area(m, "empty"), MeshError);
}

TEST(NodalArea, UnknownSetThrows) {
    EXPECT_THROW((void)nodal_area(fedfem::testing::unit_hex(), "nope"), ConfigError);
}

TEST(MeshProperties, SerializeParseRoundTrip) {
    for (const auto kind : {ElementKind::tet4, ElementKind::hex8}) {
        const auto m = jittered_box(kind, {4, 3, 5}, {0.3, 0.2, 0.7}, 0.2, 7);
        const Mesh back = parse_mesh(serialize_mesh(*m));
        EXPECT_TRUE(back == *m) << to_string(kind);
        EXPECT_EQ(serialize_mesh(back), serialize_mesh(*m));
    }
    const Mesh hex = fedfem::testing::unit_hex();
    EXPECT_TRUE(parse_mesh(serialize_mesh(hex)) == hex);
}

TEST(MeshProperties, NodalAreaTimesCountIsTotalArea) {
    for (const auto kind : {ElementKind::tet4, ElementKind::hex8}) {
        const auto m = jittered_box(kind, {5, 4, 3}, {1.0, 0.5, 0.25}, 0.2, 11);
        for (const auto& [name, facets] : m->facet_sets()) {
            const NodalArea a = nodal_area(*m, name);
            double sum = 0.0;
            for (const Facet& f : facets) sum += facet_area(f, *m);
            EXPECT_NEAR(a.area_per_node * static_cast<double>(a.nodes.size()), sum, 1e-12 * sum) << name;
        }
    }
}

TEST(MeshProperties, TranslationLeavesAreasAndVolumesUnchanged) {
    for (const auto kind : {ElementKind::tet4, ElementKind::hex8}) {
        const auto m = jittered_box(kind, {4, 4, 4}, {1.0, 1.0, 1.0}, 0.2, 3);
        std::vector<Point> moved = m->nodes();
        for (auto& p : moved) p += Point(12.5, -3.25, 7.0);
        const Mesh t(kind, moved, m->connectivity(), m->node_sets(), m->facet_sets());
        for (std::size_t e = 0; e < m->num_elements(); ++e) {
            EXPECT_NEAR(t.element_volume(e), m->element_volume(e), 1e-12 * m->element_volume(e));
        }
        for (const auto& [name, facets] : m->facet_sets()) {
            for (const Facet& f : facets) {
                const double a = facet_area(f, *m);
                EXPECT_NEAR(facet_area(f, t), a, 1e-12 * a);
            }
        }
    }
}

TEST(MeshGenerator, VolumeAndSetsOfCube) {
    for (const auto kind : {ElementKind::tet4, ElementKind::hex8}) {
        const Mesh m = generate_cube_mesh(kind, 4, 0.1);
        EXPECT_EQ(m.num_nodes(), 64u);
        EXPECT_EQ(m.num_elements(), kind == ElementKind::hex8 ? 27u : 162u);
        EXPECT_NEAR(m.total_volume(), 1e-3, 1e-15);
        for (const char* face : {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"}) {
            EXPECT_EQ(m.node_set(face).size(), 16u);
            EXPECT_NEAR(nodal_area(m, face).total_area, 0.01, 1e-15);
        }
        EXPECT_EQ(m.node_set("boundary"), boundary_nodes(m));
        EXPECT_EQ(m.node_set("boundary").size(), 64u - 8u);
    }
}

TEST(MeshGenerator, FacetsWindOutward) {
    for (const auto kind : {ElementKind::tet4, ElementKind::hex8}) {
        const Mesh m = generate_cube_mesh(kind, 3, 1.0);
        const Point centre(0.5, 0.5, 0.5);
        for (const Facet& f : m.facet_set("boundary")) {
            const Point a = m.node(f[0]);
            const Point n = (m.node(f[1]) - a).cross(m.node(f[2]) - a);
            EXPECT_GT(n.dot(a - centre), 0.0);
        }
    }
}

TEST(BoundaryNodes, SingleElementHasNoInterior) {
    EXPECT_EQ(boundary_nodes(fedfem::testing::unit_hex()).size(), 8u);
    EXPECT_EQ(boundary_nodes(fedfem::testing::two_tets()).size(), 5u);
}
