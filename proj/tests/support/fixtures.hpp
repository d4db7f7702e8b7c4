#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "fedfem/mesh.hpp"
#include "fedfem/mesh_generator.hpp"

namespace fedfem::testing {

inline constexpr const char* kReferenceTet = R"(mesh-version 1
nodes 4
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
elements tet4 1
1 1 2 3 4
)";

inline constexpr const char* kUnitHex = R"(mesh-version 1
nodes 8
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
5 0 0 1
6 1 0 1
7 1 1 1
8 0 1 1
elements hex8 1
1 1 2 3 4 5 6 7 8
facetset top 1
4 5 6 7 8
)";

inline Mesh reference_tet() { return parse_mesh(kReferenceTet); }
inline Mesh unit_hex() { return parse_mesh(kUnitHex); }

/// Two tets sharing the face (2,3,4).
inline Mesh two_tets() {
    std::vector<Point> nodes{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    return Mesh(ElementKind::tet4, nodes, {0, 1, 2, 3, 4, 2, 1, 3});
}

/// Structured box with every interior node jittered by up to `jitter` of the local spacing.
inline std::shared_ptr<const Mesh> jittered_box(ElementKind kind, std::array<std::size_t, 3> counts,
                                               std::array<double, 3> lengths, double jitter,
                                               std::uint64_t seed) {
    const Mesh base = generate_box_mesh(kind, counts, lengths);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-jitter, jitter);
    std::vector<Point> nodes = base.nodes();
    for (auto& p : nodes) {
        for (int a = 0; a < 3; ++a) {
            const auto axis = static_cast<std::size_t>(a);
            const double h = lengths[axis] / static_cast<double>(counts[axis] - 1);
            const bool interior = p[a] > 0.5 * h && p[a] < lengths[axis] - 0.5 * h;
            if (interior) p[a] += u(rng) * h;
        }
    }
    return std::make_shared<const Mesh>(kind, std::move(nodes), base.connectivity(), base.node_sets(),
                                         base.facet_sets());
}

inline std::vector<double> random_field(std::size_t n, std::uint64_t seed, double lo = -50.0, double hi = 150.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> t(n);
    for (double& v : t) v = u(rng);
    return t;
}

}  // namespace fedfem::testing
