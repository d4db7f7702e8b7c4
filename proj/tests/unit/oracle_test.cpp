#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "fedfem/errors.hpp"
#include "fedfem/mesh_generator.hpp"
#include "fedfem/oracle.hpp"
#include "fixtures.hpp"

using namespace fedfem;

namespace {

MaterialModel ti_material(double k = 200.0) {
    return MaterialModel(1000.0, PropertyTable::constant(2000.0), PropertyTable::constant(k), SymmetryClass::isotropic);
}

std::shared_ptr<const Mesh> share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

Eigen::MatrixXd dense(const SparseMatrix& k) { return Eigen::MatrixXd(k); }

}  // namespace

TEST(AssembleGlobalK, ReferenceTetIsScaledGradientProduct) {
    const Mesh mesh = fedfem::testing::reference_tet();
    const std::vector<double> t(4, 0.0);
    const GlobalOperator op = assemble_global_K(mesh, ti_material(), t);
    const ElementKernel kernel = element_kernel(mesh, 0);
    const Eigen::MatrixXd expected = 200.0 * kernel.scale * kernel.B.transpose() * kernel.B;
    EXPECT_TRUE(dense(op.stiffness).isApprox(expected, 1e-14));
    EXPECT_NEAR(op.stiffness.coeff(0, 0), 200.0 / 6.0 * 3.0, 1e-12);
}

TEST(AssembleGlobalK, DisconnectedElementsAreBlockDiagonal) {
    const std::vector<Point> nodes{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                   {5, 0, 0}, {6, 0, 0}, {5, 1, 0}, {5, 0, 1}};
    const Mesh mesh(ElementKind::tet4, nodes, {0, 1, 2, 3, 4, 5, 6, 7});
    const Eigen::MatrixXd k = dense(assemble_global_K(mesh, ti_material(), std::vector<double>(8, 0.0)).stiffness);
    EXPECT_EQ(k.block(0, 4, 4, 4).norm(), 0.0);
    EXPECT_EQ(k.block(4, 0, 4, 4).norm(), 0.0);
    EXPECT_TRUE(k.block(0, 0, 4, 4).isApprox(k.block(4, 4, 4, 4), 1e-14));
}

TEST(AssembleGlobalK, SymmetricWithConstantNullVector) {
    for (const auto kind : {ElementKind::tet4, ElementKind::hex8}) {
        const auto mesh = fedfem::testing::jittered_box(kind, {4, 4, 3}, {0.1, 0.2, 0.1}, 0.25, 21);
        const PrecomputedModel m = precompute(mesh, ti_material(), {}, 0.01);
        const GlobalOperator op = assemble_global_K(m);
        const Eigen::MatrixXd k = dense(op.stiffness);
        EXPECT_TRUE(k.isApprox(k.transpose(), 1e-14));
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k.rows());
        EXPECT_LE((k * ones).cwiseAbs().maxCoeff(), 1e-10 * k.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < k.rows(); ++i) EXPECT_GT(k(i, i), 0.0);
        for (std::size_t v = 0; v < m.num_nodes(); ++v) {
            EXPECT_DOUBLE_EQ(op.capacity[static_cast<Eigen::Index>(v)], m.nodal_mass[v] * 2000.0);
        }
    }
}

TEST(ErrorMetric, Examples) {
    const std::vector<double> a{1.0, 2.0, 3.0};
    EXPECT_EQ(error_metric(a, a), 0.0);
    EXPECT_DOUBLE_EQ(error_metric(std::vector<double>{2.0, 0.0}, std::vector<double>{1.0, 0.0}), 0.5);
    EXPECT_DOUBLE_EQ(error_metric(std::vector<double>{1.0, 0.0}, std::vector<double>{2.0, 0.0}), 1.0);
    EXPECT_THROW((void)error_metric(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}), ConfigError);
    EXPECT_THROW((void)error_metric(std::vector<double>{1.0}, std::vector<double>{1.0, 0.0}), ConfigError);
}

TEST(ImplicitOracle, UniformFieldIsFixedPoint) {
    const auto mesh = share(generate_cube_mesh(ElementKind::tet4, 4, 0.1));
    const PrecomputedModel m = precompute(mesh, ti_material(), {}, 0.01);
    const std::vector<double> t(m.num_nodes(), 37.0);
    for (const double v : implicit_step(m, t, 5.0)) EXPECT_NEAR(v, 37.0, 1e-10);
}

TEST(ImplicitOracle, LongStepsReachSteadySolve) {
    const auto mesh = share(generate_cube_mesh(ElementKind::tet4, 5, 0.1));
    const BoundarySpec spec{{DirichletBC{"xmin", 20.0}, FluxBC{"xmax", 0.5}, ConvectionBC{"ymax", 50.0, 10.0}}};
    const PrecomputedModel m = precompute(mesh, ti_material(), spec, 0.01);
    // Film terms are lagged, so the step must stay below 2 M c / (h a).
    ImplicitOracle oracle(m, 100.0);
    std::vector<double> t(m.num_nodes(), 20.0);
    for (int i = 0; i < 400; ++i) t = oracle.step(t);
    const std::vector<double> steady = steady_solve(m, t);
    EXPECT_LE(error_metric(steady, t), 1e-10);

    // Residual of the conduction balance on free nodes.
    const auto f = scatter_loads(m, steady);
    std::vector<double> q(m.num_nodes(), 0.0);
    m.boundary.assemble(steady, q);
    std::set<NodeIndex> fixed;
    for (const auto& [v, value] : m.boundary.dirichlet()) fixed.insert(v);
    for (std::size_t v = 0; v < m.num_nodes(); ++v) {
        if (fixed.contains(static_cast<NodeIndex>(v))) continue;
        EXPECT_NEAR(f[v] + q[v], 0.0, 1e-9);
    }
}

TEST(ImplicitOracle, SteadySolveNeedsDirichletNodes) {
    const auto mesh = share(generate_cube_mesh(ElementKind::hex8, 3, 0.1));
    const PrecomputedModel m = precompute(mesh, ti_material(), {}, 0.01);
    EXPECT_THROW((void)steady_solve(m, std::vector<double>(m.num_nodes(), 0.0)), NumericalError);
}

TEST(ImplicitOracle, HexHourglassLoadHasNoSteadyState) {
    // One-point hex8 elements cannot see (-1)^(j+k) patterns across a face; a uniform
    // per-node flux on a face with an odd node count drives that pattern.
    const auto mesh = share(generate_cube_mesh(ElementKind::hex8, 5, 0.1));
    const BoundarySpec loaded{{DirichletBC{"xmin", 20.0}, FluxBC{"xmax", 0.5}}};
    const PrecomputedModel m = precompute(mesh, ti_material(), loaded, 0.01);
    EXPECT_THROW((void)steady_solve(m, std::vector<double>(m.num_nodes(), 20.0)), NumericalError);

    const BoundarySpec pinned{{DirichletBC{"xmin", 20.0}, DirichletBC{"xmax", 80.0}}};
    const PrecomputedModel p = precompute(mesh, ti_material(), pinned, 0.01);
    const auto t = steady_solve(p, std::vector<double>(p.num_nodes(), 20.0));
    for (std::size_t v = 0; v < t.size(); ++v) EXPECT_NEAR(t[v], 20.0 + 600.0 * mesh->node(v).x(), 1e-9);
}

TEST(ImplicitOracle, DirichletRowsArePinned) {
    const auto mesh = share(generate_cube_mesh(ElementKind::tet4, 4, 0.1));
    const BoundarySpec spec{{DirichletBC{"zmin", -5.0}, FluxBC{"zmax", 1.0}}};
    const PrecomputedModel m = precompute(mesh, ti_material(), spec, 0.01);
    const auto t = implicit_step(m, std::vector<double>(m.num_nodes(), 30.0), 0.5);
    for (const NodeIndex v : mesh->node_set("zmin")) EXPECT_EQ(t[v], -5.0);
}

TEST(ImplicitOracle, ExplicitGapShrinksWithStepSize) {
    const auto mesh = share(fedfem::testing::two_tets());
    const PrecomputedModel probe = precompute(mesh, ti_material(), {}, 1.0);
    const double dt0 = 0.2 * probe.stability.critical_dt;
    const std::vector<double> t0{10.0, 90.0, 40.0, 70.0, 20.0};
    const double horizon = 20.0 * dt0;

    double previous = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 4; ++level) {
        const double dt = dt0 / std::pow(2.0, level);
        const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
        const PrecomputedModel m = precompute(mesh, ti_material(), {}, dt);
        SimulationState s = initial_state(m, t0);
        ImplicitOracle oracle(m, dt);
        std::vector<double> ref = t0;
        for (std::size_t i = 0; i < steps; ++i) {
            step(m, s);
            ref = oracle.step(ref);
        }
        const double err = error_metric(ref, s.temperature);
        EXPECT_LT(err, previous);
        EXPECT_GT(err, 0.0);
        previous = err;
    }
}

TEST(ImplicitOracle, StableFarBeyondExplicitLimit) {
    const auto mesh = fedfem::testing::jittered_box(ElementKind::tet4, {5, 5, 5}, {0.1, 0.1, 0.1}, 0.2, 8);
    const BoundarySpec spec{{DirichletBC{"xmin", 0.0}}};
    const PrecomputedModel m = precompute(mesh, ti_material(), spec, 1.0);
    const double dt = 100.0 * m.stability.critical_dt;
    ImplicitOracle oracle(m, dt);
    auto t = fedfem::testing::random_field(m.num_nodes(), 4, 0.0, 100.0);
    const auto weighted_norm = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += m.nodal_mass[i] * v[i] * v[i];
        return s;
    };
    t = oracle.step(t);
    double previous = weighted_norm(t);
    for (int i = 0; i < 100; ++i) {
        t = oracle.step(t);
        const double current = weighted_norm(t);
        ASSERT_LE(current, previous * (1.0 + 1e-12));
        previous = current;
    }
}

TEST(ImplicitOracle, TdRefactorsWithLaggedProperties) {
    const auto mesh = share(generate_cube_mesh(ElementKind::hex8, 4, 0.1));
    const MaterialModel td(1000.0, PropertyTable({37.0, 337.0}, {2000.0, 8000.0}, 1),
                           PropertyTable({37.0, 337.0}, {200.0, 2000.0}, 1), SymmetryClass::isotropic);
    const BoundarySpec spec{{DirichletBC{"xmin", 37.0}, FluxBC{"xmax", 20.0}}};
    const PrecomputedModel m = precompute(mesh, td, spec, 0.01, {.initial_temperature = 37.0});
    ImplicitOracle oracle(m, 0.5);
    std::vector<double> t(m.num_nodes(), 37.0);
    std::vector<double> next(m.num_nodes());
    for (int i = 0; i < 5; ++i) {
        // One lagged step equals a linear solve with the operator frozen at the current field.
        const GlobalOperator frozen = assemble_global_K(m, std::span<const double>(t));
        oracle.step(t, next);
        const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
        const Eigen::Map<const Eigen::VectorXd> nv(next.data(), static_cast<Eigen::Index>(next.size()));
        const Eigen::VectorXd residual = frozen.capacity.cwiseProduct(nv - tv) / 0.5 + frozen.stiffness * nv;
        std::vector<double> q(m.num_nodes(), 0.0);
        m.boundary.assemble(t, q);
        for (const NodeIndex v : mesh->node_set("xmax")) {
            if (std::ranges::find(mesh->node_set("xmin"), v) != mesh->node_set("xmin").end()) continue;
            EXPECT_NEAR(residual[v], q[v], 1e-8 * std::abs(q[v]));
        }
        t = next;
    }
}

TEST(PatchTest, HexReproducesLinearField) {
    const PatchTestResult r = patch_test(share(generate_cube_mesh(ElementKind::hex8, 3, 1.0)));
    EXPECT_EQ(r.interior_nodes, 1u);
    EXPECT_LE(r.max_error, 2e-3);
}

TEST(PatchTest, TetReproducesLinearField) {
    const PatchTestResult r = patch_test(share(generate_cube_mesh(ElementKind::tet4, 4, 1.0)));
    EXPECT_EQ(r.interior_nodes, 8u);
    EXPECT_LE(r.max_error, 2e-2);
}

TEST(PatchTest, RequiresInteriorNode) {
    EXPECT_THROW((void)patch_test(share(generate_cube_mesh(ElementKind::hex8, 2, 1.0))), ConfigError);
}

TEST(PatchTest, OffsetShiftsSolutionUniformly) {
    const auto mesh = fedfem::testing::jittered_box(ElementKind::tet4, {4, 4, 4}, {1.0, 1.0, 1.0}, 0.2, 17);
    const PatchTestResult base = patch_test(mesh);
    PatchTestOptions shifted;
    shifted.field[3] = 10.0;
    shifted.initial_temperature = 10.0;
    const PatchTestResult r = patch_test(mesh, shifted);
    for (std::size_t v = 0; v < mesh->num_nodes(); ++v) {
        EXPECT_NEAR(r.temperature[v], base.temperature[v] + 10.0, 1e-9);
    }
}

TEST(PatchTest, JitteredMeshesStillPass) {
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        const auto hex = fedfem::testing::jittered_box(ElementKind::hex8, {4, 4, 4}, {1.0, 1.0, 1.0}, 0.15, seed);
        const auto tet = fedfem::testing::jittered_box(ElementKind::tet4, {4, 4, 4}, {1.0, 1.0, 1.0}, 0.15, seed);
        EXPECT_LE(patch_test(tet).max_error, 2e-2);
        EXPECT_TRUE(std::isfinite(patch_test(hex).max_error));
    }
}

TEST(SineDecay, Examples) {
    EXPECT_DOUBLE_EQ(sine_decay_reference(0.05, 0.0, 1e-4, 0.1, 100.0), 100.0);
    EXPECT_NEAR(sine_decay_reference(0.0, 3.0, 1e-4, 0.1, 100.0), 0.0, 1e-12);
    EXPECT_NEAR(sine_decay_reference(0.1, 3.0, 1e-4, 0.1, 100.0), 0.0, 1e-12);
    // exp(-0.98696...) = 0.372708
    EXPECT_NEAR(sine_decay_reference(0.05, 10.0, 1e-4, 0.1, 1.0), 0.37272, 2e-5);
    EXPECT_NEAR(sine_decay_reference(0.05, 10.0, 1e-4, 0.1, 1.0), std::exp(-0.1 * std::numbers::pi * std::numbers::pi), 1e-15);
    const double efold = 0.01 / (1e-4 * std::numbers::pi * std::numbers::pi);
    EXPECT_NEAR(sine_decay_reference(0.05, efold, 1e-4, 0.1, 1.0), std::exp(-1.0), 1e-15);
}

TEST(OracleEquivalence, ScatterMatchesAssembledOperator) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto kind = seed % 2 == 0 ? ElementKind::tet4 : ElementKind::hex8;
        const auto mesh = fedfem::testing::jittered_box(kind, {5, 4, 6}, {0.1, 0.08, 0.12}, 0.25, 100 + seed);
        const PrecomputedModel m = precompute(mesh, ti_material(), {}, 0.01);
        const auto t = fedfem::testing::random_field(m.num_nodes(), 200 + seed);
        const auto f = scatter_loads(m, t);
        const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
        const Eigen::VectorXd oracle = -(assemble_global_K(m).stiffness * tv);
        const double scale = oracle.cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < t.size(); ++i) {
            EXPECT_NEAR(f[i], oracle[static_cast<Eigen::Index>(i)], 1e-10 * scale);
        }
    }
}

TEST(OracleEquivalence, SmallCubeTrajectory) {
    const auto mesh = share(generate_cube_mesh(ElementKind::tet4, 5, 0.1));
    const BoundarySpec spec{{DirichletBC{"xmin", 37.0}, FluxBC{"xmax", 0.5}}};
    const double crit = precompute(mesh, ti_material(), spec, 1.0).stability.critical_dt;
    const double dt = 0.1 * crit;
    const PrecomputedModel m = precompute(mesh, ti_material(), spec, dt);
    SimulationState s = initial_state(m, 37.0);
    ImplicitOracle oracle(m, dt);
    std::vector<double> ref = s.temperature;
    for (int i = 0; i < 2000; ++i) {
        step(m, s);
        ref = oracle.step(ref);
        if (i % 200 == 199) {
            EXPECT_LE(error_metric(ref, s.temperature), 1e-3);
        }
    }
}

TEST(DenseEigen, BoundedByGershgorinWithFilmTerms) {
    const auto mesh = fedfem::testing::jittered_box(ElementKind::hex8, {4, 3, 3}, {0.1, 0.1, 0.1}, 0.2, 5);
    const BoundarySpec spec{{DirichletBC{"xmin", 0.0}, ConvectionBC{"ymax", 400.0, 0.0}}};
    const PrecomputedModel m = precompute(mesh, ti_material(), spec, 0.01);
    const StabilityEstimate est = dense_eigen_estimate(m);
    EXPECT_EQ(est.method, StabilityMethod::dense_eigen);
    EXPECT_DOUBLE_EQ(est.critical_dt, 2.0 / est.lambda_max);
    EXPECT_LE(est.lambda_max, m.stability.lambda_max * (1.0 + 1e-12));
    EXPECT_GT(est.lambda_max, 0.2 * m.stability.lambda_max);
}
