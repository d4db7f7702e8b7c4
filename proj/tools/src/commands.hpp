#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "config.hpp"
#include "fedfem/mesh.hpp"
#include "fedfem/solver.hpp"

namespace fedfem::app {

struct LoadedRun {
    RunConfig config;
    std::shared_ptr<const Mesh> mesh;
    PrecomputedModel model;
};

LoadedRun load_run(const std::filesystem::path& config_path);

int command_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

struct BenchOptions {
    std::vector<std::filesystem::path> configs;
    std::size_t repeats = 5;
    std::size_t steps = 100;
};

struct BenchResult {
    std::filesystem::path config;
    std::filesystem::path mesh;
    GForm form = GForm::temperature_independent;
    std::size_t nodes = 0;
    std::size_t elements = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double max_ms = 0.0;
};

/// Times the IO-free stepping loop; every sample is one step.
BenchResult bench_model(const PrecomputedModel& model, double initial_temperature, std::size_t repeats,
                        std::size_t steps);

int command_bench(const BenchOptions& options, std::ostream& out);

struct ValidationPoint {
    std::size_t step = 0;
    double time = 0.0;
    double error = 0.0;
};

struct ValidationReport {
    std::vector<ValidationPoint> quartiles;
    std::optional<ValidationPoint> steady;
};

/// Explicit run against the implicit oracle at the same dt. The horizon is the
/// configured duration, or the explicit steady-state step when there is none.
ValidationReport validate_against_oracle(const PrecomputedModel& model, const TimeConfig& time,
                                         double initial_temperature);

int command_validate(const std::filesystem::path& config_path, std::ostream& out);

int command_patch_test(ElementKind kind, std::size_t n, std::ostream& out);

int command_dt_estimate(const std::filesystem::path& config_path, std::ostream& out);

int command_genmesh(ElementKind kind, std::size_t n, double size, const std::filesystem::path& path,
                    std::ostream& out);

}  // namespace fedfem::app
