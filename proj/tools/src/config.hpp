#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "fedfem/boundary.hpp"
#include "fedfem/material.hpp"

namespace fedfem::app {

enum class SnapshotFormat { csv, vtk };

struct TimeConfig {
    double dt = 0.0;
    std::optional<double> duration;
    double steady_tolerance = 1e-3;
    bool stop_on_steady = false;
    bool strict_stability = false;
};

struct OutputConfig {
    std::size_t every = 100;
    std::filesystem::path directory = "output";
    SnapshotFormat format = SnapshotFormat::csv;
};

struct RunConfig {
    std::filesystem::path mesh;
    MaterialModel material;
    double initial_temperature = 0.0;
    BoundarySpec boundary;
    TimeConfig time;
    OutputConfig output;
};

/// Parses a run config. Relative mesh and output paths resolve against `base_dir`.
/// Throws ConfigError naming the offending field, e.g. "time.dt: must be positive".
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

}  // namespace fedfem::app
