#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "config.hpp"
#include "fedfem/mesh.hpp"
#include "fedfem/solver.hpp"

namespace fedfem::app {

/// T_00000012.csv for step 12.
std::string snapshot_filename(std::size_t step, SnapshotFormat format);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string csv_snapshot(const Mesh& mesh, std::span<const double> temperature);
std::string vtk_snapshot(const Mesh& mesh, std::span<const double> temperature, std::size_t step);

/// Writes the snapshot for `state` into `directory`; returns the file path.
std::filesystem::path write_snapshot(const std::filesystem::path& directory, const Mesh& mesh,
                                     const SimulationState& state, SnapshotFormat format);

std::string summary_json(const RunSummary& summary, const PrecomputedModel& model);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Creates `directory` if needed. Throws IoError when it cannot be created or written.
void prepare_directory(const std::filesystem::path& directory);

}  // namespace fedfem::app
