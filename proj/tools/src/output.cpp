#include "output.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "fedfem/errors.hpp"

namespace fedfem::app {

std::string snapshot_filename(std::size_t step, SnapshotFormat format) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "T_%08zu.%s", step, format == SnapshotFormat::csv ? "csv" : "vtk");
    return buf.data();
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), end);
}

std::string csv_snapshot(const Mesh& mesh, std::span<const double> temperature) {
    std::string out = "node_id,x,y,z,temperature\n";
    out.reserve(out.size() + mesh.num_nodes() * 64);
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        const Point& p = mesh.node(v);
        out += std::to_string(v + 1);
        for (int a = 0; a < 3; ++a) {
            out += ',';
            out += format_double(p[a]);
        }
        out += ',';
        out += format_double(temperature[v]);
        out += '\n';
    }
    return out;
}

std::string vtk_snapshot(const Mesh& mesh, std::span<const double> temperature, std::size_t step) {
    const std::size_t n = mesh.num_nodes();
    const std::size_t m = mesh.num_elements();
    const auto k = static_cast<std::size_t>(mesh.nodes_per_element());
    std::string out;
    out.reserve(n * 80 + m * 64);
    out += "# vtk DataFile Version 3.0\n";
    out += "fedfem temperature step " + std::to_string(step) + "\n";
    out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(n) + " double\n";
    for (std::size_t v = 0; v < n; ++v) {
        const Point& p = mesh.node(v);
        out += format_double(p[0]) + ' ' + format_double(p[1]) + ' ' + format_double(p[2]) + '\n';
    }
    out += "CELLS " + std::to_string(m) + ' ' + std::to_string(m * (k + 1)) + '\n';
    for (std::size_t e = 0; e < m; ++e) {
        out += std::to_string(k);
        for (const NodeIndex v : mesh.element(e)) out += ' ' + std::to_string(v);
        out += '\n';
    }
    const char* cell_type = mesh.kind() == ElementKind::tet4 ? "10\n" : "12\n";
    out += "CELL_TYPES " + std::to_string(m) + '\n';
    for (std::size_t e = 0; e < m; ++e) out += cell_type;
    out += "POINT_DATA " + std::to_string(n) + '\n';
    out += "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < n; ++v) out += format_double(temperature[v]) + '\n';
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::filesystem::path write_snapshot(const std::filesystem::path& directory, const Mesh& mesh,
                                     const SimulationState& state, SnapshotFormat format) {
    const std::filesystem::path path = directory / snapshot_filename(state.step, format);
    write_text_file(path, format == SnapshotFormat::csv ? csv_snapshot(mesh, state.temperature)
                                                        : vtk_snapshot(mesh, state.temperature, state.step));
    return path;
}

std::string summary_json(const RunSummary& summary, const PrecomputedModel& model) {
    nlohmann::ordered_json j;
    j["steps"] = summary.steps;
    j["dt"] = model.dt;
    j["final_time"] = summary.final_time;
    j["steady_state_step"] = summary.steady_step ? nlohmann::ordered_json(*summary.steady_step) : nlohmann::ordered_json(nullptr);
    j["step_ms_mean"] = summary.mean_step_ms;
    j["step_ms_max"] = summary.max_step_ms;
    j["total_ms"] = summary.total_ms;
    j["stability"] = {{"method", std::string(to_string(model.stability.method))},
                      {"lambda_max", model.stability.lambda_max},
                      {"critical_dt", model.stability.critical_dt}};
    j["warnings"] = model.warnings;
    return j.dump(2) + "\n";
}

void prepare_directory(const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec || !std::filesystem::is_directory(directory)) {
        throw IoError("cannot create output directory '" + directory.string() + "'" +
                      (ec ? ": " + ec.message() : std::string()));
    }
    // Probe writability up front so a long run does not fail at its first snapshot.
    const std::filesystem::path probe = directory / ".fedfem-write-test";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory '" + directory.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace fedfem::app
