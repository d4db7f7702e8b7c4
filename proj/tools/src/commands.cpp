#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "fedfem/errors.hpp"
#include "fedfem/mesh_generator.hpp"
#include "fedfem/oracle.hpp"
#include "output.hpp"

namespace fedfem::app {

namespace {

constexpr std::size_t kStepCap = 50'000'000;

std::string_view form_name(GForm form) { return form == GForm::temperature_dependent ? "TD" : "TI"; }

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

LoadedRun load_run(const std::filesystem::path& config_path) {
    RunConfig config = load_config(config_path);
    auto mesh = std::make_shared<const Mesh>(read_mesh_file(config.mesh));
    PrecomputeOptions options;
    options.strict_stability = config.time.strict_stability;
    options.initial_temperature = config.initial_temperature;
    PrecomputedModel model = precompute(mesh, config.material, config.boundary, config.time.dt, options);
    return LoadedRun{.config = std::move(config), .mesh = std::move(mesh), .model = std::move(model)};
}

int command_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
    const LoadedRun run_data = load_run(config_path);
    const RunConfig& config = run_data.config;
    const PrecomputedModel& model = run_data.model;
    for (const auto& w : model.warnings) err << "warning: " << w << '\n';
    prepare_directory(config.output.directory);

    SimulationState state = initial_state(model, config.initial_temperature);
    Schedule schedule;
    schedule.duration = config.time.duration;
    schedule.stop_on_steady = config.time.stop_on_steady;
    schedule.steady_tolerance = config.time.steady_tolerance;
    schedule.snapshot_every = config.output.every;
    std::size_t written = 0;
    const RunSummary summary = run(model, state, schedule, [&](const SimulationState& s) {
        write_snapshot(config.output.directory, *run_data.mesh, s, config.output.format);
        ++written;
    });
    write_text_file(config.output.directory / "summary.json", summary_json(summary, model));

    out << "steps " << summary.steps << ", final time " << summary.final_time << " s";
    if (summary.steady_step) out << ", steady at step " << *summary.steady_step;
    out << "\nmean step " << summary.mean_step_ms << " ms, max " << summary.max_step_ms << " ms, total "
        << summary.total_ms << " ms\n";
    out << written << " snapshot" << (written == 1 ? "" : "s") << " in " << config.output.directory.string() << '\n';
    return 0;
}

BenchResult bench_model(const PrecomputedModel& model, double initial_temperature, std::size_t repeats,
                        std::size_t steps) {
    if (steps == 0) throw ConfigError("--steps must be at least 1");
    if (repeats == 0) throw ConfigError("--repeats must be at least 1");
    using Clock = std::chrono::steady_clock;
    std::vector<double> samples;
    samples.reserve(repeats * steps);
    for (std::size_t r = 0; r < repeats; ++r) {
        SimulationState state = initial_state(model, initial_temperature);
        step(model, state);  // warm caches and workspaces
        for (std::size_t s = 0; s < steps; ++s) {
            const auto t0 = Clock::now();
            step(model, state);
            samples.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        }
    }
    BenchResult result;
    result.form = model.form;
    result.nodes = model.num_nodes();
    result.elements = model.mesh->num_elements();
    double sum = 0.0;
    for (const double s : samples) sum += s;
    result.mean_ms = sum / static_cast<double>(samples.size());
    result.max_ms = *std::ranges::max_element(samples);
    result.median_ms = median(std::move(samples));
    return result;
}

int command_bench(const BenchOptions& options, std::ostream& out) {
    if (options.steps == 0) throw ConfigError("--steps must be at least 1");
    if (options.repeats == 0) throw ConfigError("--repeats must be at least 1");
    std::vector<BenchResult> results;
    for (const auto& path : options.configs) {
        const LoadedRun run_data = load_run(path);
        BenchResult r = bench_model(run_data.model, run_data.config.initial_temperature, options.repeats, options.steps);
        r.config = path;
        r.mesh = std::filesystem::weakly_canonical(run_data.config.mesh);
        out << path.string() << ": " << form_name(r.form) << ", " << r.nodes << " nodes, " << r.elements
            << " elements, " << options.repeats << " x " << options.steps << " steps\n"
            << "  per step ms: mean " << r.mean_ms << ", median " << r.median_ms << ", max " << r.max_ms << '\n';
        results.push_back(std::move(r));
    }
    for (const auto& td : results) {
        if (td.form != GForm::temperature_dependent) continue;
        for (const auto& ti : results) {
            if (ti.form != GForm::temperature_independent || ti.mesh != td.mesh) continue;
            out << "TD/TI per-step ratio (median) " << td.config.filename().string() << " / "
                << ti.config.filename().string() << ": " << td.median_ms / ti.median_ms << '\n';
        }
    }
    return 0;
}

ValidationReport validate_against_oracle(const PrecomputedModel& model, const TimeConfig& time,
                                         double initial_temperature) {
    std::size_t horizon = 0;
    if (time.duration) {
        horizon = static_cast<std::size_t>(std::ceil(*time.duration / model.dt - 1e-9));
    } else {
        SimulationState probe = initial_state(model, initial_temperature);
        Schedule schedule;
        schedule.stop_on_steady = true;
        schedule.steady_tolerance = time.steady_tolerance;
        schedule.max_steps = kStepCap;
        horizon = run(model, probe, schedule).steps;
    }
    horizon = std::max<std::size_t>(horizon, 1);
    std::vector<std::size_t> marks;
    for (const double q : {0.25, 0.5, 0.75, 1.0}) {
        marks.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(q * static_cast<double>(horizon)))));
    }

    SimulationState state = initial_state(model, initial_temperature);
    std::vector<double> implicit = state.temperature;
    std::vector<double> next(implicit.size());
    ImplicitOracle oracle(model, model.dt);
    ValidationReport report;
    auto point = [&] { return ValidationPoint{state.step, state.time, error_metric(implicit, state.temperature)}; };

    std::size_t mark = 0;
    while (state.step < horizon) {
        step(model, state);
        oracle.step(implicit, next);
        implicit.swap(next);
        while (mark < marks.size() && marks[mark] == state.step) {
            report.quartiles.push_back(point());
            ++mark;
        }
    }
    if (time.stop_on_steady) {
        bool explicit_steady = false;
        bool implicit_steady = false;
        for (std::size_t s = 0; s < kStepCap && !(explicit_steady && implicit_steady); ++s) {
            step(model, state);
            oracle.step(implicit, next);
            explicit_steady = steady_state_check(state.previous, state.temperature, time.steady_tolerance);
            implicit_steady = steady_state_check(implicit, next, time.steady_tolerance);
            implicit.swap(next);
        }
        report.steady = point();
    }
    return report;
}

int command_validate(const std::filesystem::path& config_path, std::ostream& out) {
    const LoadedRun run_data = load_run(config_path);
    const ValidationReport report =
        validate_against_oracle(run_data.model, run_data.config.time, run_data.config.initial_temperature);
    out << "explicit vs implicit oracle, dt " << run_data.model.dt << " s\n";
    const char* labels[] = {"25%", "50%", "75%", "100%"};
    for (std::size_t i = 0; i < report.quartiles.size(); ++i) {
        const auto& p = report.quartiles[i];
        out << "  " << std::setw(4) << labels[i] << "  step " << p.step << "  t " << p.time << " s  error "
            << std::scientific << std::setprecision(3) << p.error << std::defaultfloat << std::setprecision(6) << '\n';
    }
    if (report.steady) {
        out << "  steady  step " << report.steady->step << "  t " << report.steady->time << " s  error "
            << std::scientific << std::setprecision(3) << report.steady->error << std::defaultfloat
            << std::setprecision(6) << '\n';
    }
    return 0;
}

int command_patch_test(ElementKind kind, std::size_t n, std::ostream& out) {
    auto mesh = std::make_shared<const Mesh>(generate_cube_mesh(kind, n, 1.0));
    const PatchTestResult result = patch_test(mesh);
    const double limit = kind == ElementKind::hex8 ? 2e-3 : 2e-2;
    const bool pass = result.max_error <= limit;
    out << "patch test " << to_string(kind) << ", " << n << "^3 nodes, " << result.interior_nodes
        << " interior, " << result.steps << " steps\n"
        << "max interior error " << std::scientific << std::setprecision(3) << result.max_error << " degC (limit "
        << limit << ") " << (pass ? "PASS" : "FAIL") << '\n'
        << std::defaultfloat << std::setprecision(6);
    return pass ? 0 : 2;
}

int command_dt_estimate(const std::filesystem::path& config_path, std::ostream& out) {
    const LoadedRun run_data = load_run(config_path);
    const PrecomputedModel& model = run_data.model;
    const StabilityEstimate g = model.stability;
    out << "form " << form_name(model.form) << ", " << model.num_nodes() << " nodes, dt " << model.dt << " s\n";
    out << "gershgorin   lambda_max " << g.lambda_max << " 1/s  critical dt " << g.critical_dt << " s  (dt/critical "
        << model.dt / g.critical_dt << ")\n";
    if (model.num_nodes() <= 2000) {
        const StabilityEstimate d = estimate_critical_dt(model, StabilityMethod::dense_eigen);
        out << "dense-eigen  lambda_max " << d.lambda_max << " 1/s  critical dt " << d.critical_dt
            << " s  (dt/critical " << model.dt / d.critical_dt << ")\n";
    } else {
        out << "dense-eigen  skipped (more than 2000 nodes)\n";
    }
    for (const auto& w : model.warnings) out << "warning: " << w << '\n';
    return 0;
}

int command_genmesh(ElementKind kind, std::size_t n, double size, const std::filesystem::path& path,
                    std::ostream& out) {
    const Mesh mesh = generate_cube_mesh(kind, n, size);
    write_mesh_file(mesh, path);
    out << "wrote " << path.string() << ": " << mesh.num_nodes() << " nodes, " << mesh.num_elements() << ' '
        << to_string(kind) << " elements\n";
    return 0;
}

}  // namespace fedfem::app
