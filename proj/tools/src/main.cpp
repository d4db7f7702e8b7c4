#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fedfem/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

fedfem::ElementKind kind_from(const std::string& s) {
    return s == "hex8" ? fedfem::ElementKind::hex8 : fedfem::ElementKind::tet4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit transient heat conduction on tet4/hex8 meshes"};
    app.require_subcommand(1);

    std::string config;
    auto* run = app.add_subcommand("run", "Run a simulation and write snapshots plus summary.json");
    run->add_option("config", config, "Run config (JSON)")->required();

    fedfem::app::BenchOptions bench_options;
    std::vector<std::string> bench_configs;
    auto* bench = app.add_subcommand("bench", "Time the stepping loop; TD/TI ratio when both forms share a mesh");
    bench->add_option("config", bench_configs, "One or more run configs")->required();
    bench->add_option("--repeats", bench_options.repeats, "Repeats per config")->capture_default_str();
    bench->add_option("--steps", bench_options.steps, "Timed steps per repeat")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Compare the explicit run against the implicit oracle");
    validate->add_option("config", config, "Run config (JSON)")->required();

    std::string kind = "hex8";
    std::size_t n = 3;
    auto* patch = app.add_subcommand("patch-test", "Linear-field patch test on a generated unit cube");
    patch->add_option("--kind", kind, "Element kind")->check(CLI::IsMember({"tet4", "hex8"}))->capture_default_str();
    patch->add_option("--n", n, "Nodes per cube edge")->check(CLI::Range(3, 1000))->capture_default_str();

    auto* dt_estimate = app.add_subcommand("dt-estimate", "Print critical time step estimates");
    dt_estimate->add_option("config", config, "Run config (JSON)")->required();

    std::string out_path;
    double size = 1.0;
    auto* genmesh = app.add_subcommand("genmesh", "Write a structured cube mesh");
    genmesh->add_option("--kind", kind, "Element kind")->check(CLI::IsMember({"tet4", "hex8"}))->required();
    genmesh->add_option("--n", n, "Nodes per cube edge")->check(CLI::Range(2, 100000))->required();
    genmesh->add_option("--size", size, "Cube edge length (m)")->check(CLI::PositiveNumber)->required();
    genmesh->add_option("--out", out_path, "Output mesh file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return fedfem::app::command_run(config, std::cout, std::cerr);
        if (*bench) {
            bench_options.configs.assign(bench_configs.begin(), bench_configs.end());
            return fedfem::app::command_bench(bench_options, std::cout);
        }
        if (*validate) return fedfem::app::command_validate(config, std::cout);
        if (*patch) return fedfem::app::command_patch_test(kind_from(kind), n, std::cout);
        if (*dt_estimate) return fedfem::app::command_dt_estimate(config, std::cout);
        if (*genmesh) return fedfem::app::command_genmesh(kind_from(kind), n, size, out_path, std::cout);
    } catch (const fedfem::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const fedfem::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
