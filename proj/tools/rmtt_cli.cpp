#include "rmtt/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kPartialFailure = 1;
constexpr int kInvalidConfig = 2;

int run_command(const std::string& config, const std::string& out, int workers, const std::optional<std::uint64_t>& seed) {
    rmtt::ExperimentMatrix matrix;
    try {
        matrix = rmtt::load_experiment_config(config);
        if (seed) matrix.base_seed = *seed;
    } catch (const rmtt::ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kInvalidConfig;
    }
    const rmtt::MatrixReport report = rmtt::run_matrix(matrix, workers, std::filesystem::path(out));
    rmtt::write_report(report, out);
    rmtt::write_summary(report, std::cout);
    if (report.any_cell_failed || report.any_failure) return kPartialFailure;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resilient multi-target tracking experiments"};
    app.require_subcommand(1);

    std::string config, out, in, plot_out;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run a trial matrix and write logs plus aggregates");
    run->add_option("--config", config, "Experiment config file")->required();
    run->add_option("--out", out, "Output directory")->required();
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed (overrides the config)");

    auto* plot = app.add_subcommand("plot", "Render SVG charts from aggregate files");
    plot->add_option("--in", in, "Directory holding aggregate.csv and density.csv")->required();
    plot->add_option("--out", plot_out, "Directory for SVG files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidConfig;
    }

    try {
        if (*run) return run_command(config, out, workers, seed);
        for (const auto& p : rmtt::plot_report(in, plot_out)) std::cout << p.string() << '\n';
        return kOk;
    } catch (const rmtt::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kPartialFailure;
    }
}
