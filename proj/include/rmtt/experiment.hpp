#pragma once

#include "rmtt/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace rmtt {

struct ExperimentMatrix {
    std::vector<int> team_sizes{5};
    std::vector<Strategy> strategies{Strategy::None};
    int trials_per_cell = 30;
    std::uint64_t base_seed = 1;
    ScenarioConfig scenario;

    void validate() const;
};

/// Scenario keys plus `team_sizes`, `strategies`, `trials` and `base_seed`.
ExperimentMatrix parse_experiment_config(std::istream& in);
ExperimentMatrix load_experiment_config(const std::filesystem::path& path);

/// (team size, strategy, fusion rule). Baseline cells use strategy `none`.
struct CellKey {
    int n = 0;
    Strategy strategy = Strategy::None;
    FusionRule fusion = FusionRule::GMF;

    auto tie() const { return std::make_tuple(n, static_cast<int>(strategy), static_cast<int>(fusion)); }
    bool operator<(const CellKey& o) const { return tie() < o.tie(); }
    bool operator==(const CellKey& o) const { return tie() == o.tie(); }
    std::string label() const;
};

struct TrialOutcome {
    std::uint64_t seed = 0;
    std::optional<TrialLog> log;  // empty when the trial failed
    std::string error;
};

struct CellSummary {
    CellKey key;
    int trials = 0;
    int failures = 0;
    double ospa_mean = 0.0, ospa_var = 0.0;
    double nmse_mean = 0.0, nmse_var = 0.0;
    double edge_density_mean = 0.0;
    /// Paired baseline-minus-strategy differences over seeds present in both.
    int pairs = 0;
    double ospa_diff_mean = 0.0, nmse_diff_mean = 0.0;
    int ospa_diff_positive = 0, nmse_diff_positive = 0;
    int ospa_diff_negative = 0, nmse_diff_negative = 0;
    double ospa_sign_p = 1.0, nmse_sign_p = 1.0;
    /// Mean difference over the largest |mean difference| among this team size's cells.
    double ospa_diff_norm = 0.0, nmse_diff_norm = 0.0;
};

struct DensityBin {
    CellKey key;
    double bin_low = 0.0;
    int epochs = 0;
    double ospa_mean = 0.0;
    double ospa_diff = 0.0;  // mean paired baseline-minus-strategy OSPA
    double nmse_diff = 0.0;  // paired squared-error difference over summed squared truth
};

struct MatrixReport {
    std::vector<CellKey> cells;  // sorted
    std::map<CellKey, std::vector<TrialOutcome>> outcomes;
    std::vector<CellSummary> summaries;
    std::vector<DensityBin> density;
    bool any_failure = false;
    bool any_cell_failed = false;

    const CellSummary* summary(const CellKey& key) const;
};

/// The cells a matrix runs: each requested strategy under its fusion rule
/// plus the `none` baseline for every fusion rule in use.
std::vector<CellKey> matrix_cells(const ExperimentMatrix& matrix);

/// Probability of at least `positive` successes in `trials` fair coin flips.
double sign_test_p(int positive, int trials);

/// Runs every (cell, trial) on a pool of `workers` threads; results are
/// merged by cell key and seed, so output does not depend on scheduling.
/// When `out_dir` is given, each trial writes `trials/<cell>_seed<s>.csv`
/// and `.events.json` there.
MatrixReport run_matrix(const ExperimentMatrix& matrix, int workers,
                        const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_aggregate_csv(const MatrixReport& report, std::ostream& out);
void write_density_csv(const MatrixReport& report, std::ostream& out);
void write_summary(const MatrixReport& report, std::ostream& out);

/// Writes trial logs, aggregate.csv and density.csv under `out_dir`.
void write_report(const MatrixReport& report, const std::filesystem::path& out_dir);

/// Missing or malformed plot input.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads aggregate.csv and density.csv from `in_dir` and writes
/// ospa_vs_density.svg and nmse_vs_density.svg to `out_dir`, one series per
/// cell. Returns the written paths.
std::vector<std::filesystem::path> plot_report(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir);

/// SVG line chart, normalised to [-1, 1] by the largest |y|.
struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};
std::string render_svg(const std::string& title, const std::string& y_label, const std::vector<Series>& series);

}  // namespace rmtt
