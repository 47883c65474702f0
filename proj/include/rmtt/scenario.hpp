#pragma once

#include "rmtt/formation.hpp"
#include "rmtt/fusion.hpp"
#include "rmtt/network.hpp"
#include "rmtt/phd_filter.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace rmtt {

struct ScenarioConfig {
    int n = 5;
    int epochs = 100;
    double birth_rate = 1.0;     // lambda, expected births per epoch
    double birth_radius = 20.0;  // ~95% of birth mass within this distance of the corner
    double target_speed = 4.0;
    double p_survive = 0.98;
    double p_detect = 0.95;
    double clutter_rate = 2.0;  // expected clutter returns per scan
    Mat2 r_init = Mat2::Identity();
    double process_noise = 0.01;  // filter Q = process_noise * diag(0.25, 0.25, 1, 1)
    double d_s = 10.0;
    double d_mc = 25.0;
    double d_sen = 20.0;
    double max_centroid_dist = 30.0;  // E
    Vec2 domain_min = Vec2(-50.0, -50.0);
    Vec2 domain_max = Vec2(50.0, 50.0);
    Vec3 robot_box_min = Vec3(-50.0, -50.0, 0.0);
    Vec3 robot_box_max = Vec3(50.0, 100.0, 100.0);
    double grid_spacing = 20.0;
    double grid_height = 20.0;
    double birth_weight = 0.25;
    Vec4 birth_variance = Vec4(100.0, 100.0, 25.0, 25.0);
    double prune_threshold = 1e-6;
    double merge_threshold = 0.2;
    std::size_t max_components = 100;
    int consensus_steps = 0;  // 0: ceil(n / 2)
    Strategy strategy = Strategy::None;
    FusionRule fusion = FusionRule::GMF;  // used by none/greedy/random
    int edge_budget = 1;
    int fault_period = 20;
    double ospa_cutoff = 5.0;
    double ospa_order = 1.0;
    std::uint64_t seed = 1;
    AnnealingSchedule annealing;

    int consensus() const;
    FusionRule active_fusion() const;
    void validate() const;
};

/// Invalid or unparsable configuration text.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Sets one `key = value` entry. Returns false for an unknown key; throws
/// ConfigError for a malformed value.
bool apply_scenario_key(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Documented `key = value` format, one entry per line, `#` starts a comment.
ScenarioConfig parse_scenario_config(std::istream& in);

struct TargetTruth {
    Vec4 state = Vec4::Zero();
    int birth_epoch = 0;
    bool alive = true;
};

struct World {
    std::vector<TargetTruth> targets;
};

/// Truth dynamics and birth process.
struct TargetModel {
    MotionModel motion = MotionModel::constant_velocity(1.0, Mat4::Zero());
    double birth_rate = 1.0;
    double birth_sigma = 0.0;
    double speed = 4.0;
    Vec2 domain_min = Vec2(-50.0, -50.0);
    Vec2 domain_max = Vec2(50.0, 50.0);

    static TargetModel from_config(const ScenarioConfig& cfg);
};

/// Advances alive targets, removes those that left the domain, then adds
/// Poisson births. Returns the number of births.
int step_targets(World& world, const TargetModel& model, int epoch, std::mt19937_64& rng);

struct Tracker {
    SensorModel sensor;
    Vec3 position = Vec3::Zero();
    GaussianMixture mixture;
    double cardinality = 0.0;
};

/// One scan: a noisy position return for each detected target inside the
/// sensing disc, plus uniform clutter on the disc.
std::vector<Vec2> sense(const Tracker& tracker, const World& world, std::mt19937_64& rng);

/// R <- R + B B^T + 0.1 I with B standard normal. Returns the added matrix.
Mat2 deteriorate(Tracker& tracker, std::mt19937_64& rng);

struct EpochRecord {
    int epoch = 0;
    int true_cardinality = 0;
    double est_cardinality = 0.0;
    double ospa_team = 0.0;
    double edge_density = 0.0;
    int fault_tracker = -1;
    std::vector<double> ospa;
    std::vector<double> cardinality;
};

struct TrialEvent {
    int epoch = 0;
    std::string type;  // fault, reconfigured, reconfiguration_skipped, reconfiguration_failed
    int tracker = -1;
    std::string detail;
    std::vector<Edge> edges;
    double objective = 0.0;
};

struct TrialLog {
    int n = 0;
    std::string strategy;
    std::string fusion;
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
    std::vector<TrialEvent> events;
    /// Largest change of the summed cardinality estimates over one consensus step.
    double max_consensus_drift = 0.0;
    /// Configuration or formation check that failed after a fault; empty when none did.
    std::string invariant_violation;

    double mean_ospa() const;
    /// NMSE of the team cardinality estimate; NaN when the truth is zero throughout.
    double cardinality_nmse() const;
    double final_edge_density() const;
};

/// Initial snake-grid layout at grid_height: rows of up to five trackers.
Positions initial_layout(const ScenarioConfig& cfg);

/// Constant-velocity filter motion model for the configured process noise.
MotionModel filter_motion(const ScenarioConfig& cfg);

/// Four birth components at the domain corners, aimed at the opposite corner.
BirthModel filter_birth(const ScenarioConfig& cfg);

TrialLog run_trial(const ScenarioConfig& cfg);

/// One row per epoch: epoch, true_cardinality, est_cardinality, ospa_team,
/// edge_density, fault_tracker, ospa_0..ospa_{n-1}, card_0..card_{n-1}.
void write_trial_csv(const TrialLog& log, std::ostream& out);
std::vector<std::string> trial_csv_header(int n);

void write_event_json(const TrialLog& log, std::ostream& out);

}  // namespace rmtt
