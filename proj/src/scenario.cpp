#include "rmtt/scenario.hpp"

#include "rmtt/metrics.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rmtt {

namespace {

enum class Stream : std::uint32_t { World = 1, Sense = 2, Fault = 3, Formation = 4, Strategy = 5 };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream s, int a = 0, int b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return std::mt19937_64(seq);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& key, const std::string& value, std::size_t expected) {
    std::istringstream is(value);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not a number: " + tok);
        }
    }
    if (expected != 0 && out.size() != expected)
        throw ConfigError("config key '" + key + "': expected " + std::to_string(expected) + " numbers");
    return out;
}

double number(const std::string& key, const std::string& value) { return numbers(key, value, 1)[0]; }

int integer(const std::string& key, const std::string& value) {
    const double v = number(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config key '" + key + "': expected an integer");
    return static_cast<int>(v);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Vec2 fold_into(Vec2 p, const Vec2& lo, const Vec2& hi) {
    for (int d = 0; d < 2; ++d) {
        if (p(d) < lo(d)) p(d) = 2 * lo(d) - p(d);
        if (p(d) > hi(d)) p(d) = 2 * hi(d) - p(d);
        p(d) = std::clamp(p(d), lo(d), hi(d));
    }
    return p;
}

bool inside(const Vec2& p, const Vec2& lo, const Vec2& hi) {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

std::vector<Vec2> corners(const Vec2& lo, const Vec2& hi) {
    return {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()), Vec2(lo.x(), hi.y()), Vec2(hi.x(), hi.y())};
}

PointSet tgc_positions(const GaussianMixture& m) {
    PointSet out;
    for (const auto& c : select_tgcs(m)) out.push_back(c.mean.head<2>());
    return out;
}

}  // namespace

int ScenarioConfig::consensus() const { return consensus_steps > 0 ? consensus_steps : (n + 1) / 2; }

FusionRule ScenarioConfig::active_fusion() const { return fusion_rule_for(strategy, fusion); }

void ScenarioConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n < 1) throw ConfigError("n must be >= 1");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (!prob(p_survive) || !prob(p_detect)) throw ConfigError("probabilities must lie in [0, 1]");
    if (birth_rate < 0.0 || clutter_rate < 0.0) throw ConfigError("rates must be non-negative");
    if (!(birth_radius > 0.0) || target_speed < 0.0) throw ConfigError("birth_radius must be positive, target_speed non-negative");
    if (!is_positive_definite(r_init) || !is_symmetric(r_init)) throw ConfigError("r_init must be symmetric positive definite");
    if (process_noise < 0.0) throw ConfigError("process_noise must be non-negative");
    if (!(d_s > 0.0 && d_s < d_mc) || !(d_sen > 0.0) || !(max_centroid_dist > 0.0))
        throw ConfigError("need 0 < d_s < d_mc, d_sen > 0 and E > 0");
    if (!(domain_min.array() < domain_max.array()).all()) throw ConfigError("empty target domain");
    if (!(robot_box_min.array() < robot_box_max.array()).all()) throw ConfigError("empty robot box");
    if (!(grid_spacing >= d_s && grid_spacing <= d_mc)) throw ConfigError("grid_spacing must lie in [d_s, d_mc]");
    if (prune_threshold < 0.0 || merge_threshold < 0.0) throw ConfigError("thresholds must be non-negative");
    if (birth_weight < 0.0 || (birth_variance.array() <= 0.0).any()) throw ConfigError("invalid birth model");
    if (consensus_steps < 0) throw ConfigError("consensus_steps must be >= 0");
    if (edge_budget < 1) throw ConfigError("edge_budget must be >= 1");
    if (fault_period < 1) throw ConfigError("fault_period must be >= 1");
    if (!(ospa_cutoff > 0.0) || !(ospa_order >= 1.0)) throw ConfigError("need ospa_cutoff > 0 and ospa_order >= 1");
    if (!(annealing.cooling > 0.0 && annealing.cooling < 1.0) || annealing.temperature_levels < 1 ||
        annealing.proposals_per_temperature < 1 || !(annealing.initial_temperature > 0.0) ||
        !(annealing.sigma_start > 0.0) || !(annealing.sigma_end > 0.0))
        throw ConfigError("invalid annealing schedule");
}

bool apply_scenario_key(ScenarioConfig& c, const std::string& key, const std::string& v) {
    if (key == "n") c.n = integer(key, v);
    else if (key == "epochs") c.epochs = integer(key, v);
    else if (key == "birth_rate") c.birth_rate = number(key, v);
    else if (key == "birth_radius") c.birth_radius = number(key, v);
    else if (key == "target_speed") c.target_speed = number(key, v);
    else if (key == "p_survive") c.p_survive = number(key, v);
    else if (key == "p_detect") c.p_detect = number(key, v);
    else if (key == "clutter_rate") c.clutter_rate = number(key, v);
    else if (key == "r_init") {
        const auto x = numbers(key, v, 4);
        c.r_init << x[0], x[1], x[2], x[3];
    } else if (key == "process_noise") c.process_noise = number(key, v);
    else if (key == "d_s") c.d_s = number(key, v);
    else if (key == "d_mc") c.d_mc = number(key, v);
    else if (key == "d_sen") c.d_sen = number(key, v);
    else if (key == "max_centroid_dist") c.max_centroid_dist = number(key, v);
    else if (key == "domain_min" || key == "domain_max") {
        const auto x = numbers(key, v, 2);
        (key == "domain_min" ? c.domain_min : c.domain_max) = Vec2(x[0], x[1]);
    } else if (key == "robot_box_min" || key == "robot_box_max") {
        const auto x = numbers(key, v, 3);
        (key == "robot_box_min" ? c.robot_box_min : c.robot_box_max) = Vec3(x[0], x[1], x[2]);
    } else if (key == "grid_spacing") c.grid_spacing = number(key, v);
    else if (key == "grid_height") c.grid_height = number(key, v);
    else if (key == "birth_weight") c.birth_weight = number(key, v);
    else if (key == "birth_variance") {
        const auto x = numbers(key, v, 4);
        c.birth_variance = Vec4(x[0], x[1], x[2], x[3]);
    } else if (key == "prune_threshold") c.prune_threshold = number(key, v);
    else if (key == "merge_threshold") c.merge_threshold = number(key, v);
    else if (key == "max_components") c.max_components = static_cast<std::size_t>(std::max(0, integer(key, v)));
    else if (key == "consensus_steps") c.consensus_steps = integer(key, v);
    else if (key == "strategy") {
        try {
            c.strategy = strategy_from_string(v);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "fusion") {
        try {
            c.fusion = fusion_rule_from_string(v);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "edge_budget") c.edge_budget = integer(key, v);
    else if (key == "fault_period") c.fault_period = integer(key, v);
    else if (key == "ospa_cutoff") c.ospa_cutoff = number(key, v);
    else if (key == "ospa_order") c.ospa_order = number(key, v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(number(key, v));
    else if (key == "anneal_initial_temperature") c.annealing.initial_temperature = number(key, v);
    else if (key == "anneal_cooling") c.annealing.cooling = number(key, v);
    else if (key == "anneal_proposals") c.annealing.proposals_per_temperature = integer(key, v);
    else if (key == "anneal_levels") c.annealing.temperature_levels = integer(key, v);
    else if (key == "anneal_sigma_start") c.annealing.sigma_start = number(key, v);
    else if (key == "anneal_sigma_end") c.annealing.sigma_end = number(key, v);
    else return false;
    return true;
}

ScenarioConfig parse_scenario_config(std::istream& in) {
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!apply_scenario_key(cfg, key, trim(line.substr(eq + 1))))
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

TargetModel TargetModel::from_config(const ScenarioConfig& cfg) {
    TargetModel m;
    m.motion = MotionModel::constant_velocity(1.0, Mat4::Zero());
    m.birth_rate = cfg.birth_rate;
    m.birth_sigma = cfg.birth_radius / std::sqrt(2.0 * std::log(20.0));
    m.speed = cfg.target_speed;
    m.domain_min = cfg.domain_min;
    m.domain_max = cfg.domain_max;
    return m;
}

int step_targets(World& world, const TargetModel& model, int epoch, std::mt19937_64& rng) {
    for (auto& t : world.targets) {
        if (!t.alive) continue;
        t.state = model.motion.F * t.state + model.motion.G * model.motion.u;
        if (!inside(t.state.head<2>(), model.domain_min, model.domain_max)) t.alive = false;
    }
    std::erase_if(world.targets, [](const TargetTruth& t) { return !t.alive; });

    std::poisson_distribution<int> births(model.birth_rate);
    std::uniform_int_distribution<int> corner_pick(0, 3);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto cs = corners(model.domain_min, model.domain_max);
    const int count = model.birth_rate > 0.0 ? births(rng) : 0;
    for (int b = 0; b < count; ++b) {
        const int c = corner_pick(rng);
        const double dx = noise(rng), dy = noise(rng);
        const Vec2 pos = fold_into(cs[c] + model.birth_sigma * Vec2(dx, dy), model.domain_min, model.domain_max);
        const Vec2 to = cs[3 - c] - pos;
        const Vec2 vel = to.norm() > 0.0 ? Vec2(model.speed * to.normalized()) : Vec2::Zero();
        TargetTruth t;
        t.state << pos, vel;
        t.birth_epoch = epoch;
        world.targets.push_back(t);
    }
    return count;
}

std::vector<Vec2> sense(const Tracker& tracker, const World& world, std::mt19937_64& rng) {
    const SensorModel& s = tracker.sensor;
    const Vec2 centre = s.fov_center.value_or(Vec2(tracker.position.head<2>()));
    const Eigen::LLT<Mat2> llt(s.R);
    const Mat2 L = llt.matrixL();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec2> out;
    for (const auto& t : world.targets) {
        if (!t.alive || (t.state.head<2>() - centre).norm() > s.fov_radius) continue;
        if (u01(rng) >= s.p_detect) continue;
        const double a = g(rng), b = g(rng);
        out.push_back(s.H * t.state + L * Vec2(a, b));
    }
    if (s.clutter_rate > 0.0) {
        std::poisson_distribution<int> clutter(s.clutter_rate);
        const int count = clutter(rng);
        for (int c = 0; c < count; ++c) {
            const double r = s.fov_radius * std::sqrt(u01(rng));
            const double th = 2.0 * std::numbers::pi * u01(rng);
            out.push_back(centre + r * Vec2(std::cos(th), std::sin(th)));
        }
    }
    return out;
}

Mat2 deteriorate(Tracker& tracker, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat2 b;
    const double b00 = g(rng), b01 = g(rng), b10 = g(rng), b11 = g(rng);
    b << b00, b01, b10, b11;
    const Mat2 m = b * b.transpose() + 0.1 * Mat2::Identity();
    tracker.sensor.R = symmetrize(Mat2(tracker.sensor.R + m));
    return m;
}

double TrialLog::mean_ospa() const {
    if (epochs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& e : epochs) s += e.ospa_team;
    return s / static_cast<double>(epochs.size());
}

double TrialLog::cardinality_nmse() const {
    std::vector<double> est, truth;
    for (const auto& e : epochs) {
        est.push_back(e.est_cardinality);
        truth.push_back(e.true_cardinality);
    }
    if (std::all_of(truth.begin(), truth.end(), [](double t) { return t == 0.0; }))
        return std::numeric_limits<double>::quiet_NaN();
    return nmse(est, truth);
}

double TrialLog::final_edge_density() const { return epochs.empty() ? 0.0 : epochs.back().edge_density; }

Positions initial_layout(const ScenarioConfig& cfg) {
    Positions out;
    constexpr int kRow = 5;
    for (int i = 0; i < cfg.n; ++i) {
        const int row = i / kRow;
        const int in_row = std::min(kRow, cfg.n - row * kRow);
        int col = i % kRow;
        if (row % 2 == 1) col = kRow - 1 - col;
        const double half = 0.5 * ((row == 0 ? in_row : kRow) - 1);
        out.emplace_back((col - half) * cfg.grid_spacing, row * cfg.grid_spacing, cfg.grid_height);
    }
    return out;
}

MotionModel filter_motion(const ScenarioConfig& cfg) {
    Mat4 q = Mat4::Zero();
    q.diagonal() << 0.25, 0.25, 1.0, 1.0;
    return MotionModel::constant_velocity(1.0, cfg.process_noise * q);
}

BirthModel filter_birth(const ScenarioConfig& cfg) {
    BirthModel b;
    const auto cs = corners(cfg.domain_min, cfg.domain_max);
    for (int c = 0; c < 4; ++c) {
        GaussianComponent g;
        g.weight = cfg.birth_weight;
        const Vec2 dir = (cs[3 - c] - cs[c]).normalized();
        g.mean << cs[c], cfg.target_speed * dir;
        g.covariance = cfg.birth_variance.asDiagonal();
        b.components.push_back(g);
    }
    return b;
}

TrialLog run_trial(const ScenarioConfig& cfg) {
    cfg.validate();
    const int n = cfg.n;
    const FusionRule rule = cfg.active_fusion();
    TrialLog log;
    log.n = n;
    log.strategy = std::string(to_string(cfg.strategy));
    log.fusion = std::string(to_string(rule));
    log.seed = cfg.seed;

    const TargetModel truth_model = TargetModel::from_config(cfg);
    const MotionModel motion = filter_motion(cfg);
    const BirthModel birth = filter_birth(cfg);
    World world;
    auto world_rng = stream_rng(cfg.seed, Stream::World);
    auto fault_rng = stream_rng(cfg.seed, Stream::Fault);

    std::vector<Tracker> trackers(n);
    const Positions layout = initial_layout(cfg);
    for (int i = 0; i < n; ++i) {
        Tracker& t = trackers[i];
        t.position = layout[i];
        t.sensor.R = cfg.r_init;
        t.sensor.p_detect = cfg.p_detect;
        t.sensor.fov_radius = cfg.d_sen;
        t.sensor.clutter_rate = cfg.clutter_rate;
        t.sensor.fov_center = Vec2(t.position.head<2>());
    }
    TeamConfiguration config = line_configuration(n);

    FusionOptions fusion;
    fusion.rule = rule;
    fusion.steps = cfg.consensus();
    fusion.prune_threshold = cfg.prune_threshold;
    fusion.merge_threshold = cfg.merge_threshold;
    fusion.max_components = cfg.max_components;

    for (int k = 1; k <= cfg.epochs; ++k) {
        step_targets(world, truth_model, k, world_rng);

        const bool fault = k % cfg.fault_period == 0;
        int failed = -1;
        if (fault) {
            std::uniform_int_distribution<int> pick(0, n - 1);
            failed = pick(fault_rng);
            const Mat2 added = deteriorate(trackers[failed], fault_rng);
            TrialEvent ev;
            ev.epoch = k;
            ev.type = "fault";
            ev.tracker = failed;
            std::ostringstream os;
            os << "R trace " << fmt(trackers[failed].sensor.R.trace()) << " (+" << fmt(added.trace()) << ")";
            ev.detail = os.str();
            log.events.push_back(ev);
        }

        for (int i = 0; i < n; ++i) {
            Tracker& t = trackers[i];
            auto sense_rng = stream_rng(cfg.seed, Stream::Sense, k, i);
            const auto z = sense(t, world, sense_rng);
            GaussianMixture m = predict(t.mixture, motion, birth, cfg.p_survive);
            std::erase_if(m, [&](const GaussianComponent& c) {
                return !inside(c.mean.head<2>(), cfg.domain_min, cfg.domain_max);
            });
            m = innovate(m, z, t.sensor);
            m = prune(m, cfg.prune_threshold);
            m = merge(m, cfg.merge_threshold);
            if (cfg.max_components > 0) m = cap(m, cfg.max_components);
            t.mixture = std::move(m);
            t.cardinality = expected_cardinality(t.mixture);
        }

        if (fault) {
            TrialEvent ev;
            ev.epoch = k;
            ev.tracker = failed;
            std::vector<GaussianMixture> tgcs(n);
            int alpha = std::numeric_limits<int>::max();
            for (int i = 0; i < n; ++i) {
                tgcs[i] = select_tgcs(trackers[i].mixture);
                alpha = std::min(alpha, static_cast<int>(tgcs[i].size()));
            }
            if (alpha == 0) {
                ev.type = "reconfiguration_skipped";
                ev.detail = "a tracker has no target-likely components";
                log.events.push_back(ev);
            } else {
                try {
                    StrategyInput inp;
                    inp.failed_tracker = failed;
                    inp.alpha = alpha;
                    inp.previous = config;
                    inp.edge_budget = cfg.edge_budget;
                    inp.rule = rule;
                    inp.seed = stream_rng(cfg.seed, Stream::Strategy, k)();
                    for (int i = 0; i < n; ++i) {
                        inp.blk_covs.emplace_back();
                        for (int s = 0; s < alpha; ++s) inp.blk_covs.back().push_back(tgcs[i][s].covariance);
                    }
                    const GeneratedConfiguration gen = generate_configuration(cfg.strategy, inp);

                    FormationProblem prob;
                    prob.config = gen.config;
                    prob.fov_radii.assign(n, cfg.d_sen);
                    prob.d_s = cfg.d_s;
                    prob.d_mc = cfg.d_mc;
                    prob.box_min = cfg.robot_box_min;
                    prob.box_max = cfg.robot_box_max;
                    prob.max_centroid_dist = cfg.max_centroid_dist;
                    Vec2 centroid = Vec2::Zero();
                    double mass = 0.0;
                    for (const auto& c : tgcs[failed]) {
                        centroid += c.weight * c.mean.head<2>();
                        mass += c.weight;
                    }
                    prob.target_centroid = centroid / mass;
                    for (const auto& t : trackers) prob.initial_positions.push_back(t.position);
                    const FormationResult placed = synthesize(prob, cfg.annealing, stream_rng(cfg.seed, Stream::Formation, k)());

                    config = gen.config;
                    for (int i = 0; i < n; ++i) {
                        trackers[i].position = placed.positions[i];
                        trackers[i].sensor.fov_center = Vec2(placed.positions[i].head<2>());
                    }
                    ev.type = "reconfigured";
                    ev.edges = edge_list(config.pi);
                    ev.objective = gen.objective;
                    std::ostringstream os;
                    os << "alpha " << alpha << ", " << gen.candidates << " candidate topologies, coverage "
                       << fmt(placed.objective);
                    ev.detail = os.str();

                    const std::string why = configuration_violation(config);
                    if (!why.empty() && log.invariant_violation.empty())
                        log.invariant_violation = "epoch " + std::to_string(k) + ": " + why;
                    if (!feasible(placed.positions, prob) && log.invariant_violation.empty())
                        log.invariant_violation = "epoch " + std::to_string(k) + ": infeasible formation";
                } catch (const std::exception& e) {
                    ev.type = "reconfiguration_failed";
                    ev.detail = e.what();
                }
                log.events.push_back(ev);
            }
        }

        std::vector<TrackerEstimate> est(n);
        for (int i = 0; i < n; ++i) est[i] = {trackers[i].mixture, std::ceil(trackers[i].cardinality - 1e-9)};
        std::vector<VecX> history;
        est = fusion_round(std::move(est), config, fusion, &history);
        for (std::size_t h = 1; h < history.size(); ++h)
            log.max_consensus_drift = std::max(log.max_consensus_drift, std::abs(history[h].sum() - history[h - 1].sum()));
        for (int i = 0; i < n; ++i) {
            trackers[i].mixture = std::move(est[i].mixture);
            trackers[i].cardinality = est[i].cardinality;
        }

        EpochRecord rec;
        rec.epoch = k;
        rec.fault_tracker = failed;
        rec.edge_density = edge_density(config.pi);
        PointSet truth;
        for (const auto& t : world.targets)
            if (t.alive) truth.push_back(t.state.head<2>());
        rec.true_cardinality = static_cast<int>(truth.size());
        for (int i = 0; i < n; ++i) {
            rec.ospa.push_back(ospa(truth, tgc_positions(trackers[i].mixture), cfg.ospa_cutoff, cfg.ospa_order));
            rec.cardinality.push_back(trackers[i].cardinality);
        }
        rec.ospa_team = std::accumulate(rec.ospa.begin(), rec.ospa.end(), 0.0) / n;
        rec.est_cardinality = std::accumulate(rec.cardinality.begin(), rec.cardinality.end(), 0.0) / n;
        log.epochs.push_back(std::move(rec));
    }
    return log;
}

std::vector<std::string> trial_csv_header(int n) {
    std::vector<std::string> h{"epoch", "true_cardinality", "est_cardinality", "ospa_team", "edge_density", "fault_tracker"};
    for (int i = 0; i < n; ++i) h.push_back("ospa_" + std::to_string(i));
    for (int i = 0; i < n; ++i) h.push_back("card_" + std::to_string(i));
    return h;
}

void write_trial_csv(const TrialLog& log, std::ostream& out) {
    const auto header = trial_csv_header(log.n);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& r : log.epochs) {
        out << r.epoch << ',' << r.true_cardinality << ',' << fmt(r.est_cardinality) << ',' << fmt(r.ospa_team) << ','
            << fmt(r.edge_density) << ',' << r.fault_tracker;
        for (double v : r.ospa) out << ',' << fmt(v);
        for (double v : r.cardinality) out << ',' << fmt(v);
        out << '\n';
    }
}

void write_event_json(const TrialLog& log, std::ostream& out) {
    nlohmann::ordered_json j;
    j["n"] = log.n;
    j["strategy"] = log.strategy;
    j["fusion"] = log.fusion;
    j["seed"] = log.seed;
    j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : log.events) {
        nlohmann::ordered_json ev;
        ev["epoch"] = e.epoch;
        ev["type"] = e.type;
        ev["tracker"] = e.tracker;
        ev["detail"] = e.detail;
        if (e.type == "reconfigured") {
            ev["objective"] = fmt(e.objective);
            auto edges = nlohmann::ordered_json::array();
            for (auto [a, b] : e.edges) edges.push_back({a, b});
            ev["edges"] = edges;
        }
        j["events"].push_back(ev);
    }
    out << j.dump(2) << '\n';
}

}  // namespace rmtt
