#include "rmtt/formation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace rmtt {

namespace {

constexpr double kRepairMargin = 1e-3;

Vec2 ground_centroid(const Positions& p) {
    Vec2 c = Vec2::Zero();
    for (const Vec3& x : p) c += x.head<2>();
    return c / static_cast<double>(p.size());
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(g(rng), g(rng), g(rng));
    } while (v.norm() < 1e-9);
    return v.normalized();
}

void clamp_to_box(Positions& p, const FormationProblem& prob) {
    const Vec3 lo = prob.box_min.array() + kRepairMargin;
    const Vec3 hi = prob.box_max.array() - kRepairMargin;
    for (Vec3& x : p) x = x.cwiseMax(lo).cwiseMin(hi);
}

/// Alternating pushes towards each violated constraint family.
bool repair(Positions& p, const FormationProblem& prob, int iterations, std::mt19937_64& rng) {
    const int n = static_cast<int>(p.size());
    for (int it = 0; it < iterations; ++it) {
        if (feasible(p, prob)) return true;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                Vec3 d = p[j] - p[i];
                double dist = d.norm();
                const Vec3 dir = dist < 1e-9 ? random_unit(rng) : Vec3(d / dist);
                const double hi = prob.config.pi(i, j) != 0 ? prob.d_mc : std::numeric_limits<double>::infinity();
                double move = 0.0;
                if (dist < prob.d_s) move = -(prob.d_s - dist + kRepairMargin);
                else if (dist > hi) move = dist - hi + kRepairMargin;
                p[i] += 0.5 * move * dir;
                p[j] -= 0.5 * move * dir;
            }
        }
        clamp_to_box(p, prob);
        const Vec2 off = ground_centroid(p) - prob.target_centroid;
        const double excess = off.norm() - prob.max_centroid_dist;
        if (excess > 0.0) {
            const Vec2 shift = -(excess + kRepairMargin) * off.normalized();
            for (Vec3& x : p) x.head<2>() += shift;
            clamp_to_box(p, prob);
        }
    }
    return feasible(p, prob);
}

}  // namespace

void FormationProblem::validate() const {
    const int n = config.size();
    if (n < 1) throw InvalidArgument("FormationProblem: empty team");
    if (static_cast<int>(fov_radii.size()) != n) throw InvalidArgument("FormationProblem: one fov radius per tracker");
    if (static_cast<int>(initial_positions.size()) != n)
        throw InvalidArgument("FormationProblem: one initial position per tracker");
    if (!(d_s < d_mc)) throw InvalidArgument("FormationProblem: d_s must be smaller than d_mc");
    if (!(box_min.array() < box_max.array()).all()) throw InvalidArgument("FormationProblem: empty box");
    if (!(max_centroid_dist > 0.0)) throw InvalidArgument("FormationProblem: E must be positive");
}

double coverage_objective(const Positions& positions, const FormationProblem& prob) {
    const int n = static_cast<int>(positions.size());
    if (static_cast<int>(prob.fov_radii.size()) != n) throw InvalidArgument("coverage_objective: size mismatch");
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = prob.fov_radii[i];
        total += r * r;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dist = (positions[i].head<2>() - positions[j].head<2>()).norm();
            const double gap = 2.0 * r - dist;
            if (gap > 0.0 || prob.literal_overlap) total -= 0.5 * gap * gap;
        }
    }
    return std::numbers::pi * total;
}

std::vector<std::string> constraint_violations(const Positions& p, const FormationProblem& prob, double tol) {
    std::vector<std::string> out;
    const int n = prob.config.size();
    if (static_cast<int>(p.size()) != n) {
        out.push_back("position count does not match team size");
        return out;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dist = (p[i] - p[j]).norm();
            std::ostringstream os;
            if (dist < prob.d_s - tol) {
                os << "pair (" << i << "," << j << ") at " << dist << " closer than d_s=" << prob.d_s;
                out.push_back(os.str());
            } else if (prob.config.pi(i, j) != 0 && dist > prob.d_mc + tol) {
                os << "linked pair (" << i << "," << j << ") at " << dist << " beyond d_mc=" << prob.d_mc;
                out.push_back(os.str());
            }
        }
        if ((p[i].array() < prob.box_min.array() - tol).any() || (p[i].array() > prob.box_max.array() + tol).any()) {
            std::ostringstream os;
            os << "tracker " << i << " outside the box";
            out.push_back(os.str());
        }
    }
    const double cd = (ground_centroid(p) - prob.target_centroid).norm();
    if (cd > prob.max_centroid_dist + tol) {
        std::ostringstream os;
        os << "team centroid " << cd << " from target centroid, limit " << prob.max_centroid_dist;
        out.push_back(os.str());
    }
    return out;
}

bool feasible(const Positions& positions, const FormationProblem& prob, double tol) {
    return constraint_violations(positions, prob, tol).empty();
}

FormationResult synthesize(const FormationProblem& prob, const AnnealingSchedule& schedule, std::uint64_t seed) {
    prob.validate();
    const int n = prob.config.size();
    std::mt19937_64 rng(seed);
    FormationResult result;

    Positions current = prob.initial_positions;
    if (!feasible(current, prob)) {
        result.repaired = true;
        bool ok = repair(current, prob, schedule.repair_iterations, rng);
        Positions best_attempt = current;
        const double spread = std::min(prob.max_centroid_dist, prob.d_mc);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int r = 0; !ok && r < schedule.repair_restarts; ++r) {
            current.assign(n, Vec3::Zero());
            for (Vec3& x : current) {
                x.head<2>() = prob.target_centroid + spread * Vec2(unit(rng), unit(rng));
                x.z() = 0.5 * (prob.box_min.z() + prob.box_max.z()) + 0.25 * (prob.box_max.z() - prob.box_min.z()) * unit(rng);
            }
            clamp_to_box(current, prob);
            ok = repair(current, prob, schedule.repair_iterations, rng);
        }
        if (!ok) throw FormationError("formation: no feasible layout found", best_attempt,
                                      constraint_violations(best_attempt, prob));
    }

    double f = coverage_objective(current, prob);
    result.initial_objective = f;
    Positions best = current;
    double best_f = f;
    double temperature = schedule.initial_temperature;
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int levels = std::max(1, schedule.temperature_levels);
    for (int level = 0; level < levels; ++level) {
        const double frac = levels == 1 ? 1.0 : static_cast<double>(level) / (levels - 1);
        const double sigma = schedule.sigma_start * std::pow(schedule.sigma_end / schedule.sigma_start, frac);
        std::normal_distribution<double> step(0.0, sigma);
        for (int q = 0; q < schedule.proposals_per_temperature; ++q) {
            const int i = pick(rng);
            const Vec3 saved = current[i];
            current[i] += Vec3(step(rng), step(rng), step(rng));
            if (!feasible(current, prob)) {
                current[i] = saved;
                continue;
            }
            const double fc = coverage_objective(current, prob);
            const double delta = fc - f;
            if (delta >= 0.0 || u01(rng) < std::exp(delta / temperature)) {
                f = fc;
                ++result.accepted_moves;
                if (f > best_f) {
                    best_f = f;
                    best = current;
                }
            } else {
                current[i] = saved;
            }
        }
        temperature *= schedule.cooling;
    }
    result.positions = std::move(best);
    result.objective = best_f;
    return result;
}

}  // namespace rmtt
