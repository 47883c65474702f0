#pragma once

#include "rmtt/team_configuration.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmtt {

using Positions = std::vector<Vec3>;

struct FormationProblem {
    TeamConfiguration config;
    std::vector<double> fov_radii;  // d_sen per tracker
    double d_s = 10.0;
    double d_mc = 25.0;
    Vec3 box_min = Vec3(-50.0, -50.0, 0.0);
    Vec3 box_max = Vec3(50.0, 100.0, 100.0);
    Vec2 target_centroid = Vec2::Zero();
    double max_centroid_dist = 30.0;  // E
    Positions initial_positions;
    /// Use the overlap penalty exactly as typeset, without the clamp at 2 d_sen.
    bool literal_overlap = false;

    void validate() const;
};

struct AnnealingSchedule {
    double initial_temperature = 100.0;
    double cooling = 0.97;
    int proposals_per_temperature = 200;
    int temperature_levels = 150;
    double sigma_start = 5.0;
    double sigma_end = 0.1;
    int repair_iterations = 2000;
    int repair_restarts = 20;
};

/// pi * [sum_i d_i^2 - sum_{i != j} (2 d_i - |X_i - X_j|)^2 / 2] on the (x, y)
/// plane. The pair term vanishes once the discs stop overlapping unless
/// `literal_overlap` is set.
double coverage_objective(const Positions& positions, const FormationProblem& prob);

/// One line per violated constraint; empty when feasible.
std::vector<std::string> constraint_violations(const Positions& positions, const FormationProblem& prob,
                                               double tol = 1e-9);

bool feasible(const Positions& positions, const FormationProblem& prob, double tol = 1e-9);

class FormationError : public std::runtime_error {
public:
    FormationError(const std::string& what, Positions best, std::vector<std::string> report)
        : std::runtime_error(what), best(std::move(best)), report(std::move(report)) {}
    Positions best;
    std::vector<std::string> report;
};

struct FormationResult {
    Positions positions;
    double objective = 0.0;
    double initial_objective = 0.0;
    bool repaired = false;
    int accepted_moves = 0;
};

/// Feasibility-preserving simulated annealing from the initial layout (or a
/// repaired version of it).
FormationResult synthesize(const FormationProblem& prob, const AnnealingSchedule& schedule, std::uint64_t seed);

}  // namespace rmtt
