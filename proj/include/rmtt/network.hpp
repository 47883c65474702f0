#pragma once

#include "rmtt/fusion.hpp"
#include "rmtt/team_configuration.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace rmtt {

/// Configuration-generation strategies. The first four solve a mixed-integer
/// weight/topology design problem; the rest are comparison baselines.
enum class Strategy { RCGMC, TCGMC, RCAMC, TCAMC, Greedy, Random, None };

/// Objective of the continuous weight problem.
enum class Objective { RCGMC, TCGMC, RCAMC, TCAMC };

std::string_view to_string(Strategy s);
std::string_view to_string(Objective o);
Strategy strategy_from_string(std::string_view name);

bool is_team_centric(Strategy s);
bool is_robot_centric(Strategy s);
bool is_design_strategy(Strategy s);

/// Fusion rule a strategy is designed for; baselines use `baseline_rule`.
FusionRule fusion_rule_for(Strategy s, FusionRule baseline_rule);

/// Team-level objective matching a fusion rule (TCGMC for GMF, TCAMC for AMF).
Objective team_objective(FusionRule rule);

struct StrategyInput {
    int failed_tracker = 0;
    /// blk_covs[j][k]: covariance of tracker j's k-th T-GC (k < alpha). Tracker
    /// j's block-diagonal matrix is Blkdiag(blk_covs[j][0], ..., blk_covs[j][alpha-1]).
    std::vector<std::vector<Mat4>> blk_covs;
    int alpha = 1;
    TeamConfiguration previous;
    int edge_budget = 1;
    /// Fusion rule whose team objective drives the none/greedy/random baselines.
    FusionRule rule = FusionRule::GMF;
    /// Seed for the random baseline.
    std::uint64_t seed = 0;

    void validate() const;
};

struct SolverOptions {
    /// Lower bound on every supported entry of abar, diagonal included.
    double min_weight = 1e-3;
    /// Strictness margin of the connectivity LMI, re-verified after solving.
    double nu = 1e-6;
    /// Cap on the total number of Newton steps across all barrier stages.
    int max_iterations = 500;
    /// Inner stop: half the squared Newton decrement.
    double newton_tolerance = 1e-7;
    /// Outer stop: (#constraints) / t <= gap_tolerance * max(1, |f|).
    double gap_tolerance = 1e-9;
    double barrier_growth = 10.0;
    /// Relative tolerance under which two topologies' objectives tie.
    double tie_tolerance = 1e-7;
};

/// Raised when the weight solver cannot certify a solution. Carries the best
/// feasible iterate found.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, MatX best_abar, double best_objective)
        : std::runtime_error(what), best_abar(std::move(best_abar)), best_objective(best_objective) {}
    MatX best_abar;
    double best_objective;
};

/// Algebraic connectivity test: lambda_min(11^T / n + I - abar) > tol.
bool connectivity_lmi(const MatX& abar, double tol = 1e-9);

/// Every connected symmetric unit-diagonal 0/1 matrix differing from
/// `previous` in at most e unordered pairs, `previous` itself included (when
/// connected). Ordered by number of changed pairs, then lexicographically by
/// the toggled slots.
std::vector<Adjacency> enumerate_topologies(const Adjacency& previous, int e);

/// Symmetric doubly stochastic matrices supported on a graph, parametrised by
/// their off-diagonal edge weights x_e (diagonal = 1 - incident sum). The
/// feasible set is {x_e >= eps} intersected with {sum_{e at i} x_e <= 1 - eps}.
class WeightPolytope {
public:
    WeightPolytope(const Adjacency& pi, double min_weight);

    int nodes() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    /// Edge indices touching each node.
    const std::vector<std::vector<int>>& incident() const { return incident_; }
    double min_weight() const { return min_weight_; }
    bool empty() const;

    MatX to_matrix(const VecX& x) const;
    VecX from_matrix(const MatX& a) const;
    bool contains(const VecX& x, double tol = 1e-9) const;

    /// Chain rule from d f / d A_ij (all entries treated independently) to d f / d x_e.
    VecX edge_gradient(const MatX& matrix_gradient) const;

private:
    int n_;
    double min_weight_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incident_;
};

/// Objective value for a candidate weight matrix (smaller is better).
double evaluate_objective(Objective objective, const MatX& abar, const StrategyInput& inp);

/// d f / d A_ij treating all entries as independent.
MatX objective_matrix_gradient(Objective objective, const MatX& abar, const StrategyInput& inp);

struct WeightSolution {
    MatX abar;
    double objective = 0.0;
    int iterations = 0;
};

/// Weight problem on a fixed topology, solved by a log-barrier interior point
/// method with Newton inner steps started from Metropolis weights.
WeightSolution solve_weights(const Adjacency& pi, Objective objective, const StrategyInput& inp,
                             const SolverOptions& options = {});

struct GeneratedConfiguration {
    TeamConfiguration config;
    double objective = 0.0;
    std::size_t candidates = 0;
};

GeneratedConfiguration generate_configuration(Strategy strategy, const StrategyInput& inp,
                                              const SolverOptions& options = {});

struct TraceBound {
    double upper = 0.0;  // Tr(P_bar)
    double value = 0.0;  // sum of traces of the GMF-fused covariances
};

/// Upper bound on the summed GMF covariance traces, using the tight
/// epigraph P_bar = Delta_bar^{-1}.
TraceBound trace_bound_gap(const MatX& abar, const StrategyInput& inp);

/// Same bound for a caller-supplied epigraph: one 4 alpha x 4 alpha block
/// per tracker, each satisfying [P_i I; I Delta_i] >= 0 (checked).
TraceBound trace_bound_gap(const MatX& abar, const StrategyInput& inp, const std::vector<MatX>& epigraph);

/// Delta_i = sum_j abar_ij Blkdiag(P~^j)^{-1} as a dense 4 alpha x 4 alpha matrix.
MatX fused_information(const MatX& abar, const StrategyInput& inp, int tracker);

}  // namespace rmtt
