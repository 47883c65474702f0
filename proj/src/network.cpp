#include "rmtt/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace rmtt {

namespace {

constexpr Strategy kAllStrategies[] = {Strategy::RCGMC,  Strategy::TCGMC,  Strategy::RCAMC, Strategy::TCAMC,
                                       Strategy::Greedy, Strategy::Random, Strategy::None};

/// Per-slot covariance/information blocks and their traces.
struct Prepared {
    int n = 0;
    int alpha = 0;
    int failed = 0;
    std::vector<std::vector<Mat4>> info;  // info[j][k] = (P^j_k)^{-1}
    VecX trace_cov;                       // sum_k Tr(P^j_k)
    VecX trace_info;                      // sum_k Tr((P^j_k)^{-1})
};

Prepared prepare(const StrategyInput& inp) {
    Prepared p;
    p.n = static_cast<int>(inp.blk_covs.size());
    p.alpha = inp.alpha;
    p.failed = inp.failed_tracker;
    p.info.resize(p.n);
    p.trace_cov = VecX::Zero(p.n);
    p.trace_info = VecX::Zero(p.n);
    for (int j = 0; j < p.n; ++j) {
        for (int k = 0; k < p.alpha; ++k) {
            const Mat4& cov = inp.blk_covs[j][k];
            p.info[j].push_back(spd_inverse(cov, "blk_covs"));
            p.trace_cov(j) += cov.trace();
            p.trace_info(j) += p.info[j].back().trace();
        }
    }
    return p;
}

Mat4 fused_block(const Prepared& p, const MatX& abar, int i, int k) {
    Mat4 m = Mat4::Zero();
    for (int j = 0; j < p.n; ++j)
        if (abar(i, j) != 0.0) m += abar(i, j) * p.info[j][k];
    return m;
}

double objective_value(Objective o, const Prepared& p, const MatX& abar) {
    switch (o) {
        case Objective::RCGMC:
            return -abar.row(p.failed).dot(p.trace_info) / p.alpha;
        case Objective::RCAMC:
            return abar.row(p.failed).dot(p.trace_cov) / p.alpha;
        case Objective::TCAMC:
            return (abar * p.trace_cov).sum();
        case Objective::TCGMC: {
            double total = 0.0;
            for (int i = 0; i < p.n; ++i)
                for (int k = 0; k < p.alpha; ++k) total += spd_inverse(fused_block(p, abar, i, k), "fused information").trace();
            return total;
        }
    }
    return 0.0;
}

MatX objective_gradient(Objective o, const Prepared& p, const MatX& abar) {
    MatX g = MatX::Zero(p.n, p.n);
    switch (o) {
        case Objective::RCGMC:
            g.row(p.failed) = -p.trace_info.transpose() / p.alpha;
            break;
        case Objective::RCAMC:
            g.row(p.failed) = p.trace_cov.transpose() / p.alpha;
            break;
        case Objective::TCAMC:
            g.rowwise() = p.trace_cov.transpose();
            break;
        case Objective::TCGMC:
            for (int i = 0; i < p.n; ++i) {
                for (int k = 0; k < p.alpha; ++k) {
                    const Mat4 inv = spd_inverse(fused_block(p, abar, i, k), "fused information");
                    const Mat4 sq = inv * inv;
                    for (int j = 0; j < p.n; ++j) g(i, j) -= (sq.cwiseProduct(p.info[j][k])).sum();
                }
            }
            break;
    }
    return g;
}

/// Lexicographic comparison of two edge lists.
bool edges_before(const Adjacency& a, const Adjacency& b) {
    const auto ea = edge_list(a);
    const auto eb = edge_list(b);
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

/// True when candidate (value, pi) beats the incumbent under the tie rules.
bool better(double value, const Adjacency& pi, double best_value, const Adjacency& best_pi, double tie_tol) {
    const double tol = tie_tol * std::max(1.0, std::max(std::abs(value), std::abs(best_value)));
    if (value < best_value - tol) return true;
    if (value > best_value + tol) return false;
    const int ec = edge_count(pi), eb = edge_count(best_pi);
    if (ec != eb) return ec < eb;
    return edges_before(pi, best_pi);
}

std::vector<Edge> all_slots(int n) {
    std::vector<Edge> slots;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    return slots;
}

void verify(const TeamConfiguration& config, const SolverOptions& options, double objective) {
    const std::string why = configuration_violation(config);
    if (!why.empty()) throw SolverError("generated configuration invalid: " + why, config.abar, objective);
    if (config.size() > 1 && !connectivity_lmi(config.abar, options.nu))
        throw SolverError("generated configuration fails the connectivity LMI", config.abar, objective);
}

/// Hessian of the objective in edge coordinates (zero for the linear ones).
MatX objective_edge_hessian(Objective objective, const Prepared& p, const WeightPolytope& poly, const MatX& abar) {
    const auto& edges = poly.edges();
    const auto& incident = poly.incident();
    const int m = static_cast<int>(edges.size());
    MatX h = MatX::Zero(m, m);
    if (objective != Objective::TCGMC) return h;
    for (int i = 0; i < p.n; ++i) {
        if (incident[i].empty()) continue;
        std::vector<int> cols{i};
        for (int e : incident[i]) cols.push_back(edges[e].first == i ? edges[e].second : edges[e].first);
        const int c = static_cast<int>(cols.size());
        // hr(a, b) = d^2 f / dA_{i,cols[a]} dA_{i,cols[b]} = 2 sum_k Tr(L_b M^-1 L_a M^-2)
        MatX hr = MatX::Zero(c, c);
        for (int k = 0; k < p.alpha; ++k) {
            const Mat4 inv = spd_inverse(fused_block(p, abar, i, k), "fused information");
            const Mat4 inv2 = inv * inv;
            for (int a = 0; a < c; ++a) {
                const Mat4 ca = inv * p.info[cols[a]][k] * inv2;
                for (int b = a; b < c; ++b) {
                    const double v = 2.0 * (p.info[cols[b]][k].cwiseProduct(ca.transpose())).sum();
                    hr(a, b) += v;
                    if (b != a) hr(b, a) += v;
                }
            }
        }
        // Edge e at i with other end o moves A_io by +1 and A_ii by -1.
        for (std::size_t u = 0; u < incident[i].size(); ++u)
            for (std::size_t v = 0; v < incident[i].size(); ++v)
                h(incident[i][u], incident[i][v]) += hr(u + 1, v + 1) - hr(u + 1, 0) - hr(0, v + 1) + hr(0, 0);
    }
    return symmetrize(h);
}

}  // namespace

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::RCGMC: return "RCGMC";
        case Strategy::TCGMC: return "TCGMC";
        case Strategy::RCAMC: return "RCAMC";
        case Strategy::TCAMC: return "TCAMC";
        case Strategy::Greedy: return "greedy";
        case Strategy::Random: return "random";
        case Strategy::None: return "none";
    }
    return "?";
}

std::string_view to_string(Objective o) {
    switch (o) {
        case Objective::RCGMC: return "RCGMC";
        case Objective::TCGMC: return "TCGMC";
        case Objective::RCAMC: return "RCAMC";
        case Objective::TCAMC: return "TCAMC";
    }
    return "?";
}

Strategy strategy_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Strategy s : kAllStrategies) {
        std::string candidate(to_string(s));
        std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (candidate == lower) return s;
    }
    throw InvalidArgument("unknown strategy: " + std::string(name));
}

bool is_team_centric(Strategy s) { return s == Strategy::TCGMC || s == Strategy::TCAMC; }
bool is_robot_centric(Strategy s) { return s == Strategy::RCGMC || s == Strategy::RCAMC; }
bool is_design_strategy(Strategy s) { return is_team_centric(s) || is_robot_centric(s); }

FusionRule fusion_rule_for(Strategy s, FusionRule baseline_rule) {
    switch (s) {
        case Strategy::RCGMC:
        case Strategy::TCGMC: return FusionRule::GMF;
        case Strategy::RCAMC:
        case Strategy::TCAMC: return FusionRule::AMF;
        default: return baseline_rule;
    }
}

Objective team_objective(FusionRule rule) { return rule == FusionRule::GMF ? Objective::TCGMC : Objective::TCAMC; }

void StrategyInput::validate() const {
    const int n = static_cast<int>(blk_covs.size());
    if (n < 1) throw InvalidArgument("StrategyInput: no trackers");
    if (alpha < 1) throw InvalidArgument("StrategyInput: alpha must be >= 1");
    if (edge_budget < 1) throw InvalidArgument("StrategyInput: edge_budget must be >= 1");
    if (failed_tracker < 0 || failed_tracker >= n) throw InvalidArgument("StrategyInput: failed_tracker out of range");
    if (previous.size() != n || previous.abar.rows() != n)
        throw InvalidArgument("StrategyInput: previous configuration has the wrong size");
    for (const auto& blocks : blk_covs) {
        if (static_cast<int>(blocks.size()) < alpha) throw InvalidArgument("StrategyInput: fewer blocks than alpha");
        for (int k = 0; k < alpha; ++k)
            if (!is_positive_definite(blocks[k]) || !is_symmetric(blocks[k], 1e-8))
                throw InvalidArgument("StrategyInput: blk_covs must be symmetric positive definite");
    }
}

bool connectivity_lmi(const MatX& abar, double tol) {
    const auto n = abar.rows();
    if (n == 0) return false;
    const MatX m = MatX::Constant(n, n, 1.0 / static_cast<double>(n)) + MatX::Identity(n, n) - abar;
    return min_eigenvalue(m) > tol;
}

std::vector<Adjacency> enumerate_topologies(const Adjacency& previous, int e) {
    if (e < 1) throw InvalidArgument("enumerate_topologies: e must be >= 1");
    const int n = static_cast<int>(previous.rows());
    const auto slots = all_slots(n);
    const int m = static_cast<int>(slots.size());
    const int budget = std::min(e, m);
    std::vector<Adjacency> out;
    std::vector<int> chosen;
    // Combinations of `size` toggled slots in lexicographic order.
    for (int size = 0; size <= budget; ++size) {
        chosen.resize(size);
        std::iota(chosen.begin(), chosen.end(), 0);
        while (true) {
            Adjacency pi = previous;
            for (int s : chosen) {
                auto [i, j] = slots[s];
                pi(i, j) = pi(j, i) = 1 - pi(i, j);
            }
            if (is_connected(pi)) out.push_back(std::move(pi));
            int pos = size - 1;
            while (pos >= 0 && chosen[pos] == m - size + pos) --pos;
            if (pos < 0) break;
            ++chosen[pos];
            for (int q = pos + 1; q < size; ++q) chosen[q] = chosen[q - 1] + 1;
        }
    }
    return out;
}

WeightPolytope::WeightPolytope(const Adjacency& pi, double min_weight)
    : n_(static_cast<int>(pi.rows())), min_weight_(min_weight), edges_(edge_list(pi)), incident_(n_) {
    if (pi.rows() != pi.cols()) throw InvalidArgument("WeightPolytope: pi must be square");
    if (!(min_weight > 0.0)) throw InvalidArgument("WeightPolytope: min_weight must be positive");
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        incident_[edges_[e].first].push_back(e);
        incident_[edges_[e].second].push_back(e);
    }
}

bool WeightPolytope::empty() const {
    for (const auto& inc : incident_)
        if (static_cast<double>(inc.size() + 1) * min_weight_ > 1.0 + 1e-12) return true;
    return false;
}

MatX WeightPolytope::to_matrix(const VecX& x) const {
    MatX a = MatX::Zero(n_, n_);
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        a(edges_[e].first, edges_[e].second) = x(e);
        a(edges_[e].second, edges_[e].first) = x(e);
    }
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int e : incident_[i]) s += x(e);
        a(i, i) = 1.0 - s;
    }
    return a;
}

VecX WeightPolytope::from_matrix(const MatX& a) const {
    VecX x(edges_.size());
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e)
        x(e) = 0.5 * (a(edges_[e].first, edges_[e].second) + a(edges_[e].second, edges_[e].first));
    return x;
}

bool WeightPolytope::contains(const VecX& x, double tol) const {
    if (x.size() != static_cast<Eigen::Index>(edges_.size())) return false;
    for (int e = 0; e < x.size(); ++e)
        if (x(e) < min_weight_ - tol) return false;
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int e : incident_[i]) s += x(e);
        if (s > 1.0 - min_weight_ + tol) return false;
    }
    return true;
}

VecX WeightPolytope::edge_gradient(const MatX& g) const {
    VecX out(edges_.size());
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        auto [i, j] = edges_[e];
        out(e) = g(i, j) + g(j, i) - g(i, i) - g(j, j);
    }
    return out;
}

double evaluate_objective(Objective objective, const MatX& abar, const StrategyInput& inp) {
    return objective_value(objective, prepare(inp), abar);
}

MatX objective_matrix_gradient(Objective objective, const MatX& abar, const StrategyInput& inp) {
    return objective_gradient(objective, prepare(inp), abar);
}

WeightSolution solve_weights(const Adjacency& pi, Objective objective, const StrategyInput& inp,
                             const SolverOptions& options) {
    inp.validate();
    const int n = static_cast<int>(inp.blk_covs.size());
    if (pi.rows() != n || pi.cols() != n) throw InvalidArgument("solve_weights: pi has the wrong size");
    if (!is_connected(pi)) throw InvalidArgument("solve_weights: support graph is disconnected");
    const WeightPolytope poly(pi, options.min_weight);
    if (poly.empty()) throw InvalidArgument("solve_weights: minimum edge weight infeasible for this degree");
    const Prepared prep = prepare(inp);
    const auto& edges = poly.edges();
    const auto& incident = poly.incident();
    const int m = static_cast<int>(edges.size());
    const double eps = options.min_weight;

    auto value = [&](const VecX& x) { return objective_value(objective, prep, poly.to_matrix(x)); };
    // Slacks of x_e >= eps (first m) and sum_{e at i} x_e <= 1 - eps (next n).
    auto slacks = [&](const VecX& x) {
        VecX sl(m + n);
        for (int e = 0; e < m; ++e) sl(e) = x(e) - eps;
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int e : incident[i]) sum += x(e);
            sl(m + i) = 1.0 - eps - sum;
        }
        return sl;
    };

    VecX x = poly.from_matrix(metropolis_weights(pi));
    WeightSolution sol;
    if (m == 0) {
        sol.abar = poly.to_matrix(x);
        sol.objective = value(x);
        return sol;
    }
    if ((slacks(x).array() <= 0.0).any()) throw InvalidArgument("solve_weights: feasible set has no interior");

    // Log-barrier interior point: minimise t f(x) - sum ln(slack) by damped
    // Newton steps, then grow t until the duality-gap bound (m + n) / t is small.
    const double constraints = static_cast<double>(m + n);
    double f = value(x);
    double t = constraints / std::max(1.0, std::abs(f));
    int newton_steps = 0;
    bool converged = false;
    auto barrier = [&](const VecX& at, double tt, double& fv) {
        const VecX sl = slacks(at);
        if ((sl.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
        fv = value(at);
        return tt * fv - sl.array().log().sum();
    };
    while (newton_steps < options.max_iterations) {
        for (; newton_steps < options.max_iterations; ++newton_steps) {
            const MatX a = poly.to_matrix(x);
            const VecX sl = slacks(x);
            VecX grad = t * poly.edge_gradient(objective_gradient(objective, prep, a));
            MatX hess = t * objective_edge_hessian(objective, prep, poly, a);
            for (int e = 0; e < m; ++e) {
                grad(e) -= 1.0 / sl(e);
                hess(e, e) += 1.0 / (sl(e) * sl(e));
            }
            for (int i = 0; i < n; ++i) {
                const double inv = 1.0 / sl(m + i), inv2 = inv * inv;
                for (int e : incident[i]) {
                    grad(e) += inv;
                    for (int e2 : incident[i]) hess(e, e2) += inv2;
                }
            }
            Eigen::LDLT<MatX> ldlt(symmetrize(hess));
            VecX step = -ldlt.solve(grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) step = -grad;
            const double decrement = -grad.dot(step);
            // Below the second bound the line search only sees rounding noise in t f.
            if (decrement <= 2.0 * std::max(options.newton_tolerance, 1e-10 * t * std::abs(f))) break;
            double fv = 0.0;
            const double phi = barrier(x, t, fv);
            double alpha = 1.0;
            double f_try = 0.0;
            while (alpha > 1e-10) {
                const double phi_try = barrier(x + alpha * step, t, f_try);
                if (phi_try <= phi - 0.25 * alpha * decrement) break;
                alpha *= 0.5;
            }
            if (alpha <= 1e-10) break;
            x += alpha * step;
            f = f_try;
        }
        if (constraints / t <= options.gap_tolerance * std::max(1.0, std::abs(f))) {
            converged = true;
            break;
        }
        t *= options.barrier_growth;
    }

    sol.abar = poly.to_matrix(x);
    sol.objective = value(x);
    sol.iterations = newton_steps;
    if (!converged) {
        std::ostringstream os;
        os << "solve_weights(" << to_string(objective) << ") did not converge after " << newton_steps << " Newton steps";
        throw SolverError(os.str(), sol.abar, sol.objective);
    }
    return sol;
}

GeneratedConfiguration generate_configuration(Strategy strategy, const StrategyInput& inp, const SolverOptions& options) {
    inp.validate();
    const Adjacency& prev = inp.previous.pi;
    if (!is_connected(prev)) throw InvalidArgument("generate_configuration: previous configuration is disconnected");

    GeneratedConfiguration out;
    auto finish = [&](const Adjacency& pi, Objective o) {
        const WeightSolution sol = solve_weights(pi, o, inp, options);
        out.config = TeamConfiguration{pi, sol.abar};
        out.objective = sol.objective;
    };

    if (is_design_strategy(strategy)) {
        const Objective o = strategy == Strategy::RCGMC   ? Objective::RCGMC
                            : strategy == Strategy::TCGMC ? Objective::TCGMC
                            : strategy == Strategy::RCAMC ? Objective::RCAMC
                                                          : Objective::TCAMC;
        const auto candidates = enumerate_topologies(prev, inp.edge_budget);
        out.candidates = candidates.size();
        bool have = false;
        for (const Adjacency& pi : candidates) {
            if (WeightPolytope(pi, options.min_weight).empty()) continue;
            const WeightSolution sol = solve_weights(pi, o, inp, options);
            if (!have || better(sol.objective, pi, out.objective, out.config.pi, options.tie_tolerance)) {
                out.config = TeamConfiguration{pi, sol.abar};
                out.objective = sol.objective;
                have = true;
            }
        }
        if (!have) throw InvalidArgument("generate_configuration: no feasible candidate topology");
    } else if (strategy == Strategy::None) {
        out.candidates = 1;
        finish(prev, team_objective(inp.rule));
    } else if (strategy == Strategy::Random) {
        const int n = static_cast<int>(prev.rows());
        auto slots = all_slots(n);
        std::mt19937_64 rng(inp.seed);
        Adjacency chosen = prev;
        const int toggles = std::min<int>(inp.edge_budget, static_cast<int>(slots.size()));
        for (int attempt = 0; attempt < 1000 && toggles > 0; ++attempt) {
            std::shuffle(slots.begin(), slots.end(), rng);
            Adjacency pi = prev;
            for (int s = 0; s < toggles; ++s) {
                auto [i, j] = slots[s];
                pi(i, j) = pi(j, i) = 1 - pi(i, j);
            }
            if (is_connected(pi) && !WeightPolytope(pi, options.min_weight).empty()) {
                chosen = pi;
                break;
            }
        }
        out.candidates = 1;
        finish(chosen, team_objective(inp.rule));
    } else {  // greedy
        const Objective o = team_objective(inp.rule);
        bool have = false;
        for (auto [i, j] : all_slots(static_cast<int>(prev.rows()))) {
            if (prev(i, j) != 0) continue;
            Adjacency pi = prev;
            pi(i, j) = pi(j, i) = 1;
            if (WeightPolytope(pi, options.min_weight).empty()) continue;
            ++out.candidates;
            const WeightSolution sol = solve_weights(pi, o, inp, options);
            if (!have || better(sol.objective, pi, out.objective, out.config.pi, options.tie_tolerance)) {
                out.config = TeamConfiguration{pi, sol.abar};
                out.objective = sol.objective;
                have = true;
            }
        }
        if (!have) {
            out.candidates = 1;
            finish(prev, o);
        }
    }
    verify(out.config, options, out.objective);
    return out;
}

MatX fused_information(const MatX& abar, const StrategyInput& inp, int tracker) {
    const int alpha = inp.alpha;
    MatX delta = MatX::Zero(4 * alpha, 4 * alpha);
    for (int j = 0; j < static_cast<int>(inp.blk_covs.size()); ++j) {
        if (abar(tracker, j) == 0.0) continue;
        MatX blk = MatX::Zero(4 * alpha, 4 * alpha);
        for (int k = 0; k < alpha; ++k) blk.block<4, 4>(4 * k, 4 * k) = inp.blk_covs[j][k];
        delta += abar(tracker, j) * spd_inverse(blk, "blk_covs");
    }
    return symmetrize(delta);
}

TraceBound trace_bound_gap(const MatX& abar, const StrategyInput& inp) {
    std::vector<MatX> epigraph;
    for (int i = 0; i < static_cast<int>(inp.blk_covs.size()); ++i)
        epigraph.push_back(spd_inverse(fused_information(abar, inp, i), "fused information"));
    return trace_bound_gap(abar, inp, epigraph);
}

TraceBound trace_bound_gap(const MatX& abar, const StrategyInput& inp, const std::vector<MatX>& epigraph) {
    inp.validate();
    const int n = static_cast<int>(inp.blk_covs.size());
    if (static_cast<int>(epigraph.size()) != n) throw InvalidArgument("trace_bound_gap: one epigraph block per tracker");
    TraceBound out;
    for (int i = 0; i < n; ++i) {
        const MatX delta = fused_information(abar, inp, i);
        const MatX& pbar = epigraph[i];
        if (pbar.rows() != delta.rows() || pbar.cols() != delta.cols())
            throw InvalidArgument("trace_bound_gap: epigraph block has the wrong size");
        // [P I; I Delta] >= 0 with Delta > 0 iff P - Delta^{-1} >= 0.
        const MatX schur = pbar - spd_inverse(delta, "fused information");
        if (min_eigenvalue(schur) < -1e-9 * std::max(1.0, pbar.cwiseAbs().maxCoeff()))
            throw InvalidArgument("trace_bound_gap: epigraph violates the Schur LMI");
        out.upper += pbar.trace();

        for (int k = 0; k < inp.alpha; ++k) {
            std::vector<WeightedComponent> parts;
            for (int j = 0; j < n; ++j)
                if (abar(i, j) > 0.0) parts.push_back({GaussianComponent{1.0, Vec4::Zero(), inp.blk_covs[j][k]}, abar(i, j)});
            out.value += gmf_component_product(parts).covariance.trace();
        }
    }
    return out;
}

}  // namespace rmtt
