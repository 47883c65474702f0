#include "rmtt/team_configuration.hpp"

#include <queue>
#include <sstream>

namespace rmtt {

Adjacency adjacency_from_edges(int n, const std::vector<Edge>& edges) {
    Adjacency pi = Adjacency::Identity(n, n);
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InvalidArgument("bad edge");
        pi(i, j) = 1;
        pi(j, i) = 1;
    }
    return pi;
}

std::vector<Edge> edge_list(const Adjacency& pi) {
    std::vector<Edge> out;
    for (int i = 0; i < pi.rows(); ++i)
        for (int j = i + 1; j < pi.cols(); ++j)
            if (pi(i, j) != 0) out.emplace_back(i, j);
    return out;
}

int edge_count(const Adjacency& pi) { return static_cast<int>(edge_list(pi).size()); }

double edge_density(const Adjacency& pi) {
    const int n = static_cast<int>(pi.rows());
    if (n < 2) return 0.0;
    return static_cast<double>(edge_count(pi)) / (0.5 * n * (n - 1));
}

bool is_connected(const Adjacency& pi) {
    const int n = static_cast<int>(pi.rows());
    if (n == 0) return false;
    std::vector<bool> seen(n, false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    int reached = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v = 0; v < n; ++v) {
            if (v != u && !seen[v] && (pi(u, v) != 0 || pi(v, u) != 0)) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n;
}

int frobenius_distance_sq(const Adjacency& a, const Adjacency& b) {
    return (a - b).array().square().sum();
}

Adjacency line_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return adjacency_from_edges(n, edges);
}

MatX metropolis_weights(const Adjacency& pi) {
    const int n = static_cast<int>(pi.rows());
    VecX degree = VecX::Zero(n);
    for (auto [i, j] : edge_list(pi)) {
        degree(i) += 1.0;
        degree(j) += 1.0;
    }
    MatX a = MatX::Zero(n, n);
    for (auto [i, j] : edge_list(pi)) {
        const double w = 1.0 / (1.0 + std::max(degree(i), degree(j)));
        a(i, j) = w;
        a(j, i) = w;
    }
    for (int i = 0; i < n; ++i) a(i, i) = 1.0 - a.row(i).sum();
    return a;
}

TeamConfiguration line_configuration(int n) {
    TeamConfiguration c;
    c.pi = line_graph(n);
    c.abar = metropolis_weights(c.pi);
    return c;
}

std::string configuration_violation(const TeamConfiguration& config, double tol) {
    const auto& pi = config.pi;
    const auto& a = config.abar;
    const int n = config.size();
    std::ostringstream why;
    if (pi.cols() != n || a.rows() != n || a.cols() != n) return "dimension mismatch";
    for (int i = 0; i < n; ++i) {
        if (pi(i, i) != 1) return "pi diagonal must be 1";
        if (!(a(i, i) > 0.0)) return "abar diagonal must be positive";
        for (int j = 0; j < n; ++j) {
            if (pi(i, j) != 0 && pi(i, j) != 1) return "pi must be 0/1";
            if (pi(i, j) != pi(j, i)) return "pi must be symmetric";
            if (std::abs(a(i, j) - a(j, i)) > tol) return "abar must be symmetric";
            if (a(i, j) < -tol) return "abar must be non-negative";
            if (a(i, j) > tol && pi(i, j) == 0) {
                why << "abar(" << i << "," << j << ") outside pi support";
                return why.str();
            }
        }
        if (std::abs(a.row(i).sum() - 1.0) > tol) return "abar rows must sum to 1";
    }
    if (!is_connected(pi)) return "communication graph is disconnected";
    return {};
}

}  // namespace rmtt
