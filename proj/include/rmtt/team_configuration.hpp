#pragma once

#include "rmtt/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rmtt {

using Adjacency = Eigen::MatrixXi;
using Edge = std::pair<int, int>;

/// Communication graph plus the fusion/consensus weight matrix.
///
/// `pi` is symmetric 0/1 with a unit diagonal. `abar` is symmetric, doubly
/// stochastic, has a strictly positive diagonal and is zero wherever pi is.
struct TeamConfiguration {
    Adjacency pi;
    MatX abar;

    int size() const { return static_cast<int>(pi.rows()); }
};

/// Symmetric 0/1 matrix with unit diagonal and the given undirected edges.
Adjacency adjacency_from_edges(int n, const std::vector<Edge>& edges);

/// Off-diagonal edges (i < j) in lexicographic order.
std::vector<Edge> edge_list(const Adjacency& pi);

int edge_count(const Adjacency& pi);

/// |E| / (n (n - 1) / 2); 0 for a single node.
double edge_density(const Adjacency& pi);

/// Breadth-first reachability over the off-diagonal support.
bool is_connected(const Adjacency& pi);

/// Squared Frobenius distance between two adjacency matrices.
int frobenius_distance_sq(const Adjacency& a, const Adjacency& b);

/// Path 0-1-...-(n-1).
Adjacency line_graph(int n);

/// Metropolis-Hastings weights 1 / (1 + max(d_i, d_j)) on the support of pi.
MatX metropolis_weights(const Adjacency& pi);

TeamConfiguration line_configuration(int n);

/// Empty string when every configuration invariant holds, otherwise a
/// description of the first violation.
std::string configuration_violation(const TeamConfiguration& config, double tol = 1e-9);

}  // namespace rmtt
