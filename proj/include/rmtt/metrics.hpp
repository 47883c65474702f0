#pragma once

#include "rmtt/linalg.hpp"

#include <span>
#include <vector>

namespace rmtt {

using PointSet = std::vector<Vec2>;

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
/// Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const MatX& cost);

/// Optimal sub-pattern assignment distance with cutoff c and order p.
/// Two empty sets are at distance 0.
double ospa(const PointSet& x, const PointSet& y, double c, double p);

/// sum_k (est_k - truth_k)^2 / sum_k truth_k^2. Throws if the truth is all zero.
double nmse(std::span<const double> estimates, std::span<const double> truth);

}  // namespace rmtt
