#pragma once

#include "rmtt/linalg.hpp"

#include <cstddef>
#include <vector>

namespace rmtt {

/// One weighted Gaussian term of a PHD; the state is [px, py, vx, vy].
struct GaussianComponent {
    double weight = 0.0;
    Vec4 mean = Vec4::Zero();
    Mat4 covariance = Mat4::Identity();
};

/// A PHD represented as an ordered list of weighted Gaussians. May be empty.
using GaussianMixture = std::vector<GaussianComponent>;

/// Weight non-negative, covariance symmetric within 1e-10 and positive definite.
bool is_valid(const GaussianComponent& c);

/// Expected number of targets: the sum of the component weights.
double expected_cardinality(const GaussianMixture& m);

/// Keeps the components with weight >= threshold, preserving order.
GaussianMixture prune(const GaussianMixture& m, double threshold);

/// (mu_a - mu_b)^T P_b^{-1} (mu_a - mu_b). The second argument supplies the covariance.
double mahalanobis_sq(const GaussianComponent& a, const GaussianComponent& b);

/// Greedy moment-matching merge.
///
/// Repeatedly takes the heaviest unmerged component and absorbs every unmerged
/// component whose Mahalanobis form (mu_j - mu_l)^T P_l^{-1} (mu_j - mu_l) is
/// at most `dist_threshold` squared. Clusters are emitted in
/// the input order of their leading component, so a mixture with nothing to
/// merge comes back unchanged.
GaussianMixture merge(const GaussianMixture& m, double dist_threshold);

/// Moment-matched collapse of a weighted set of components.
GaussianComponent moment_match(const GaussianMixture& group);

/// Number of target-likely components: round(sum of weights), half rounds up.
std::size_t tgc_count(const GaussianMixture& m);

/// Indices of the target-likely components in rank order (heaviest first,
/// ties by list position).
std::vector<std::size_t> tgc_indices(const GaussianMixture& m);

/// The round(E|X|) heaviest components, heaviest first.
GaussianMixture select_tgcs(const GaussianMixture& m);

/// Keeps at most max_components of the heaviest components, preserving order.
GaussianMixture cap(const GaussianMixture& m, std::size_t max_components);

}  // namespace rmtt
