#include "rmtt/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmtt {

namespace {

std::vector<std::size_t> rank_by_weight(const GaussianMixture& m) {
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return m[a].weight > m[b].weight;
    });
    return order;
}

}  // namespace

bool is_valid(const GaussianComponent& c) {
    return c.weight >= 0.0 && std::isfinite(c.weight) && c.mean.allFinite() &&
           is_symmetric(c.covariance, 1e-10) && is_positive_definite(c.covariance);
}

double expected_cardinality(const GaussianMixture& m) {
    double sum = 0.0;
    for (const auto& c : m) sum += c.weight;
    return sum;
}

GaussianMixture prune(const GaussianMixture& m, double threshold) {
    if (threshold < 0.0) throw InvalidArgument("prune threshold must be non-negative");
    GaussianMixture out;
    out.reserve(m.size());
    std::copy_if(m.begin(), m.end(), std::back_inserter(out),
                 [&](const GaussianComponent& c) { return c.weight >= threshold; });
    return out;
}

double mahalanobis_sq(const GaussianComponent& a, const GaussianComponent& b) {
    Eigen::LLT<Mat4> llt(b.covariance);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("mahalanobis covariance");
    const Vec4 diff = a.mean - b.mean;
    return std::max(0.0, diff.dot(llt.solve(diff)));
}

GaussianComponent moment_match(const GaussianMixture& group) {
    GaussianComponent out;
    out.weight = expected_cardinality(group);
    if (group.empty()) return out;
    if (!(out.weight > 0.0)) {
        out.mean = group.front().mean;
        out.covariance = group.front().covariance;
        return out;
    }
    Vec4 mean = Vec4::Zero();
    for (const auto& c : group) mean += c.weight * c.mean;
    mean /= out.weight;
    Mat4 cov = Mat4::Zero();
    for (const auto& c : group) {
        const Vec4 d = c.mean - mean;
        cov += c.weight * (c.covariance + d * d.transpose());
    }
    out.mean = mean;
    out.covariance = symmetrize(cov / out.weight);
    return out;
}

GaussianMixture merge(const GaussianMixture& m, double dist_threshold) {
    if (dist_threshold < 0.0) throw InvalidArgument("merge threshold must be non-negative");
    const double gate = dist_threshold * dist_threshold;
    const auto order = rank_by_weight(m);
    std::vector<bool> used(m.size(), false);
    std::vector<std::pair<std::size_t, GaussianComponent>> clusters;

    for (std::size_t leader : order) {
        if (used[leader]) continue;
        Eigen::LLT<Mat4> llt(m[leader].covariance);
        if (llt.info() != Eigen::Success) throw NotPositiveDefinite("merge leader covariance");
        GaussianMixture group;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (used[j]) continue;
            const Vec4 diff = m[j].mean - m[leader].mean;
            if (j == leader || diff.dot(llt.solve(diff)) <= gate) {
                group.push_back(m[j]);
                used[j] = true;
            }
        }
        clusters.emplace_back(leader, group.size() == 1 ? group.front() : moment_match(group));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    GaussianMixture out;
    out.reserve(clusters.size());
    for (auto& [idx, c] : clusters) out.push_back(std::move(c));
    return out;
}

std::size_t tgc_count(const GaussianMixture& m) {
    const double card = expected_cardinality(m);
    return static_cast<std::size_t>(std::max(0.0, std::floor(card + 0.5)));
}

std::vector<std::size_t> tgc_indices(const GaussianMixture& m) {
    auto order = rank_by_weight(m);
    order.resize(std::min(order.size(), tgc_count(m)));
    return order;
}

GaussianMixture select_tgcs(const GaussianMixture& m) {
    GaussianMixture out;
    for (std::size_t i : tgc_indices(m)) out.push_back(m[i]);
    return out;
}

GaussianMixture cap(const GaussianMixture& m, std::size_t max_components) {
    if (m.size() <= max_components) return m;
    auto order = rank_by_weight(m);
    order.resize(max_components);
    std::sort(order.begin(), order.end());
    GaussianMixture out;
    out.reserve(order.size());
    for (std::size_t i : order) out.push_back(m[i]);
    return out;
}

}  // namespace rmtt
