#pragma once

#include "rmtt/gaussian_mixture.hpp"
#include "rmtt/team_configuration.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace rmtt {

/// Normalised, non-negative fusion weights, one per participating tracker.
struct FusionWeights {
    std::vector<double> weights;

    /// Throws InvalidArgument unless every weight is >= 0 and they sum to 1 within 1e-9.
    void validate() const;
};

struct WeightedComponent {
    GaussianComponent component;
    double omega = 0.0;
};

enum class FusionRule { GMF, AMF };

std::string_view to_string(FusionRule rule);
FusionRule fusion_rule_from_string(std::string_view name);

/// Geometric-mean (generalised covariance intersection) product of one
/// component from each participant.
///
/// Information form: P^{-1} = sum w_j P_j^{-1},  P^{-1} mu = sum w_j P_j^{-1} mu_j.
/// Weight: K prod_j a_j^{w_j} sqrt(|2 pi P_j / w_j| / |2 pi P_j|^{w_j}) with
/// K = exp(K~ - K_bar) evaluated in log space. Every w_j must be positive.
GaussianComponent gmf_component_product(std::span<const WeightedComponent> parts);

/// Geometric-mean fusion of whole mixtures: every cross-product combination
/// of components, keeping those with weight >= prune_threshold. Branches whose
/// weight is provably below the threshold are cut before they are expanded.
/// With max_products > 0 only the max_products heaviest combinations are
/// kept (exact, by branch and bound); ties go to the earlier combination.
GaussianMixture gmf_fuse(std::span<const GaussianMixture> mixtures, const FusionWeights& w,
                         double prune_threshold, std::size_t max_products = 0);

/// Arithmetic-mean fusion: concatenation with weights scaled by w_j.
GaussianMixture amf_fuse(std::span<const GaussianMixture> mixtures, const FusionWeights& w);

/// Reduces components describing one target to a single component:
/// a = sum a_i, mu = sum a_i mu_i / sum a_i, P = sum w_i P_i.
GaussianComponent gmr_reduce(std::span<const WeightedComponent> group);

/// AMF followed by GMR over groups of components (at most one per
/// participant) whose Mahalanobis form to the heaviest remaining component is
/// at most `dist_threshold` squared (under that component's covariance). Within a
/// group the owners' weights are renormalised.
GaussianMixture amf_reduce(std::span<const GaussianMixture> mixtures, const FusionWeights& w,
                           double dist_threshold);

/// One cardinality consensus iteration: A * estimates. A must be doubly stochastic.
VecX consensus_step(const VecX& estimates, const MatX& a);

/// Scales all weights so that they sum to `target`.
GaussianMixture rescale_to_cardinality(const GaussianMixture& m, double target);

struct TrackerEstimate {
    GaussianMixture mixture;
    double cardinality = 0.0;
};

struct FusionOptions {
    FusionRule rule = FusionRule::GMF;
    int steps = 1;
    double prune_threshold = 1e-6;
    double merge_threshold = 0.2;
    /// Merge the fused mixture before the next T-GC selection.
    bool merge_after_fusion = true;
    std::size_t max_components = 0;  // 0: unlimited
};

/// Lock-step neighbourhood fusion.
///
/// For each of `steps` iterations every tracker fuses its T-GCs with its
/// neighbours' T-GCs using its row of abar (renormalised over neighbours that
/// have T-GCs to offer), the cardinality estimates take one consensus step, and
/// each mixture is rescaled to its tracker's new estimate. All reads use the
/// previous iteration's state. Throws InvalidArgument for a disconnected or
/// otherwise invalid configuration.
///
/// When `estimate_history` is given it receives the estimate vector before the
/// first step and after every step.
std::vector<TrackerEstimate> fusion_round(std::vector<TrackerEstimate> trackers,
                                          const TeamConfiguration& config,
                                          const FusionOptions& options,
                                          std::vector<VecX>* estimate_history = nullptr);

}  // namespace rmtt
