#include "rmtt/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace rmtt {

namespace {

constexpr double kStateDim = 4.0;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

/// Per-component quantities reused across every product a component enters.
struct Prepared {
    double omega = 0.0;
    double log_weight = 0.0;  // ln a_j, -inf for a zero weight
    double log_det_cov = 0.0;
    Vec4 mean;
    Mat4 info;       // P_j^{-1}
    Vec4 info_mean;  // P_j^{-1} mu_j
};

Prepared prepare(const GaussianComponent& c, double omega) {
    if (!(omega > 0.0)) throw InvalidArgument("GMF weights must be positive; drop zero weights");
    if (c.weight < 0.0) throw InvalidArgument("negative component weight");
    Eigen::LLT<Mat4> llt(symmetrize(c.covariance));
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("GMF component covariance");
    Prepared p;
    p.omega = omega;
    p.log_weight = c.weight > 0.0 ? std::log(c.weight) : -std::numeric_limits<double>::infinity();
    p.log_det_cov = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    p.mean = c.mean;
    p.info = symmetrize(llt.solve(Mat4::Identity()));
    p.info_mean = p.info * c.mean;
    return p;
}

GaussianComponent product_of(std::span<const Prepared* const> parts) {
    const double n = static_cast<double>(parts.size());
    Mat4 omega_info = Mat4::Zero();
    Vec4 q = Vec4::Zero();
    double weighted_log_alpha = 0.0;
    double log_sqrt_terms = 0.0;
    double sum_log_det_weighted_info = 0.0;
    for (const Prepared* p : parts) {
        omega_info += p->omega * p->info;
        q += p->omega * p->info_mean;
        weighted_log_alpha += p->omega * p->log_weight;
        const double log_omega = std::log(p->omega);
        // ln sqrt(|2 pi P / w| / |2 pi P|^w)
        log_sqrt_terms += 0.5 * ((kStateDim * kLog2Pi + p->log_det_cov - kStateDim * log_omega) -
                                 p->omega * (kStateDim * kLog2Pi + p->log_det_cov));
        sum_log_det_weighted_info += kStateDim * log_omega - p->log_det_cov;  // ln|w P^{-1}|
    }
    Eigen::LLT<Mat4> llt(omega_info);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("fused information matrix");
    GaussianComponent out;
    out.covariance = symmetrize(llt.solve(Mat4::Identity()));
    out.mean = llt.solve(q);

    // sum w_j mu_j^T P_j^{-1} mu_j - q^T Omega^{-1} q, written as a sum of
    // non-negative terms around the fused mean for numerical stability.
    double spread = 0.0;
    for (const Prepared* p : parts) {
        const Vec4 d = p->mean - out.mean;
        spread += p->omega * d.dot(p->info * d);
    }
    const double log_det_omega = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double k_tilde_det = -0.5 * (n * kStateDim * kLog2Pi - sum_log_det_weighted_info);
    const double k_bar_det = -0.5 * (kStateDim * kLog2Pi - log_det_omega);
    const double log_k = k_tilde_det - k_bar_det - 0.5 * std::max(0.0, spread);

    const double log_alpha = weighted_log_alpha + log_sqrt_terms + log_k;
    out.weight = std::isfinite(log_alpha) ? std::exp(log_alpha) : 0.0;
    return out;
}

struct SearchNode {
    Mat4 omega_info = Mat4::Zero();
    Vec4 q = Vec4::Zero();
    double quad = 0.0;  // sum w_j mu_j^T P_j^{-1} mu_j
    double log_alpha = 0.0;
};

class GmfSearch {
public:
    GmfSearch(std::vector<std::vector<Prepared>> prepared, double prune_threshold, std::size_t max_products)
        : prepared_(std::move(prepared)),
          log_prune_(prune_threshold > 0.0 ? std::log(prune_threshold) : -std::numeric_limits<double>::infinity()),
          prune_threshold_(prune_threshold),
          max_products_(max_products) {
        tail_bound_.assign(prepared_.size() + 1, 0.0);
        for (std::size_t j = prepared_.size(); j-- > 0;) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& p : prepared_[j]) best = std::max(best, p.log_weight);
            const double omega = prepared_[j].empty() ? 0.0 : prepared_[j].front().omega;
            tail_bound_[j] = tail_bound_[j + 1] + omega * best;
        }
        chosen_.resize(prepared_.size());
    }

    GaussianMixture run() {
        expand(0, SearchNode{});
        // Emit in enumeration order so the result does not depend on heap layout.
        std::sort(kept_.begin(), kept_.end(), [](const Kept& a, const Kept& b) { return a.order < b.order; });
        GaussianMixture out;
        out.reserve(kept_.size());
        for (auto& k : kept_) out.push_back(std::move(k.component));
        return out;
    }

private:
    struct Kept {
        GaussianComponent component;
        std::size_t order;
    };
    // Min-heap on weight; among equal weights the later product is evicted first.
    static bool heap_less(const Kept& a, const Kept& b) {
        if (a.component.weight != b.component.weight) return a.component.weight > b.component.weight;
        return a.order < b.order;
    }

    double log_threshold() const {
        if (max_products_ == 0 || kept_.size() < max_products_) return log_prune_;
        return std::max(log_prune_, std::log(kept_.front().component.weight));
    }

    // ln a_fused <= sum w_j ln a_j - spread / 2, because the determinant factor
    // is non-positive by concavity of log det, and the spread can only grow as
    // more participants are multiplied in.
    double upper_bound(std::size_t depth, const SearchNode& node) const {
        double spread = 0.0;
        if (depth > 1) {
            Eigen::LLT<Mat4> llt(node.omega_info);
            spread = std::max(0.0, node.quad - node.q.dot(llt.solve(node.q)));
        }
        return node.log_alpha + tail_bound_[depth] - 0.5 * spread;
    }

    void expand(std::size_t depth, const SearchNode& node) {
        if (depth == prepared_.size()) {
            GaussianComponent c = product_of(chosen_);
            if (c.weight < prune_threshold_) return;
            Kept k{std::move(c), counter_++};
            if (max_products_ == 0) {
                kept_.push_back(std::move(k));
                return;
            }
            if (kept_.size() == max_products_) {
                if (!heap_less(k, kept_.front())) return;
                std::pop_heap(kept_.begin(), kept_.end(), heap_less);
                kept_.pop_back();
            }
            kept_.push_back(std::move(k));
            std::push_heap(kept_.begin(), kept_.end(), heap_less);
            return;
        }
        struct Child {
            SearchNode node;
            const Prepared* part;
            double bound;
        };
        std::vector<Child> children;
        children.reserve(prepared_[depth].size());
        for (const auto& p : prepared_[depth]) {
            Child ch{SearchNode{}, &p, 0.0};
            ch.node.omega_info = node.omega_info + p.omega * p.info;
            ch.node.q = node.q + p.omega * p.info_mean;
            ch.node.quad = node.quad + p.omega * p.mean.dot(p.info_mean);
            ch.node.log_alpha = node.log_alpha + p.omega * p.log_weight;
            ch.bound = upper_bound(depth + 1, ch.node);
            if (std::isfinite(ch.bound) || !std::isfinite(log_prune_)) children.push_back(ch);
        }
        // Most promising branches first, so a bounded search tightens early.
        if (max_products_ > 0)
            std::stable_sort(children.begin(), children.end(),
                             [](const Child& a, const Child& b) { return a.bound > b.bound; });
        for (const auto& ch : children) {
            if (ch.bound < log_threshold() - 1e-9) {
                if (max_products_ > 0) break;
                continue;
            }
            chosen_[depth] = ch.part;
            expand(depth + 1, ch.node);
        }
    }

    std::vector<std::vector<Prepared>> prepared_;
    std::vector<double> tail_bound_;
    std::vector<const Prepared*> chosen_;
    double log_prune_;
    double prune_threshold_;
    std::size_t max_products_;
    std::size_t counter_ = 0;
    std::vector<Kept> kept_;
};

}  // namespace

void FusionWeights::validate() const {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidArgument("fusion weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("fusion weights must sum to 1");
}

std::string_view to_string(FusionRule rule) { return rule == FusionRule::GMF ? "GMF" : "AMF"; }

FusionRule fusion_rule_from_string(std::string_view name) {
    if (name == "GMF" || name == "gmf") return FusionRule::GMF;
    if (name == "AMF" || name == "amf") return FusionRule::AMF;
    throw InvalidArgument("unknown fusion rule: " + std::string(name));
}

GaussianComponent gmf_component_product(std::span<const WeightedComponent> parts) {
    if (parts.empty()) throw InvalidArgument("GMF product needs at least one component");
    double sum = 0.0;
    for (const auto& p : parts) sum += p.omega;
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("GMF weights must sum to 1");
    std::vector<Prepared> prepared;
    prepared.reserve(parts.size());
    for (const auto& p : parts) prepared.push_back(prepare(p.component, p.omega));
    std::vector<const Prepared*> ptrs;
    for (const auto& p : prepared) ptrs.push_back(&p);
    return product_of(ptrs);
}

GaussianMixture gmf_fuse(std::span<const GaussianMixture> mixtures, const FusionWeights& w,
                         double prune_threshold, std::size_t max_products) {
    w.validate();
    if (mixtures.empty()) throw InvalidArgument("GMF needs at least one mixture");
    if (w.weights.size() != mixtures.size()) throw InvalidArgument("one weight per mixture");
    std::vector<std::vector<Prepared>> prepared;
    for (std::size_t j = 0; j < mixtures.size(); ++j) {
        if (w.weights[j] <= 0.0) continue;
        std::vector<Prepared> ps;
        ps.reserve(mixtures[j].size());
        for (const auto& c : mixtures[j]) ps.push_back(prepare(c, w.weights[j]));
        prepared.push_back(std::move(ps));
    }
    return GmfSearch(std::move(prepared), prune_threshold, max_products).run();
}

GaussianMixture amf_fuse(std::span<const GaussianMixture> mixtures, const FusionWeights& w) {
    w.validate();
    if (w.weights.size() != mixtures.size()) throw InvalidArgument("one weight per mixture");
    GaussianMixture out;
    for (std::size_t j = 0; j < mixtures.size(); ++j)
        for (const auto& c : mixtures[j]) out.push_back({w.weights[j] * c.weight, c.mean, c.covariance});
    return out;
}

GaussianComponent gmr_reduce(std::span<const WeightedComponent> group) {
    if (group.empty()) throw InvalidArgument("GMR needs a non-empty group");
    double omega_sum = 0.0;
    for (const auto& g : group) omega_sum += g.omega;
    if (std::abs(omega_sum - 1.0) > 1e-9) throw InvalidArgument("GMR weights must sum to 1");
    GaussianComponent out;
    out.mean = Vec4::Zero();
    out.covariance = Mat4::Zero();
    for (const auto& g : group) {
        out.weight += g.component.weight;
        out.mean += g.component.weight * g.component.mean;
        out.covariance += g.omega * g.component.covariance;
    }
    if (out.weight > 0.0) {
        out.mean /= out.weight;
    } else {
        out.mean = Vec4::Zero();
        for (const auto& g : group) out.mean += g.omega * g.component.mean;
    }
    out.covariance = symmetrize(out.covariance);
    return out;
}

GaussianMixture amf_reduce(std::span<const GaussianMixture> mixtures, const FusionWeights& w,
                           double dist_threshold) {
    w.validate();
    if (w.weights.size() != mixtures.size()) throw InvalidArgument("one weight per mixture");
    struct Tagged {
        GaussianComponent c;
        std::size_t owner;
    };
    std::vector<Tagged> all;
    for (std::size_t j = 0; j < mixtures.size(); ++j)
        for (const auto& c : mixtures[j]) all.push_back({{w.weights[j] * c.weight, c.mean, c.covariance}, j});

    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return all[a].c.weight > all[b].c.weight; });

    const double gate = dist_threshold * dist_threshold;
    std::vector<bool> used(all.size(), false);
    GaussianMixture out;
    for (std::size_t leader : order) {
        if (used[leader]) continue;
        used[leader] = true;
        // Closest candidate per other owner.
        std::vector<std::size_t> best(mixtures.size(), all.size());
        std::vector<double> best_d(mixtures.size(), std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < all.size(); ++k) {
            if (used[k] || all[k].owner == all[leader].owner) continue;
            const double d = mahalanobis_sq(all[k].c, all[leader].c);
            if (d <= gate && d < best_d[all[k].owner]) {
                best_d[all[k].owner] = d;
                best[all[k].owner] = k;
            }
        }
        std::vector<std::size_t> members{leader};
        for (std::size_t j = 0; j < mixtures.size(); ++j)
            if (best[j] < all.size()) members.push_back(best[j]);
        if (members.size() == 1) {
            out.push_back(all[leader].c);
            continue;
        }
        double omega_sum = 0.0;
        for (std::size_t k : members) omega_sum += w.weights[all[k].owner];
        std::vector<WeightedComponent> group;
        for (std::size_t k : members) {
            used[k] = true;
            const double omega = omega_sum > 0.0 ? w.weights[all[k].owner] / omega_sum
                                                 : 1.0 / static_cast<double>(members.size());
            group.push_back({all[k].c, omega});
        }
        out.push_back(gmr_reduce(group));
    }
    return out;
}

VecX consensus_step(const VecX& estimates, const MatX& a) {
    const auto n = estimates.size();
    if (a.rows() != n || a.cols() != n) throw InvalidArgument("consensus matrix size mismatch");
    if ((a.array() < -1e-12).any()) throw InvalidArgument("consensus matrix has negative entries");
    const VecX ones = VecX::Ones(n);
    if (((a * ones - ones).cwiseAbs().array() > 1e-9).any() ||
        ((a.transpose() * ones - ones).cwiseAbs().array() > 1e-9).any())
        throw InvalidArgument("consensus matrix is not doubly stochastic");
    return a * estimates;
}

GaussianMixture rescale_to_cardinality(const GaussianMixture& m, double target) {
    if (!(target >= 0.0)) throw InvalidArgument("target cardinality must be non-negative");
    const double mass = expected_cardinality(m);
    if (target == 0.0) {
        GaussianMixture out = m;
        for (auto& c : out) c.weight = 0.0;
        return out;
    }
    if (!(mass > 0.0)) throw InvalidArgument("cannot rescale a zero-mass mixture to a positive target");
    const double scale = target / mass;
    GaussianMixture out = m;
    for (auto& c : out) c.weight *= scale;
    return out;
}

std::vector<TrackerEstimate> fusion_round(std::vector<TrackerEstimate> trackers,
                                          const TeamConfiguration& config,
                                          const FusionOptions& options,
                                          std::vector<VecX>* estimate_history) {
    const int n = config.size();
    if (static_cast<int>(trackers.size()) != n) throw InvalidArgument("one tracker per node");
    if (options.steps < 1) throw InvalidArgument("at least one consensus step");
    if (const auto why = configuration_violation(config); !why.empty())
        throw InvalidArgument("invalid configuration: " + why);

    VecX estimates(n);
    for (int i = 0; i < n; ++i) estimates(i) = trackers[i].cardinality;
    if (estimate_history) estimate_history->push_back(estimates);

    for (int step = 0; step < options.steps; ++step) {
        std::vector<GaussianMixture> tgcs(n), rest(n);
        for (int i = 0; i < n; ++i) {
            const auto& m = trackers[i].mixture;
            const auto idx = tgc_indices(m);
            std::vector<bool> is_tgc(m.size(), false);
            for (std::size_t k : idx) {
                tgcs[i].push_back(m[k]);
                is_tgc[k] = true;
            }
            for (std::size_t k = 0; k < m.size(); ++k)
                if (!is_tgc[k]) rest[i].push_back(m[k]);
        }

        std::vector<GaussianMixture> next(n);
        for (int i = 0; i < n; ++i) {
            double row_sum = 0.0;
            std::vector<GaussianMixture> inputs;
            FusionWeights w;
            for (int j = 0; j < n; ++j) {
                if (config.abar(i, j) <= 0.0) continue;
                row_sum += config.abar(i, j);
                if (tgcs[j].empty()) continue;
                inputs.push_back(tgcs[j]);
                w.weights.push_back(config.abar(i, j));
            }
            if (std::abs(row_sum - 1.0) > 1e-9) throw InvalidArgument("abar row does not sum to 1");
            const bool only_self = inputs.empty() || (inputs.size() == 1 && !tgcs[i].empty());
            if (only_self) {
                next[i] = trackers[i].mixture;
                continue;
            }
            const double total = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
            for (double& x : w.weights) x /= total;

            GaussianMixture fused = options.rule == FusionRule::GMF
                                        ? gmf_fuse(inputs, w, options.prune_threshold, options.max_components)
                                        : amf_reduce(inputs, w, options.merge_threshold);
            fused = prune(fused, options.prune_threshold);
            fused.insert(fused.end(), rest[i].begin(), rest[i].end());
            if (options.merge_after_fusion) fused = merge(fused, options.merge_threshold);
            if (options.max_components > 0) fused = cap(fused, options.max_components);
            next[i] = std::move(fused);
        }

        estimates = consensus_step(estimates, config.abar);
        for (int i = 0; i < n; ++i) {
            trackers[i].cardinality = estimates(i);
            if (expected_cardinality(next[i]) > 0.0 || estimates(i) == 0.0)
                next[i] = rescale_to_cardinality(next[i], estimates(i));
            trackers[i].mixture = std::move(next[i]);
        }
        if (estimate_history) estimate_history->push_back(estimates);
    }
    return trackers;
}

}  // namespace rmtt
