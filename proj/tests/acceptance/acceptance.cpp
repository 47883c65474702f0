// Acceptance runner: one PASS/FAIL line per criterion.
//
//   rmtt_acceptance [--config trend.cfg] [--work dir] [criterion ...]

#include "rmtt/experiment.hpp"
#include "rmtt/fusion.hpp"
#include "rmtt/metrics.hpp"
#include "rmtt/network.hpp"
#include "rmtt/phd_filter.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

using namespace rmtt;
using rmtt::testing::random_doubly_stochastic;
using rmtt::testing::random_simplex;
using rmtt::testing::random_spd4;
using rmtt::testing::separated_mixture;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

class Clock {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<Edge> slots(int n) {
    std::vector<Edge> s;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s.emplace_back(i, j);
    return s;
}

/// Graph on n nodes from a bitmask over the slot list.
std::vector<Edge> mask_edges(int n, unsigned mask) {
    std::vector<Edge> e;
    const auto s = slots(n);
    for (std::size_t k = 0; k < s.size(); ++k)
        if (mask >> k & 1u) e.push_back(s[k]);
    return e;
}

bool reachable_all(int n, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) adj[u].push_back(v), adj[v].push_back(u);
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) seen[v] = true, ++count, stack.push_back(v);
    }
    return count == n;
}

/// Symmetric doubly stochastic weights on the given edges, positive diagonal.
MatX random_weights(std::mt19937_64& rng, int n, const std::vector<Edge>& edges) {
    std::uniform_real_distribution<double> w(0.05, 1.0), scale(0.05, 0.99);
    MatX a = MatX::Zero(n, n);
    for (auto [u, v] : edges) a(u, v) = a(v, u) = w(rng);
    const double worst = a.rowwise().sum().maxCoeff();
    if (worst > 0.0) a *= scale(rng) / worst;
    for (int i = 0; i < n; ++i) a(i, i) = 1.0 - a.row(i).sum();
    return a;
}

std::vector<Edge> random_connected(std::mt19937_64& rng, int n) {
    const unsigned full = (1u << (n * (n - 1) / 2)) - 1u;
    for (;;) {
        const auto e = mask_edges(n, static_cast<unsigned>(rng()) & full);
        if (reachable_all(n, e)) return e;
    }
}

// ---------------------------------------------------------------------------

Verdict connectivity_equivalence() {
    Clock clock;
    std::mt19937_64 rng(101);
    long cases = 0, disagree = 0;
    for (int n = 1; n <= 5; ++n) {
        const unsigned masks = 1u << (n * (n - 1) / 2);
        for (unsigned mask = 0; mask < masks; ++mask) {
            const auto edges = mask_edges(n, mask);
            const bool truth = reachable_all(n, edges);
            for (int draw = 0; draw < 100; ++draw, ++cases)
                disagree += connectivity_lmi(random_weights(rng, n, edges)) != truth;
        }
    }
    const double secs = clock.seconds();
    return {disagree == 0 && secs < 30.0, fmt("%ld cases, %ld disagreements, %.1f s", cases, disagree, secs)};
}

StrategyInput random_input(std::mt19937_64& rng, int n, int alpha, const std::vector<Edge>& previous) {
    StrategyInput inp;
    inp.alpha = alpha;
    inp.failed_tracker = static_cast<int>(rng() % n);
    inp.blk_covs.resize(n);
    for (auto& blocks : inp.blk_covs)
        for (int k = 0; k < alpha; ++k) blocks.push_back(random_spd4(rng));
    inp.previous.pi = adjacency_from_edges(n, previous);
    inp.previous.abar = metropolis_weights(inp.previous.pi);
    inp.seed = rng();
    return inp;
}

Verdict trace_bound() {
    Clock clock;
    std::mt19937_64 rng(202);
    std::normal_distribution<double> g;
    double worst_violation = 0.0, worst_gap = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int alpha = 1 + static_cast<int>(rng() % 3);
        const auto edges = random_connected(rng, n);
        const auto inp = random_input(rng, n, alpha, edges);
        const MatX abar = random_weights(rng, n, edges);
        std::vector<MatX> epigraph;
        for (int i = 0; i < n; ++i) {
            MatX p = spd_inverse(fused_information(abar, inp, i), "fused information");
            if (t % 4 != 0) {
                const MatX b = MatX::NullaryExpr(4 * alpha, 4 * alpha, [&] { return g(rng); });
                p += std::abs(g(rng)) * b * b.transpose();
            }
            epigraph.push_back(symmetrize(p));
        }
        const auto tb = trace_bound_gap(abar, inp, epigraph);
        worst_violation = std::max(worst_violation, tb.value - tb.upper);
    }
    for (int t = 0; t < 20; ++t) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const auto inp = random_input(rng, n, 1 + static_cast<int>(rng() % 2), random_connected(rng, n));
        const auto sol = solve_weights(inp.previous.pi, Objective::TCGMC, inp);
        const auto tb = trace_bound_gap(sol.abar, inp);
        worst_gap = std::max({worst_gap, tb.upper - tb.value, std::abs(tb.value - sol.objective)});
    }
    const double secs = clock.seconds();
    return {worst_violation <= 1e-9 && worst_gap <= 1e-6 && secs < 60.0,
            fmt("worst violation %.2e, worst gap at optima %.2e, %.1f s", std::max(0.0, worst_violation), worst_gap, secs)};
}

// ---------------------------------------------------------------------------
// Brute-force configuration oracle, independent of the library solver.

struct ObjectiveOracle {
    Objective kind;
    int n, failed;
    std::vector<Mat4> cov, info;

    ObjectiveOracle(Objective o, const StrategyInput& inp) : kind(o), n(static_cast<int>(inp.blk_covs.size())), failed(inp.failed_tracker) {
        for (const auto& b : inp.blk_covs) cov.push_back(b[0]), info.push_back(b[0].fullPivLu().inverse());
    }

    MatX weights(const std::vector<Edge>& edges, const VecX& x) const {
        MatX a = MatX::Identity(n, n);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            auto [u, v] = edges[e];
            a(u, v) = a(v, u) = x(e);
            a(u, u) -= x(e);
            a(v, v) -= x(e);
        }
        return a;
    }

    double value(const MatX& a) const {
        double f = 0.0;
        switch (kind) {
            case Objective::RCGMC:
                for (int j = 0; j < n; ++j) f -= a(failed, j) * info[j].trace();
                return f;
            case Objective::RCAMC:
                for (int j = 0; j < n; ++j) f += a(failed, j) * cov[j].trace();
                return f;
            case Objective::TCAMC:
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) f += a(i, j) * cov[j].trace();
                return f;
            case Objective::TCGMC:
                for (int i = 0; i < n; ++i) {
                    Mat4 m = Mat4::Zero();
                    for (int j = 0; j < n; ++j) m += a(i, j) * info[j];
                    f += m.fullPivLu().inverse().trace();
                }
                return f;
        }
        return f;
    }

    /// Gradient of the TCGMC value in edge coordinates.
    VecX edge_gradient(const std::vector<Edge>& edges, const MatX& a) const {
        MatX d(n, n);
        for (int i = 0; i < n; ++i) {
            Mat4 m = Mat4::Zero();
            for (int j = 0; j < n; ++j) m += a(i, j) * info[j];
            const Mat4 inv = m.fullPivLu().inverse();
            for (int j = 0; j < n; ++j) d(i, j) = -(inv * info[j] * inv).trace();
        }
        VecX g(edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            auto [u, v] = edges[e];
            g(e) = d(u, v) + d(v, u) - d(u, u) - d(v, v);
        }
        return g;
    }
};

constexpr double kMinWeight = 1e-3;

/// Vertices of {x_e >= eps, sum of x_e at each node <= 1 - eps}.
std::vector<VecX> polytope_vertices(int n, const std::vector<Edge>& edges) {
    const int m = static_cast<int>(edges.size());
    const int rows = m + n;
    MatX g = MatX::Zero(rows, m);
    VecX h(rows);
    for (int e = 0; e < m; ++e) g(e, e) = -1.0, h(e) = -kMinWeight;
    for (int i = 0; i < n; ++i) {
        for (int e = 0; e < m; ++e)
            if (edges[e].first == i || edges[e].second == i) g(m + i, e) = 1.0;
        h(m + i) = 1.0 - kMinWeight;
    }
    std::vector<VecX> out;
    for (unsigned mask = 0; mask < (1u << rows); ++mask) {
        if (std::popcount(mask) != m) continue;
        MatX ga(m, m);
        VecX ha(m);
        for (int r = 0, k = 0; r < rows; ++r)
            if (mask >> r & 1u) ga.row(k) = g.row(r), ha(k++) = h(r);
        Eigen::FullPivLU<MatX> lu(ga);
        if (lu.rank() < m) continue;
        const VecX x = lu.solve(ha);
        if (((g * x - h).array() > 1e-9).any()) continue;
        if (std::none_of(out.begin(), out.end(), [&](const VecX& v) { return (v - x).cwiseAbs().maxCoeff() < 1e-9; }))
            out.push_back(x);
    }
    return out;
}

/// Minimum of a convex function on a segment, by golden section.
double line_minimum(const std::function<double(double)>& phi, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = hi, c = b - r * (b - a), d = a + r * (b - a);
    double fc = phi(c), fd = phi(d);
    for (int k = 0; k < 80; ++k) {
        if (fc < fd) b = d, d = c, fd = fc, c = b - r * (b - a), fc = phi(c);
        else a = c, c = d, fc = fd, d = a + r * (b - a), fd = phi(d);
    }
    return (a + b) / 2.0;
}

struct OracleValue {
    double value = 0.0;
    double certified_gap = 0.0;  // value - certified lower bound
    std::string method;
};

OracleValue oracle_minimum(const ObjectiveOracle& o, const std::vector<Edge>& edges) {
    const int m = static_cast<int>(edges.size());
    auto f = [&](const VecX& x) { return o.value(o.weights(edges, x)); };
    if (m <= 2) {
        constexpr int kSteps = 1000;  // 1e-3 resolution
        const double h = 1e-3;
        double best = std::numeric_limits<double>::infinity();
        VecX x(m);
        auto inside = [&](const VecX& y) {
            VecX sums = VecX::Zero(o.n);
            for (int e = 0; e < m; ++e) sums(edges[e].first) += y(e), sums(edges[e].second) += y(e);
            return (sums.array() <= 1.0 - kMinWeight + 1e-12).all();
        };
        if (m == 0) return {f(x), 0.0, "grid"};
        for (int i = 0; i <= kSteps; ++i) {
            x(0) = kMinWeight + i * h;
            if (m == 1) {
                if (inside(x)) best = std::min(best, f(x));
                continue;
            }
            for (int j = 0; j <= kSteps; ++j) {
                x(1) = kMinWeight + j * h;
                if (inside(x)) best = std::min(best, f(x));
            }
        }
        return {best, 0.0, "grid"};
    }
    const auto verts = polytope_vertices(o.n, edges);
    if (o.kind != Objective::TCGMC) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : verts) best = std::min(best, f(v));
        return {best, 0.0, "vertices"};
    }
    // Pairwise Frank-Wolfe over the vertex list, with a duality-gap certificate.
    std::vector<double> lambda(verts.size(), 1.0 / static_cast<double>(verts.size()));
    VecX x = VecX::Zero(m);
    for (std::size_t k = 0; k < verts.size(); ++k) x += lambda[k] * verts[k];
    double gap = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 20000; ++it) {
        const VecX g = o.edge_gradient(edges, o.weights(edges, x));
        std::size_t s = 0, away = 0;
        double best_s = std::numeric_limits<double>::infinity(), best_a = -best_s;
        for (std::size_t k = 0; k < verts.size(); ++k) {
            const double d = g.dot(verts[k]);
            if (d < best_s) best_s = d, s = k;
            if (lambda[k] > 0.0 && d > best_a) best_a = d, away = k;
        }
        gap = g.dot(x) - best_s;
        if (gap <= 1e-10 * std::max(1.0, std::abs(f(x))) || s == away) break;
        const VecX dir = verts[s] - verts[away];
        const double step = line_minimum([&](double t) { return f(x + t * dir); }, lambda[away]);
        x += step * dir;
        lambda[s] += step;
        lambda[away] -= step;
        if (lambda[away] < 1e-15) lambda[away] = 0.0;
    }
    return {f(x), std::max(0.0, gap), "frank-wolfe"};
}

Verdict oracle_equivalence() {
    Clock clock;
    std::mt19937_64 rng(303);
    int runs = 0, topo_miss = 0, value_miss = 0;
    double worst = 0.0, worst_cert = 0.0;
    std::string first_failure;
    for (int n = 3; n <= 5; ++n) {
        for (int draw = 0; draw < 20; ++draw) {
            const auto previous = draw % 2 == 0 ? edge_list(line_graph(n)) : random_connected(rng, n);
            auto inp = random_input(rng, n, 1, previous);
            inp.edge_budget = 1;
            // Candidate topologies: the previous graph and every single toggle that stays connected.
            std::vector<std::vector<Edge>> candidates{previous};
            const auto all = slots(n);
            std::set<Edge> prev_set(previous.begin(), previous.end());
            for (const auto& slot : all) {
                std::set<Edge> t = prev_set;
                if (!t.erase(slot)) t.insert(slot);
                std::vector<Edge> e(t.begin(), t.end());
                if (reachable_all(n, e)) candidates.push_back(e);
            }
            for (Objective obj : {Objective::RCGMC, Objective::TCGMC, Objective::RCAMC, Objective::TCAMC}) {
                const ObjectiveOracle oracle(obj, inp);
                std::vector<OracleValue> values;
                for (const auto& c : candidates) values.push_back(oracle_minimum(oracle, c));
                // Lowest value; near ties go to fewer edges, then the lexicographically smaller edge list.
                std::size_t pick = 0;
                for (std::size_t k = 1; k < candidates.size(); ++k) {
                    const double tol = 1e-7 * std::max({1.0, std::abs(values[k].value), std::abs(values[pick].value)});
                    const bool lower = values[k].value < values[pick].value - tol;
                    const bool tie = std::abs(values[k].value - values[pick].value) <= tol;
                    const bool fewer = candidates[k].size() < candidates[pick].size() ||
                                       (candidates[k].size() == candidates[pick].size() && candidates[k] < candidates[pick]);
                    if (lower || (tie && fewer)) pick = k;
                }
                Strategy strategy = Strategy::None;
                switch (obj) {
                    case Objective::RCGMC: strategy = Strategy::RCGMC; break;
                    case Objective::TCGMC: strategy = Strategy::TCGMC; break;
                    case Objective::RCAMC: strategy = Strategy::RCAMC; break;
                    case Objective::TCAMC: strategy = Strategy::TCAMC; break;
                }
                const auto got = generate_configuration(strategy, inp);
                const double ours = oracle.value(got.config.abar);
                const double err = std::abs(ours - values[pick].value);
                const bool same_topology = edge_list(got.config.pi) == candidates[pick];
                ++runs;
                worst = std::max(worst, err);
                worst_cert = std::max(worst_cert, values[pick].certified_gap);
                topo_miss += !same_topology;
                value_miss += err > 1e-3;
                if ((!same_topology || err > 1e-3) && first_failure.empty())
                    first_failure = fmt("; first miss n=%d draw=%d %s (%s): ours %.6f oracle %.6f", n, draw,
                                        std::string(to_string(strategy)).c_str(), values[pick].method.c_str(), ours,
                                        values[pick].value);
            }
        }
    }
    const double secs = clock.seconds();
    return {topo_miss == 0 && value_miss == 0 && secs < 300.0,
            fmt("%d runs, %d topology mismatches, %d value mismatches, worst |diff| %.2e, "
                "worst oracle certificate %.1e, %.1f s",
                runs, topo_miss, value_miss, worst, worst_cert, secs) +
                first_failure};
}

// ---------------------------------------------------------------------------

Verdict kalman_reduction() {
    double worst = 0.0;
    bool single = true;
    for (int seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(400 + seed);
        std::normal_distribution<double> g;
        const Mat4 q = 0.01 * Vec4(0.25, 0.25, 1, 1).asDiagonal().toDenseMatrix();
        const auto motion = MotionModel::constant_velocity(1.0, q);
        SensorModel s;
        s.p_detect = 1.0;
        s.clutter_rate = 0.0;
        s.R << 1.0 + 0.1 * seed, 0.2, 0.2, 0.8;
        Vec4 truth(g(rng), g(rng), 1.0, 0.5);
        GaussianMixture m{{1.0, truth + Vec4(g(rng), g(rng), 0, 0), 10 * Mat4::Identity()}};
        Vec4 x = m[0].mean;
        Mat4 p = m[0].covariance;
        for (int step = 0; step < 100; ++step) {
            truth = motion.F * truth;
            const Vec2 z = truth.head<2>() + Vec2(g(rng), g(rng));
            m = prune(innovate(predict(m, motion, {}, 1.0), std::vector<Vec2>{z}, s), 1e-12);
            x = motion.F * x;
            p = motion.F * p * motion.F.transpose() + q;
            const Mat2 sm = s.H * p * s.H.transpose() + s.R;
            const Eigen::Matrix<double, 4, 2> k = p * s.H.transpose() * sm.fullPivLu().inverse();
            x += k * (z - s.H * x);
            p = (Mat4::Identity() - k * s.H) * p;
            if (m.size() != 1) {
                single = false;
                break;
            }
            worst = std::max({worst, std::abs(m[0].weight - 1.0), (m[0].mean - x).cwiseAbs().maxCoeff(),
                              (m[0].covariance - p).cwiseAbs().maxCoeff()});
        }
    }
    return {single && worst <= 1e-9, fmt("10 trajectories x 100 steps, worst deviation %.2e", worst)};
}

Verdict fusion_properties() {
    std::mt19937_64 rng(505);
    double idem = 0.0, linear = 0.0, conserve = 0.0;
    bool sizes = true;
    for (int t = 0; t < 1000; ++t) {
        const auto m = separated_mixture(rng, 1 + static_cast<int>(rng() % 4));
        const int copies = 2 + static_cast<int>(rng() % 3);
        const std::vector<GaussianMixture> in(copies, m);
        const auto out = gmf_fuse(in, random_simplex(rng, copies), 1e-6);
        if (out.size() != m.size()) {
            sizes = false;
            continue;
        }
        for (std::size_t i = 0; i < m.size(); ++i)
            idem = std::max({idem, std::abs(out[i].weight - m[i].weight), (out[i].mean - m[i].mean).cwiseAbs().maxCoeff(),
                             (out[i].covariance - m[i].covariance).cwiseAbs().maxCoeff()});
    }
    for (int t = 0; t < 1000; ++t) {
        const int k = 1 + static_cast<int>(rng() % 5);
        std::vector<GaussianMixture> mixtures;
        for (int j = 0; j < k; ++j) mixtures.push_back(separated_mixture(rng, static_cast<int>(rng() % 6)));
        const auto w = random_simplex(rng, k);
        double expect = 0.0;
        for (int j = 0; j < k; ++j) expect += w.weights[j] * expected_cardinality(mixtures[j]);
        linear = std::max(linear, std::abs(expected_cardinality(amf_fuse(mixtures, w)) - expect));
    }
    std::normal_distribution<double> g(0.0, 3.0);
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + static_cast<int>(rng() % 9);
        const MatX d = random_doubly_stochastic(rng, n);
        VecX e(n);
        for (int i = 0; i < n; ++i) e(i) = std::abs(g(rng));
        conserve = std::max(conserve, std::abs(consensus_step(e, d).sum() - e.sum()));
    }
    return {sizes && idem <= 1e-6 && linear <= 1e-9 && conserve <= 1e-9,
            fmt("GMF idempotence %.2e, AMF linearity %.2e, consensus conservation %.2e", idem, linear, conserve)};
}

double brute_ospa(PointSet x, PointSet y, double c, double p) {
    if (x.size() > y.size()) std::swap(x, y);
    const std::size_t m = x.size(), n = y.size();
    if (n == 0) return 0.0;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::pow(std::min(c, (x[i] - y[perm[i]]).norm()), p);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow((best + std::pow(c, p) * static_cast<double>(n - m)) / static_cast<double>(n), 1.0 / p);
}

Verdict ospa_suite() {
    const PointSet a{Vec2(1, 2), Vec2(-3, 0.5), Vec2(4, 4)};
    bool examples = ospa(a, a, 5.0, 1.0) == 0.0 && std::abs(ospa({Vec2(0, 0)}, {}, 5.0, 1.0) - 5.0) <= 1e-12 &&
                    std::abs(ospa({Vec2(0, 0)}, {Vec2(3, 4)}, 5.0, 1.0) - 5.0) <= 1e-12 &&
                    std::abs(ospa({Vec2(0, 0)}, {Vec2(3, 4)}, 10.0, 1.0) - 5.0) <= 1e-12;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    auto random_set = [&](std::size_t size) {
        PointSet s;
        for (std::size_t i = 0; i < size; ++i) s.emplace_back(u(rng), u(rng));
        return s;
    };
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto x = random_set(rng() % 7);
        const auto y = random_set(rng() % 7);
        const double p = t % 2 == 0 ? 1.0 : 2.0;
        worst = std::max(worst, std::abs(ospa(x, y, 5.0, p) - brute_ospa(x, y, 5.0, p)));
    }
    return {examples && worst <= 1e-12, fmt("worked examples %s, brute-force worst %.2e", examples ? "ok" : "wrong", worst)};
}

// ---------------------------------------------------------------------------

struct TrendRuns {
    MatrixReport first;
    fs::path dir_a, dir_b;
    std::string error;
};

TrendRuns run_trend(const fs::path& config, const fs::path& work) {
    TrendRuns r;
    try {
        const auto matrix = load_experiment_config(config);
        const int workers = std::max(1u, std::thread::hardware_concurrency());
        r.dir_a = work / "trend_a";
        r.dir_b = work / "trend_b";
        for (const auto& d : {r.dir_a, r.dir_b}) fs::remove_all(d), fs::create_directories(d);
        Clock clock;
        r.first = run_matrix(matrix, workers, r.dir_a);
        write_report(r.first, r.dir_a);
        std::cout << fmt("  trend matrix: %zu cells, %d workers, %.0f s\n", r.first.cells.size(), workers, clock.seconds());
        write_summary(r.first, std::cout);
        write_report(run_matrix(matrix, workers, r.dir_b), r.dir_b);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

Verdict trend(const TrendRuns& runs) {
    if (!runs.error.empty()) return {false, "matrix run failed: " + runs.error};
    const auto& rep = runs.first;
    bool pass = true;
    std::string detail;
    for (const auto& s : rep.summaries) {
        if (!is_team_centric(s.key.strategy)) continue;
        const auto* base = rep.summary({s.key.n, Strategy::None, s.key.fusion});
        if (!base) return {false, "missing baseline cell for " + s.key.label()};
        const bool ospa_ok = s.ospa_mean <= base->ospa_mean && s.ospa_sign_p < 0.05;
        const bool nmse_ok = s.nmse_mean <= base->nmse_mean && s.nmse_sign_p < 0.05;
        const Strategy robot = s.key.strategy == Strategy::TCGMC ? Strategy::RCGMC : Strategy::RCAMC;
        const auto* rc = rep.summary({s.key.n, robot, s.key.fusion});
        const bool vs_robot = rc && (s.ospa_mean <= rc->ospa_mean || s.nmse_mean <= rc->nmse_mean);
        pass = pass && ospa_ok && nmse_ok && vs_robot && s.failures == 0;
        detail += fmt("%s: ospa %.4f vs base %.4f (p=%.3g), nmse %.4f vs base %.4f (p=%.3g), %s robot-centric; ",
                      s.key.label().c_str(), s.ospa_mean, base->ospa_mean, s.ospa_sign_p, s.nmse_mean, base->nmse_mean,
                      s.nmse_sign_p, vs_robot ? "<=" : "worse than");
    }
    return {pass, detail};
}

Verdict edge_density(const TrendRuns& runs) {
    if (!runs.error.empty()) return {false, "matrix run failed: " + runs.error};
    bool pass = true;
    std::string detail;
    for (const auto& [key, outcomes] : runs.first.outcomes) {
        if (!is_design_strategy(key.strategy) && key.strategy != Strategy::Greedy) continue;
        double worst = 0.0, sum = 0.0;
        int count = 0;
        for (const auto& o : outcomes) {
            if (!o.log) continue;
            const double d = o.log->final_edge_density();
            worst = std::max(worst, d);
            sum += d;
            ++count;
        }
        const double mean = count ? sum / count : 0.0;
        if (key.strategy == Strategy::Greedy) pass = pass && mean > 0.6;
        else pass = pass && worst <= 0.6 + 1e-12;
        detail += fmt("%s final density mean %.2f max %.2f; ", key.label().c_str(), mean, worst);
    }
    return {pass, detail};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Verdict determinism(const TrendRuns& runs) {
    if (!runs.error.empty()) return {false, "matrix run failed: " + runs.error};
    int files = 0, differ = 0;
    for (const auto& entry : fs::recursive_directory_iterator(runs.dir_a)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        const auto rel = fs::relative(entry.path(), runs.dir_a);
        ++files;
        differ += slurp(entry.path()) != slurp(runs.dir_b / rel);
    }
    return {files > 0 && differ == 0, fmt("%d CSV files compared, %d differ", files, differ)};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path config = RMTT_TREND_CONFIG;
    fs::path work = fs::temp_directory_path() / "rmtt_acceptance";
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) config = argv[++i];
        else if (a == "--work" && i + 1 < argc) work = argv[++i];
        else wanted.insert(std::stoi(a));
    }
    auto want = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

    bool all = true;
    auto report = [&](int c, const char* name, const Verdict& v) {
        all = all && v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << name << "): " << v.detail << std::endl;
    };
    if (want(1)) report(1, "connectivity LMI vs reachability", connectivity_equivalence());
    if (want(2)) report(2, "trace bound", trace_bound());
    if (want(3)) report(3, "configuration oracle", oracle_equivalence());
    if (want(4)) report(4, "Kalman reduction", kalman_reduction());
    if (want(5)) report(5, "fusion properties", fusion_properties());
    if (want(6)) report(6, "OSPA suite", ospa_suite());
    if (want(7) || want(8) || want(9)) {
        const auto runs = run_trend(config, work);
        if (want(7)) report(7, "trend", trend(runs));
        if (want(8)) report(8, "edge density", edge_density(runs));
        if (want(9)) report(9, "determinism", determinism(runs));
    }
    return all ? 0 : 1;
}
