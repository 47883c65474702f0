#include "rmtt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmtt {

// Hungarian method with row/column potentials (shortest augmenting paths).
std::vector<int> min_cost_assignment(const MatX& cost) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    if (rows > cols) throw InvalidArgument("assignment needs rows <= cols");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<int> match(cols + 1, 0), way(cols + 1, 0);
    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<bool> used(cols + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(rows, -1);
    for (int j = 1; j <= cols; ++j)
        if (match[j] != 0) assignment[match[j] - 1] = j - 1;
    return assignment;
}

double ospa(const PointSet& x, const PointSet& y, double c, double p) {
    if (!(c > 0.0)) throw InvalidArgument("OSPA cutoff must be positive");
    if (!(p >= 1.0)) throw InvalidArgument("OSPA order must be >= 1");
    // Canonical role assignment so that ospa(x, y) and ospa(y, x) run the
    // identical computation.
    bool x_first = x.size() < y.size();
    if (x.size() == y.size()) {
        auto key = [](PointSet s) {
            std::sort(s.begin(), s.end(), [](const Vec2& a, const Vec2& b) {
                return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
            return s;
        };
        const PointSet kx = key(x), ky = key(y);
        x_first = std::lexicographical_compare(
            kx.begin(), kx.end(), ky.begin(), ky.end(), [](const Vec2& a, const Vec2& b) {
                return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            }) || kx.size() == 0;
    }
    const PointSet& small = x_first ? x : y;
    const PointSet& large = x_first ? y : x;
    const auto m = small.size();
    const auto n = large.size();
    if (n == 0) return 0.0;

    MatX cost(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost(i, j) = std::pow(std::min(c, (small[i] - large[j]).norm()), p);
    double total = 0.0;
    if (m > 0) {
        const auto assignment = min_cost_assignment(cost);
        for (std::size_t i = 0; i < m; ++i) total += cost(i, assignment[i]);
    }
    total += std::pow(c, p) * static_cast<double>(n - m);
    return std::min(c, std::pow(total / static_cast<double>(n), 1.0 / p));
}

double nmse(std::span<const double> estimates, std::span<const double> truth) {
    if (estimates.size() != truth.size()) throw InvalidArgument("NMSE sequences differ in length");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        num += (estimates[k] - truth[k]) * (estimates[k] - truth[k]);
        den += truth[k] * truth[k];
    }
    if (!(den > 0.0)) throw InvalidArgument("NMSE undefined for an all-zero truth sequence");
    return num / den;
}

}  // namespace rmtt
