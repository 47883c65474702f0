#include "rmtt/phd_filter.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rmtt {

MotionModel MotionModel::constant_velocity(double dt, const Mat4& process_noise) {
    MotionModel m;
    m.F = Mat4::Identity();
    m.F(0, 2) = dt;
    m.F(1, 3) = dt;
    m.Q = process_noise;
    return m;
}

OutputMatrix position_output() {
    OutputMatrix h = OutputMatrix::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return h;
}

double SensorModel::clutter_density() const {
    return clutter_rate / (std::numbers::pi * fov_radius * fov_radius);
}

double SensorModel::detection_probability(const Vec4& mean) const {
    if (!fov_center) return p_detect;
    const Vec2 offset = mean.head<2>() - *fov_center;
    return offset.norm() <= fov_radius ? p_detect : 0.0;
}

void SensorModel::validate() const {
    if (!(p_detect >= 0.0 && p_detect <= 1.0)) throw InvalidArgument("p_detect must lie in [0, 1]");
    if (!(fov_radius > 0.0)) throw InvalidArgument("fov_radius must be positive");
    if (!(clutter_rate >= 0.0)) throw InvalidArgument("clutter_rate must be non-negative");
    if (!is_symmetric(R, 1e-10) || !is_positive_definite(R))
        throw NotPositiveDefinite("measurement noise R");
}

GaussianMixture predict(const GaussianMixture& m, const MotionModel& motion,
                        const BirthModel& birth, double p_survive) {
    if (!(p_survive >= 0.0 && p_survive <= 1.0))
        throw InvalidArgument("p_survive must lie in [0, 1]");
    const Vec4 drift = motion.G * motion.u;
    GaussianMixture out;
    out.reserve(m.size() + birth.components.size());
    for (const auto& c : m) {
        GaussianComponent p;
        p.weight = p_survive * c.weight;
        p.mean = motion.F * c.mean + drift;
        p.covariance = symmetrize(motion.Q + motion.F * c.covariance * motion.F.transpose());
        out.push_back(std::move(p));
    }
    out.insert(out.end(), birth.components.begin(), birth.components.end());
    return out;
}

namespace {

struct UpdateTerms {
    double p_detect = 0.0;
    Vec2 predicted_z;
    Eigen::LLT<Mat2> s_llt;
    double log_norm = 0.0;  // -0.5 (2 ln 2pi + ln|S|)
    Eigen::Matrix<double, 4, 2> gain;
    Mat4 posterior_cov;
};

}  // namespace

GaussianMixture innovate(const GaussianMixture& m, std::span<const Vec2> measurements,
                         const SensorModel& sensor) {
    sensor.validate();
    GaussianMixture out;
    out.reserve(m.size() * (1 + measurements.size()));

    std::vector<UpdateTerms> terms(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& c = m[i];
        auto& t = terms[i];
        t.p_detect = sensor.detection_probability(c.mean);
        out.push_back({(1.0 - t.p_detect) * c.weight, c.mean, c.covariance});
        if (t.p_detect <= 0.0) continue;
        const Mat2 s = symmetrize(sensor.R + sensor.H * c.covariance * sensor.H.transpose());
        t.s_llt.compute(s);
        if (t.s_llt.info() != Eigen::Success || !s.allFinite())
            throw NotPositiveDefinite("innovation covariance S");
        const double log_det = 2.0 * std::log(t.s_llt.matrixL()(0, 0) * t.s_llt.matrixL()(1, 1));
        t.log_norm = -0.5 * (2.0 * std::log(2.0 * std::numbers::pi) + log_det);
        t.predicted_z = sensor.H * c.mean;
        const Eigen::Matrix<double, 4, 2> pht = c.covariance * sensor.H.transpose();
        t.gain = t.s_llt.solve(pht.transpose()).transpose();
        t.posterior_cov = symmetrize((Mat4::Identity() - t.gain * sensor.H) * c.covariance);
    }

    const double clutter = sensor.clutter_density();
    const double log_clutter =
        clutter > 0.0 ? std::log(clutter) : -std::numeric_limits<double>::infinity();
    std::vector<double> log_num(m.size());
    for (const Vec2& z : measurements) {
        double max_log = log_clutter;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto& t = terms[i];
            if (t.p_detect <= 0.0 || m[i].weight <= 0.0) {
                log_num[i] = -std::numeric_limits<double>::infinity();
                continue;
            }
            const Vec2 innov = z - t.predicted_z;
            const double maha = innov.dot(t.s_llt.solve(innov));
            log_num[i] = std::log(t.p_detect * m[i].weight) + t.log_norm - 0.5 * maha;
            max_log = std::max(max_log, log_num[i]);
        }
        double denom = std::isfinite(max_log) ? std::exp(log_clutter - max_log) : 0.0;
        for (double ln : log_num) denom += std::isfinite(ln) ? std::exp(ln - max_log) : 0.0;

        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto& t = terms[i];
            if (t.p_detect <= 0.0) continue;
            GaussianComponent d;
            d.weight = (denom > 0.0 && std::isfinite(log_num[i]))
                           ? std::exp(log_num[i] - max_log) / denom
                           : 0.0;
            d.mean = m[i].mean + t.gain * (z - t.predicted_z);
            d.covariance = t.posterior_cov;
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace rmtt
