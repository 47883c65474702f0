#pragma once

#include "rmtt/gaussian_mixture.hpp"

#include <optional>
#include <span>

namespace rmtt {

/// s[k+1] = F s[k] + G u + w,  w ~ N(0, Q).
struct MotionModel {
    Mat4 F = Mat4::Identity();
    MatX G = MatX::Zero(4, 2);
    Mat4 Q = Mat4::Zero();
    VecX u = VecX::Zero(2);

    /// Constant-velocity model on both axes with sampling period dt.
    static MotionModel constant_velocity(double dt, const Mat4& process_noise);
};

using OutputMatrix = Eigen::Matrix<double, 2, 4>;

/// Position-only output matrix [I2 0].
OutputMatrix position_output();

struct SensorModel {
    OutputMatrix H = position_output();
    Mat2 R = Mat2::Identity();
    double p_detect = 0.95;
    double fov_radius = 20.0;
    /// Expected clutter returns per scan over the whole field of view.
    double clutter_rate = 0.0;
    /// Ground-plane centre of the sensing disc. When set, a component whose
    /// mean position lies outside the disc gets detection probability 0.
    std::optional<Vec2> fov_center;

    /// Clutter intensity per unit area, uniform over the sensing disc.
    double clutter_density() const;
    double detection_probability(const Vec4& mean) const;
    void validate() const;
};

struct BirthModel {
    GaussianMixture components;
};

/// GM-PHD prediction: survivors scaled by p_survive and pushed through the
/// motion model, followed by the unchanged birth components.
GaussianMixture predict(const GaussianMixture& m, const MotionModel& motion,
                        const BirthModel& birth, double p_survive);

/// GM-PHD measurement update.
///
/// The first |m| outputs are the missed-detection terms (weights scaled by
/// 1 - p_D). Then, for each measurement in order, one Kalman-updated term per
/// detectable component (p_D > 0) with weight
///   p_D a N(z; H mu, S) / (c(z) + sum_j p_D a_j N(z; H mu_j, S_j)).
/// Components with p_D = 0 contribute no detection terms, so p_D = 0 leaves
/// the mixture untouched.
GaussianMixture innovate(const GaussianMixture& m, std::span<const Vec2> measurements,
                         const SensorModel& sensor);

}  // namespace rmtt
