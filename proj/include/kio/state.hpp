/**
 * @file state.hpp
 * @brief The kinematic-inertial odometry (KIO) state: base extended pose, foot
 *        poses, and IMU biases, together with its matrix-group embedding and
 *        the sensor/noise value types shared by the filter variants.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_STATE_HPP
#define KIO_STATE_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "kio/errors.hpp"
#include "kio/filter.hpp"
#include "kio/lie.hpp"

namespace kio
{

/** World-frame gravitational acceleration, z-up convention. */
inline const Eigen::Vector3d& gravity()
{
    static const Eigen::Vector3d g(0.0, 0.0, -9.80665);
    return g;
}

enum class Foot
{
    LF,
    RF
};

inline const char* footName(Foot f)
{
    return f == Foot::LF ? "LF" : "RF";
}

/**
 * Estimated state: base position/rotation/velocity, left and right foot
 * position/rotation, and accelerometer/gyroscope biases. All world-frame
 * except the biases (body frame).
 */
struct KioState
{
    Eigen::Vector3d p{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d R{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d v{Eigen::Vector3d::Zero()};
    Eigen::Vector3d dLf{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d zLf{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d dRf{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d zRf{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d ba{Eigen::Vector3d::Zero()};
    Eigen::Vector3d bg{Eigen::Vector3d::Zero()};
};

/** One IMU sample: body-frame specific force and angular velocity. */
struct ImuSample
{
    double t{0.0};
    Eigen::Vector3d acc{Eigen::Vector3d::Zero()};
    Eigen::Vector3d gyro{Eigen::Vector3d::Zero()};
};

/** Per-tick contact schedule. Both false means no update that tick. */
struct ContactFlags
{
    bool lf{false};
    bool rf{false};
};

/**
 * Base-to-foot relative pose measurement with its left-trivialized 6x6
 * covariance, ordered (linear, angular).
 */
struct RelPoseMeasurement
{
    Foot foot{Foot::LF};
    Eigen::Matrix4d pose{Eigen::Matrix4d::Identity()};
    Eigen::Matrix<double, 6, 6> noiseCov{Eigen::Matrix<double, 6, 6>::Identity()};
};

/**
 * Sensor noise densities and prior standard deviations. The bias stds are
 * random-walk driving rates (per sqrt-second).
 */
struct NoiseParams
{
    double accelStd{0.09};
    double gyroStd{0.01};
    double accelBiasStd{0.01};
    double gyroBiasStd{0.001};
    double contactLinStd{0.009};
    double contactAngStd{0.004};
    double encoderStd{0.1 * M_PI / 180.0};
    double swingScale{1e3};

    double priorPositionStd{0.01};
    double priorOrientationStd{10.0 * M_PI / 180.0};
    double priorVelocityStd{0.5};
    double priorAccelBiasStd{0.01};
    double priorGyroBiasStd{0.002};

    /**
     * Raises ValidationError on negative entries; with strict=true (the run
     * configuration path) also on zero entries. The simulator accepts zero
     * stds to synthesize noise-free datasets.
     */
    void validate(bool strict) const;
};

/** The four filter variants. */
enum class FilterVariant
{
    DiligentKio,
    DiligentKioRie,
    CodiligentKio,
    CodiligentKioRie
};

/** Command-line/config spelling of a variant, e.g. "codiligent-kio-rie". */
std::string variantName(FilterVariant v);

/** Inverse of variantName; raises ValidationError on unknown names. */
FilterVariant parseVariant(const std::string& name);

/** Error convention each variant filters in. */
filter::ErrorConvention variantConvention(FilterVariant v);

/** Tangent-coordinate offsets of the 27-dimensional state error. */
namespace idx
{
inline constexpr int p = 0;
inline constexpr int r = 3;
inline constexpr int v = 6;
inline constexpr int dLf = 9;
inline constexpr int zLf = 12;
inline constexpr int dRf = 15;
inline constexpr int zRf = 18;
inline constexpr int ba = 21;
inline constexpr int bg = 24;
inline constexpr int dim = 27;
} // namespace idx

/** The composite state group: extended base pose x two foot poses x biases. */
const lie::GroupId& kioGroup();

/** 20x20 block-diagonal matrix-group embedding of the state. */
lie::GroupElement embed(const KioState& x);

/** Inverse of embed; raises GroupMismatchError for foreign elements. */
KioState extract(const lie::GroupElement& g);

} // namespace kio

#endif // KIO_STATE_HPP
