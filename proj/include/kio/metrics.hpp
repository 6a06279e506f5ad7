/**
 * @file metrics.hpp
 * @brief Trajectory-error (ATE/RPE) and filter-consistency metrics.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_METRICS_HPP
#define KIO_METRICS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kio/filter.hpp"
#include "kio/state.hpp"

namespace kio::metrics
{

/** Timestamped base pose (4x4 rigid transform). */
struct PoseSample
{
    double t{0.0};
    Eigen::Matrix4d pose{Eigen::Matrix4d::Identity()};
};

/** Combined trajectory-error summary. All entries are non-negative. */
struct TrajectoryErrorReport
{
    double atePosRmse{0.0}; // m
    double ateRotRmse{0.0}; // rad
    double rpePos{0.0};     // m per window
    double rpeRot{0.0};     // rad per window
    double window{0.0};     // s
};

/**
 * Envelope-violation fractions and NEES summary. Violation fractions are
 * per axis over the tick series; NEES is averaged per 3-dimensional state
 * block in tangent order (p, r, v, dLf, zLf, dRf, zRf, ba, bg).
 */
struct ConsistencyReport
{
    Eigen::Vector3d positionViolation{Eigen::Vector3d::Zero()};
    Eigen::Vector3d orientationViolation{Eigen::Vector3d::Zero()};
    Eigen::Vector3d velocityViolation{Eigen::Vector3d::Zero()};
    Eigen::Matrix<double, 9, 1> meanNees{Eigen::Matrix<double, 9, 1>::Zero()};
    double quantile{0.99};
    std::size_t ticks{0};
    std::size_t skippedTicks{0}; // ticks whose NEES was skipped (non-PD block)
};

/**
 * Absolute trajectory error: after rigid alignment by the first matched
 * ground-truth pose, the RMSE of position residuals and of rotation
 * log-angles over all timestamp-matched samples.
 *
 * Raises ValidationError when fewer than 2 samples match by timestamp.
 */
std::pair<double, double> ate(const std::vector<PoseSample>& est,
                              const std::vector<PoseSample>& gt);

/**
 * Relative pose error over overlapping windows of the given length: for each
 * start index i the error transform E = (gt_i^-1 gt_{i+d})^-1 (est_i^-1
 * est_{i+d}); reports the RMSE of translation norms and rotation angles.
 * The window is converted to a whole number of ticks at the sample rate.
 *
 * Raises ValidationError when the window is shorter than one tick or longer
 * than the matched trajectory.
 */
std::pair<double, double> rpe(const std::vector<PoseSample>& est,
                              const std::vector<PoseSample>& gt, double window);

/** Convenience wrapper combining ate() and rpe() into one report. */
TrajectoryErrorReport trajectoryError(const std::vector<PoseSample>& est,
                                      const std::vector<PoseSample>& gt, double window);

/**
 * Envelope-violation and NEES statistics for a series of tangent-space errors
 * and matching covariances. An axis counts as violated at a tick when
 * |e_i| > z(quantile) * sqrt(P_ii) with z the two-sided normal quantile
 * (z(0.99) = 2.5758). NEES per 3-dim block is e^T P_block^-1 e; a tick with a
 * non-positive-definite block is skipped for NEES and counted in
 * skippedTicks.
 *
 * The errors must be expressed in the same invariant-error convention the
 * producing filter used.
 */
ConsistencyReport consistency(const std::vector<Eigen::VectorXd>& errors,
                              const std::vector<Eigen::MatrixXd>& covs, double quantile);

/**
 * Invariant tangent-space error between an estimate and the truth on the
 * composite state group: log_vee(est^-1 * gt) for the left-invariant
 * convention, log_vee(gt * est^-1) for the right-invariant one.
 */
Eigen::VectorXd tangentError(const KioState& est, const KioState& gt,
                             filter::ErrorConvention conv);

/**
 * Standard normal quantile (inverse CDF) for p in (0, 1), computed by
 * bisection on the erf-based CDF to ~1e-13. normalQuantile(0.995) = 2.5758...
 * is the two-sided 99% envelope multiplier.
 */
double normalQuantile(double p);

} // namespace kio::metrics

#endif // KIO_METRICS_HPP
