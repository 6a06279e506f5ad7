/**
 * @file filter.hpp
 * @brief Generic extended Kalman filtering on matrix Lie groups: discrete
 *        predict/update steps for left- and right-invariant error
 *        parametrizations, and a continuous-discrete propagation step.
 *
 * The filter state is a Concentrated Gaussian on the group: a group-valued
 * mean plus a covariance over tangent coordinates. All steps are pure
 * functions from (belief, inputs) to belief and symmetrize the covariance
 * before returning.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_FILTER_HPP
#define KIO_FILTER_HPP

#include <functional>

#include <Eigen/Dense>

#include "kio/errors.hpp"
#include "kio/lie.hpp"

namespace kio::filter
{

/** Side on which the estimation error lives. Fixed per filter instance. */
enum class ErrorConvention
{
    LeftInvariant,
    RightInvariant
};

/** Concentrated Gaussian belief: group-valued mean, tangent-space covariance. */
struct Belief
{
    lie::GroupElement mean;
    Eigen::MatrixXd cov;
};

/**
 * One-step motion model: the left-trivialized increment (the group "distance"
 * traveled over the step), its state Jacobian, and the discrete process noise.
 */
struct MotionSpec
{
    lie::TangentVector omega;
    Eigen::MatrixXd motionJacobian;
    Eigen::MatrixXd processNoise;
};

/**
 * One group-valued measurement: the observed element on the observation group,
 * the predicted measurement h(mean) supplied by the caller, the measurement
 * Jacobian in the filter's error convention, and the measurement noise.
 */
struct MeasurementSpec
{
    lie::GroupElement observed;
    lie::GroupElement predicted;
    Eigen::MatrixXd measJacobian;
    Eigen::MatrixXd measNoise;
};

/** Condition-number limit above which an innovation matrix is declared singular. */
inline constexpr double kMaxInnovationCondition = 1e12;

/**
 * Discrete predict for the left-invariant error convention:
 *   mean <- mean * exp(omega)
 *   P    <- F P F^T + Jr(omega) Q Jr(omega)^T,  F = Ad_{exp(-omega)} + Jr(omega) * motionJacobian.
 */
Belief predictLeftInvariant(const Belief& b, const MotionSpec& m);

/**
 * Discrete predict for the right-invariant error convention:
 *   mean <- mean * exp(omega)
 *   P    <- F P F^T + Ad_mean Jl(omega) Q Jl(omega)^T Ad_mean^T,
 *   F = I + Ad_mean Jl(omega) * motionJacobian   (Ad at the pre-step mean).
 */
Belief predictRightInvariant(const Belief& b, const MotionSpec& m);

/**
 * Measurement update for the left-invariant convention:
 *   z = log(predicted^-1 * observed); K = P H^T (H P H^T + N)^-1; m = K z
 *   mean <- mean * exp(m); P <- Jr(m) (I - K H) P Jr(m)^T.
 * Raises SingularUpdateError when the innovation matrix is not positive
 * definite or its condition number exceeds kMaxInnovationCondition.
 */
Belief updateLeftInvariant(const Belief& b, const MeasurementSpec& s);

/**
 * Measurement update for the right-invariant convention: as the left update
 * but mean <- exp(m) * mean and P <- Jl(m) (I - K H) P Jl(m)^T.
 */
Belief updateRightInvariant(const Belief& b, const MeasurementSpec& s);

/**
 * Continuous-discrete predict: the mean moves by the supplied discrete
 * propagation function while the covariance follows the first-order hold
 *   Fk = I + Fc dt;  Qk = Fk QcHat Fk^T dt;  P <- Fk P Fk^T + Qk.
 */
Belief predictContinuousDiscrete(
    const Belief& b, const std::function<lie::GroupElement(const lie::GroupElement&)>& meanProp,
    const Eigen::MatrixXd& fc, const Eigen::MatrixXd& qcHat, double dt);

/**
 * Group-affinity residual of a dynamics function f (a test oracle):
 *   f(X1 X2) - f(X1) X2 - X1 f(X2) + X1 f(I) X2.
 * Zero for group-affine dynamics.
 */
Eigen::MatrixXd
checkGroupAffine(const std::function<Eigen::MatrixXd(const lie::GroupElement&)>& f,
                 const lie::GroupElement& x1, const lie::GroupElement& x2);

} // namespace kio::filter

#endif // KIO_FILTER_HPP
