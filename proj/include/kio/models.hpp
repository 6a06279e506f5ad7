/**
 * @file models.hpp
 * @brief Motion and measurement models for contact-aided kinematic-inertial
 *        odometry, their analytic Jacobians in both invariant-error
 *        conventions, and the assembled filter variants.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_MODELS_HPP
#define KIO_MODELS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kio/filter.hpp"
#include "kio/lie.hpp"
#include "kio/state.hpp"

namespace kio
{

/**
 * Noise-free discrete strapdown step: integrates bias-compensated IMU values
 * over dt on the state group (rotation by the exponential, position/velocity
 * through the group's translational columns), leaving feet and biases fixed.
 */
KioState propagateMean(const KioState& x, const ImuSample& u, double dt);

/**
 * Body-trivialized motion increment: the 27-vector Omega with the base block
 * (R^T v dt + 0.5 a dt^2, w dt, a dt) from gravity- and bias-compensated IMU
 * values, zeros elsewhere, so that embed(x) * exp_hat(Omega) reproduces
 * propagateMean.
 */
Eigen::VectorXd omega(const KioState& x, const ImuSample& u, double dt);

/**
 * Discrete process-noise covariance of the trivialized noise vector,
 * including the position-velocity cross-covariance induced by the shared
 * accelerometer noise. Foot noise stds are multiplied by np.swingScale for
 * any foot not in contact.
 */
Eigen::MatrixXd processNoise(const NoiseParams& np, const ContactFlags& contacts, double dt);

/**
 * Analytic derivative of omega under a left-side state perturbation
 * exp(eps) * X. Used by the right-invariant discrete predict step.
 */
Eigen::MatrixXd motionJacobianRie(const KioState& x, double dt);

/**
 * Analytic derivative of omega under a right-side state perturbation
 * X * exp(eps). Used by the left-invariant discrete predict step. The input
 * sample is accepted for interface symmetry; the derivative does not depend
 * on it.
 */
Eigen::MatrixXd motionJacobianLie(const KioState& x, const ImuSample& u, double dt);

/** Continuous-time linearized error model: rate matrix and noise coupling. */
struct ContinuousErrorModel
{
    Eigen::MatrixXd fc;
    Eigen::MatrixXd lc;
};

/**
 * Right-invariant continuous error model. The error-rate matrix couples the
 * base block to the biases through the current estimate; its bias-free
 * leading 21x21 block is state-independent. The noise coupling is the group
 * adjoint at the current estimate.
 */
ContinuousErrorModel continuousErrorModelRie(const KioState& x);

/**
 * Left-invariant continuous error model. The error-rate matrix depends on
 * the bias-compensated IMU sample (time-varying); the noise coupling is the
 * identity.
 */
ContinuousErrorModel continuousErrorModelLie(const ImuSample& u, const KioState& x);

/**
 * Covariance of the continuous-time noise vector (densities, no dt): zero on
 * the position block, IMU densities on the rotation/velocity blocks, contact
 * densities on the foot blocks (swing-scaled when out of contact), and the
 * bias driving rates on the bias block.
 */
Eigen::MatrixXd continuousNoiseCov(const NoiseParams& np, const ContactFlags& contacts);

/** Predicted base-to-foot relative pose h(x) = (R^T Z_F, R^T (d_F - p)). */
Eigen::Matrix4d predictMeasurement(const KioState& x, Foot foot);

/**
 * Analytic 6x27 derivative of the log-innovation of the relative-pose
 * measurement under the requested error convention, rows ordered
 * (linear, angular).
 */
Eigen::Matrix<double, 6, 27> measurementJacobian(const KioState& x, Foot foot,
                                                 filter::ErrorConvention conv);

/** The SE(3) x SE(3) product group used for double-support observations. */
const lie::GroupId& doubleSupportGroup();

/**
 * Stacks two single-foot relative-pose observations into one product-group
 * measurement: observed = blkdiag(zl, zr), Jacobian = row stack, noise =
 * blkdiag. The predicted element is left at identity for the caller to fill
 * from the current estimate.
 */
filter::MeasurementSpec stackDoubleSupport(const Eigen::Matrix<double, 6, 27>& hl,
                                           const Eigen::Matrix<double, 6, 27>& hr,
                                           const Eigen::Matrix4d& zl, const Eigen::Matrix4d& zr,
                                           const Eigen::Matrix<double, 6, 6>& nl,
                                           const Eigen::Matrix<double, 6, 6>& nr);

/**
 * Pose-measurement covariance pushed forward from joint-encoder noise through
 * a relative-kinematics Jacobian (6 x DOF): N = jRel * encoder_var * jRel^T
 * plus a 1e-12 diagonal regularizer. Without a Jacobian, falls back to a
 * diagonal built from the encoder std on all six axes.
 */
Eigen::Matrix<double, 6, 6> measurementNoise(const std::optional<Eigen::MatrixXd>& jRel,
                                             const NoiseParams& np);

/** Diagonal prior covariance over the 27 error coordinates. */
Eigen::MatrixXd priorCovariance(const NoiseParams& np);

/**
 * Initial belief around a reference state: the prior covariance, with the
 * mean either exactly at the reference (exactInit) or offset by a sampled
 * prior error on the side matching the convention.
 */
filter::Belief initialBelief(const KioState& truth, const NoiseParams& np,
                             filter::ErrorConvention conv, bool exactInit, std::uint64_t seed);

/**
 * One filter variant bound to its noise parameters. step() runs one
 * predict/update cycle: the variant's predict step, then at most one
 * contact-gated relative-pose update (stacked when both feet are in
 * contact).
 */
class KioFilter
{
public:
    KioFilter(FilterVariant variant, const NoiseParams& np);

    FilterVariant variant() const
    {
        return m_variant;
    }

    const NoiseParams& noise() const
    {
        return m_noise;
    }

    filter::ErrorConvention convention() const
    {
        return variantConvention(m_variant);
    }

    /**
     * Advances the belief by one tick. meas may hold at most one entry per
     * foot; entries for feet not flagged in-contact are ignored. With no
     * usable measurement the step is predict-only.
     */
    filter::Belief step(const filter::Belief& b, const ImuSample& u, const ContactFlags& contacts,
                        const std::vector<RelPoseMeasurement>& meas, double dt) const;

private:
    filter::Belief predict(const filter::Belief& b, const ImuSample& u,
                           const ContactFlags& contacts, double dt) const;

    FilterVariant m_variant;
    NoiseParams m_noise;
};

} // namespace kio

#endif // KIO_MODELS_HPP
