/**
 * @file sim.hpp
 * @brief Synthetic biped-gait generator and sensor synthesizers producing
 *        datasets with exact ground truth.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_SIM_HPP
#define KIO_SIM_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kio/state.hpp"

namespace kio
{

/**
 * Gait and sensor configuration. Geometry beyond the core walking parameters
 * (rests, sway, step height, stance width) has conservative defaults and is
 * exposed for the stationary/sway scenarios.
 */
struct GaitConfig
{
    double stepLength{0.1};
    double stepDuration{0.8};
    double doubleSupportFraction{0.3};
    double walkDistance{1.0};
    double rate{100.0};
    double baseHeight{0.6};
    double restDuration{0.5};
    double stepHeight{0.05};
    double footSeparation{0.2};
    double swayAmplitude{0.0};
    double swayFrequency{0.5};
    std::uint64_t seed{1};
    NoiseParams noise{};
    Eigen::Matrix<double, 6, 1> initialBias{Eigen::Matrix<double, 6, 1>::Zero()};

    /** Raises ValidationError naming the offending field. */
    void validate() const;
};

/** Ground-truth sample: exact state and the contact schedule at time t. */
struct TruthSample
{
    double t{0.0};
    KioState state{};
    ContactFlags contacts{};
};

/**
 * Generates a straight-line alternating-stance walk: piecewise-quintic base
 * and swing-foot trajectories (twice continuously differentiable position,
 * analytic velocity), level identity orientation with optional lateral sway,
 * stance feet exactly stationary, uniform timestamps at 1/rate. The walk is
 * bracketed by double-support rests of restDuration; with swayAmplitude = 0
 * (the default) the trajectory starts and ends at exact rest.
 */
std::vector<TruthSample> generateGait(const GaitConfig& cfg);

/**
 * Inverse IMU model: accelerometer/gyroscope readings from the truth via
 * central differences of the analytic velocity and rotation (one-sided at
 * the ends), plus additive white noise and a bias random walk driven at the
 * configured rates from bias0. The walked bias path is written back into the
 * truth samples so downstream error metrics see the true biases.
 */
std::vector<ImuSample> synthesizeImu(std::vector<TruthSample>& truth, const NoiseParams& np,
                                     const Eigen::Matrix<double, 6, 1>& bias0,
                                     std::uint64_t seed);

/**
 * Relative-pose measurements for every in-contact foot (left before right
 * within a tick): the exact base-to-foot pose right-perturbed by
 * exp of a correlated 6-vector noise draw pushed through the synthetic
 * kinematics Jacobian; noiseCov reports the matching covariance.
 */
std::vector<RelPoseMeasurement> synthesizeRelpose(const std::vector<TruthSample>& truth,
                                                  const NoiseParams& np, std::uint64_t seed);

/**
 * Fixed 6x6 stand-in for a leg-kinematics Jacobian: a row-normalized
 * cyclic mixing matrix scaled by a gain of 5, so joint-encoder noise maps to
 * correlated pose noise of realistic magnitude.
 */
Eigen::Matrix<double, 6, 6> syntheticKinematicsJacobian();

} // namespace kio

#endif // KIO_SIM_HPP
