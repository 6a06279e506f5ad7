/**
 * @file metrics_test.cpp
 * @brief Oracle tests for ATE/RPE, consistency statistics, tangent errors,
 *        and the normal quantile helper.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kio/errors.hpp"
#include "kio/lie.hpp"
#include "kio/metrics.hpp"
#include "kio/models.hpp"
#include "support.hpp"

namespace kio::test
{
namespace
{

using metrics::PoseSample;

Eigen::Matrix4d makePose(const Eigen::Matrix3d& rot, const Eigen::Vector3d& trans)
{
    Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();
    pose.block<3, 3>(0, 0) = rot;
    pose.block<3, 1>(0, 3) = trans;
    return pose;
}

/** Gently curving deterministic trajectory with distinct poses. */
std::vector<PoseSample> curvedTrajectory(std::size_t n, double dt = 0.01)
{
    std::vector<PoseSample> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double s = static_cast<double>(k);
        const Eigen::Vector3d axis(0.002 * s, -0.001 * s, 0.0015 * s);
        const Eigen::Vector3d trans(0.005 * s, 0.05 * std::sin(0.1 * s),
                                    0.6 + 0.01 * std::cos(0.07 * s));
        out.push_back({s * dt, makePose(lie::expSo3(axis), trans)});
    }
    return out;
}

Eigen::Matrix4d rigidOffset()
{
    return makePose(lie::expSo3(Eigen::Vector3d(0.4, -0.3, 0.8)),
                    Eigen::Vector3d(1.5, -2.0, 0.7));
}

KioState randomState(Rng& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto vec3 = [&] { return Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)); };
    const auto rot = [&] {
        Eigen::Vector3d axis = vec3();
        if (axis.norm() > 1.5)
        {
            axis *= 1.5 / axis.norm();
        }
        return lie::expSo3(axis);
    };
    KioState x;
    x.p = vec3();
    x.R = rot();
    x.v = vec3();
    x.dLf = vec3();
    x.zLf = rot();
    x.dRf = vec3();
    x.zRf = rot();
    x.ba = 0.05 * vec3();
    x.bg = 0.05 * vec3();
    return x;
}

Eigen::VectorXd randomTangent27(Rng& rng)
{
    std::normal_distribution<double> gauss(0.0, 0.3);
    Eigen::VectorXd a(idx::dim);
    for (int i = 0; i < idx::dim; ++i)
    {
        a(i) = gauss(rng);
    }
    for (int start : {idx::r, idx::zLf, idx::zRf})
    {
        Eigen::Vector3d seg = a.segment<3>(start);
        if (seg.norm() > 1.0)
        {
            a.segment<3>(start) = seg / seg.norm();
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// ATE
// ---------------------------------------------------------------------------

TEST(AteTest, IdenticalTrajectoriesGiveExactZero)
{
    const std::vector<PoseSample> gt = curvedTrajectory(200);
    const auto [pos, rot] = metrics::ate(gt, gt);
    EXPECT_EQ(pos, 0.0);
    EXPECT_EQ(rot, 0.0);
}

TEST(AteTest, PostStartTranslationOffsetMatchesBruteForce)
{
    const std::vector<PoseSample> gt = curvedTrajectory(150);
    std::vector<PoseSample> est = gt;
    const Eigen::Vector3d offset(0.1, 0.0, 0.0);
    for (std::size_t k = 1; k < est.size(); ++k)
    {
        est[k].pose.block<3, 1>(0, 3) += offset;
    }
    const auto [pos, rot] = metrics::ate(est, gt);

    // Brute-force residual sum with the explicit alignment transform
    // T = gt_0 * est_0^-1 (identity here, since the first poses agree).
    const Eigen::Matrix3d r0 = est.front().pose.block<3, 3>(0, 0);
    const Eigen::Vector3d p0 = est.front().pose.block<3, 1>(0, 3);
    Eigen::Matrix4d align = Eigen::Matrix4d::Identity();
    align.block<3, 3>(0, 0) = gt.front().pose.block<3, 3>(0, 0) * r0.transpose();
    align.block<3, 1>(0, 3) = gt.front().pose.block<3, 1>(0, 3) -
                              align.block<3, 3>(0, 0) * p0;
    double posSq = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k)
    {
        const Eigen::Matrix4d aligned = align * est[k].pose;
        posSq += (aligned.block<3, 1>(0, 3) - gt[k].pose.block<3, 1>(0, 3)).squaredNorm();
    }
    const double expected = std::sqrt(posSq / static_cast<double>(est.size()));
    EXPECT_NEAR(pos, expected, 1e-12);
    EXPECT_GT(pos, 0.0);
    EXPECT_LT(pos, 0.1); // the untouched first pose dilutes the RMSE
    EXPECT_NEAR(rot, 0.0, 1e-12);
}

TEST(AteTest, ConstantRotationPerturbationGivesItsAngle)
{
    const std::vector<PoseSample> gt = curvedTrajectory(101);
    std::vector<PoseSample> est = gt;
    const Eigen::Matrix3d perturb =
        lie::expSo3(0.01 * Eigen::Vector3d(1.0, 2.0, 2.0).normalized());
    for (std::size_t k = 1; k < est.size(); ++k)
    {
        est[k].pose.block<3, 3>(0, 0) = est[k].pose.block<3, 3>(0, 0) * perturb;
    }
    const auto [pos, rot] = metrics::ate(est, gt);
    const double n = static_cast<double>(est.size());
    EXPECT_NEAR(rot, 0.01 * std::sqrt((n - 1.0) / n), 1e-9);
    EXPECT_NEAR(pos, 0.0, 1e-12);
}

TEST(AteTest, FewerThanTwoMatchedSamplesRaises)
{
    const std::vector<PoseSample> gt = curvedTrajectory(10);
    std::vector<PoseSample> shifted = gt;
    for (PoseSample& s : shifted)
    {
        s.t += 0.005; // offset by half a tick: no timestamps match
    }
    EXPECT_THROW(metrics::ate(shifted, gt), ValidationError);
    const std::vector<PoseSample> single(1, gt.front());
    EXPECT_THROW(metrics::ate(single, gt), ValidationError);
    EXPECT_THROW(metrics::ate({}, gt), ValidationError);
}

// ---------------------------------------------------------------------------
// RPE
// ---------------------------------------------------------------------------

TEST(RpeTest, IdenticalTrajectoriesGiveExactZero)
{
    const std::vector<PoseSample> gt = curvedTrajectory(200);
    const auto [pos, rot] = metrics::rpe(gt, gt, 0.5);
    EXPECT_EQ(pos, 0.0);
    EXPECT_EQ(rot, 0.0);
}

TEST(RpeTest, GlobalRigidOffsetCancels)
{
    const std::vector<PoseSample> gt = curvedTrajectory(200);
    const Eigen::Matrix4d offset = rigidOffset();

    // Offset ground truth used as the estimate: relative errors vanish.
    std::vector<PoseSample> est = gt;
    for (PoseSample& s : est)
    {
        s.pose = offset * s.pose;
    }
    {
        const auto [pos, rot] = metrics::rpe(est, gt, 1.0);
        EXPECT_NEAR(pos, 0.0, 1e-12);
        EXPECT_NEAR(rot, 0.0, 1e-12);
    }

    // On an imperfect estimate the metric is unchanged by the offset.
    std::vector<PoseSample> noisy = gt;
    for (std::size_t k = 0; k < noisy.size(); ++k)
    {
        const double s = static_cast<double>(k);
        noisy[k].pose.block<3, 1>(0, 3) +=
            0.01 * Eigen::Vector3d(std::sin(0.3 * s), std::cos(0.5 * s), std::sin(0.7 * s));
        noisy[k].pose.block<3, 3>(0, 0) =
            noisy[k].pose.block<3, 3>(0, 0) *
            lie::expSo3(0.005 * Eigen::Vector3d(std::cos(0.2 * s), std::sin(0.4 * s), 0.3));
    }
    std::vector<PoseSample> noisyOffset = noisy;
    for (PoseSample& s : noisyOffset)
    {
        s.pose = offset * s.pose;
    }
    const auto [pos1, rot1] = metrics::rpe(noisy, gt, 1.0);
    const auto [pos2, rot2] = metrics::rpe(noisyOffset, gt, 1.0);
    EXPECT_GT(pos1, 1e-4);
    EXPECT_NEAR(pos1, pos2, 1e-12);
    EXPECT_NEAR(rot1, rot2, 1e-12);
}

TEST(RpeTest, ConstantSlipAccumulatesLinearly)
{
    const double slip = 1e-3;
    std::vector<PoseSample> gt;
    std::vector<PoseSample> est;
    for (std::size_t k = 0; k < 101; ++k)
    {
        const double t = static_cast<double>(k) * 0.01;
        gt.push_back({t, Eigen::Matrix4d::Identity()});
        est.push_back({t, makePose(Eigen::Matrix3d::Identity(),
                                   Eigen::Vector3d(slip * static_cast<double>(k), 0.0, 0.0))});
    }
    {
        const auto [pos, rot] = metrics::rpe(est, gt, 0.25); // 25-tick window
        EXPECT_NEAR(pos, 25.0 * slip, 1e-12);
        EXPECT_EQ(rot, 0.0);
    }
    {
        const auto [pos, rot] = metrics::rpe(est, gt, 0.01); // single-tick window
        EXPECT_NEAR(pos, slip, 1e-15);
        EXPECT_EQ(rot, 0.0);
    }
}

TEST(RpeTest, WindowValidationRaises)
{
    const std::vector<PoseSample> gt = curvedTrajectory(50); // 0.49 s span
    EXPECT_THROW(metrics::rpe(gt, gt, 5.0), ValidationError);   // longer than trajectory
    EXPECT_THROW(metrics::rpe(gt, gt, 0.004), ValidationError); // rounds below one tick
    EXPECT_THROW(metrics::rpe(gt, gt, 0.0), ValidationError);
    EXPECT_NO_THROW(metrics::rpe(gt, gt, 0.49)); // exactly the trajectory span
}

TEST(RpeTest, CombinedReportMatchesComponents)
{
    const std::vector<PoseSample> gt = curvedTrajectory(120);
    std::vector<PoseSample> est = gt;
    for (std::size_t k = 1; k < est.size(); ++k)
    {
        est[k].pose.block<3, 1>(0, 3) += Eigen::Vector3d(1e-4 * static_cast<double>(k), 0, 0);
    }
    const metrics::TrajectoryErrorReport report = metrics::trajectoryError(est, gt, 0.5);
    const auto [atePos, ateRot] = metrics::ate(est, gt);
    const auto [rpePos, rpeRot] = metrics::rpe(est, gt, 0.5);
    EXPECT_EQ(report.atePosRmse, atePos);
    EXPECT_EQ(report.ateRotRmse, ateRot);
    EXPECT_EQ(report.rpePos, rpePos);
    EXPECT_EQ(report.rpeRot, rpeRot);
    EXPECT_EQ(report.window, 0.5);
}

// ---------------------------------------------------------------------------
// Consistency statistics
// ---------------------------------------------------------------------------

TEST(ConsistencyTest, ZeroErrorsGiveZeroViolations)
{
    const std::vector<Eigen::VectorXd> errors(50, Eigen::VectorXd::Zero(idx::dim));
    const std::vector<Eigen::MatrixXd> covs(
        50, Eigen::MatrixXd(0.01 * Eigen::MatrixXd::Identity(idx::dim, idx::dim)));
    const metrics::ConsistencyReport report = metrics::consistency(errors, covs, 0.99);
    EXPECT_EQ(report.positionViolation.norm(), 0.0);
    EXPECT_EQ(report.orientationViolation.norm(), 0.0);
    EXPECT_EQ(report.velocityViolation.norm(), 0.0);
    EXPECT_EQ(report.meanNees.norm(), 0.0);
    EXPECT_EQ(report.ticks, 50u);
    EXPECT_EQ(report.skippedTicks, 0u);
}

TEST(ConsistencyTest, NormalResidualsMatchQuantile)
{
    Rng rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Fixed correlated covariance with well-conditioned blocks.
    Eigen::MatrixXd a(idx::dim, idx::dim);
    for (int i = 0; i < idx::dim; ++i)
    {
        for (int j = 0; j < idx::dim; ++j)
        {
            a(i, j) = gauss(rng);
        }
    }
    const Eigen::MatrixXd cov =
        a * a.transpose() / idx::dim + 0.5 * Eigen::MatrixXd::Identity(idx::dim, idx::dim);
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

    const std::size_t ticks = 10000;
    std::vector<Eigen::VectorXd> errors;
    errors.reserve(ticks);
    for (std::size_t k = 0; k < ticks; ++k)
    {
        Eigen::VectorXd z(idx::dim);
        for (int i = 0; i < idx::dim; ++i)
        {
            z(i) = gauss(rng);
        }
        errors.push_back(chol * z);
    }
    const std::vector<Eigen::MatrixXd> covs(ticks, cov);
    const metrics::ConsistencyReport report = metrics::consistency(errors, covs, 0.99);

    for (int axis = 0; axis < 3; ++axis)
    {
        EXPECT_NEAR(report.positionViolation(axis), 0.01, 0.005);
        EXPECT_NEAR(report.orientationViolation(axis), 0.01, 0.005);
        EXPECT_NEAR(report.velocityViolation(axis), 0.01, 0.005);
    }
    for (int block = 0; block < 9; ++block)
    {
        EXPECT_NEAR(report.meanNees(block), 3.0, 0.15) << "block " << block;
    }
    EXPECT_EQ(report.skippedTicks, 0u);
}

TEST(ConsistencyTest, LargeErrorsViolateEverywhere)
{
    const Eigen::MatrixXd cov = 0.04 * Eigen::MatrixXd::Identity(idx::dim, idx::dim);
    Eigen::VectorXd e(idx::dim);
    e.setConstant(10.0 * 0.2); // ten standard deviations on every axis
    const std::vector<Eigen::VectorXd> errors(20, e);
    const std::vector<Eigen::MatrixXd> covs(20, cov);
    const metrics::ConsistencyReport report = metrics::consistency(errors, covs, 0.99);
    EXPECT_EQ(report.positionViolation, Eigen::Vector3d::Ones());
    EXPECT_EQ(report.orientationViolation, Eigen::Vector3d::Ones());
    EXPECT_EQ(report.velocityViolation, Eigen::Vector3d::Ones());
}

TEST(ConsistencyTest, NonPdCovarianceSkipsNeesTickAndCountsIt)
{
    std::vector<Eigen::VectorXd> errors(5, Eigen::VectorXd::Zero(idx::dim));
    std::vector<Eigen::MatrixXd> covs(5, Eigen::MatrixXd::Identity(idx::dim, idx::dim));
    covs[2](idx::r, idx::r) = -1.0; // orientation block loses positive definiteness
    const metrics::ConsistencyReport report = metrics::consistency(errors, covs, 0.99);
    EXPECT_EQ(report.skippedTicks, 1u);
    EXPECT_EQ(report.ticks, 5u);
    EXPECT_EQ(report.meanNees.norm(), 0.0);
}

TEST(ConsistencyTest, InvalidInputsRaise)
{
    const std::vector<Eigen::VectorXd> errors(3, Eigen::VectorXd::Zero(idx::dim));
    const std::vector<Eigen::MatrixXd> covs(3,
                                            Eigen::MatrixXd::Identity(idx::dim, idx::dim));
    EXPECT_THROW(metrics::consistency({}, {}, 0.99), ValidationError);
    const std::vector<Eigen::MatrixXd> fewer(2, covs.front());
    EXPECT_THROW(metrics::consistency(errors, fewer, 0.99), ValidationError);
    const std::vector<Eigen::VectorXd> shortErr(3, Eigen::VectorXd::Zero(5));
    EXPECT_THROW(metrics::consistency(shortErr, covs, 0.99), ValidationError);
    EXPECT_THROW(metrics::consistency(errors, covs, 0.0), ValidationError);
    EXPECT_THROW(metrics::consistency(errors, covs, 1.0), ValidationError);
}

// ---------------------------------------------------------------------------
// Tangent error
// ---------------------------------------------------------------------------

TEST(TangentErrorTest, IdenticalStatesGiveZero)
{
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial)
    {
        const KioState x = randomState(rng);
        EXPECT_LE(
            metrics::tangentError(x, x, filter::ErrorConvention::LeftInvariant).norm(), 1e-12);
        EXPECT_LE(
            metrics::tangentError(x, x, filter::ErrorConvention::RightInvariant).norm(), 1e-12);
    }
}

TEST(TangentErrorTest, LeftConventionRoundTrip)
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial)
    {
        const KioState est = randomState(rng);
        const Eigen::VectorXd a = randomTangent27(rng);
        const KioState gt = extract(
            lie::compose(embed(est), lie::expHat({kioGroup(), a})));
        const Eigen::VectorXd recovered =
            metrics::tangentError(est, gt, filter::ErrorConvention::LeftInvariant);
        EXPECT_LT((recovered - a).cwiseAbs().maxCoeff(), 1e-10) << "trial " << trial;
    }
}

TEST(TangentErrorTest, RightConventionRoundTrip)
{
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial)
    {
        const KioState est = randomState(rng);
        const Eigen::VectorXd a = randomTangent27(rng);
        const KioState gt = extract(
            lie::compose(lie::expHat({kioGroup(), a}), embed(est)));
        const Eigen::VectorXd recovered =
            metrics::tangentError(est, gt, filter::ErrorConvention::RightInvariant);
        EXPECT_LT((recovered - a).cwiseAbs().maxCoeff(), 1e-10) << "trial " << trial;
    }
}

TEST(TangentErrorTest, BranchFailureRaises)
{
    const KioState est; // identity state
    KioState gt = est;
    gt.R = lie::expSo3(M_PI * Eigen::Vector3d::UnitX()); // half-turn: log undefined
    EXPECT_THROW(metrics::tangentError(est, gt, filter::ErrorConvention::LeftInvariant),
                 BranchError);
}

// ---------------------------------------------------------------------------
// Normal quantile
// ---------------------------------------------------------------------------

TEST(QuantileTest, MatchesReferenceValues)
{
    EXPECT_NEAR(metrics::normalQuantile(0.5), 0.0, 1e-12);
    EXPECT_NEAR(metrics::normalQuantile(0.995), 2.5758293035489004, 1e-9);
    EXPECT_NEAR(metrics::normalQuantile(0.975), 1.959963984540054, 1e-9);
    EXPECT_NEAR(metrics::normalQuantile(0.8413447460685429), 1.0, 1e-9);
    EXPECT_NEAR(metrics::normalQuantile(0.005) + metrics::normalQuantile(0.995), 0.0, 1e-12);
    EXPECT_THROW(metrics::normalQuantile(0.0), ValidationError);
    EXPECT_THROW(metrics::normalQuantile(1.0), ValidationError);
    EXPECT_THROW(metrics::normalQuantile(-0.5), ValidationError);
}

} // namespace
} // namespace kio::test
