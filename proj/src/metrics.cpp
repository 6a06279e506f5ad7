/**
 * @file metrics.cpp
 * @brief ATE/RPE trajectory metrics, envelope/NEES consistency statistics,
 *        and the invariant tangent-error helper.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/metrics.hpp"

#include <cmath>
#include <cstddef>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "kio/errors.hpp"
#include "kio/lie.hpp"

namespace kio::metrics
{

namespace
{

constexpr double kTimestampTol = 1e-9;

/** Relative rigid transform a^-1 * b in (rotation, translation) form. */
struct RelPose
{
    Eigen::Matrix3d rot;
    Eigen::Vector3d trans;
};

RelPose between(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b)
{
    const Eigen::Matrix3d ra = a.block<3, 3>(0, 0);
    RelPose rel;
    rel.rot = ra.transpose() * b.block<3, 3>(0, 0);
    rel.trans = ra.transpose() * (b.block<3, 1>(0, 3) - a.block<3, 1>(0, 3)).eval();
    return rel;
}

RelPose between(const RelPose& a, const RelPose& b)
{
    RelPose rel;
    rel.rot = a.rot.transpose() * b.rot;
    rel.trans = a.rot.transpose() * (b.trans - a.trans).eval();
    return rel;
}

/** Timestamp-matched (est index, gt index) pairs in time order. */
std::vector<std::pair<std::size_t, std::size_t>> matchTimestamps(
    const std::vector<PoseSample>& est, const std::vector<PoseSample>& gt)
{
    std::vector<std::pair<std::size_t, std::size_t>> matched;
    std::size_t j = 0;
    for (std::size_t i = 0; i < est.size(); ++i)
    {
        while (j < gt.size() && gt[j].t < est[i].t - kTimestampTol)
        {
            ++j;
        }
        if (j < gt.size() && std::abs(gt[j].t - est[i].t) <= kTimestampTol)
        {
            matched.emplace_back(i, j);
            ++j;
        }
    }
    return matched;
}

} // namespace

std::pair<double, double> ate(const std::vector<PoseSample>& est,
                              const std::vector<PoseSample>& gt)
{
    const auto matched = matchTimestamps(est, gt);
    if (matched.size() < 2)
    {
        throw ValidationError(fmt::format(
            "ate needs at least 2 timestamp-matched samples, found {}", matched.size()));
    }
    // First-pose alignment, evaluated by expressing both trajectories
    // relative to their own first matched pose; this keeps identical inputs
    // at an exactly zero error.
    const Eigen::Matrix4d& estFirst = est[matched.front().first].pose;
    const Eigen::Matrix4d& gtFirst = gt[matched.front().second].pose;
    double posSq = 0.0;
    double rotSq = 0.0;
    for (const auto& [ei, gi] : matched)
    {
        const RelPose relEst = between(estFirst, est[ei].pose);
        const RelPose relGt = between(gtFirst, gt[gi].pose);
        posSq += (relEst.trans - relGt.trans).squaredNorm();
        rotSq += lie::logSo3(Eigen::Matrix3d(relGt.rot.transpose() * relEst.rot)).squaredNorm();
    }
    const double n = static_cast<double>(matched.size());
    return {std::sqrt(posSq / n), std::sqrt(rotSq / n)};
}

std::pair<double, double> rpe(const std::vector<PoseSample>& est,
                              const std::vector<PoseSample>& gt, double window)
{
    const auto matched = matchTimestamps(est, gt);
    if (matched.size() < 2)
    {
        throw ValidationError(fmt::format(
            "rpe needs at least 2 timestamp-matched samples, found {}", matched.size()));
    }
    const double dt = gt[matched[1].second].t - gt[matched[0].second].t;
    if (!(dt > 0.0))
    {
        throw ValidationError("rpe needs strictly increasing matched timestamps");
    }
    const long delta = std::lround(window / dt);
    if (delta < 1)
    {
        throw ValidationError(
            fmt::format("rpe window {} s is shorter than one tick ({} s)", window, dt));
    }
    if (delta > static_cast<long>(matched.size()) - 1)
    {
        throw ValidationError(fmt::format(
            "rpe window of {} ticks exceeds the {}-sample trajectory", delta, matched.size()));
    }
    double posSq = 0.0;
    double rotSq = 0.0;
    const std::size_t count = matched.size() - static_cast<std::size_t>(delta);
    for (std::size_t i = 0; i < count; ++i)
    {
        const auto& [ei, gi] = matched[i];
        const auto& [ej, gj] = matched[i + static_cast<std::size_t>(delta)];
        const RelPose relEst = between(est[ei].pose, est[ej].pose);
        const RelPose relGt = between(gt[gi].pose, gt[gj].pose);
        const RelPose err = between(relGt, relEst);
        posSq += err.trans.squaredNorm();
        rotSq += lie::logSo3(err.rot).squaredNorm();
    }
    const double n = static_cast<double>(count);
    return {std::sqrt(posSq / n), std::sqrt(rotSq / n)};
}

TrajectoryErrorReport trajectoryError(const std::vector<PoseSample>& est,
                                      const std::vector<PoseSample>& gt, double window)
{
    TrajectoryErrorReport report;
    std::tie(report.atePosRmse, report.ateRotRmse) = ate(est, gt);
    std::tie(report.rpePos, report.rpeRot) = rpe(est, gt, window);
    report.window = window;
    return report;
}

ConsistencyReport consistency(const std::vector<Eigen::VectorXd>& errors,
                              const std::vector<Eigen::MatrixXd>& covs, double quantile)
{
    if (errors.empty())
    {
        throw ValidationError("consistency needs at least one tick");
    }
    if (errors.size() != covs.size())
    {
        throw ValidationError(fmt::format("consistency got {} errors but {} covariances",
                                          errors.size(), covs.size()));
    }
    if (!(quantile > 0.0) || !(quantile < 1.0))
    {
        throw ValidationError(fmt::format("quantile must lie in (0, 1), got {}", quantile));
    }
    const double z = normalQuantile(0.5 + quantile / 2.0);

    ConsistencyReport report;
    report.quantile = quantile;
    report.ticks = errors.size();
    Eigen::Matrix<double, 9, 1> axisViolations = Eigen::Matrix<double, 9, 1>::Zero();
    Eigen::Matrix<double, 9, 1> neesSum = Eigen::Matrix<double, 9, 1>::Zero();
    Eigen::Matrix<double, 9, 1> neesCount = Eigen::Matrix<double, 9, 1>::Zero();

    for (std::size_t k = 0; k < errors.size(); ++k)
    {
        const Eigen::VectorXd& e = errors[k];
        const Eigen::MatrixXd& cov = covs[k];
        if (e.size() != idx::dim || cov.rows() != idx::dim || cov.cols() != idx::dim)
        {
            throw ValidationError(
                fmt::format("consistency tick {}: expected 27-vector error and 27x27 "
                            "covariance, got {} and {}x{}",
                            k, e.size(), cov.rows(), cov.cols()));
        }
        for (int axis = 0; axis < 9; ++axis)
        {
            const double var = cov(axis, axis);
            const double envelope = z * std::sqrt(std::max(var, 0.0));
            if (!(std::abs(e(axis)) <= envelope))
            {
                axisViolations(axis) += 1.0;
            }
        }
        bool skipped = false;
        for (int block = 0; block < 9; ++block)
        {
            const Eigen::Matrix3d p = cov.block<3, 3>(3 * block, 3 * block);
            const Eigen::LLT<Eigen::Matrix3d> llt(p);
            if (llt.info() != Eigen::Success)
            {
                skipped = true;
                continue;
            }
            const Eigen::Vector3d eb = e.segment<3>(3 * block);
            neesSum(block) += eb.dot(llt.solve(eb));
            neesCount(block) += 1.0;
        }
        if (skipped)
        {
            ++report.skippedTicks;
        }
    }

    const double ticks = static_cast<double>(report.ticks);
    report.positionViolation = axisViolations.segment<3>(0) / ticks;
    report.orientationViolation = axisViolations.segment<3>(3) / ticks;
    report.velocityViolation = axisViolations.segment<3>(6) / ticks;
    for (int block = 0; block < 9; ++block)
    {
        report.meanNees(block) =
            neesCount(block) > 0.0 ? neesSum(block) / neesCount(block) : 0.0;
    }
    return report;
}

Eigen::VectorXd tangentError(const KioState& est, const KioState& gt,
                             filter::ErrorConvention conv)
{
    const lie::GroupElement estElement = embed(est);
    const lie::GroupElement gtElement = embed(gt);
    const lie::GroupElement error =
        conv == filter::ErrorConvention::LeftInvariant
            ? lie::compose(lie::inverse(estElement), gtElement)
            : lie::compose(gtElement, lie::inverse(estElement));
    return lie::logVee(error).coords;
}

double normalQuantile(double p)
{
    if (!(p > 0.0) || !(p < 1.0))
    {
        throw ValidationError(fmt::format("normal quantile needs p in (0, 1), got {}", p));
    }
    const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    double lo = -13.0;
    double hi = 13.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace kio::metrics
