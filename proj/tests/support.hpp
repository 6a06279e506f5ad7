/**
 * @file support.hpp
 * @brief Shared helpers for the test binaries: deterministic random states,
 *        tangent sampling with bounded rotation blocks, and diff utilities.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_TESTS_SUPPORT_HPP
#define KIO_TESTS_SUPPORT_HPP

#include <random>

#include <Eigen/Dense>

#include "kio/lie.hpp"

namespace kio::test
{

using Rng = std::mt19937_64;

/** The composite state group used by the kinematic-inertial filters. */
inline lie::GroupId kioTestGroup()
{
    using lie::GroupId;
    return GroupId::composite(
        {GroupId::se23(), GroupId::se3(), GroupId::se3(), GroupId::vec(6)});
}

/** Rescale every rotation-like coordinate block of a to stay below maxAngle. */
inline void clampRotationBlocks(const lie::GroupId& g, Eigen::VectorXd& a, double maxAngle)
{
    using lie::GroupTag;
    if (g.tag() == GroupTag::Composite)
    {
        const auto layout = lie::blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            Eigen::VectorXd sub = a.segment(layout[i].tangentOffset, layout[i].tangentDim);
            clampRotationBlocks(members[i], sub, maxAngle);
            a.segment(layout[i].tangentOffset, layout[i].tangentDim) = sub;
        }
        return;
    }

    int rotOffset = -1;
    if (g.tag() == GroupTag::So3)
    {
        rotOffset = 0;
    }
    else if (g.tag() == GroupTag::Se3 || g.tag() == GroupTag::Se23)
    {
        rotOffset = 3;
    }
    if (rotOffset >= 0)
    {
        const double norm = a.segment<3>(rotOffset).norm();
        if (norm > maxAngle)
        {
            a.segment<3>(rotOffset) *= maxAngle / norm;
        }
    }
}

/** Uniform tangent in [-scale, scale]^p with rotation blocks bounded by maxAngle. */
inline lie::TangentVector randomTangent(const lie::GroupId& g, Rng& rng, double scale,
                                        double maxAngle = 2.5)
{
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::VectorXd coords(g.tangentDim());
    for (int i = 0; i < coords.size(); ++i)
    {
        coords[i] = dist(rng);
    }
    clampRotationBlocks(g, coords, maxAngle);
    return {g, coords};
}

/** Random group element obtained by exponentiating a bounded random tangent. */
inline lie::GroupElement randomElement(const lie::GroupId& g, Rng& rng, double scale = 1.0,
                                       double maxAngle = 2.5)
{
    return lie::expHat(randomTangent(g, rng, scale, maxAngle));
}

inline double maxAbsDiff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

/** Truncated-series left Jacobian oracle: sum_{k=0..12} (ad_a)^k / (k+1)!. */
inline Eigen::MatrixXd seriesLeftJacobian(const lie::TangentVector& a)
{
    const int d = a.group.tangentDim();
    const Eigen::MatrixXd ad = lie::adMatrix(a);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd sum = term; // k = 0 term, 1/1!
    double factorial = 1.0;
    for (int k = 1; k <= 12; ++k)
    {
        term = term * ad;
        factorial *= static_cast<double>(k + 1);
        sum += term / factorial;
    }
    return sum;
}

/** Columnwise brute-force adjoint oracle: column i is vee(X hat(e_i) X^-1). */
inline Eigen::MatrixXd bruteForceAdjoint(const lie::GroupElement& x)
{
    const int d = x.group.tangentDim();
    const Eigen::MatrixXd xinv = lie::inverse(x).matrix;
    Eigen::MatrixXd ad(d, d);
    for (int i = 0; i < d; ++i)
    {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(d);
        ei[i] = 1.0;
        ad.col(i) = lie::vee(x.group, x.matrix * lie::hat({x.group, ei}) * xinv).coords;
    }
    return ad;
}

/** Random symmetric positive semidefinite matrix with moderate conditioning. */
inline Eigen::MatrixXd randomPsd(int n, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j)
        {
            a(i, j) = dist(rng);
        }
    }
    return scale * (a * a.transpose() / n + 0.1 * Eigen::MatrixXd::Identity(n, n));
}

} // namespace kio::test

#endif // KIO_TESTS_SUPPORT_HPP
