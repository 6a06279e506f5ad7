/**
 * @file filter.cpp
 * @brief Implementation of the invariant EKF predict/update steps.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/filter.hpp"

#include <string>

namespace kio::filter
{

namespace
{

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& p)
{
    return 0.5 * (p + p.transpose());
}

void requireFinite(const Eigen::MatrixXd& m, const char* what)
{
    if (!m.allFinite())
    {
        throw DivergenceError(std::string("filter: non-finite entries in ") + what);
    }
}

void requireMotionDims(const Belief& b, const MotionSpec& m)
{
    const int p = b.mean.group.tangentDim();
    if (m.omega.group != b.mean.group)
    {
        throw GroupMismatchError("predict: increment group does not match the state group");
    }
    if (m.motionJacobian.rows() != p || m.motionJacobian.cols() != p
        || m.processNoise.rows() != p || m.processNoise.cols() != p || b.cov.rows() != p
        || b.cov.cols() != p)
    {
        throw DimensionError("predict: matrix dimensions do not match the state tangent");
    }
    requireFinite(b.mean.matrix, "mean");
    requireFinite(b.cov, "covariance");
    requireFinite(m.omega.coords, "increment");
    requireFinite(m.motionJacobian, "motion Jacobian");
    requireFinite(m.processNoise, "process noise");
}

/**
 * Inverts the innovation matrix through its symmetric eigendecomposition so
 * that near-singularity is detected deterministically.
 */
Eigen::MatrixXd invertInnovation(const Eigen::MatrixXd& s)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(s));
    if (eig.info() != Eigen::Success)
    {
        throw SingularUpdateError("update: innovation eigendecomposition failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double low = lambda.minCoeff();
    const double high = lambda.maxCoeff();
    if (low <= 0.0 || high / low > kMaxInnovationCondition)
    {
        throw SingularUpdateError("update: innovation matrix singular or ill-conditioned"
                                  " (min eig "
                                  + std::to_string(low) + ", max eig " + std::to_string(high)
                                  + ")");
    }
    return eig.eigenvectors() * lambda.cwiseInverse().asDiagonal()
           * eig.eigenvectors().transpose();
}

struct UpdateTerms
{
    Eigen::VectorXd correction;  // m = K z
    Eigen::MatrixXd jointCov;    // (I - K H) P
};

UpdateTerms computeUpdate(const Belief& b, const MeasurementSpec& s)
{
    const int p = b.mean.group.tangentDim();
    const int q = s.observed.group.tangentDim();
    if (s.observed.group != s.predicted.group)
    {
        throw GroupMismatchError("update: observed and predicted measurement groups differ");
    }
    if (s.measJacobian.rows() != q || s.measJacobian.cols() != p || s.measNoise.rows() != q
        || s.measNoise.cols() != q)
    {
        throw DimensionError("update: measurement matrices do not match the tangent sizes");
    }
    requireFinite(b.mean.matrix, "mean");
    requireFinite(b.cov, "covariance");
    requireFinite(s.observed.matrix, "observed measurement");
    requireFinite(s.predicted.matrix, "predicted measurement");
    requireFinite(s.measJacobian, "measurement Jacobian");
    requireFinite(s.measNoise, "measurement noise");

    const Eigen::VectorXd innovation
        = lie::logVee(lie::compose(lie::inverse(s.predicted), s.observed)).coords;

    const Eigen::MatrixXd pht = b.cov * s.measJacobian.transpose();
    const Eigen::MatrixXd sMat = s.measJacobian * pht + s.measNoise;
    const Eigen::MatrixXd gain = pht * invertInnovation(sMat);

    UpdateTerms terms;
    terms.correction = gain * innovation;
    terms.jointCov = (Eigen::MatrixXd::Identity(p, p) - gain * s.measJacobian) * b.cov;
    return terms;
}

} // namespace

Belief predictLeftInvariant(const Belief& b, const MotionSpec& m)
{
    requireMotionDims(b, m);

    const lie::GroupElement step = lie::expHat(m.omega);
    const Eigen::MatrixXd jr = lie::rightJacobian(m.omega);
    const Eigen::MatrixXd f
        = lie::adjoint(lie::expHat({m.omega.group, -m.omega.coords})) + jr * m.motionJacobian;

    Belief out;
    out.mean = lie::compose(b.mean, step);
    out.cov = symmetrize(f * b.cov * f.transpose() + jr * m.processNoise * jr.transpose());
    return out;
}

Belief predictRightInvariant(const Belief& b, const MotionSpec& m)
{
    requireMotionDims(b, m);

    const int p = b.mean.group.tangentDim();
    const lie::GroupElement step = lie::expHat(m.omega);
    const Eigen::MatrixXd jl = lie::leftJacobian(m.omega);
    // Adjoint at the pre-step mean.
    const Eigen::MatrixXd adJl = lie::adjoint(b.mean) * jl;
    const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(p, p) + adJl * m.motionJacobian;

    Belief out;
    out.mean = lie::compose(b.mean, step);
    out.cov = symmetrize(f * b.cov * f.transpose() + adJl * m.processNoise * adJl.transpose());
    return out;
}

Belief updateLeftInvariant(const Belief& b, const MeasurementSpec& s)
{
    const UpdateTerms terms = computeUpdate(b, s);
    const lie::TangentVector m{b.mean.group, terms.correction};
    const Eigen::MatrixXd jr = lie::rightJacobian(m);

    Belief out;
    out.mean = lie::compose(b.mean, lie::expHat(m));
    out.cov = symmetrize(jr * terms.jointCov * jr.transpose());
    return out;
}

Belief updateRightInvariant(const Belief& b, const MeasurementSpec& s)
{
    const UpdateTerms terms = computeUpdate(b, s);
    const lie::TangentVector m{b.mean.group, terms.correction};
    const Eigen::MatrixXd jl = lie::leftJacobian(m);

    Belief out;
    out.mean = lie::compose(lie::expHat(m), b.mean);
    out.cov = symmetrize(jl * terms.jointCov * jl.transpose());
    return out;
}

Belief predictContinuousDiscrete(
    const Belief& b, const std::function<lie::GroupElement(const lie::GroupElement&)>& meanProp,
    const Eigen::MatrixXd& fc, const Eigen::MatrixXd& qcHat, double dt)
{
    if (!(dt > 0.0))
    {
        throw ValidationError("predictContinuousDiscrete: dt must be positive");
    }
    const int p = b.mean.group.tangentDim();
    if (fc.rows() != p || fc.cols() != p || qcHat.rows() != p || qcHat.cols() != p)
    {
        throw DimensionError("predictContinuousDiscrete: matrix dimensions do not match");
    }
    requireFinite(b.mean.matrix, "mean");
    requireFinite(b.cov, "covariance");
    requireFinite(fc, "continuous error Jacobian");
    requireFinite(qcHat, "continuous noise covariance");

    const Eigen::MatrixXd fk = Eigen::MatrixXd::Identity(p, p) + fc * dt;
    const Eigen::MatrixXd qk = fk * qcHat * fk.transpose() * dt;

    Belief out;
    out.mean = meanProp(b.mean);
    out.cov = symmetrize(fk * b.cov * fk.transpose() + qk);
    return out;
}

Eigen::MatrixXd
checkGroupAffine(const std::function<Eigen::MatrixXd(const lie::GroupElement&)>& f,
                 const lie::GroupElement& x1, const lie::GroupElement& x2)
{
    if (x1.group != x2.group)
    {
        throw GroupMismatchError("checkGroupAffine: operands belong to different groups");
    }
    const Eigen::MatrixXd fI = f(lie::identity(x1.group));
    return f(lie::compose(x1, x2)) - f(x1) * x2.matrix - x1.matrix * f(x2)
           + x1.matrix * fI * x2.matrix;
}

} // namespace kio::filter
