/**
 * @file filter_test.cpp
 * @brief Oracle tests for the group-valued EKF steps: hand examples, assembly
 *        oracles built from independent adjoint/Jacobian computations, the
 *        classical scalar Kalman reduction, and covariance-health properties.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "kio/filter.hpp"

#include "support.hpp"

using namespace kio;
using namespace kio::filter;
using kio::lie::GroupElement;
using kio::lie::GroupId;
using kio::lie::TangentVector;
using kio::test::bruteForceAdjoint;
using kio::test::kioTestGroup;
using kio::test::maxAbsDiff;
using kio::test::randomElement;
using kio::test::randomPsd;
using kio::test::randomTangent;
using kio::test::Rng;
using kio::test::seriesLeftJacobian;

namespace
{

Belief randomBelief(const GroupId& g, Rng& rng, double covScale = 0.5)
{
    return {randomElement(g, rng, 1.0, 1.5), randomPsd(g.tangentDim(), rng, covScale)};
}

MotionSpec nullMotion(const GroupId& g)
{
    const int p = g.tangentDim();
    return {{g, Eigen::VectorXd::Zero(p)}, Eigen::MatrixXd::Zero(p, p),
            Eigen::MatrixXd::Zero(p, p)};
}

double minEigenvalue(const Eigen::MatrixXd& p)
{
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p).eigenvalues().minCoeff();
}

double asymmetry(const Eigen::MatrixXd& p)
{
    return (p - p.transpose()).cwiseAbs().maxCoeff();
}

} // namespace

// --- predict, left-invariant convention -------------------------------------------

TEST(PredictLeftTest, NullStepLeavesBeliefUnchanged)
{
    Rng rng(31);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const Belief out = predictLeftInvariant(b, nullMotion(g));
    EXPECT_LT(maxAbsDiff(out.mean.matrix, b.mean.matrix), 1e-15);
    EXPECT_LT(maxAbsDiff(out.cov, b.cov), 1e-15);
}

TEST(PredictLeftTest, PureNoiseStepAddsQ)
{
    Rng rng(32);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    MotionSpec m = nullMotion(g);
    m.processNoise = randomPsd(g.tangentDim(), rng, 0.2);
    const Belief out = predictLeftInvariant(b, m);
    EXPECT_LT(maxAbsDiff(out.cov, b.cov + m.processNoise), 1e-15);
}

TEST(PredictLeftTest, AssemblyOracle)
{
    Rng rng(33);
    for (const GroupId& g : {GroupId::se23(), kioTestGroup()})
    {
        const int p = g.tangentDim();
        for (int trial = 0; trial < 20; ++trial)
        {
            const Belief b = randomBelief(g, rng);
            MotionSpec m;
            m.omega = randomTangent(g, rng, 0.3, 0.8);
            m.motionJacobian = 0.3 * randomPsd(p, rng) - 0.2 * Eigen::MatrixXd::Identity(p, p);
            m.processNoise = randomPsd(p, rng, 0.1);

            // Assemble the expected covariance from independent oracles:
            // adjoint column-by-column, Jacobian by truncated series.
            const TangentVector negOmega{g, -m.omega.coords};
            const Eigen::MatrixXd adNeg = bruteForceAdjoint(lie::expHat(negOmega));
            const Eigen::MatrixXd jr = seriesLeftJacobian(negOmega);
            const Eigen::MatrixXd f = adNeg + jr * m.motionJacobian;
            const Eigen::MatrixXd expectedCov
                = f * b.cov * f.transpose() + jr * m.processNoise * jr.transpose();
            const Eigen::MatrixXd expectedMean
                = b.mean.matrix * lie::expHat(m.omega).matrix;

            const Belief out = predictLeftInvariant(b, m);
            EXPECT_LT(maxAbsDiff(out.mean.matrix, expectedMean), 1e-10);
            EXPECT_LT(maxAbsDiff(out.cov, 0.5 * (expectedCov + expectedCov.transpose())),
                      1e-10);
        }
    }
}

// --- predict, right-invariant convention ------------------------------------------

TEST(PredictRightTest, NullStepLeavesBeliefUnchanged)
{
    Rng rng(34);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const Belief out = predictRightInvariant(b, nullMotion(g));
    EXPECT_LT(maxAbsDiff(out.mean.matrix, b.mean.matrix), 1e-15);
    EXPECT_LT(maxAbsDiff(out.cov, b.cov), 1e-15);
}

TEST(PredictRightTest, IdentityMeanPureNoiseAddsQ)
{
    Rng rng(35);
    const GroupId g = GroupId::se23();
    Belief b{lie::identity(g), randomPsd(g.tangentDim(), rng)};
    MotionSpec m = nullMotion(g);
    m.processNoise = randomPsd(g.tangentDim(), rng, 0.2);
    const Belief out = predictRightInvariant(b, m);
    EXPECT_LT(maxAbsDiff(out.cov, b.cov + m.processNoise), 1e-15);
}

TEST(PredictRightTest, AssemblyOracle)
{
    Rng rng(36);
    for (const GroupId& g : {GroupId::se23(), kioTestGroup()})
    {
        const int p = g.tangentDim();
        for (int trial = 0; trial < 20; ++trial)
        {
            const Belief b = randomBelief(g, rng);
            MotionSpec m;
            m.omega = randomTangent(g, rng, 0.3, 0.8);
            m.motionJacobian = 0.3 * randomPsd(p, rng) - 0.2 * Eigen::MatrixXd::Identity(p, p);
            m.processNoise = randomPsd(p, rng, 0.1);

            const Eigen::MatrixXd adMean = bruteForceAdjoint(b.mean);
            const Eigen::MatrixXd jl = seriesLeftJacobian(m.omega);
            const Eigen::MatrixXd f
                = Eigen::MatrixXd::Identity(p, p) + adMean * jl * m.motionJacobian;
            const Eigen::MatrixXd noise
                = adMean * jl * m.processNoise * jl.transpose() * adMean.transpose();
            const Eigen::MatrixXd expectedCov = f * b.cov * f.transpose() + noise;
            const Eigen::MatrixXd expectedMean
                = b.mean.matrix * lie::expHat(m.omega).matrix;

            const Belief out = predictRightInvariant(b, m);
            EXPECT_LT(maxAbsDiff(out.mean.matrix, expectedMean), 1e-10);
            EXPECT_LT(maxAbsDiff(out.cov, 0.5 * (expectedCov + expectedCov.transpose())),
                      1e-10);
        }
    }
}

// --- updates ----------------------------------------------------------------------

namespace
{

/** Measurement of the full state on the same group: h(X) = X, H = identity-ish. */
MeasurementSpec fullStateMeasurement(const Belief& b, const GroupElement& observed, Rng& rng)
{
    const int p = b.mean.group.tangentDim();
    MeasurementSpec s;
    s.observed = observed;
    s.predicted = b.mean;
    s.measJacobian = Eigen::MatrixXd::Identity(p, p);
    s.measNoise = randomPsd(p, rng, 0.05);
    return s;
}

} // namespace

TEST(UpdateTest, ZeroInnovationKeepsMeanAndContractsCov)
{
    Rng rng(37);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const MeasurementSpec s = fullStateMeasurement(b, b.mean, rng);

    for (const bool left : {true, false})
    {
        const Belief out = left ? updateLeftInvariant(b, s) : updateRightInvariant(b, s);
        EXPECT_LT(maxAbsDiff(out.mean.matrix, b.mean.matrix), 1e-12);

        // m = 0, so the posterior covariance is exactly (I - K H) P.
        const Eigen::MatrixXd sMat
            = s.measJacobian * b.cov * s.measJacobian.transpose() + s.measNoise;
        const Eigen::MatrixXd k
            = b.cov * s.measJacobian.transpose() * sMat.inverse();
        const Eigen::MatrixXd expected
            = (Eigen::MatrixXd::Identity(9, 9) - k * s.measJacobian) * b.cov;
        EXPECT_LT(maxAbsDiff(out.cov, 0.5 * (expected + expected.transpose())), 1e-10);
    }
}

TEST(UpdateTest, ZeroJacobianIsIdentityOnBelief)
{
    Rng rng(38);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);

    MeasurementSpec s;
    s.observed = randomElement(g, rng); // arbitrary nonzero innovation
    s.predicted = b.mean;
    s.measJacobian = Eigen::MatrixXd::Zero(9, 9);
    s.measNoise = Eigen::MatrixXd::Identity(9, 9);

    for (const bool left : {true, false})
    {
        const Belief out = left ? updateLeftInvariant(b, s) : updateRightInvariant(b, s);
        EXPECT_LT(maxAbsDiff(out.mean.matrix, b.mean.matrix), 1e-15);
        EXPECT_LT(maxAbsDiff(out.cov, b.cov), 1e-15);
    }
}

TEST(UpdateTest, InfiniteNoiseIsNearIdentityOnBelief)
{
    Rng rng(39);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);

    MeasurementSpec s = fullStateMeasurement(b, randomElement(g, rng), rng);
    s.measNoise = 1e14 * Eigen::MatrixXd::Identity(9, 9);

    for (const bool left : {true, false})
    {
        const Belief out = left ? updateLeftInvariant(b, s) : updateRightInvariant(b, s);
        EXPECT_LT(maxAbsDiff(out.mean.matrix, b.mean.matrix), 1e-9);
        EXPECT_LT(maxAbsDiff(out.cov, b.cov), 1e-9);
    }
}

TEST(UpdateTest, SingularInnovationRaises)
{
    Rng rng(40);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);

    MeasurementSpec s;
    s.observed = b.mean;
    s.predicted = b.mean;
    s.measJacobian = Eigen::MatrixXd::Zero(9, 9);
    s.measNoise = Eigen::MatrixXd::Zero(9, 9); // S = 0: singular
    EXPECT_THROW(updateLeftInvariant(b, s), SingularUpdateError);
    EXPECT_THROW(updateRightInvariant(b, s), SingularUpdateError);

    // Condition number beyond the 1e12 limit.
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(9);
    diag[8] = 1e-13;
    s.measNoise = diag.asDiagonal();
    EXPECT_THROW(updateLeftInvariant(b, s), SingularUpdateError);
}

TEST(UpdateTest, NonFiniteInputRaises)
{
    Rng rng(41);
    const GroupId g = GroupId::se23();
    Belief b = randomBelief(g, rng);

    MotionSpec m = nullMotion(g);
    m.omega.coords[2] = std::nan("");
    EXPECT_THROW(predictLeftInvariant(b, m), DivergenceError);
    EXPECT_THROW(predictRightInvariant(b, m), DivergenceError);

    b.cov(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(predictLeftInvariant(b, nullMotion(g)), DivergenceError);
}

// --- classical scalar Kalman reduction ---------------------------------------------

TEST(ScalarReductionTest, BothConventionsMatchClassicalKalman)
{
    const GroupId g = GroupId::vec(1);

    // Classical scalar filter state.
    double xChk = 0.4;
    double pChk = 1.3;

    auto makeBelief = [&g](double x, double p) {
        GroupElement mean = lie::identity(g);
        mean.matrix(0, 1) = x;
        Belief b{mean, Eigen::MatrixXd::Constant(1, 1, p)};
        return b;
    };

    Belief left = makeBelief(xChk, pChk);
    Belief right = makeBelief(xChk, pChk);

    for (int k = 0; k < 100; ++k)
    {
        const double a = 0.98 + 0.02 * std::sin(0.1 * k);
        const double u = 0.1 * std::cos(0.2 * k);
        const double q = 0.02 + 0.01 * std::sin(0.05 * k) * std::sin(0.05 * k);

        // Classical predict: x <- a x + u, P <- a^2 P + Q.
        xChk = a * xChk + u;
        pChk = a * a * pChk + q;

        // Group predict with omega = (a - 1) x + u and motion Jacobian (a - 1).
        auto motionFor = [&](const Belief& b) {
            MotionSpec m;
            m.omega = {g, Eigen::VectorXd::Constant(1, (a - 1.0) * b.mean.matrix(0, 1) + u)};
            m.motionJacobian = Eigen::MatrixXd::Constant(1, 1, a - 1.0);
            m.processNoise = Eigen::MatrixXd::Constant(1, 1, q);
            return m;
        };
        left = predictLeftInvariant(left, motionFor(left));
        right = predictRightInvariant(right, motionFor(right));

        EXPECT_NEAR(left.mean.matrix(0, 1), xChk, 1e-12);
        EXPECT_NEAR(right.mean.matrix(0, 1), xChk, 1e-12);
        EXPECT_NEAR(left.cov(0, 0), pChk, 1e-12);
        EXPECT_NEAR(right.cov(0, 0), pChk, 1e-12);

        if (k % 3 == 2)
        {
            const double z = xChk + 0.3 * std::sin(0.7 * k);
            const double n = 0.5;

            // Classical update.
            const double gain = pChk / (pChk + n);
            const double priorVar = pChk;
            xChk += gain * (z - xChk);
            pChk = (1.0 - gain) * pChk;
            EXPECT_LE(pChk, priorVar); // posterior variance never grows

            MeasurementSpec s;
            GroupElement obs = lie::identity(g);
            obs.matrix(0, 1) = z;
            s.observed = obs;
            s.measJacobian = Eigen::MatrixXd::Constant(1, 1, 1.0);
            s.measNoise = Eigen::MatrixXd::Constant(1, 1, n);

            s.predicted = left.mean;
            left = updateLeftInvariant(left, s);
            s.predicted = right.mean;
            right = updateRightInvariant(right, s);

            EXPECT_NEAR(left.mean.matrix(0, 1), xChk, 1e-12);
            EXPECT_NEAR(right.mean.matrix(0, 1), xChk, 1e-12);
            EXPECT_NEAR(left.cov(0, 0), pChk, 1e-12);
            EXPECT_NEAR(right.cov(0, 0), pChk, 1e-12);
        }
    }
}

// --- continuous-discrete predict ----------------------------------------------------

TEST(PredictCdTest, ZeroDynamicsKeepsCovariance)
{
    Rng rng(42);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const auto identityProp = [](const GroupElement& x) { return x; };

    const Belief out = predictContinuousDiscrete(b, identityProp, Eigen::MatrixXd::Zero(9, 9),
                                                 Eigen::MatrixXd::Zero(9, 9), 0.01);
    EXPECT_LT(maxAbsDiff(out.cov, b.cov), 1e-15);
}

TEST(PredictCdTest, PureNoiseAddsQcTimesDt)
{
    Rng rng(43);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const Eigen::MatrixXd qc = randomPsd(9, rng);
    const auto identityProp = [](const GroupElement& x) { return x; };

    const Belief out = predictContinuousDiscrete(b, identityProp, Eigen::MatrixXd::Zero(9, 9),
                                                 qc, 0.01);
    EXPECT_LT(maxAbsDiff(out.cov, b.cov + 0.01 * qc), 1e-14);
}

TEST(PredictCdTest, MatchesFineStepOdeIntegration)
{
    Rng rng(44);
    const GroupId g = GroupId::se23();
    const double dt = 1e-3;
    const auto identityProp = [](const GroupElement& x) { return x; };

    for (int trial = 0; trial < 10; ++trial)
    {
        const Belief b = randomBelief(g, rng);
        const Eigen::MatrixXd fc
            = randomPsd(9, rng) - 1.5 * Eigen::MatrixXd::Identity(9, 9);
        const Eigen::MatrixXd qc = randomPsd(9, rng, 0.5);

        // Oracle: forward-Euler integration of dP/dt = Fc P + P Fc^T + Qc.
        const int substeps = 1000;
        const double h = dt / substeps;
        Eigen::MatrixXd pOde = b.cov;
        for (int i = 0; i < substeps; ++i)
        {
            pOde += h * (fc * pOde + pOde * fc.transpose() + qc);
        }

        const Belief out = predictContinuousDiscrete(b, identityProp, fc, qc, dt);
        const double relErr = maxAbsDiff(out.cov, pOde) / pOde.cwiseAbs().maxCoeff();
        EXPECT_LT(relErr, 1e-3) << "trial " << trial;
    }
}

TEST(PredictCdTest, MeanFollowsSuppliedPropagation)
{
    Rng rng(45);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const GroupElement target = randomElement(g, rng);
    const auto prop = [&target](const GroupElement&) { return target; };

    const Belief out = predictContinuousDiscrete(b, prop, Eigen::MatrixXd::Zero(9, 9),
                                                 Eigen::MatrixXd::Zero(9, 9), 0.01);
    EXPECT_EQ(out.mean.matrix, target.matrix);
}

TEST(PredictCdTest, InvalidInputsRaise)
{
    Rng rng(46);
    const GroupId g = GroupId::se23();
    const Belief b = randomBelief(g, rng);
    const auto identityProp = [](const GroupElement& x) { return x; };

    EXPECT_THROW(predictContinuousDiscrete(b, identityProp, Eigen::MatrixXd::Zero(9, 9),
                                           Eigen::MatrixXd::Zero(9, 9), 0.0),
                 ValidationError);

    Eigen::MatrixXd badFc = Eigen::MatrixXd::Zero(9, 9);
    badFc(1, 1) = std::nan("");
    EXPECT_THROW(
        predictContinuousDiscrete(b, identityProp, badFc, Eigen::MatrixXd::Zero(9, 9), 0.01),
        DivergenceError);
}

// --- group-affinity oracle -----------------------------------------------------------

namespace
{

constexpr double kGravityZ = -9.80665;

/**
 * Continuous dynamics of the base block with fixed body-frame inputs and no
 * bias coupling: dp = v, dR = R S(w), dv = R a + g, feet and bias blocks at rest.
 */
Eigen::MatrixXd biasFreeDynamics(const lie::GroupElement& x, const Eigen::Vector3d& acc,
                                 const Eigen::Vector3d& gyro)
{
    const int n = x.group.matrixSize();
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
    const Eigen::Matrix3d r = x.matrix.topLeftCorner<3, 3>();
    const Eigen::Vector3d v = x.matrix.block<3, 1>(0, 4);
    f.topLeftCorner<3, 3>() = r * lie::skew(gyro);
    f.block<3, 1>(0, 3) = v;
    f.block<3, 1>(0, 4) = r * acc + Eigen::Vector3d(0, 0, kGravityZ);
    return f;
}

/** Same dynamics but the inputs are corrected by the state's own bias block. */
Eigen::MatrixXd biasCoupledDynamics(const lie::GroupElement& x, const Eigen::Vector3d& acc,
                                    const Eigen::Vector3d& gyro)
{
    const Eigen::Vector3d ba = x.matrix.block<3, 1>(13, 19);
    const Eigen::Vector3d bg = x.matrix.block<3, 1>(16, 19);
    return biasFreeDynamics(x, acc - ba, gyro - bg);
}

} // namespace

TEST(GroupAffineTest, IdentityPairGivesExactZero)
{
    const GroupId kio = kioTestGroup();
    const auto f = [](const GroupElement& x) {
        return biasFreeDynamics(x, Eigen::Vector3d(0.3, -0.2, 9.9), Eigen::Vector3d(0.1, 0.2, -0.3));
    };
    const Eigen::MatrixXd residual
        = checkGroupAffine(f, lie::identity(kio), lie::identity(kio));
    EXPECT_EQ(residual.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GroupAffineTest, BiasFreeKioDynamicsIsGroupAffine)
{
    const GroupId kio = kioTestGroup();
    Rng rng(47);
    const Eigen::Vector3d acc(0.4, -0.7, 9.5);
    const Eigen::Vector3d gyro(0.12, -0.05, 0.3);
    const auto f = [&](const GroupElement& x) { return biasFreeDynamics(x, acc, gyro); };

    for (int trial = 0; trial < 50; ++trial)
    {
        const GroupElement x1 = randomElement(kio, rng, 1.5);
        const GroupElement x2 = randomElement(kio, rng, 1.5);
        EXPECT_LT(checkGroupAffine(f, x1, x2).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
    }
}

TEST(GroupAffineTest, BiasCouplingBreaksGroupAffinity)
{
    const GroupId kio = kioTestGroup();
    Rng rng(48);
    const Eigen::Vector3d acc(0.4, -0.7, 9.5);
    const Eigen::Vector3d gyro(0.12, -0.05, 0.3);
    const auto f = [&](const GroupElement& x) { return biasCoupledDynamics(x, acc, gyro); };

    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial)
    {
        const GroupElement x1 = randomElement(kio, rng, 1.5);
        const GroupElement x2 = randomElement(kio, rng, 1.5);
        worst = std::max(worst, checkGroupAffine(f, x1, x2).cwiseAbs().maxCoeff());
    }
    EXPECT_GT(worst, 1e-6);
}

// --- covariance health ----------------------------------------------------------------

TEST(CovHealthTest, RandomStepSequencesKeepCovarianceSymmetricPsd)
{
    Rng rng(49);
    const GroupId g = GroupId::se23();
    Belief left = randomBelief(g, rng);
    Belief right = randomBelief(g, rng);

    for (int step = 0; step < 50; ++step)
    {
        MotionSpec m;
        m.omega = randomTangent(g, rng, 0.2, 0.5);
        m.motionJacobian = 0.2 * randomPsd(9, rng) - 0.1 * Eigen::MatrixXd::Identity(9, 9);
        m.processNoise = randomPsd(9, rng, 0.05);
        left = predictLeftInvariant(left, m);
        right = predictRightInvariant(right, m);

        MeasurementSpec s;
        s.observed = randomElement(g, rng, 0.3, 0.5);
        s.measJacobian = Eigen::MatrixXd::Identity(9, 9);
        s.measNoise = randomPsd(9, rng, 0.1);

        s.predicted = left.mean;
        left = updateLeftInvariant(left, s);
        s.predicted = right.mean;
        right = updateRightInvariant(right, s);

        for (const Belief* b : {&left, &right})
        {
            EXPECT_LT(asymmetry(b->cov), 1e-9);
            EXPECT_GT(minEigenvalue(b->cov), -1e-10);
        }
    }
}
