/**
 * @file models.cpp
 * @brief Motion/measurement models, analytic Jacobians, and variant assembly.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/models.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

namespace kio
{

namespace
{

const lie::GroupId& se3Group()
{
    static const lie::GroupId g = lie::GroupId::se3();
    return g;
}

Eigen::Vector3d compensatedAccel(const KioState& x, const ImuSample& u)
{
    return u.acc - x.ba + x.R.transpose() * gravity();
}

Eigen::Vector3d compensatedGyro(const KioState& x, const ImuSample& u)
{
    return u.gyro - x.bg;
}

void setDiagBlock(Eigen::MatrixXd& m, int offset, double variance)
{
    m.block<3, 3>(offset, offset) = variance * Eigen::Matrix3d::Identity();
}

} // namespace

KioState propagateMean(const KioState& x, const ImuSample& u, double dt)
{
    const lie::GroupElement g = embed(x);
    const lie::TangentVector step{kioGroup(), omega(x, u, dt)};
    return extract(lie::compose(g, lie::expHat(step)));
}

Eigen::VectorXd omega(const KioState& x, const ImuSample& u, double dt)
{
    const Eigen::Vector3d abar = compensatedAccel(x, u);
    const Eigen::Vector3d wbar = compensatedGyro(x, u);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(idx::dim);
    out.segment<3>(idx::p) = x.R.transpose() * x.v * dt + 0.5 * abar * dt * dt;
    out.segment<3>(idx::r) = wbar * dt;
    out.segment<3>(idx::v) = abar * dt;
    return out;
}

Eigen::MatrixXd processNoise(const NoiseParams& np, const ContactFlags& contacts, double dt)
{
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    const double lfScale = contacts.lf ? 1.0 : np.swingScale;
    const double rfScale = contacts.rf ? 1.0 : np.swingScale;

    const double posStd = 0.5 * np.accelStd * dt * dt;
    const double velStd = np.accelStd * dt;
    setDiagBlock(q, idx::p, posStd * posStd);
    setDiagBlock(q, idx::v, velStd * velStd);
    // Shared accelerometer noise correlates the position and velocity blocks;
    // the two minus signs cancel, so the cross term is positive.
    const double crossCov = 0.5 * np.accelStd * np.accelStd * dt * dt * dt;
    q.block<3, 3>(idx::p, idx::v) = crossCov * Eigen::Matrix3d::Identity();
    q.block<3, 3>(idx::v, idx::p) = crossCov * Eigen::Matrix3d::Identity();

    const double rotStd = np.gyroStd * dt;
    setDiagBlock(q, idx::r, rotStd * rotStd);

    const double lfLin = np.contactLinStd * lfScale * dt;
    const double lfAng = np.contactAngStd * lfScale * dt;
    const double rfLin = np.contactLinStd * rfScale * dt;
    const double rfAng = np.contactAngStd * rfScale * dt;
    setDiagBlock(q, idx::dLf, lfLin * lfLin);
    setDiagBlock(q, idx::zLf, lfAng * lfAng);
    setDiagBlock(q, idx::dRf, rfLin * rfLin);
    setDiagBlock(q, idx::zRf, rfAng * rfAng);

    const double baStd = np.accelBiasStd * dt;
    const double bgStd = np.gyroBiasStd * dt;
    setDiagBlock(q, idx::ba, baStd * baStd);
    setDiagBlock(q, idx::bg, bgStd * bgStd);
    return q;
}

Eigen::MatrixXd motionJacobianRie(const KioState& x, double dt)
{
    const Eigen::Matrix3d rt = x.R.transpose();
    const Eigen::Matrix3d xi1 = rt * lie::skew(gravity()) * dt;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    f.block<3, 3>(idx::p, idx::r) = 0.5 * xi1 * dt;
    f.block<3, 3>(idx::p, idx::v) = rt * dt;
    f.block<3, 3>(idx::p, idx::ba) = -0.5 * dt * dt * Eigen::Matrix3d::Identity();
    f.block<3, 3>(idx::r, idx::bg) = -dt * Eigen::Matrix3d::Identity();
    f.block<3, 3>(idx::v, idx::r) = xi1;
    f.block<3, 3>(idx::v, idx::ba) = -dt * Eigen::Matrix3d::Identity();
    return f;
}

Eigen::MatrixXd motionJacobianLie(const KioState& x, const ImuSample& /*u*/, double dt)
{
    const Eigen::Vector3d bodyVel = x.R.transpose() * x.v;
    const Eigen::Vector3d bodyGravity = x.R.transpose() * gravity();
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    f.block<3, 3>(idx::p, idx::r) =
        lie::skew(bodyVel) * dt + 0.5 * lie::skew(bodyGravity) * dt * dt;
    f.block<3, 3>(idx::p, idx::v) = dt * Eigen::Matrix3d::Identity();
    f.block<3, 3>(idx::p, idx::ba) = -0.5 * dt * dt * Eigen::Matrix3d::Identity();
    f.block<3, 3>(idx::r, idx::bg) = -dt * Eigen::Matrix3d::Identity();
    f.block<3, 3>(idx::v, idx::r) = lie::skew(bodyGravity) * dt;
    f.block<3, 3>(idx::v, idx::ba) = -dt * Eigen::Matrix3d::Identity();
    return f;
}

ContinuousErrorModel continuousErrorModelRie(const KioState& x)
{
    ContinuousErrorModel model;
    model.fc = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    model.fc.block<3, 3>(idx::p, idx::v) = Eigen::Matrix3d::Identity();
    model.fc.block<3, 3>(idx::p, idx::bg) = -lie::skew(x.p) * x.R;
    model.fc.block<3, 3>(idx::r, idx::bg) = -x.R;
    model.fc.block<3, 3>(idx::v, idx::r) = lie::skew(gravity());
    model.fc.block<3, 3>(idx::v, idx::ba) = -x.R;
    model.fc.block<3, 3>(idx::v, idx::bg) = -lie::skew(x.v) * x.R;
    model.lc = lie::adjoint(embed(x));
    return model;
}

ContinuousErrorModel continuousErrorModelLie(const ImuSample& u, const KioState& x)
{
    const Eigen::Vector3d abar = u.acc - x.ba;
    const Eigen::Vector3d wbar = compensatedGyro(x, u);
    ContinuousErrorModel model;
    model.fc = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    model.fc.block<3, 3>(idx::p, idx::p) = -lie::skew(wbar);
    model.fc.block<3, 3>(idx::p, idx::v) = Eigen::Matrix3d::Identity();
    model.fc.block<3, 3>(idx::r, idx::bg) = -Eigen::Matrix3d::Identity();
    model.fc.block<3, 3>(idx::v, idx::r) = -lie::skew(abar);
    model.fc.block<3, 3>(idx::v, idx::v) = -lie::skew(wbar);
    model.fc.block<3, 3>(idx::v, idx::ba) = -Eigen::Matrix3d::Identity();
    model.lc = Eigen::MatrixXd::Identity(idx::dim, idx::dim);
    return model;
}

Eigen::MatrixXd continuousNoiseCov(const NoiseParams& np, const ContactFlags& contacts)
{
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    const double lfScale = contacts.lf ? 1.0 : np.swingScale;
    const double rfScale = contacts.rf ? 1.0 : np.swingScale;
    setDiagBlock(cov, idx::r, np.gyroStd * np.gyroStd);
    setDiagBlock(cov, idx::v, np.accelStd * np.accelStd);
    setDiagBlock(cov, idx::dLf, np.contactLinStd * lfScale * np.contactLinStd * lfScale);
    setDiagBlock(cov, idx::zLf, np.contactAngStd * lfScale * np.contactAngStd * lfScale);
    setDiagBlock(cov, idx::dRf, np.contactLinStd * rfScale * np.contactLinStd * rfScale);
    setDiagBlock(cov, idx::zRf, np.contactAngStd * rfScale * np.contactAngStd * rfScale);
    setDiagBlock(cov, idx::ba, np.accelBiasStd * np.accelBiasStd);
    setDiagBlock(cov, idx::bg, np.gyroBiasStd * np.gyroBiasStd);
    return cov;
}

Eigen::Matrix4d predictMeasurement(const KioState& x, Foot foot)
{
    const Eigen::Vector3d& d = foot == Foot::LF ? x.dLf : x.dRf;
    const Eigen::Matrix3d& z = foot == Foot::LF ? x.zLf : x.zRf;
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    h.block<3, 3>(0, 0) = x.R.transpose() * z;
    h.block<3, 1>(0, 3) = x.R.transpose() * (d - x.p);
    return h;
}

Eigen::Matrix<double, 6, 27> measurementJacobian(const KioState& x, Foot foot,
                                                 filter::ErrorConvention conv)
{
    const int dCol = foot == Foot::LF ? idx::dLf : idx::dRf;
    const int zCol = foot == Foot::LF ? idx::zLf : idx::zRf;
    const Eigen::Vector3d& d = foot == Foot::LF ? x.dLf : x.dRf;
    const Eigen::Matrix3d zt = (foot == Foot::LF ? x.zLf : x.zRf).transpose();

    Eigen::Matrix<double, 6, 27> h = Eigen::Matrix<double, 6, 27>::Zero();
    if (conv == filter::ErrorConvention::RightInvariant)
    {
        h.block<3, 3>(0, idx::p) = -zt;
        h.block<3, 3>(0, idx::r) = zt * lie::skew(d);
        h.block<3, 3>(0, dCol) = zt;
        h.block<3, 3>(0, zCol) = -zt * lie::skew(d);
        h.block<3, 3>(3, idx::r) = -zt;
        h.block<3, 3>(3, zCol) = zt;
    }
    else
    {
        const Eigen::Matrix3d ztr = zt * x.R;
        h.block<3, 3>(0, idx::p) = -ztr;
        h.block<3, 3>(0, idx::r) = -zt * lie::skew(x.p - d) * x.R;
        h.block<3, 3>(0, dCol) = Eigen::Matrix3d::Identity();
        h.block<3, 3>(3, idx::r) = -ztr;
        h.block<3, 3>(3, zCol) = Eigen::Matrix3d::Identity();
    }
    return h;
}

const lie::GroupId& doubleSupportGroup()
{
    static const lie::GroupId g =
        lie::GroupId::composite({lie::GroupId::se3(), lie::GroupId::se3()});
    return g;
}

filter::MeasurementSpec stackDoubleSupport(const Eigen::Matrix<double, 6, 27>& hl,
                                           const Eigen::Matrix<double, 6, 27>& hr,
                                           const Eigen::Matrix4d& zl, const Eigen::Matrix4d& zr,
                                           const Eigen::Matrix<double, 6, 6>& nl,
                                           const Eigen::Matrix<double, 6, 6>& nr)
{
    Eigen::MatrixXd observed = Eigen::MatrixXd::Identity(8, 8);
    observed.block<4, 4>(0, 0) = zl;
    observed.block<4, 4>(4, 4) = zr;

    Eigen::MatrixXd jacobian(12, idx::dim);
    jacobian.topRows<6>() = hl;
    jacobian.bottomRows<6>() = hr;

    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(12, 12);
    noise.block<6, 6>(0, 0) = nl;
    noise.block<6, 6>(6, 6) = nr;

    filter::MeasurementSpec spec;
    spec.observed = lie::GroupElement{doubleSupportGroup(), std::move(observed)};
    spec.predicted = lie::identity(doubleSupportGroup());
    spec.measJacobian = std::move(jacobian);
    spec.measNoise = std::move(noise);
    return spec;
}

Eigen::Matrix<double, 6, 6> measurementNoise(const std::optional<Eigen::MatrixXd>& jRel,
                                             const NoiseParams& np)
{
    const double regularizer = 1e-12;
    const double encoderVar = np.encoderStd * np.encoderStd;
    if (jRel.has_value())
    {
        if (jRel->rows() != 6)
        {
            throw DimensionError(fmt::format(
                "relative-kinematics Jacobian must have 6 rows, got {}", jRel->rows()));
        }
        Eigen::Matrix<double, 6, 6> n = encoderVar * (*jRel) * jRel->transpose();
        n += regularizer * Eigen::Matrix<double, 6, 6>::Identity();
        return n;
    }
    return (encoderVar + regularizer) * Eigen::Matrix<double, 6, 6>::Identity();
}

Eigen::MatrixXd priorCovariance(const NoiseParams& np)
{
    Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(idx::dim, idx::dim);
    const double pos = np.priorPositionStd * np.priorPositionStd;
    const double rot = np.priorOrientationStd * np.priorOrientationStd;
    setDiagBlock(p0, idx::p, pos);
    setDiagBlock(p0, idx::r, rot);
    setDiagBlock(p0, idx::v, np.priorVelocityStd * np.priorVelocityStd);
    setDiagBlock(p0, idx::dLf, pos);
    setDiagBlock(p0, idx::zLf, rot);
    setDiagBlock(p0, idx::dRf, pos);
    setDiagBlock(p0, idx::zRf, rot);
    setDiagBlock(p0, idx::ba, np.priorAccelBiasStd * np.priorAccelBiasStd);
    setDiagBlock(p0, idx::bg, np.priorGyroBiasStd * np.priorGyroBiasStd);
    return p0;
}

filter::Belief initialBelief(const KioState& truth, const NoiseParams& np,
                             filter::ErrorConvention conv, bool exactInit, std::uint64_t seed)
{
    Eigen::MatrixXd p0 = priorCovariance(np);
    lie::GroupElement mean = embed(truth);
    if (!exactInit)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd eps(idx::dim);
        for (int i = 0; i < idx::dim; ++i)
        {
            eps(i) = gauss(rng) * std::sqrt(p0(i, i));
        }
        const lie::GroupElement offset = lie::expHat({kioGroup(), -eps});
        mean = conv == filter::ErrorConvention::LeftInvariant ? lie::compose(mean, offset)
                                                              : lie::compose(offset, mean);
    }
    return filter::Belief{std::move(mean), std::move(p0)};
}

KioFilter::KioFilter(FilterVariant variant, const NoiseParams& np)
    : m_variant(variant), m_noise(np)
{
    m_noise.validate(false);
}

filter::Belief KioFilter::predict(const filter::Belief& b, const ImuSample& u,
                                  const ContactFlags& contacts, double dt) const
{
    const KioState xs = extract(b.mean);
    switch (m_variant)
    {
    case FilterVariant::DiligentKio:
    {
        filter::MotionSpec motion{lie::TangentVector{kioGroup(), omega(xs, u, dt)},
                                  motionJacobianLie(xs, u, dt), processNoise(m_noise, contacts, dt)};
        return filter::predictLeftInvariant(b, motion);
    }
    case FilterVariant::DiligentKioRie:
    {
        filter::MotionSpec motion{lie::TangentVector{kioGroup(), omega(xs, u, dt)},
                                  motionJacobianRie(xs, dt), processNoise(m_noise, contacts, dt)};
        return filter::predictRightInvariant(b, motion);
    }
    case FilterVariant::CodiligentKio:
    case FilterVariant::CodiligentKioRie:
    {
        const ContinuousErrorModel model = m_variant == FilterVariant::CodiligentKio
                                               ? continuousErrorModelLie(u, xs)
                                               : continuousErrorModelRie(xs);
        const Eigen::MatrixXd qcHat =
            model.lc * continuousNoiseCov(m_noise, contacts) * model.lc.transpose();
        auto meanProp = [&](const lie::GroupElement& g) {
            const KioState s = extract(g);
            return lie::compose(g, lie::expHat({kioGroup(), omega(s, u, dt)}));
        };
        return filter::predictContinuousDiscrete(b, meanProp, model.fc, qcHat, dt);
    }
    }
    throw ValidationError("unknown filter variant enumerator");
}

filter::Belief KioFilter::step(const filter::Belief& b, const ImuSample& u,
                               const ContactFlags& contacts,
                               const std::vector<RelPoseMeasurement>& meas, double dt) const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
    {
        throw ValidationError(fmt::format("step requires a positive finite dt, got {}", dt));
    }
    if (!(b.mean.group == kioGroup()))
    {
        throw GroupMismatchError("step expects a belief over the KIO state group");
    }
    const RelPoseMeasurement* lf = nullptr;
    const RelPoseMeasurement* rf = nullptr;
    for (const RelPoseMeasurement& m : meas)
    {
        const RelPoseMeasurement*& slot = m.foot == Foot::LF ? lf : rf;
        if (slot != nullptr)
        {
            throw ValidationError(
                fmt::format("duplicate relative-pose measurement for foot {}", footName(m.foot)));
        }
        slot = &m;
    }
    if (!contacts.lf)
    {
        lf = nullptr;
    }
    if (!contacts.rf)
    {
        rf = nullptr;
    }

    filter::Belief predicted = predict(b, u, contacts, dt);
    if (lf == nullptr && rf == nullptr)
    {
        return predicted;
    }

    const KioState xs = extract(predicted.mean);
    const filter::ErrorConvention conv = convention();
    filter::MeasurementSpec spec;
    if (lf != nullptr && rf != nullptr)
    {
        spec = stackDoubleSupport(measurementJacobian(xs, Foot::LF, conv),
                                  measurementJacobian(xs, Foot::RF, conv), lf->pose, rf->pose,
                                  lf->noiseCov, rf->noiseCov);
        Eigen::MatrixXd predictedPose = Eigen::MatrixXd::Identity(8, 8);
        predictedPose.block<4, 4>(0, 0) = predictMeasurement(xs, Foot::LF);
        predictedPose.block<4, 4>(4, 4) = predictMeasurement(xs, Foot::RF);
        spec.predicted = lie::GroupElement{doubleSupportGroup(), std::move(predictedPose)};
    }
    else
    {
        const RelPoseMeasurement& m = lf != nullptr ? *lf : *rf;
        spec.observed = lie::GroupElement{se3Group(), m.pose};
        spec.predicted = lie::GroupElement{se3Group(), predictMeasurement(xs, m.foot)};
        spec.measJacobian = measurementJacobian(xs, m.foot, conv);
        spec.measNoise = m.noiseCov;
    }
    return conv == filter::ErrorConvention::LeftInvariant
               ? filter::updateLeftInvariant(predicted, spec)
               : filter::updateRightInvariant(predicted, spec);
}

} // namespace kio
