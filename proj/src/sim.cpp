/**
 * @file sim.cpp
 * @brief Gait generation and sensor synthesis.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/sim.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "kio/errors.hpp"
#include "kio/lie.hpp"
#include "kio/models.hpp"

namespace kio
{

namespace
{

// Rest-to-rest quintic: zero velocity and acceleration at both ends.
double quintic(double s)
{
    s = std::clamp(s, 0.0, 1.0);
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double quinticDot(double s)
{
    s = std::clamp(s, 0.0, 1.0);
    return s * s * (30.0 + s * (-60.0 + 30.0 * s));
}

struct SwingEvent
{
    double start{0.0};
    double end{0.0};
    double xFrom{0.0};
    double xTo{0.0};
};

struct FootSample
{
    double x{0.0};
    double z{0.0};
    bool contact{true};
};

FootSample evaluateFoot(const std::vector<SwingEvent>& swings, double initialX, double stepHeight,
                        double t)
{
    FootSample out;
    out.x = initialX;
    for (const SwingEvent& sw : swings)
    {
        if (t <= sw.start)
        {
            break;
        }
        if (t < sw.end)
        {
            const double s = (t - sw.start) / (sw.end - sw.start);
            out.x = sw.xFrom + (sw.xTo - sw.xFrom) * quintic(s);
            out.z = stepHeight * 0.5 * (1.0 - std::cos(2.0 * M_PI * s));
            out.contact = false;
            return out;
        }
        out.x = sw.xTo;
    }
    return out;
}

void requireField(bool ok, const char* message)
{
    if (!ok)
    {
        throw ValidationError(message);
    }
}

} // namespace

void GaitConfig::validate() const
{
    requireField(std::isfinite(rate) && rate > 0.0, "gait config: rate must be positive");
    requireField(doubleSupportFraction >= 0.0 && doubleSupportFraction < 1.0,
                 "gait config: double_support_fraction must lie in [0, 1)");
    requireField(std::isfinite(walkDistance) && walkDistance >= 0.0,
                 "gait config: walk_distance must be non-negative");
    if (walkDistance > 0.0)
    {
        requireField(std::isfinite(stepLength) && stepLength > 0.0,
                     "gait config: step_length must be positive for a nonzero walk");
        requireField(stepLength <= 0.6,
                     "gait config: step_length exceeds the 0.6 m leg-reach proxy");
        requireField(std::isfinite(stepDuration) && stepDuration > 0.0,
                     "gait config: step_duration must be positive");
    }
    requireField(std::isfinite(restDuration) && restDuration >= 0.0,
                 "gait config: rest_duration must be non-negative");
    requireField(std::isfinite(baseHeight) && baseHeight >= 0.0,
                 "gait config: base_height must be non-negative");
    requireField(std::isfinite(stepHeight) && stepHeight >= 0.0,
                 "gait config: step_height must be non-negative");
    requireField(std::isfinite(footSeparation) && footSeparation >= 0.0,
                 "gait config: foot_separation must be non-negative");
    requireField(std::isfinite(swayAmplitude) && swayAmplitude >= 0.0,
                 "gait config: sway_amplitude must be non-negative");
    requireField(std::isfinite(swayFrequency) && swayFrequency >= 0.0,
                 "gait config: sway_frequency must be non-negative");
    noise.validate(false);
}

std::vector<TruthSample> generateGait(const GaitConfig& cfg)
{
    cfg.validate();
    const int strides =
        cfg.walkDistance > 0.0
            ? static_cast<int>(std::ceil(cfg.walkDistance / cfg.stepLength - 1e-12))
            : 0;
    const double walkStart = cfg.restDuration;
    const double walkEnd = walkStart + strides * cfg.stepDuration;
    const double total = walkEnd + cfg.restDuration;
    const long ticks = std::lround(total * cfg.rate) + 1;
    requireField(ticks >= 2, "gait config: trajectory must span at least two ticks");

    // Swing windows sit in the middle of each stride; the double-support
    // margins at both ends overlap the neighboring stride's margins.
    std::vector<SwingEvent> lfSwings;
    std::vector<SwingEvent> rfSwings;
    double lfX = 0.0;
    double rfX = 0.0;
    for (int i = 0; i < strides; ++i)
    {
        const double strideStart = walkStart + i * cfg.stepDuration;
        const double margin = 0.5 * cfg.doubleSupportFraction * cfg.stepDuration;
        SwingEvent sw;
        sw.start = strideStart + margin;
        sw.end = strideStart + cfg.stepDuration - margin;
        sw.xTo = (i + 1) * cfg.stepLength;
        if (i % 2 == 0)
        {
            sw.xFrom = lfX;
            lfX = sw.xTo;
            lfSwings.push_back(sw);
        }
        else
        {
            sw.xFrom = rfX;
            rfX = sw.xTo;
            rfSwings.push_back(sw);
        }
    }

    std::vector<TruthSample> out;
    out.reserve(static_cast<std::size_t>(ticks));
    const double halfSep = 0.5 * cfg.footSeparation;
    for (long k = 0; k < ticks; ++k)
    {
        const double t = static_cast<double>(k) / cfg.rate;
        TruthSample sample;
        sample.t = t;

        double baseX = 0.0;
        double baseVx = 0.0;
        if (strides > 0 && t > walkStart)
        {
            if (t >= walkEnd)
            {
                baseX = strides * cfg.stepLength;
            }
            else
            {
                int i = static_cast<int>((t - walkStart) / cfg.stepDuration);
                i = std::min(i, strides - 1);
                const double s = (t - walkStart - i * cfg.stepDuration) / cfg.stepDuration;
                baseX = (i + quintic(s)) * cfg.stepLength;
                baseVx = cfg.stepLength * quinticDot(s) / cfg.stepDuration;
            }
        }
        double swayY = 0.0;
        double swayVy = 0.0;
        if (cfg.swayAmplitude > 0.0)
        {
            const double w = 2.0 * M_PI * cfg.swayFrequency;
            swayY = cfg.swayAmplitude * std::sin(w * t);
            swayVy = cfg.swayAmplitude * w * std::cos(w * t);
        }
        sample.state.p = Eigen::Vector3d(baseX, swayY, cfg.baseHeight);
        sample.state.v = Eigen::Vector3d(baseVx, swayVy, 0.0);

        const FootSample lf = evaluateFoot(lfSwings, 0.0, cfg.stepHeight, t);
        const FootSample rf = evaluateFoot(rfSwings, 0.0, cfg.stepHeight, t);
        sample.state.dLf = Eigen::Vector3d(lf.x, halfSep, lf.z);
        sample.state.dRf = Eigen::Vector3d(rf.x, -halfSep, rf.z);
        sample.contacts.lf = lf.contact;
        sample.contacts.rf = rf.contact;
        out.push_back(sample);
    }
    return out;
}

std::vector<ImuSample> synthesizeImu(std::vector<TruthSample>& truth, const NoiseParams& np,
                                     const Eigen::Matrix<double, 6, 1>& bias0, std::uint64_t seed)
{
    if (truth.size() < 2)
    {
        throw ValidationError("synthesizeImu requires at least two truth samples");
    }
    const std::size_t n = truth.size();
    const double dt = truth[1].t - truth[0].t;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw3 = [&]() {
        const double a = gauss(rng);
        const double b = gauss(rng);
        const double c = gauss(rng);
        return Eigen::Vector3d(a, b, c);
    };

    Eigen::Vector3d ba = bias0.head<3>();
    Eigen::Vector3d bg = bias0.tail<3>();
    const double sqrtDt = std::sqrt(dt);

    std::vector<ImuSample> out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = k + 1 == n ? k : k + 1;
        const double span = truth[hi].t - truth[lo].t;
        const Eigen::Vector3d aWorld = (truth[hi].state.v - truth[lo].state.v) / span;
        const Eigen::Matrix3d rDot = (truth[hi].state.R - truth[lo].state.R) / span;
        Eigen::Matrix3d sw = truth[k].state.R.transpose() * rDot;
        sw = 0.5 * (sw - sw.transpose().eval());
        const Eigen::Vector3d omegaBody(sw(2, 1), sw(0, 2), sw(1, 0));

        truth[k].state.ba = ba;
        truth[k].state.bg = bg;

        ImuSample& u = out[k];
        u.t = truth[k].t;
        u.acc = truth[k].state.R.transpose() * (aWorld - gravity()) + ba + np.accelStd * draw3();
        u.gyro = omegaBody + bg + np.gyroStd * draw3();

        ba += np.accelBiasStd * sqrtDt * draw3();
        bg += np.gyroBiasStd * sqrtDt * draw3();
    }
    return out;
}

std::vector<RelPoseMeasurement> synthesizeRelpose(const std::vector<TruthSample>& truth,
                                                  const NoiseParams& np, std::uint64_t seed)
{
    static const lie::GroupId se3 = lie::GroupId::se3();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::Matrix<double, 6, 6> jac = syntheticKinematicsJacobian();
    const Eigen::Matrix<double, 6, 6> cov = measurementNoise(Eigen::MatrixXd(jac), np);

    std::vector<RelPoseMeasurement> out;
    for (const TruthSample& sample : truth)
    {
        for (Foot foot : {Foot::LF, Foot::RF})
        {
            const bool contact = foot == Foot::LF ? sample.contacts.lf : sample.contacts.rf;
            if (!contact)
            {
                continue;
            }
            Eigen::Matrix<double, 6, 1> enc;
            for (int i = 0; i < 6; ++i)
            {
                enc(i) = np.encoderStd * gauss(rng);
            }
            const Eigen::Matrix<double, 6, 1> xi = jac * enc;
            const Eigen::MatrixXd noisePose = lie::expHat({se3, xi}).matrix;
            RelPoseMeasurement m;
            m.foot = foot;
            m.pose = predictMeasurement(sample.state, foot) * noisePose;
            m.noiseCov = cov;
            out.push_back(m);
        }
    }
    return out;
}

Eigen::Matrix<double, 6, 6> syntheticKinematicsJacobian()
{
    Eigen::Matrix<double, 6, 6> mix = Eigen::Matrix<double, 6, 6>::Identity();
    for (int i = 0; i < 6; ++i)
    {
        mix(i, (i + 1) % 6) = 0.3;
        mix(i, (i + 2) % 6) = 0.15;
    }
    const double gain = 5.0;
    const double rowNorm = 1.45; // each row's 1-norm by construction
    return (gain / rowNorm) * mix;
}

} // namespace kio
