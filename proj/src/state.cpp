/**
 * @file state.cpp
 * @brief State embedding/extraction and noise-parameter validation.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/state.hpp"

#include <fmt/format.h>

namespace kio
{

namespace
{

void requireNonNegative(double value, const char* name, bool strict)
{
    if (std::isnan(value) || value < 0.0)
    {
        throw ValidationError(fmt::format("noise parameter {} must be non-negative, got {}", name, value));
    }
    if (strict && value == 0.0)
    {
        throw ValidationError(fmt::format("noise parameter {} must be positive, got 0", name));
    }
}

} // namespace

void NoiseParams::validate(bool strict) const
{
    requireNonNegative(accelStd, "accel_std", strict);
    requireNonNegative(gyroStd, "gyro_std", strict);
    requireNonNegative(accelBiasStd, "accel_bias_std", strict);
    requireNonNegative(gyroBiasStd, "gyro_bias_std", strict);
    requireNonNegative(contactLinStd, "contact_lin_std", strict);
    requireNonNegative(contactAngStd, "contact_ang_std", strict);
    requireNonNegative(encoderStd, "encoder_std", strict);
    if (std::isnan(swingScale) || swingScale < 1.0)
    {
        throw ValidationError(fmt::format("swing_scale must be >= 1, got {}", swingScale));
    }
    requireNonNegative(priorPositionStd, "prior_position_std", strict);
    requireNonNegative(priorOrientationStd, "prior_orientation_std", strict);
    requireNonNegative(priorVelocityStd, "prior_velocity_std", strict);
    requireNonNegative(priorAccelBiasStd, "prior_accel_bias_std", strict);
    requireNonNegative(priorGyroBiasStd, "prior_gyro_bias_std", strict);
}

std::string variantName(FilterVariant v)
{
    switch (v)
    {
    case FilterVariant::DiligentKio:
        return "diligent-kio";
    case FilterVariant::DiligentKioRie:
        return "diligent-kio-rie";
    case FilterVariant::CodiligentKio:
        return "codiligent-kio";
    case FilterVariant::CodiligentKioRie:
        return "codiligent-kio-rie";
    }
    throw ValidationError("unknown filter variant enumerator");
}

FilterVariant parseVariant(const std::string& name)
{
    if (name == "diligent-kio")
    {
        return FilterVariant::DiligentKio;
    }
    if (name == "diligent-kio-rie")
    {
        return FilterVariant::DiligentKioRie;
    }
    if (name == "codiligent-kio")
    {
        return FilterVariant::CodiligentKio;
    }
    if (name == "codiligent-kio-rie")
    {
        return FilterVariant::CodiligentKioRie;
    }
    throw ValidationError(fmt::format("unknown filter variant '{}'; expected one of diligent-kio, "
                                      "diligent-kio-rie, codiligent-kio, codiligent-kio-rie",
                                      name));
}

filter::ErrorConvention variantConvention(FilterVariant v)
{
    switch (v)
    {
    case FilterVariant::DiligentKio:
    case FilterVariant::CodiligentKio:
        return filter::ErrorConvention::LeftInvariant;
    case FilterVariant::DiligentKioRie:
    case FilterVariant::CodiligentKioRie:
        return filter::ErrorConvention::RightInvariant;
    }
    throw ValidationError("unknown filter variant enumerator");
}

const lie::GroupId& kioGroup()
{
    static const lie::GroupId g = lie::GroupId::composite(
        {lie::GroupId::se23(), lie::GroupId::se3(), lie::GroupId::se3(), lie::GroupId::vec(6)});
    return g;
}

lie::GroupElement embed(const KioState& x)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(20, 20);
    m.block<3, 3>(0, 0) = x.R;
    m.block<3, 1>(0, 3) = x.p;
    m.block<3, 1>(0, 4) = x.v;
    m.block<3, 3>(5, 5) = x.zLf;
    m.block<3, 1>(5, 8) = x.dLf;
    m.block<3, 3>(9, 9) = x.zRf;
    m.block<3, 1>(9, 12) = x.dRf;
    m.block<3, 1>(13, 19) = x.ba;
    m.block<3, 1>(16, 19) = x.bg;
    return lie::GroupElement{kioGroup(), std::move(m)};
}

KioState extract(const lie::GroupElement& g)
{
    if (!(g.group == kioGroup()))
    {
        throw GroupMismatchError("extract expects an element of the KIO state group");
    }
    KioState x;
    x.R = g.matrix.block<3, 3>(0, 0);
    x.p = g.matrix.block<3, 1>(0, 3);
    x.v = g.matrix.block<3, 1>(0, 4);
    x.zLf = g.matrix.block<3, 3>(5, 5);
    x.dLf = g.matrix.block<3, 1>(5, 8);
    x.zRf = g.matrix.block<3, 3>(9, 9);
    x.dRf = g.matrix.block<3, 1>(9, 12);
    x.ba = g.matrix.block<3, 1>(13, 19);
    x.bg = g.matrix.block<3, 1>(16, 19);
    return x;
}

} // namespace kio
