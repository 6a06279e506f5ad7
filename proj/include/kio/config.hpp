/**
 * @file config.hpp
 * @brief Key-value configuration file: parsing, serialization, and
 *        conversion to the typed simulation/filter parameter structs.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_CONFIG_HPP
#define KIO_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>

#include "kio/sim.hpp"
#include "kio/state.hpp"

namespace kio
{

/**
 * Flat mirror of the configuration file: one member per key, stored exactly
 * as written (angles that Table-style parameter lists quote in degrees stay
 * in degrees here). parseConfig(serializeConfig(cfg)) == cfg holds bitwise.
 * Unit conversion and validation happen in the typed accessors.
 */
struct Config
{
    // [gait] trajectory generation
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
    std::uint64_t gaitSeed{1};
    std::array<double, 6> initialBias{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};

    // [noise] sensor model; encoder_std_deg is in degrees
    double accelStd{0.09};
    double gyroStd{0.01};
    double accelBiasStd{0.01};
    double gyroBiasStd{0.001};
    double contactLinStd{0.009};
    double contactAngStd{0.004};
    double encoderStdDeg{0.1};
    double swingScale{1e3};

    // [prior] initial belief; orientation_std_deg is in degrees
    double priorPositionStd{0.01};
    double priorOrientationStdDeg{10.0};
    double priorVelocityStd{0.5};
    double priorAccelBiasStd{0.01};
    double priorGyroBiasStd{0.002};

    // [run] filter execution
    std::string variant{"diligent-kio"};
    std::string dataset{};
    std::string output{};
    std::uint64_t seed{1};
    bool exactInit{false};
    bool fullCov{false};
    int runs{1};

    // [eval] metrics
    double window{1.0};
    double quantile{0.99};

    bool operator==(const Config&) const = default;

    /** Sensor/prior parameters in SI units (degrees converted to radians). */
    NoiseParams noiseParams() const;

    /** Gait generation parameters (embeds noiseParams()). */
    GaitConfig gaitConfig() const;

    /** Parsed filter variant; raises ValidationError on an unknown name. */
    FilterVariant filterVariant() const;
};

/**
 * Parses `key = value` configuration text ('#' starts a comment, blank lines
 * ignored, later duplicates win). Unknown keys raise ParseError with the
 * line number; malformed values likewise.
 */
Config parseConfig(const std::string& text);

/** Reads and parses a configuration file; ValidationError if unreadable. */
Config loadConfig(const std::string& path);

/** Serializes every key in a fixed order with full double precision. */
std::string serializeConfig(const Config& cfg);

} // namespace kio

#endif // KIO_CONFIG_HPP
