/**
 * @file config.cpp
 * @brief Configuration parsing/serialization and typed conversions.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <string_view>

#include <fmt/format.h>

#include "kio/errors.hpp"

namespace kio
{

namespace
{

constexpr double kDegToRad = M_PI / 180.0;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    {
        s.remove_suffix(1);
    }
    return s;
}

double toDouble(std::string_view text, int lineNo)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
        throw ParseError(
            fmt::format("line {}: malformed number '{}'", lineNo, std::string(text)));
    }
    return value;
}

std::uint64_t toU64(std::string_view text, int lineNo)
{
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
        throw ParseError(
            fmt::format("line {}: malformed integer '{}'", lineNo, std::string(text)));
    }
    return value;
}

int toInt(std::string_view text, int lineNo)
{
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
        throw ParseError(
            fmt::format("line {}: malformed integer '{}'", lineNo, std::string(text)));
    }
    return value;
}

bool toBool(std::string_view text, int lineNo)
{
    if (text == "true" || text == "1")
    {
        return true;
    }
    if (text == "false" || text == "0")
    {
        return false;
    }
    throw ParseError(fmt::format("line {}: boolean must be true/false, got '{}'", lineNo,
                                 std::string(text)));
}

std::array<double, 6> toVec6(std::string_view text, int lineNo)
{
    std::array<double, 6> out{};
    std::size_t begin = 0;
    int count = 0;
    while (begin <= text.size())
    {
        std::size_t end = text.find(',', begin);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        if (count >= 6)
        {
            throw ParseError(fmt::format("line {}: expected 6 numbers", lineNo));
        }
        out[static_cast<std::size_t>(count++)] =
            toDouble(trim(text.substr(begin, end - begin)), lineNo);
        if (end == text.size())
        {
            break;
        }
        begin = end + 1;
    }
    if (count != 6)
    {
        throw ParseError(fmt::format("line {}: expected 6 numbers, found {}", lineNo, count));
    }
    return out;
}

using Setter = std::function<void(Config&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& keyTable()
{
    auto num = [](double Config::* member) {
        return [member](Config& c, std::string_view v, int line) {
            c.*member = toDouble(v, line);
        };
    };
    auto str = [](std::string Config::* member) {
        return [member](Config& c, std::string_view v, int) { c.*member = std::string(v); };
    };
    static const std::map<std::string, Setter, std::less<>> table = {
        {"gait.step_length", num(&Config::stepLength)},
        {"gait.step_duration", num(&Config::stepDuration)},
        {"gait.double_support_fraction", num(&Config::doubleSupportFraction)},
        {"gait.walk_distance", num(&Config::walkDistance)},
        {"gait.rate", num(&Config::rate)},
        {"gait.base_height", num(&Config::baseHeight)},
        {"gait.rest_duration", num(&Config::restDuration)},
        {"gait.step_height", num(&Config::stepHeight)},
        {"gait.foot_separation", num(&Config::footSeparation)},
        {"gait.sway_amplitude", num(&Config::swayAmplitude)},
        {"gait.sway_frequency", num(&Config::swayFrequency)},
        {"gait.seed",
         [](Config& c, std::string_view v, int line) { c.gaitSeed = toU64(v, line); }},
        {"gait.initial_bias",
         [](Config& c, std::string_view v, int line) { c.initialBias = toVec6(v, line); }},
        {"noise.accel_std", num(&Config::accelStd)},
        {"noise.gyro_std", num(&Config::gyroStd)},
        {"noise.accel_bias_std", num(&Config::accelBiasStd)},
        {"noise.gyro_bias_std", num(&Config::gyroBiasStd)},
        {"noise.contact_lin_std", num(&Config::contactLinStd)},
        {"noise.contact_ang_std", num(&Config::contactAngStd)},
        {"noise.encoder_std_deg", num(&Config::encoderStdDeg)},
        {"noise.swing_scale", num(&Config::swingScale)},
        {"prior.position_std", num(&Config::priorPositionStd)},
        {"prior.orientation_std_deg", num(&Config::priorOrientationStdDeg)},
        {"prior.velocity_std", num(&Config::priorVelocityStd)},
        {"prior.accel_bias_std", num(&Config::priorAccelBiasStd)},
        {"prior.gyro_bias_std", num(&Config::priorGyroBiasStd)},
        {"run.variant", str(&Config::variant)},
        {"run.dataset", str(&Config::dataset)},
        {"run.output", str(&Config::output)},
        {"run.seed", [](Config& c, std::string_view v, int line) { c.seed = toU64(v, line); }},
        {"run.exact_init",
         [](Config& c, std::string_view v, int line) { c.exactInit = toBool(v, line); }},
        {"run.full_cov",
         [](Config& c, std::string_view v, int line) { c.fullCov = toBool(v, line); }},
        {"run.runs", [](Config& c, std::string_view v, int line) { c.runs = toInt(v, line); }},
        {"eval.window", num(&Config::window)},
        {"eval.quantile", num(&Config::quantile)},
    };
    return table;
}

void appendKey(std::string& out, std::string_view key, double value)
{
    fmt::format_to(std::back_inserter(out), "{} = {:.17g}\n", key, value);
}

} // namespace

NoiseParams Config::noiseParams() const
{
    NoiseParams np;
    np.accelStd = accelStd;
    np.gyroStd = gyroStd;
    np.accelBiasStd = accelBiasStd;
    np.gyroBiasStd = gyroBiasStd;
    np.contactLinStd = contactLinStd;
    np.contactAngStd = contactAngStd;
    np.encoderStd = encoderStdDeg * kDegToRad;
    np.swingScale = swingScale;
    np.priorPositionStd = priorPositionStd;
    np.priorOrientationStd = priorOrientationStdDeg * kDegToRad;
    np.priorVelocityStd = priorVelocityStd;
    np.priorAccelBiasStd = priorAccelBiasStd;
    np.priorGyroBiasStd = priorGyroBiasStd;
    return np;
}

GaitConfig Config::gaitConfig() const
{
    GaitConfig cfg;
    cfg.stepLength = stepLength;
    cfg.stepDuration = stepDuration;
    cfg.doubleSupportFraction = doubleSupportFraction;
    cfg.walkDistance = walkDistance;
    cfg.rate = rate;
    cfg.baseHeight = baseHeight;
    cfg.restDuration = restDuration;
    cfg.stepHeight = stepHeight;
    cfg.footSeparation = footSeparation;
    cfg.swayAmplitude = swayAmplitude;
    cfg.swayFrequency = swayFrequency;
    cfg.seed = gaitSeed;
    cfg.noise = noiseParams();
    for (int i = 0; i < 6; ++i)
    {
        cfg.initialBias(i) = initialBias[static_cast<std::size_t>(i)];
    }
    return cfg;
}

FilterVariant Config::filterVariant() const
{
    return parseVariant(variant);
}

Config parseConfig(const std::string& text)
{
    Config cfg;
    int lineNo = 0;
    std::size_t begin = 0;
    while (begin <= text.size())
    {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos)
        {
            end = text.size();
        }
        ++lineNo;
        std::string_view line(text.data() + begin, end - begin);
        begin = end + 1;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty())
        {
            if (end == text.size())
            {
                break;
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ParseError(
                fmt::format("line {}: expected 'key = value', got '{}'", lineNo,
                            std::string(line)));
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = keyTable();
        const auto it = table.find(key);
        if (it == table.end())
        {
            throw ParseError(
                fmt::format("line {}: unknown key '{}'", lineNo, std::string(key)));
        }
        it->second(cfg, value, lineNo);
        if (end == text.size())
        {
            break;
        }
    }
    return cfg;
}

Config loadConfig(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ValidationError(fmt::format("cannot open config file '{}'", path));
    }
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    return parseConfig(text);
}

std::string serializeConfig(const Config& cfg)
{
    std::string out;
    out.reserve(2048);
    out += "# gait\n";
    appendKey(out, "gait.step_length", cfg.stepLength);
    appendKey(out, "gait.step_duration", cfg.stepDuration);
    appendKey(out, "gait.double_support_fraction", cfg.doubleSupportFraction);
    appendKey(out, "gait.walk_distance", cfg.walkDistance);
    appendKey(out, "gait.rate", cfg.rate);
    appendKey(out, "gait.base_height", cfg.baseHeight);
    appendKey(out, "gait.rest_duration", cfg.restDuration);
    appendKey(out, "gait.step_height", cfg.stepHeight);
    appendKey(out, "gait.foot_separation", cfg.footSeparation);
    appendKey(out, "gait.sway_amplitude", cfg.swayAmplitude);
    appendKey(out, "gait.sway_frequency", cfg.swayFrequency);
    fmt::format_to(std::back_inserter(out), "gait.seed = {}\n", cfg.gaitSeed);
    out += "gait.initial_bias = ";
    for (int i = 0; i < 6; ++i)
    {
        fmt::format_to(std::back_inserter(out), "{}{:.17g}", i > 0 ? "," : "",
                       cfg.initialBias[static_cast<std::size_t>(i)]);
    }
    out += "\n# sensor noise\n";
    appendKey(out, "noise.accel_std", cfg.accelStd);
    appendKey(out, "noise.gyro_std", cfg.gyroStd);
    appendKey(out, "noise.accel_bias_std", cfg.accelBiasStd);
    appendKey(out, "noise.gyro_bias_std", cfg.gyroBiasStd);
    appendKey(out, "noise.contact_lin_std", cfg.contactLinStd);
    appendKey(out, "noise.contact_ang_std", cfg.contactAngStd);
    appendKey(out, "noise.encoder_std_deg", cfg.encoderStdDeg);
    appendKey(out, "noise.swing_scale", cfg.swingScale);
    out += "# prior deviations\n";
    appendKey(out, "prior.position_std", cfg.priorPositionStd);
    appendKey(out, "prior.orientation_std_deg", cfg.priorOrientationStdDeg);
    appendKey(out, "prior.velocity_std", cfg.priorVelocityStd);
    appendKey(out, "prior.accel_bias_std", cfg.priorAccelBiasStd);
    appendKey(out, "prior.gyro_bias_std", cfg.priorGyroBiasStd);
    out += "# filter execution\n";
    fmt::format_to(std::back_inserter(out), "run.variant = {}\n", cfg.variant);
    fmt::format_to(std::back_inserter(out), "run.dataset = {}\n", cfg.dataset);
    fmt::format_to(std::back_inserter(out), "run.output = {}\n", cfg.output);
    fmt::format_to(std::back_inserter(out), "run.seed = {}\n", cfg.seed);
    fmt::format_to(std::back_inserter(out), "run.exact_init = {}\n",
                   cfg.exactInit ? "true" : "false");
    fmt::format_to(std::back_inserter(out), "run.full_cov = {}\n",
                   cfg.fullCov ? "true" : "false");
    fmt::format_to(std::back_inserter(out), "run.runs = {}\n", cfg.runs);
    out += "# evaluation\n";
    appendKey(out, "eval.window", cfg.window);
    appendKey(out, "eval.quantile", cfg.quantile);
    return out;
}

} // namespace kio
