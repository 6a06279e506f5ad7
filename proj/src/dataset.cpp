/**
 * @file dataset.cpp
 * @brief Dataset text-format writer/parser and content hashing.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/dataset.hpp"

#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "kio/errors.hpp"
#include "textio.hpp"

namespace kio
{

namespace
{

using textio::appendDouble;
using textio::appendMat3RowMajor;
using textio::appendScalars;
using textio::appendVec3;
using textio::failParse;
using textio::parseDouble;
using textio::parseMat3RowMajor;
using textio::parseScalars;
using textio::parseVec3;

constexpr const char* kHeaderMagic = "kio-dataset";

void appendMeasurement(std::string& out, const RelPoseMeasurement& m)
{
    out += " meas=";
    out += m.foot == Foot::LF ? "lf" : "rf";
    out.push_back(';');
    const Eigen::Vector3d trans = m.pose.block<3, 1>(0, 3);
    appendVec3(out, trans);
    out.push_back(';');
    appendMat3RowMajor(out, Eigen::Matrix3d(m.pose.block<3, 3>(0, 0)));
    out.push_back(';');
    for (int r = 0; r < 6; ++r)
    {
        for (int c = 0; c < 6; ++c)
        {
            if (r + c > 0)
            {
                out.push_back(',');
            }
            appendDouble(out, m.noiseCov(r, c));
        }
    }
}

bool parseFlag(std::string_view text, int lineNo)
{
    if (text == "1")
    {
        return true;
    }
    if (text == "0")
    {
        return false;
    }
    failParse(lineNo, fmt::format("contact flag must be 0 or 1, got '{}'", std::string(text)));
}

RelPoseMeasurement parseMeasurement(std::string_view text, int lineNo)
{
    std::string_view parts[4];
    int count = 0;
    std::size_t begin = 0;
    while (count < 4)
    {
        std::size_t end = text.find(';', begin);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        parts[count++] = text.substr(begin, end - begin);
        if (end == text.size())
        {
            break;
        }
        begin = end + 1;
    }
    if (count != 4)
    {
        failParse(lineNo, "measurement must have foot;translation;rotation;covariance parts");
    }
    RelPoseMeasurement m;
    if (parts[0] == "lf")
    {
        m.foot = Foot::LF;
    }
    else if (parts[0] == "rf")
    {
        m.foot = Foot::RF;
    }
    else
    {
        failParse(lineNo, fmt::format("unknown foot '{}'", std::string(parts[0])));
    }
    m.pose = Eigen::Matrix4d::Identity();
    m.pose.block<3, 1>(0, 3) = parseVec3(parts[1], lineNo);
    m.pose.block<3, 3>(0, 0) = parseMat3RowMajor(parts[2], lineNo);
    double cov[36];
    parseScalars(parts[3], cov, 36, lineNo);
    for (int r = 0; r < 6; ++r)
    {
        for (int c = 0; c < 6; ++c)
        {
            m.noiseCov(r, c) = cov[6 * r + c];
        }
    }
    return m;
}

} // namespace

void writeDataset(const std::string& path, const std::vector<TruthSample>& truth,
                  const std::vector<ImuSample>& imu, const std::vector<RelPoseMeasurement>& meas)
{
    if (truth.size() != imu.size())
    {
        throw ValidationError(fmt::format("truth and imu series differ in length: {} vs {}",
                                          truth.size(), imu.size()));
    }
    std::string out;
    out.reserve(truth.size() * 1024 + 64);
    fmt::format_to(std::back_inserter(out), "{} version=1 ticks={}\n", kHeaderMagic, truth.size());

    std::size_t mi = 0;
    for (std::size_t k = 0; k < truth.size(); ++k)
    {
        const TruthSample& ts = truth[k];
        const ImuSample& u = imu[k];
        out += "t=";
        appendDouble(out, ts.t);
        out += " acc=";
        appendVec3(out, u.acc);
        out += " gyro=";
        appendVec3(out, u.gyro);
        out += ts.contacts.lf ? " lf=1" : " lf=0";
        out += ts.contacts.rf ? " rf=1" : " rf=0";
        textio::appendStateFields(out, ts.state);

        for (Foot foot : {Foot::LF, Foot::RF})
        {
            const bool contact = foot == Foot::LF ? ts.contacts.lf : ts.contacts.rf;
            if (!contact)
            {
                continue;
            }
            if (mi >= meas.size() || meas[mi].foot != foot)
            {
                throw ValidationError(fmt::format(
                    "measurement list does not match contact schedule at tick {}", k));
            }
            appendMeasurement(out, meas[mi]);
            ++mi;
        }
        out.push_back('\n');
    }
    if (mi != meas.size())
    {
        throw ValidationError(
            fmt::format("{} measurements left unconsumed by the contact schedule",
                        meas.size() - mi));
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
    {
        throw ValidationError(fmt::format("cannot open '{}' for writing", path));
    }
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file)
    {
        throw ValidationError(fmt::format("failed writing dataset to '{}'", path));
    }
}

Dataset readDataset(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ValidationError(fmt::format("cannot open dataset file '{}'", path));
    }
    Dataset ds;
    std::string line;
    int lineNo = 0;
    bool headerSeen = false;
    long expectedTicks = -1;

    while (std::getline(in, line))
    {
        ++lineNo;
        const std::vector<std::string_view> tokens = textio::splitTokens(line);
        if (tokens.empty())
        {
            continue;
        }

        if (!headerSeen)
        {
            if (tokens[0] != kHeaderMagic)
            {
                failParse(lineNo, fmt::format("expected '{}' header", kHeaderMagic));
            }
            for (std::size_t i = 1; i < tokens.size(); ++i)
            {
                const std::size_t eq = tokens[i].find('=');
                if (eq == std::string_view::npos)
                {
                    failParse(lineNo, fmt::format("malformed header token '{}'",
                                                  std::string(tokens[i])));
                }
                const std::string_view key = tokens[i].substr(0, eq);
                const std::string_view value = tokens[i].substr(eq + 1);
                if (key == "version" && value != "1")
                {
                    failParse(lineNo,
                              fmt::format("unsupported version '{}'", std::string(value)));
                }
                if (key == "ticks")
                {
                    expectedTicks = static_cast<long>(parseDouble(value, lineNo));
                }
            }
            headerSeen = true;
            continue;
        }

        TruthSample ts;
        std::vector<RelPoseMeasurement> tickMeas;
        ImuSample u;
        unsigned seen = 0;
        // Required fields: t, acc, gyro, lf, rf plus the eight state fields.
        constexpr unsigned kRequired = (1u << (5 + textio::kStateFieldCount)) - 1;
        auto mark = [&seen](int bit) { seen |= 1u << bit; };

        for (std::string_view token : tokens)
        {
            const std::size_t eq = token.find('=');
            if (eq == std::string_view::npos)
            {
                failParse(lineNo, fmt::format("malformed token '{}'", std::string(token)));
            }
            const std::string_view key = token.substr(0, eq);
            const std::string_view value = token.substr(eq + 1);
            if (const int bit = textio::applyStateToken(ts.state, key, value, lineNo); bit >= 0)
            {
                mark(5 + bit);
            }
            else if (key == "t")
            {
                ts.t = parseDouble(value, lineNo);
                mark(0);
            }
            else if (key == "acc")
            {
                u.acc = parseVec3(value, lineNo);
                mark(1);
            }
            else if (key == "gyro")
            {
                u.gyro = parseVec3(value, lineNo);
                mark(2);
            }
            else if (key == "lf")
            {
                ts.contacts.lf = parseFlag(value, lineNo);
                mark(3);
            }
            else if (key == "rf")
            {
                ts.contacts.rf = parseFlag(value, lineNo);
                mark(4);
            }
            else if (key == "meas")
            {
                tickMeas.push_back(parseMeasurement(value, lineNo));
            }
            else
            {
                failParse(lineNo, fmt::format("unknown field '{}'", std::string(key)));
            }
        }
        if (seen != kRequired)
        {
            failParse(lineNo, "tick record is missing required fields");
        }
        u.t = ts.t;
        ds.truth.push_back(ts);
        ds.imu.push_back(u);
        ds.meas.push_back(std::move(tickMeas));
    }

    if (!headerSeen)
    {
        failParse(1, "empty file: missing dataset header");
    }
    if (expectedTicks >= 0 && static_cast<long>(ds.truth.size()) != expectedTicks)
    {
        failParse(lineNo + 1, fmt::format("header declares {} ticks but file holds {}",
                                          expectedTicks, ds.truth.size()));
    }
    return ds;
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t hash = 14695981039346656037ull;
    for (const char ch : bytes)
    {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 1099511628211ull;
    }
    return hash;
}

std::uint64_t fnv1aFile(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ValidationError(fmt::format("cannot open '{}' for hashing", path));
    }
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a(contents);
}

} // namespace kio
