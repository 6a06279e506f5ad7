/**
 * @file textio.hpp
 * @brief Shared helpers for the line-oriented text formats (datasets, run
 *        records, reports): full-precision float round-tripping, row-major
 *        matrix fields, and state-field tokens. Internal to the library.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_SRC_TEXTIO_HPP
#define KIO_SRC_TEXTIO_HPP

#include <charconv>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "kio/errors.hpp"
#include "kio/state.hpp"

namespace kio::textio
{

inline void appendDouble(std::string& out, double v)
{
    fmt::format_to(std::back_inserter(out), "{:.17g}", v);
}

inline void appendScalars(std::string& out, const double* values, int n)
{
    for (int i = 0; i < n; ++i)
    {
        if (i > 0)
        {
            out.push_back(',');
        }
        appendDouble(out, values[i]);
    }
}

inline void appendVec3(std::string& out, const Eigen::Vector3d& v)
{
    appendScalars(out, v.data(), 3);
}

inline void appendMat3RowMajor(std::string& out, const Eigen::Matrix3d& m)
{
    for (int r = 0; r < 3; ++r)
    {
        for (int c = 0; c < 3; ++c)
        {
            if (r + c > 0)
            {
                out.push_back(',');
            }
            appendDouble(out, m(r, c));
        }
    }
}

[[noreturn]] inline void failParse(int lineNo, const std::string& what)
{
    throw ParseError(fmt::format("line {}: {}", lineNo, what));
}

inline double parseDouble(std::string_view text, int lineNo)
{
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
    {
        failParse(lineNo, fmt::format("malformed number '{}'", std::string(text)));
    }
    return value;
}

inline void parseScalars(std::string_view text, double* out, int n, int lineNo)
{
    int count = 0;
    std::size_t begin = 0;
    while (begin <= text.size())
    {
        std::size_t end = text.find(',', begin);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        if (count >= n)
        {
            failParse(lineNo, fmt::format("expected {} numbers, found more", n));
        }
        out[count++] = parseDouble(text.substr(begin, end - begin), lineNo);
        begin = end + 1;
        if (end == text.size())
        {
            break;
        }
    }
    if (count != n)
    {
        failParse(lineNo, fmt::format("expected {} numbers, found {}", n, count));
    }
}

inline Eigen::Vector3d parseVec3(std::string_view text, int lineNo)
{
    Eigen::Vector3d v;
    parseScalars(text, v.data(), 3, lineNo);
    return v;
}

inline Eigen::Matrix3d parseMat3RowMajor(std::string_view text, int lineNo)
{
    double vals[9];
    parseScalars(text, vals, 9, lineNo);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
    {
        for (int c = 0; c < 3; ++c)
        {
            m(r, c) = vals[3 * r + c];
        }
    }
    return m;
}

/** Splits a line on single spaces, dropping empty tokens. */
inline std::vector<std::string_view> splitTokens(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t begin = 0;
    while (begin <= line.size())
    {
        std::size_t end = line.find(' ', begin);
        if (end == std::string_view::npos)
        {
            end = line.size();
        }
        if (end > begin)
        {
            tokens.push_back(line.substr(begin, end - begin));
        }
        if (end == line.size())
        {
            break;
        }
        begin = end + 1;
    }
    return tokens;
}

/** Appends the eight state fields as " p=... R=... ... b=...". */
inline void appendStateFields(std::string& out, const KioState& s)
{
    out += " p=";
    appendVec3(out, s.p);
    out += " R=";
    appendMat3RowMajor(out, s.R);
    out += " v=";
    appendVec3(out, s.v);
    out += " dlf=";
    appendVec3(out, s.dLf);
    out += " zlf=";
    appendMat3RowMajor(out, s.zLf);
    out += " drf=";
    appendVec3(out, s.dRf);
    out += " zrf=";
    appendMat3RowMajor(out, s.zRf);
    out += " b=";
    const double bias[6] = {s.ba(0), s.ba(1), s.ba(2), s.bg(0), s.bg(1), s.bg(2)};
    appendScalars(out, bias, 6);
}

constexpr int kStateFieldCount = 8;

/**
 * Applies one `key=value` token to a state when the key names a state field.
 * Returns the field's bit index in [0, kStateFieldCount), or -1 when the key
 * is not a state field.
 */
inline int applyStateToken(KioState& s, std::string_view key, std::string_view value,
                           int lineNo)
{
    if (key == "p")
    {
        s.p = parseVec3(value, lineNo);
        return 0;
    }
    if (key == "R")
    {
        s.R = parseMat3RowMajor(value, lineNo);
        return 1;
    }
    if (key == "v")
    {
        s.v = parseVec3(value, lineNo);
        return 2;
    }
    if (key == "dlf")
    {
        s.dLf = parseVec3(value, lineNo);
        return 3;
    }
    if (key == "zlf")
    {
        s.zLf = parseMat3RowMajor(value, lineNo);
        return 4;
    }
    if (key == "drf")
    {
        s.dRf = parseVec3(value, lineNo);
        return 5;
    }
    if (key == "zrf")
    {
        s.zRf = parseMat3RowMajor(value, lineNo);
        return 6;
    }
    if (key == "b")
    {
        double bias[6];
        parseScalars(value, bias, 6, lineNo);
        s.ba = Eigen::Vector3d(bias[0], bias[1], bias[2]);
        s.bg = Eigen::Vector3d(bias[3], bias[4], bias[5]);
        return 7;
    }
    return -1;
}

} // namespace kio::textio

#endif // KIO_SRC_TEXTIO_HPP
