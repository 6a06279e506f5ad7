/**
 * @file errors.hpp
 * @brief Exception taxonomy shared across the kio library.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_ERRORS_HPP
#define KIO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kio
{

/** Base class for every error raised by this library. */
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/** A matrix or vector argument has the wrong dimensions for the requested group. */
class DimensionError : public Error
{
public:
    using Error::Error;
};

/** A matrix argument does not match the required algebra/group sparsity pattern. */
class PatternError : public Error
{
public:
    using Error::Error;
};

/** Two operands belong to different groups. */
class GroupMismatchError : public Error
{
public:
    using Error::Error;
};

/**
 * The matrix logarithm was requested within the configured guard band of the
 * principal-branch boundary (rotation angle at pi), where the result is not
 * numerically well defined.
 */
class BranchError : public Error
{
public:
    using Error::Error;
};

/** The innovation matrix in a filter update is singular or too ill-conditioned to invert. */
class SingularUpdateError : public Error
{
public:
    using Error::Error;
};

/** A state or covariance stopped being finite during filtering. */
class DivergenceError : public Error
{
public:
    using Error::Error;
};

/** User-supplied configuration, arguments, or inputs failed validation. */
class ValidationError : public Error
{
public:
    using Error::Error;
};

/** A dataset, run record, or config file could not be parsed. */
class ParseError : public Error
{
public:
    using Error::Error;
};

} // namespace kio

#endif // KIO_ERRORS_HPP
