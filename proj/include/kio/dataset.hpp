/**
 * @file dataset.hpp
 * @brief Line-delimited text serialization of simulated datasets: one
 *        self-describing record per tick with IMU, contacts, measurements,
 *        and exact ground truth.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_DATASET_HPP
#define KIO_DATASET_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kio/sim.hpp"
#include "kio/state.hpp"

namespace kio
{

/** In-memory dataset: parallel per-tick series plus per-tick measurements. */
struct Dataset
{
    std::vector<TruthSample> truth;
    std::vector<ImuSample> imu;
    std::vector<std::vector<RelPoseMeasurement>> meas;
};

/**
 * Writes a dataset file. truth and imu must be the same length; the flat
 * measurement list is consumed in tick order (left foot before right within
 * a tick) following the truth contact flags, and must match them exactly.
 * All floats are serialized with 17 significant digits for a lossless
 * round-trip.
 */
void writeDataset(const std::string& path, const std::vector<TruthSample>& truth,
                  const std::vector<ImuSample>& imu,
                  const std::vector<RelPoseMeasurement>& meas);

/**
 * Parses a dataset file; raises ParseError naming the first offending line.
 */
Dataset readDataset(const std::string& path);

/** 64-bit FNV-1a hash of a byte string. */
std::uint64_t fnv1a(std::string_view bytes);

/** 64-bit FNV-1a hash of a file's contents; raises ValidationError if unreadable. */
std::uint64_t fnv1aFile(const std::string& path);

} // namespace kio

#endif // KIO_DATASET_HPP
