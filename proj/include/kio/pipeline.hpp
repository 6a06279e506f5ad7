/**
 * @file pipeline.hpp
 * @brief Orchestration layer behind the command-line front end: dataset
 *        synthesis, filter execution with per-tick run records, evaluation
 *        reports (single-run and Monte-Carlo), and variant comparison.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_PIPELINE_HPP
#define KIO_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kio/config.hpp"
#include "kio/dataset.hpp"
#include "kio/state.hpp"

namespace kio::pipeline
{

/** One tick of a filter run: estimate, tangent error, and covariance. */
struct RunTick
{
    double t{0.0};
    KioState estimate{};
    /** 27-vector tangent error against truth, in the variant's convention. */
    Eigen::VectorXd tangentErr;
    /** Diagonal of the 27x27 belief covariance. */
    Eigen::VectorXd covDiag;
    /** Full covariance; 0x0 unless full-covariance storage was requested. */
    Eigen::MatrixXd fullCov;
};

/** A complete filter run over one dataset. */
struct RunRecord
{
    FilterVariant variant{FilterVariant::DiligentKio};
    std::uint64_t datasetHash{0};
    std::uint64_t seed{0};
    bool exactInit{false};
    bool hasFullCov{false};
    std::vector<RunTick> ticks;
};

/**
 * Executes one filter variant over a dataset: belief initialized from the
 * first truth sample (exact or prior-sampled mean), then one step per
 * remaining tick pairing the previous tick's IMU sample with the current
 * tick's contacts and measurements. Divergence is rethrown with the failing
 * tick index. The dataset hash field is left zero for the caller.
 */
RunRecord runFilter(const Dataset& ds, FilterVariant variant, const NoiseParams& np,
                    std::uint64_t seed, bool exactInit, bool storeFullCov);

/** Serializes a run record to the line-oriented text format. */
void writeRunRecord(const std::string& path, const RunRecord& rec);

/** Parses a run record; raises ParseError with a line number on bad input. */
RunRecord readRunRecord(const std::string& path);

/**
 * Synthesizes a dataset from the gait configuration and writes it to
 * cfg.output; prints duration, tick count, and contact ratio.
 */
void cmdSimulate(const Config& cfg, std::ostream& out);

/**
 * Runs cfg.variant over cfg.dataset and writes the run record to cfg.output;
 * prints a short summary of the final-tick errors.
 */
void cmdRun(const Config& cfg, std::ostream& out);

/**
 * Evaluates a run against its dataset. With cfg.runs == 1, reads the record
 * at recordPath and reports trajectory errors plus the consistency summary.
 * With cfg.runs > 1, re-runs the configured variant in memory cfg.runs times
 * (seeds cfg.seed + run index) and reports violation fractions aggregated as
 * mean and standard deviation over runs; recordPath is ignored. The report
 * is printed and, when cfg.output is set, also written to that path.
 */
void cmdEvaluate(const Config& cfg, const std::string& recordPath, std::ostream& out);

/**
 * Reads one or more run records, checks that they all belong to cfg.dataset,
 * and prints a table with one row per record: ATE, RPE, and velocity- and
 * position-envelope violation fractions. When cfg.output is set the table is
 * also written to that path.
 */
void cmdCompare(const Config& cfg, const std::vector<std::string>& recordPaths,
                std::ostream& out);

} // namespace kio::pipeline

#endif // KIO_PIPELINE_HPP
