/**
 * @file pipeline.cpp
 * @brief Orchestration behind the CLI: simulate, run, evaluate, compare.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/pipeline.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iterator>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "kio/errors.hpp"
#include "kio/metrics.hpp"
#include "kio/models.hpp"
#include "kio/sim.hpp"
#include "textio.hpp"

namespace kio::pipeline
{

namespace
{

using textio::appendDouble;
using textio::appendScalars;
using textio::failParse;
using textio::parseDouble;
using textio::parseScalars;

constexpr const char* kRunMagic = "kio-run";
constexpr int kErrDim = 27;
constexpr double kTimestampTol = 1e-9;

std::string hashHex(std::uint64_t hash)
{
    return fmt::format("{:016x}", hash);
}

std::uint64_t parseHashHex(std::string_view text, int lineNo)
{
    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value, 16);
    if (ec != std::errc() || ptr != last || text.empty())
    {
        failParse(lineNo, fmt::format("malformed hash '{}'", std::string(text)));
    }
    return value;
}

std::uint64_t parseU64(std::string_view text, int lineNo)
{
    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
    {
        failParse(lineNo, fmt::format("malformed integer '{}'", std::string(text)));
    }
    return value;
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
    failParse(lineNo, fmt::format("flag must be 0 or 1, got '{}'", std::string(text)));
}

void writeTextFile(const std::string& path, const std::string& content)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
    {
        throw ValidationError(fmt::format("cannot open '{}' for writing", path));
    }
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file)
    {
        throw ValidationError(fmt::format("failed writing to '{}'", path));
    }
}

/** Refuses report paths that would clobber one of the inputs. */
void guardOutputPath(const std::string& output, std::initializer_list<std::string> inputs)
{
    for (const std::string& input : inputs)
    {
        if (!input.empty() && input == output)
        {
            throw ValidationError(
                fmt::format("output path '{}' would overwrite an input file", output));
        }
    }
}

Eigen::Matrix4d toPose(const KioState& s)
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(0, 0) = s.R;
    m.block<3, 1>(0, 3) = s.p;
    return m;
}

std::vector<metrics::PoseSample> truthPoses(const Dataset& ds)
{
    std::vector<metrics::PoseSample> poses;
    poses.reserve(ds.truth.size());
    for (const TruthSample& ts : ds.truth)
    {
        poses.push_back({ts.t, toPose(ts.state)});
    }
    return poses;
}

std::vector<metrics::PoseSample> recordPoses(const RunRecord& rec)
{
    std::vector<metrics::PoseSample> poses;
    poses.reserve(rec.ticks.size());
    for (const RunTick& tick : rec.ticks)
    {
        poses.push_back({tick.t, toPose(tick.estimate)});
    }
    return poses;
}

/** Consistency report over a run's stored errors and covariances. */
metrics::ConsistencyReport consistencyOf(const RunRecord& rec, double quantile)
{
    std::vector<Eigen::VectorXd> errs;
    std::vector<Eigen::MatrixXd> covs;
    errs.reserve(rec.ticks.size());
    covs.reserve(rec.ticks.size());
    for (const RunTick& tick : rec.ticks)
    {
        errs.push_back(tick.tangentErr);
        if (rec.hasFullCov)
        {
            covs.push_back(tick.fullCov);
        }
        else
        {
            covs.push_back(Eigen::MatrixXd(tick.covDiag.asDiagonal()));
        }
    }
    return metrics::consistency(errs, covs, quantile);
}

double mean3(const Eigen::Vector3d& v)
{
    return v.sum() / 3.0;
}

/** Mean violation fraction over the six position and velocity axes. */
double posvelAvg(const metrics::ConsistencyReport& r)
{
    return (r.positionViolation.sum() + r.velocityViolation.sum()) / 6.0;
}

void checkRecordMatchesDataset(const RunRecord& rec, const Dataset& ds,
                               std::uint64_t datasetHash, const std::string& recordName)
{
    if (rec.datasetHash != datasetHash)
    {
        throw ValidationError(fmt::format(
            "run record '{}' was produced from a different dataset (hash {} vs {})",
            recordName, hashHex(rec.datasetHash), hashHex(datasetHash)));
    }
    if (rec.ticks.size() != ds.truth.size())
    {
        throw ValidationError(
            fmt::format("run record '{}' holds {} ticks but the dataset holds {}", recordName,
                        rec.ticks.size(), ds.truth.size()));
    }
    for (std::size_t k = 0; k < ds.truth.size(); ++k)
    {
        if (std::abs(rec.ticks[k].t - ds.truth[k].t) > kTimestampTol)
        {
            throw ValidationError(fmt::format(
                "run record '{}' and dataset timestamps do not match at tick {}", recordName, k));
        }
    }
}

void appendCsvVec3(std::string& out, const Eigen::Vector3d& v)
{
    appendScalars(out, v.data(), 3);
}

} // namespace

RunRecord runFilter(const Dataset& ds, FilterVariant variant, const NoiseParams& np,
                    std::uint64_t seed, bool exactInit, bool storeFullCov)
{
    if (ds.truth.empty())
    {
        throw ValidationError("dataset holds no ticks");
    }
    np.validate(true);

    const filter::ErrorConvention conv = variantConvention(variant);
    const KioFilter f(variant, np);
    filter::Belief belief = initialBelief(ds.truth[0].state, np, conv, exactInit, seed);

    RunRecord rec;
    rec.variant = variant;
    rec.seed = seed;
    rec.exactInit = exactInit;
    rec.hasFullCov = storeFullCov;
    rec.ticks.reserve(ds.truth.size());

    auto record = [&](std::size_t k) {
        RunTick tick;
        tick.t = ds.truth[k].t;
        tick.estimate = extract(belief.mean);
        tick.tangentErr = metrics::tangentError(tick.estimate, ds.truth[k].state, conv);
        tick.covDiag = belief.cov.diagonal();
        if (storeFullCov)
        {
            tick.fullCov = belief.cov;
        }
        rec.ticks.push_back(std::move(tick));
    };

    record(0);
    for (std::size_t k = 1; k < ds.truth.size(); ++k)
    {
        const double dt = ds.truth[k].t - ds.truth[k - 1].t;
        try
        {
            belief = f.step(belief, ds.imu[k - 1], ds.truth[k].contacts, ds.meas[k], dt);
        }
        catch (const DivergenceError& e)
        {
            throw DivergenceError(fmt::format("tick {}: {}", k, e.what()));
        }
        record(k);
    }
    return rec;
}

void writeRunRecord(const std::string& path, const RunRecord& rec)
{
    std::string out;
    out.reserve(rec.ticks.size() * (rec.hasFullCov ? 16384 : 2048) + 128);
    fmt::format_to(std::back_inserter(out),
                   "{} version=1 ticks={} variant={} dataset_hash={} seed={} exact_init={} "
                   "full_cov={}\n",
                   kRunMagic, rec.ticks.size(), variantName(rec.variant),
                   hashHex(rec.datasetHash), rec.seed, rec.exactInit ? 1 : 0,
                   rec.hasFullCov ? 1 : 0);

    for (const RunTick& tick : rec.ticks)
    {
        if (tick.tangentErr.size() != kErrDim || tick.covDiag.size() != kErrDim ||
            (rec.hasFullCov && (tick.fullCov.rows() != kErrDim || tick.fullCov.cols() != kErrDim)))
        {
            throw ValidationError("run record tick has wrong error/covariance dimensions");
        }
        out += "t=";
        appendDouble(out, tick.t);
        textio::appendStateFields(out, tick.estimate);
        out += " err=";
        appendScalars(out, tick.tangentErr.data(), kErrDim);
        out += " cd=";
        appendScalars(out, tick.covDiag.data(), kErrDim);
        if (rec.hasFullCov)
        {
            out += " cov=";
            // Row-major flattening of the (symmetric) covariance.
            for (int r = 0; r < kErrDim; ++r)
            {
                for (int c = 0; c < kErrDim; ++c)
                {
                    if (r + c > 0)
                    {
                        out.push_back(',');
                    }
                    appendDouble(out, tick.fullCov(r, c));
                }
            }
        }
        out.push_back('\n');
    }
    writeTextFile(path, out);
}

RunRecord readRunRecord(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ValidationError(fmt::format("cannot open run record '{}'", path));
    }
    RunRecord rec;
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
            if (tokens[0] != kRunMagic)
            {
                failParse(lineNo, fmt::format("expected '{}' header", kRunMagic));
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
                else if (key == "ticks")
                {
                    expectedTicks = static_cast<long>(parseU64(value, lineNo));
                }
                else if (key == "variant")
                {
                    try
                    {
                        rec.variant = parseVariant(std::string(value));
                    }
                    catch (const ValidationError& e)
                    {
                        failParse(lineNo, e.what());
                    }
                }
                else if (key == "dataset_hash")
                {
                    rec.datasetHash = parseHashHex(value, lineNo);
                }
                else if (key == "seed")
                {
                    rec.seed = parseU64(value, lineNo);
                }
                else if (key == "exact_init")
                {
                    rec.exactInit = parseFlag(value, lineNo);
                }
                else if (key == "full_cov")
                {
                    rec.hasFullCov = parseFlag(value, lineNo);
                }
                else if (key != "version")
                {
                    failParse(lineNo,
                              fmt::format("unknown header field '{}'", std::string(key)));
                }
            }
            headerSeen = true;
            continue;
        }

        RunTick tick;
        tick.tangentErr.resize(kErrDim);
        tick.covDiag.resize(kErrDim);
        unsigned seen = 0;
        // Required fields: t, the eight state fields, err, cd (+ cov when the
        // header promises full covariances).
        const unsigned required =
            ((1u << (3 + textio::kStateFieldCount)) - 1) |
            (rec.hasFullCov ? 1u << (3 + textio::kStateFieldCount) : 0u);
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
            if (const int bit = textio::applyStateToken(tick.estimate, key, value, lineNo);
                bit >= 0)
            {
                mark(1 + bit);
            }
            else if (key == "t")
            {
                tick.t = parseDouble(value, lineNo);
                mark(0);
            }
            else if (key == "err")
            {
                parseScalars(value, tick.tangentErr.data(), kErrDim, lineNo);
                mark(1 + textio::kStateFieldCount);
            }
            else if (key == "cd")
            {
                parseScalars(value, tick.covDiag.data(), kErrDim, lineNo);
                mark(2 + textio::kStateFieldCount);
            }
            else if (key == "cov")
            {
                double flat[kErrDim * kErrDim];
                parseScalars(value, flat, kErrDim * kErrDim, lineNo);
                tick.fullCov.resize(kErrDim, kErrDim);
                for (int r = 0; r < kErrDim; ++r)
                {
                    for (int c = 0; c < kErrDim; ++c)
                    {
                        tick.fullCov(r, c) = flat[kErrDim * r + c];
                    }
                }
                mark(3 + textio::kStateFieldCount);
            }
            else
            {
                failParse(lineNo, fmt::format("unknown field '{}'", std::string(key)));
            }
        }
        if (seen != required)
        {
            failParse(lineNo, "run-record tick is missing required fields");
        }
        rec.ticks.push_back(std::move(tick));
    }

    if (!headerSeen)
    {
        failParse(1, "empty file: missing run-record header");
    }
    if (expectedTicks >= 0 && static_cast<long>(rec.ticks.size()) != expectedTicks)
    {
        failParse(lineNo + 1, fmt::format("header declares {} ticks but file holds {}",
                                          expectedTicks, rec.ticks.size()));
    }
    return rec;
}

void cmdSimulate(const Config& cfg, std::ostream& out)
{
    if (cfg.output.empty())
    {
        throw ValidationError("simulate requires an output path");
    }
    const GaitConfig gc = cfg.gaitConfig();
    std::vector<TruthSample> truth = generateGait(gc);
    const std::vector<ImuSample> imu = synthesizeImu(truth, gc.noise, gc.initialBias, gc.seed);
    const std::vector<RelPoseMeasurement> meas =
        synthesizeRelpose(truth, gc.noise, gc.seed + 1);
    writeDataset(cfg.output, truth, imu, meas);

    double contactSum = 0.0;
    for (const TruthSample& ts : truth)
    {
        contactSum += (ts.contacts.lf ? 0.5 : 0.0) + (ts.contacts.rf ? 0.5 : 0.0);
    }
    const double duration = truth.empty() ? 0.0 : truth.back().t - truth.front().t;
    out << fmt::format("simulate output={} ticks={} duration_s={:.6g} contact_ratio={:.6g}\n",
                       cfg.output, truth.size(), duration,
                       truth.empty() ? 0.0 : contactSum / static_cast<double>(truth.size()));
}

void cmdRun(const Config& cfg, std::ostream& out)
{
    if (cfg.dataset.empty())
    {
        throw ValidationError("run requires a dataset path");
    }
    if (cfg.output.empty())
    {
        throw ValidationError("run requires an output path");
    }
    guardOutputPath(cfg.output, {cfg.dataset});

    const Dataset ds = readDataset(cfg.dataset);
    RunRecord rec =
        runFilter(ds, cfg.filterVariant(), cfg.noiseParams(), cfg.seed, cfg.exactInit,
                  cfg.fullCov);
    rec.datasetHash = fnv1aFile(cfg.dataset);
    writeRunRecord(cfg.output, rec);

    const RunTick& last = rec.ticks.back();
    const KioState& gt = ds.truth.back().state;
    const double posErr = (last.estimate.p - gt.p).norm();
    const double rotErr = lie::logSo3(Eigen::Matrix3d(gt.R.transpose() * last.estimate.R)).norm();
    const double velErr = (last.estimate.v - gt.v).norm();
    out << fmt::format("run variant={} ticks={} dataset_hash={} output={}\n",
                       variantName(rec.variant), rec.ticks.size(), hashHex(rec.datasetHash),
                       cfg.output);
    out << fmt::format("final_pos_err = {:.6e}\nfinal_rot_err = {:.6e}\nfinal_vel_err = {:.6e}\n",
                       posErr, rotErr, velErr);
}

namespace
{

std::string singleEvaluationReport(const Config& cfg, const RunRecord& rec, const Dataset& ds)
{
    const metrics::TrajectoryErrorReport traj =
        metrics::trajectoryError(recordPoses(rec), truthPoses(ds), cfg.window);
    const metrics::ConsistencyReport cons = consistencyOf(rec, cfg.quantile);

    std::string report;
    fmt::format_to(std::back_inserter(report),
                   "kio-report version=1 mode=single variant={} ticks={} dataset_hash={}\n",
                   variantName(rec.variant), rec.ticks.size(), hashHex(rec.datasetHash));
    auto line = [&report](const char* key, double v) {
        report += key;
        report += " = ";
        appendDouble(report, v);
        report.push_back('\n');
    };
    line("ate_pos", traj.atePosRmse);
    line("ate_rot", traj.ateRotRmse);
    line("rpe_pos", traj.rpePos);
    line("rpe_rot", traj.rpeRot);
    line("window", traj.window);
    line("quantile", cons.quantile);
    report += fmt::format("nees_basis = {}\n", rec.hasFullCov ? "full" : "diagonal");
    auto vecLine = [&report](const char* key, const Eigen::Vector3d& v) {
        report += key;
        report += " = ";
        appendCsvVec3(report, v);
        report.push_back('\n');
    };
    vecLine("violation.position", cons.positionViolation);
    vecLine("violation.orientation", cons.orientationViolation);
    vecLine("violation.velocity", cons.velocityViolation);
    line("violation.velocity_avg", mean3(cons.velocityViolation));
    line("violation.posvel_avg", posvelAvg(cons));
    report += "mean_nees = ";
    appendScalars(report, cons.meanNees.data(), 9);
    report.push_back('\n');
    fmt::format_to(std::back_inserter(report), "skipped_ticks = {}\n", cons.skippedTicks);
    return report;
}

std::string monteCarloReport(const Config& cfg, const Dataset& ds, std::uint64_t datasetHash)
{
    const int runs = cfg.runs;
    const FilterVariant variant = cfg.filterVariant();
    const NoiseParams np = cfg.noiseParams();
    np.validate(true);

    std::vector<metrics::ConsistencyReport> reports(static_cast<std::size_t>(runs));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(runs));
    std::atomic<int> next{0};

    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = std::min(runs, static_cast<int>(hw == 0 ? 1 : hw));
    auto work = [&]() {
        for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1))
        {
            try
            {
                const RunRecord rec =
                    runFilter(ds, variant, np, cfg.seed + static_cast<std::uint64_t>(i),
                              cfg.exactInit, true);
                reports[static_cast<std::size_t>(i)] = consistencyOf(rec, cfg.quantile);
            }
            catch (...)
            {
                failures[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
        {
            pool.emplace_back(work);
        }
        for (std::thread& th : pool)
        {
            th.join();
        }
    }
    // Deterministic failure propagation: lowest run index wins.
    for (const std::exception_ptr& failure : failures)
    {
        if (failure)
        {
            std::rethrow_exception(failure);
        }
    }

    // Index-ordered reduction: mean and sample standard deviation over runs.
    auto aggregate = [&](auto&& extract) -> std::pair<Eigen::VectorXd, Eigen::VectorXd> {
        const Eigen::VectorXd first = extract(reports[0]);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(first.size());
        for (const metrics::ConsistencyReport& r : reports)
        {
            mean += extract(r);
        }
        mean /= static_cast<double>(runs);
        Eigen::VectorXd var = Eigen::VectorXd::Zero(first.size());
        for (const metrics::ConsistencyReport& r : reports)
        {
            const Eigen::VectorXd d = extract(r) - mean;
            var += d.cwiseProduct(d);
        }
        if (runs > 1)
        {
            var /= static_cast<double>(runs - 1);
        }
        return {mean, var.cwiseSqrt()};
    };

    const auto [posMean, posStd] =
        aggregate([](const metrics::ConsistencyReport& r) { return r.positionViolation; });
    const auto [rotMean, rotStd] =
        aggregate([](const metrics::ConsistencyReport& r) { return r.orientationViolation; });
    const auto [velMean, velStd] =
        aggregate([](const metrics::ConsistencyReport& r) { return r.velocityViolation; });
    const auto [velAvgMean, velAvgStd] = aggregate([](const metrics::ConsistencyReport& r) {
        return Eigen::VectorXd::Constant(1, mean3(r.velocityViolation)).eval();
    });
    const auto [pvMean, pvStd] = aggregate([](const metrics::ConsistencyReport& r) {
        return Eigen::VectorXd::Constant(1, posvelAvg(r)).eval();
    });
    const auto [neesMean, neesStd] = aggregate(
        [](const metrics::ConsistencyReport& r) { return Eigen::VectorXd(r.meanNees); });

    std::size_t skippedTotal = 0;
    for (const metrics::ConsistencyReport& r : reports)
    {
        skippedTotal += r.skippedTicks;
    }

    std::string report;
    fmt::format_to(std::back_inserter(report),
                   "kio-report version=1 mode=monte-carlo variant={} runs={} ticks={} "
                   "dataset_hash={}\n",
                   variantName(variant), runs, ds.truth.size(), hashHex(datasetHash));
    auto line = [&report](const char* key, double v) {
        report += key;
        report += " = ";
        appendDouble(report, v);
        report.push_back('\n');
    };
    auto csvLine = [&report](const char* key, const Eigen::VectorXd& v) {
        report += key;
        report += " = ";
        appendScalars(report, v.data(), static_cast<int>(v.size()));
        report.push_back('\n');
    };
    line("quantile", cfg.quantile);
    report += "nees_basis = full\n";
    csvLine("violation.position.mean", posMean);
    csvLine("violation.position.std", posStd);
    csvLine("violation.orientation.mean", rotMean);
    csvLine("violation.orientation.std", rotStd);
    csvLine("violation.velocity.mean", velMean);
    csvLine("violation.velocity.std", velStd);
    line("violation.velocity_avg.mean", velAvgMean(0));
    line("violation.velocity_avg.std", velAvgStd(0));
    line("violation.posvel_avg.mean", pvMean(0));
    line("violation.posvel_avg.std", pvStd(0));
    csvLine("mean_nees.mean", neesMean);
    csvLine("mean_nees.std", neesStd);
    fmt::format_to(std::back_inserter(report), "skipped_ticks.total = {}\n", skippedTotal);
    return report;
}

} // namespace

void cmdEvaluate(const Config& cfg, const std::string& recordPath, std::ostream& out)
{
    if (cfg.dataset.empty())
    {
        throw ValidationError("evaluate requires a dataset path");
    }
    if (cfg.runs < 1)
    {
        throw ValidationError("run count must be at least 1");
    }

    const Dataset ds = readDataset(cfg.dataset);
    const std::uint64_t datasetHash = fnv1aFile(cfg.dataset);

    std::string report;
    if (cfg.runs == 1)
    {
        if (recordPath.empty())
        {
            throw ValidationError(
                "evaluate needs a run-record path (or --runs > 1 for Monte-Carlo mode)");
        }
        const RunRecord rec = readRunRecord(recordPath);
        checkRecordMatchesDataset(rec, ds, datasetHash, recordPath);
        report = singleEvaluationReport(cfg, rec, ds);
    }
    else
    {
        report = monteCarloReport(cfg, ds, datasetHash);
    }

    out << report;
    if (!cfg.output.empty())
    {
        guardOutputPath(cfg.output, {cfg.dataset, recordPath});
        writeTextFile(cfg.output, report);
    }
}

void cmdCompare(const Config& cfg, const std::vector<std::string>& recordPaths,
                std::ostream& out)
{
    if (cfg.dataset.empty())
    {
        throw ValidationError("compare requires a dataset path");
    }
    if (recordPaths.empty())
    {
        throw ValidationError("compare requires at least one run-record path");
    }

    const Dataset ds = readDataset(cfg.dataset);
    const std::uint64_t datasetHash = fnv1aFile(cfg.dataset);
    const std::vector<metrics::PoseSample> gtPoses = truthPoses(ds);

    std::string table;
    fmt::format_to(std::back_inserter(table),
                   "kio-compare version=1 records={} dataset_hash={} window={:.6g} "
                   "quantile={:.6g}\n",
                   recordPaths.size(), hashHex(datasetHash), cfg.window, cfg.quantile);
    fmt::format_to(std::back_inserter(table), "{:<20} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
                   "variant", "ate_pos", "ate_rot", "rpe_pos", "rpe_rot", "vel_viol",
                   "pos_viol");

    for (const std::string& path : recordPaths)
    {
        const RunRecord rec = readRunRecord(path);
        checkRecordMatchesDataset(rec, ds, datasetHash, path);
        const metrics::TrajectoryErrorReport traj =
            metrics::trajectoryError(recordPoses(rec), gtPoses, cfg.window);
        const metrics::ConsistencyReport cons = consistencyOf(rec, cfg.quantile);
        fmt::format_to(std::back_inserter(table),
                       "{:<20} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}\n",
                       variantName(rec.variant), traj.atePosRmse, traj.ateRotRmse, traj.rpePos,
                       traj.rpeRot, mean3(cons.velocityViolation),
                       mean3(cons.positionViolation));
    }

    out << table;
    if (!cfg.output.empty())
    {
        std::vector<std::string> inputs = recordPaths;
        inputs.push_back(cfg.dataset);
        for (const std::string& input : inputs)
        {
            if (input == cfg.output)
            {
                throw ValidationError(fmt::format(
                    "output path '{}' would overwrite an input file", cfg.output));
            }
        }
        writeTextFile(cfg.output, table);
    }
}

} // namespace kio::pipeline
