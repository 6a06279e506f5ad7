/**
 * @file kio_main.cpp
 * @brief Command-line front end: simulate datasets, run filter variants,
 *        evaluate runs, and compare variants.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kio/config.hpp"
#include "kio/errors.hpp"
#include "kio/pipeline.hpp"

namespace
{

/** Flags shared by every subcommand; set only when given on the line. */
struct CommonFlags
{
    std::string configPath;
    std::string variant;
    std::string dataset;
    std::string output;
    std::uint64_t seed{0};
    bool seedGiven{false};
    int runs{0};
    bool exactInit{false};
    bool fullCov{false};
};

void addCommonFlags(CLI::App* cmd, CommonFlags& flags)
{
    cmd->add_option("--config", flags.configPath, "Configuration file (key = value lines)");
    cmd->add_option("--variant", flags.variant,
                    "Filter variant: diligent-kio, diligent-kio-rie, codiligent-kio, "
                    "codiligent-kio-rie");
    cmd->add_option("--dataset", flags.dataset, "Dataset file path");
    cmd->add_option("--output", flags.output, "Output file path");
    cmd->add_option("--seed", flags.seed, "Random seed")->each([&flags](const std::string&) {
        flags.seedGiven = true;
    });
    cmd->add_option("--runs", flags.runs, "Monte-Carlo run count (evaluate)");
    cmd->add_flag("--exact-init", flags.exactInit,
                  "Initialize the belief mean exactly at the reference state");
    cmd->add_flag("--full-cov", flags.fullCov,
                  "Store full covariances in the run record (run)");
}

/** Loads the config file (when given) and overlays command-line flags. */
kio::Config resolveConfig(const CommonFlags& flags)
{
    kio::Config cfg;
    if (!flags.configPath.empty())
    {
        cfg = kio::loadConfig(flags.configPath);
    }
    if (!flags.variant.empty())
    {
        cfg.variant = flags.variant;
    }
    if (!flags.dataset.empty())
    {
        cfg.dataset = flags.dataset;
    }
    if (!flags.output.empty())
    {
        cfg.output = flags.output;
    }
    if (flags.seedGiven)
    {
        cfg.seed = flags.seed;
    }
    if (flags.runs > 0)
    {
        cfg.runs = flags.runs;
    }
    if (flags.exactInit)
    {
        cfg.exactInit = true;
    }
    if (flags.fullCov)
    {
        cfg.fullCov = true;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Contact-aided kinematic-inertial odometry filters"};
    app.require_subcommand(1);

    CommonFlags simFlags;
    CLI::App* sim = app.add_subcommand("simulate", "Synthesize a walking dataset");
    addCommonFlags(sim, simFlags);

    CommonFlags runFlags;
    CLI::App* run = app.add_subcommand("run", "Run one filter variant over a dataset");
    addCommonFlags(run, runFlags);

    CommonFlags evalFlags;
    std::string evalRecord;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a run against its dataset");
    addCommonFlags(evaluate, evalFlags);
    evaluate->add_option("record", evalRecord,
                         "Run-record file (omitted in Monte-Carlo mode, --runs N)");

    CommonFlags cmpFlags;
    std::vector<std::string> cmpRecords;
    CLI::App* compare = app.add_subcommand("compare", "Tabulate metrics across run records");
    addCommonFlags(compare, cmpFlags);
    compare->add_option("records", cmpRecords, "Run-record files");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (sim->parsed())
        {
            kio::pipeline::cmdSimulate(resolveConfig(simFlags), std::cout);
        }
        else if (run->parsed())
        {
            kio::pipeline::cmdRun(resolveConfig(runFlags), std::cout);
        }
        else if (evaluate->parsed())
        {
            kio::pipeline::cmdEvaluate(resolveConfig(evalFlags), evalRecord, std::cout);
        }
        else if (compare->parsed())
        {
            kio::pipeline::cmdCompare(resolveConfig(cmpFlags), cmpRecords, std::cout);
        }
    }
    catch (const kio::ValidationError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const kio::ParseError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const kio::Error& e)
    {
        // Numerical failures: divergence, singular updates, log branch, ...
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
