// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// bdris-sim: Monte Carlo channel-estimation sweeps and training-complexity tables.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bdris/harness.hpp"

namespace
{

void printSummary(const bdris::SweepResult &result)
{
    for (const auto &skip : result.skips)
        std::cout << "skipped " << bdris::toString(skip.method) << ": " << skip.reason << " (" << skip.detail
                  << ")\n";
    std::printf("%-6s %8s %7s %9s %12s %12s\n", "method", "snr_db", "trials", "failures", "C_mean_db", "C_med_db");
    for (const auto &a : result.summary)
    {
        const double mean = a.CColumnwise ? a.CColumnwise->meanDb : std::numeric_limits<double>::quiet_NaN();
        const double med = a.CColumnwise ? a.CColumnwise->medianDb : std::numeric_limits<double>::quiet_NaN();
        std::printf("%-6s %8.2f %7d %9d %12.3f %12.3f\n", bdris::toString(a.method).c_str(), a.snrDb, a.trials,
                    a.failures, mean, med);
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Group-connected BD-RIS channel estimation simulator"};
    app.require_subcommand(1);

    auto *sim = app.add_subcommand("simulate", "Run a seeded Monte Carlo sweep");
    std::string configPath, snrList, methodList, outDir;
    std::vector<std::string> sets;
    int trials = 0, threads = -1;
    std::uint64_t seed = 0;
    bool printConfig = false, recordRuntime = false;
    sim->add_option("--config", configPath, "key = value configuration file")->check(CLI::ExistingFile);
    sim->add_option("--set", sets, "Override a single key, e.g. --set groups=2 (repeatable)");
    sim->add_option("--snr", snrList, "Comma-separated SNR list in dB ('inf' = noiseless)");
    sim->add_option("--methods", methodList, "Comma-separated subset of pals,krf,ls");
    auto *trialsOpt = sim->add_option("--trials", trials, "Trials per SNR point")->check(CLI::PositiveNumber);
    auto *seedOpt = sim->add_option("--seed", seed, "Master seed");
    sim->add_option("--out", outDir, "Output directory");
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sim->add_flag("--record-runtime", recordRuntime, "Fill the runtime_ms column");
    sim->add_flag("--print-config", printConfig, "Print the resolved configuration and exit");

    auto *cx = app.add_subcommand("complexity", "Training parameter counts over K = 1..k-max");
    std::int64_t nbar = 4, rbar = 5, kMax = 64, groups = 1;
    std::string cxOut;
    cx->add_option("--nbar", nbar, "Elements per group")->check(CLI::PositiveNumber);
    cx->add_option("--rbar", rbar, "Per-group rank")->check(CLI::PositiveNumber);
    cx->add_option("--k-max", kMax, "Largest number of blocks")->check(CLI::PositiveNumber);
    cx->add_option("--groups", groups, "Number of groups")->check(CLI::PositiveNumber);
    cx->add_option("--out", cxOut, "Output CSV path (stdout if omitted)");

    auto *self = app.add_subcommand("selftest", "Run the fast invariant checks");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sim)
        {
            bdris::ExperimentConfig cfg;
            if (!configPath.empty())
                cfg = bdris::loadConfig(configPath);
            std::string overrides;
            for (const auto &s : sets)
                overrides += s + "\n";
            cfg = bdris::parseConfig(overrides, cfg);
            if (!snrList.empty())
                cfg.system.snrDb = bdris::parseDoubleList(snrList);
            if (!methodList.empty())
                cfg.methods = bdris::parseMethodList(methodList);
            if (*trialsOpt)
                cfg.system.trials = trials;
            if (*seedOpt)
                cfg.system.masterSeed = seed;
            if (!outDir.empty())
                cfg.outDir = outDir;
            if (threads >= 0)
                cfg.threads = threads;
            if (recordRuntime)
                cfg.recordRuntime = true;
            cfg.validate();

            if (printConfig)
            {
                std::cout << bdris::formatConfig(cfg);
                return 0;
            }
            const auto result = bdris::runSweep(cfg);
            bdris::emitResults(cfg, result);
            printSummary(result);
            std::cout << "wrote " << (cfg.outDir / "trials.csv").string() << ", "
                      << (cfg.outDir / "summary.json").string() << ", " << (cfg.outDir / "complexity.csv").string()
                      << "\n";
            return 0;
        }
        if (*cx)
        {
            const auto rows = bdris::complexityTable(nbar, rbar, kMax, groups);
            if (cxOut.empty())
            {
                bdris::writeComplexityCsv(std::cout, rows);
                return 0;
            }
            std::ofstream out(cxOut, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot open " + cxOut + " for writing");
            bdris::writeComplexityCsv(out, rows);
            if (!out.flush())
                throw std::runtime_error("write to " + cxOut + " failed");
            return 0;
        }
        if (*self)
            return bdris::runSelfTest(std::cout) ? 0 : 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
