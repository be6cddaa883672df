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

#include "bdris/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "bdris/products.hpp"
#include "bdris/random.hpp"

namespace bdris
{

std::string toString(Method m)
{
    switch (m)
    {
    case Method::Pals:
        return "pals";
    case Method::Krf:
        return "krf";
    case Method::Ls:
        return "ls";
    }
    return "unknown";
}

Method parseMethod(const std::string &name)
{
    if (name == "pals")
        return Method::Pals;
    if (name == "krf")
        return Method::Krf;
    if (name == "ls")
        return Method::Ls;
    throw UsageError("unknown method '" + name + "' (expected pals, krf or ls)");
}

void ExperimentConfig::validate() const
{
    system.validate();
    pals.validate();
    if (methods.empty())
        throw UsageError("ExperimentConfig: at least one method is required");
    if (system.snrDb.empty())
        throw UsageError("ExperimentConfig: snr_db list is empty");
    for (const double snr : system.snrDb)
        if (std::isnan(snr))
            throw UsageError("ExperimentConfig: snr_db contains NaN");
    if (threads < 0)
        throw UsageError("ExperimentConfig: threads must be >= 0");
}

std::optional<SkipRecord> checkArm(const SystemConfig &cfg, Method method)
{
    const auto report = checkIdentifiability(cfg);
    SkipRecord skip{method, "identifiability", {}};
    switch (method)
    {
    case Method::Pals:
        if (!report.alsFeasible())
        {
            skip.detail = report.describe();
            return skip;
        }
        break;
    case Method::Krf:
        if (cfg.blocks < cfg.rank * cfg.groups)
        {
            skip.detail = "K=" + std::to_string(cfg.blocks) + " < R*Q=" + std::to_string(cfg.rank * cfg.groups);
            return skip;
        }
        break;
    case Method::Ls:
        if (cfg.blocks < report.kMinFullTensor)
        {
            skip.detail = "K=" + std::to_string(cfg.blocks) + " < (N/Q)^2 Q=" + std::to_string(report.kMinFullTensor);
            return skip;
        }
        break;
    }
    return std::nullopt;
}

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sanitize(std::string text)
{
    std::replace_if(
        text.begin(), text.end(), [](char c) { return c == ',' || c == '\n' || c == '\r' || c == '"'; }, ';');
    return text;
}

void fillFactorMetrics(TrialRecord &rec, const EstimateResult &est, const ChannelPair &ch, const TrainingDesign &d,
                       const SystemConfig &cfg)
{
    const Eigen::Index Q = cfg.groups, nbar = cfg.groupSize();
    const auto aligned = alignAmbiguity(est.G, est.H, ch.G, ch.H);
    rec.nmseG = nmse(aligned.G, ch.G);
    rec.nmseH = nmse(aligned.H, ch.H);
    rec.nmseCColumnwise = nmse(combinedChannel(est.H, est.G, Q, nbar, CombinedMode::Columnwise),
                               combinedChannel(ch.H, ch.G, Q, nbar, CombinedMode::Columnwise));
    rec.nmseCBlockwise = nmse(combinedChannel(est.H, est.G, Q, nbar, CombinedMode::Blockwise),
                              combinedChannel(ch.H, ch.G, Q, nbar, CombinedMode::Blockwise));
    rec.nmseCEquivalent = nmse(khatriRao(est.Hbar, est.Gbar), khatriRao(CMat(ch.H * d.P2), CMat(ch.G * d.P1)));
    rec.iterations = est.iterations;
    rec.converged = est.converged;
    rec.rankDiagnostics = est.ranks.describe();
    if (est.equivalentMode)
        rec.rankDiagnostics += ";equivalent";
}

} // namespace

TrialRecord runTrial(const ExperimentConfig &cfg, Method method, double snrDb, std::size_t snrIndex, int trialIndex)
{
    const auto &sys = cfg.system;
    const auto master = sys.masterSeed;
    const auto trial = static_cast<std::uint64_t>(trialIndex);
    const auto snrKey = static_cast<std::uint64_t>(snrIndex);

    TrialRecord rec;
    rec.method = method;
    rec.snrDb = snrDb;
    rec.trialIndex = trialIndex;
    rec.seed = deriveSeed(master, {trial});

    const auto start = std::chrono::steady_clock::now();
    try
    {
        const auto ch = generateChannels(sys, deriveSeed(master, SeedPurpose::Channels, {trial}));
        const auto noiseSeed = deriveSeed(master, SeedPurpose::Noise, {trial, snrKey});
        if (method == Method::Ls)
        {
            const CMat X = designPilots(sys);
            const auto scat = randomScattering(sys, deriveSeed(master, SeedPurpose::Baseline, {trial}));
            const auto y = addNoise(synthesizeSlicewise(ch, scat, X), snrDb, noiseSeed);
            const auto est = lsCascadedEstimate(y.y, scat, X, sys);
            const Eigen::Index Q = sys.groups, nbar = sys.groupSize();
            const CMat truth = combinedChannel(ch.H, ch.G, Q, nbar, CombinedMode::Blockwise);
            rec.nmseG = rec.nmseH = rec.nmseCEquivalent = kNaN;
            rec.nmseCBlockwise = nmse(est.cascade, truth);
            rec.nmseCColumnwise = nmse(columnwiseFromBlockwise(est.cascade, Q, nbar),
                                       combinedChannel(ch.H, ch.G, Q, nbar, CombinedMode::Columnwise));
            rec.iterations = 1;
            rec.converged = true;
            rec.rankDiagnostics = "train=" + std::to_string(est.trainingRank) + "/" + std::to_string(truth.cols());
        }
        else
        {
            const auto design = designTraining(sys, deriveSeed(master, SeedPurpose::Training, {trial}));
            const auto y = addNoise(synthesizeTensor(ch, design), snrDb, noiseSeed);
            EstimateResult est;
            if (method == Method::Pals)
            {
                PalsConfig pals = cfg.pals;
                pals.initSeed = deriveSeed(master, SeedPurpose::Init, {trial, snrKey});
                est = palsEstimate(y.y, design, sys, pals);
            }
            else
            {
                est = krfEstimate(y.y, design, sys);
            }
            fillFactorMetrics(rec, est, ch, design, sys);
        }
    }
    catch (const UsageError &)
    {
        throw;
    }
    catch (const std::exception &e)
    {
        rec.nmseG = rec.nmseH = rec.nmseCColumnwise = rec.nmseCBlockwise = rec.nmseCEquivalent = kNaN;
        rec.converged = false;
        rec.status = sanitize(std::string("failed: ") + e.what());
    }
    rec.runtimeMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

SweepResult runSweep(const ExperimentConfig &cfg)
{
    cfg.validate();
    SweepResult out;

    struct Task
    {
        Method method;
        std::size_t snrIndex;
        int trial;
    };
    std::vector<Task> tasks;
    for (const auto method : cfg.methods)
    {
        if (auto skip = checkArm(cfg.system, method))
        {
            out.skips.push_back(*skip);
            continue;
        }
        for (std::size_t s = 0; s < cfg.system.snrDb.size(); ++s)
            for (int t = 0; t < cfg.system.trials; ++t)
                tasks.push_back({method, s, t});
    }

    std::vector<TrialRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++)
        {
            try
            {
                const auto &t = tasks[i];
                records[i] = runTrial(cfg, t.method, cfg.system.snrDb[t.snrIndex], t.snrIndex, t.trial);
            }
            catch (...)
            {
                std::lock_guard lock(failureMutex);
                if (!failure)
                    failure = std::current_exception();
                next = tasks.size();
            }
        }
    };

    std::size_t threads = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(tasks.size(), 1));
    if (threads <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::stable_sort(records.begin(), records.end(), [](const TrialRecord &a, const TrialRecord &b) {
        if (a.method != b.method)
            return a.method < b.method;
        if (a.snrDb != b.snrDb)
            return a.snrDb < b.snrDb;
        return a.trialIndex < b.trialIndex;
    });
    out.records = std::move(records);
    out.summary = summarize(out.records);
    return out;
}

namespace
{

std::optional<NmseStats> stats(std::vector<double> values)
{
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    if (values.empty())
        return std::nullopt;
    NmseStats s;
    s.count = static_cast<int>(values.size());
    double sum = 0.0;
    for (const double v : values)
        sum += v;
    s.meanDb = toDb(sum / static_cast<double>(values.size()));
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    s.medianDb = toDb(median);
    return s;
}

} // namespace

std::vector<ArmSummary> summarize(const std::vector<TrialRecord> &records)
{
    std::vector<ArmSummary> out;
    std::size_t i = 0;
    while (i < records.size())
    {
        std::size_t j = i;
        while (j < records.size() && records[j].method == records[i].method && records[j].snrDb == records[i].snrDb)
            ++j;

        ArmSummary arm;
        arm.method = records[i].method;
        arm.snrDb = records[i].snrDb;
        std::vector<double> g, h, cc, cb, ce;
        for (std::size_t k = i; k < j; ++k)
        {
            const auto &r = records[k];
            ++arm.trials;
            if (!r.ok())
            {
                ++arm.failures;
                continue;
            }
            g.push_back(r.nmseG);
            h.push_back(r.nmseH);
            cc.push_back(r.nmseCColumnwise);
            cb.push_back(r.nmseCBlockwise);
            ce.push_back(r.nmseCEquivalent);
        }
        arm.G = stats(g);
        arm.H = stats(h);
        arm.CColumnwise = stats(cc);
        arm.CBlockwise = stats(cb);
        arm.CEquivalent = stats(ce);
        out.push_back(arm);
        i = j;
    }
    return out;
}

} // namespace bdris
