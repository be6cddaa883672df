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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdris/estimators.hpp"
#include "bdris/metrics.hpp"
#include "bdris/system_model.hpp"

namespace bdris
{

enum class Method
{
    Pals,
    Krf,
    Ls,
};

std::string toString(Method m);
Method parseMethod(const std::string &name);

struct ExperimentConfig
{
    SystemConfig system;
    std::vector<Method> methods{Method::Pals};
    PalsConfig pals = defaultSweepPals();
    std::filesystem::path outDir = "results";
    int threads = 1;            // 0: one per hardware thread
    bool recordRuntime = false; // fill runtime_ms in the CSV (breaks byte-identical reruns)

    static PalsConfig defaultSweepPals()
    {
        PalsConfig p;
        p.starts = 5; // three still left one trial in 600 at a spurious stationary point
        return p;
    }

    void validate() const;
};

/// Parse the flat `key = value` format (see README). Unknown keys are errors.
ExperimentConfig parseConfig(const std::string &text, ExperimentConfig base = {});
ExperimentConfig loadConfig(const std::filesystem::path &path, ExperimentConfig base = {});
/// Fully resolved configuration in the same format parseConfig reads.
std::string formatConfig(const ExperimentConfig &cfg);

std::vector<double> parseDoubleList(const std::string &text);
std::vector<Method> parseMethodList(const std::string &text);

struct TrialRecord
{
    Method method = Method::Pals;
    double snrDb = 0.0;
    int trialIndex = 0;
    std::uint64_t seed = 0;
    double nmseG = 0.0;
    double nmseH = 0.0;
    double nmseCColumnwise = 0.0;
    double nmseCBlockwise = 0.0;
    double nmseCEquivalent = 0.0; // (H P2) kr (G P1); NaN for the cascaded baseline
    int iterations = 0;
    bool converged = false;
    double runtimeMs = 0.0;
    std::string rankDiagnostics;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SkipRecord
{
    Method method = Method::Pals;
    std::string reason; // "identifiability"
    std::string detail;
};

struct NmseStats
{
    double meanDb = 0.0;   // 10 log10 of the mean linear NMSE
    double medianDb = 0.0; // 10 log10 of the median linear NMSE
    int count = 0;
};

struct ArmSummary
{
    Method method = Method::Pals;
    double snrDb = 0.0;
    int trials = 0;
    int failures = 0;
    std::optional<NmseStats> G, H, CColumnwise, CBlockwise, CEquivalent;
};

struct SweepResult
{
    std::vector<TrialRecord> records; // sorted by (method, snr, trial)
    std::vector<SkipRecord> skips;
    std::vector<ArmSummary> summary;
};

/// Returns the skip record when the method cannot run on this scenario.
std::optional<SkipRecord> checkArm(const SystemConfig &cfg, Method method);

TrialRecord runTrial(const ExperimentConfig &cfg, Method method, double snrDb, std::size_t snrIndex, int trialIndex);

SweepResult runSweep(const ExperimentConfig &cfg);

std::vector<ArmSummary> summarize(const std::vector<TrialRecord> &records);

// Output files -------------------------------------------------------------

/// runtime_ms is always a column; it is left empty unless `withRuntime`.
std::vector<std::string> trialCsvColumns();
void writeTrialCsv(std::ostream &os, const std::vector<TrialRecord> &records, bool withRuntime);
std::vector<TrialRecord> readTrialCsv(std::istream &is);

std::string summaryJson(const ExperimentConfig &cfg, const SweepResult &result);

struct ComplexityRow
{
    std::int64_t blocks = 0;
    ParameterCount parafac;
    ParameterCount fullTensor;
};

std::vector<ComplexityRow> complexityTable(std::int64_t groupSize, std::int64_t rank, std::int64_t kMax,
                                           std::int64_t groups);
void writeComplexityCsv(std::ostream &os, const std::vector<ComplexityRow> &rows);

/// Writes trials.csv, summary.json and complexity.csv into cfg.outDir.
void emitResults(const ExperimentConfig &cfg, const SweepResult &result);

/// Fast subset of the invariant checks; one line per check. Returns true if all pass.
bool runSelfTest(std::ostream &os);

} // namespace bdris
