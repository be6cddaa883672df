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

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bdris/harness.hpp"

namespace bdris
{

namespace
{

std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parseNum(const std::string &s)
{
    if (s.empty() || s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw UsageError("trial CSV: bad number '" + s + "'");
    return v;
}

std::vector<std::string> splitCsv(const std::string &line)
{
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

nlohmann::json snrJson(double snr)
{
    if (std::isinf(snr))
        return snr > 0 ? "inf" : "-inf";
    return snr;
}

nlohmann::json statsJson(const std::optional<NmseStats> &s)
{
    if (!s)
        return nullptr;
    const auto finiteOrNull = [](double v) -> nlohmann::json {
        if (std::isfinite(v))
            return v;
        return nullptr;
    };
    return {{"mean", finiteOrNull(s->meanDb)}, {"median", finiteOrNull(s->medianDb)}, {"count", s->count}};
}

std::ofstream openForWrite(const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw std::runtime_error("write to " + path.string() + " failed");
}

} // namespace

std::vector<std::string> trialCsvColumns()
{
    return {"method",     "snr_db",     "trial_index", "seed",          "nmse_G",
            "nmse_H",     "nmse_C_columnwise",          "nmse_C_blockwise", "iterations",
            "converged",  "runtime_ms", "rank_diagnostics", "nmse_C_equivalent", "status"};
}

void writeTrialCsv(std::ostream &os, const std::vector<TrialRecord> &records, bool withRuntime)
{
    const auto cols = trialCsvColumns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto &r : records)
    {
        os << toString(r.method) << ',' << num(r.snrDb) << ',' << r.trialIndex << ',' << r.seed << ','
           << num(r.nmseG) << ',' << num(r.nmseH) << ',' << num(r.nmseCColumnwise) << ','
           << num(r.nmseCBlockwise) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
           << (withRuntime ? num(r.runtimeMs) : std::string()) << ',' << r.rankDiagnostics << ','
           << num(r.nmseCEquivalent) << ',' << r.status << '\n';
    }
}

std::vector<TrialRecord> readTrialCsv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line))
        throw UsageError("trial CSV: missing header");
    const auto cols = trialCsvColumns();
    if (splitCsv(line) != cols)
        throw UsageError("trial CSV: unexpected header '" + line + "'");

    std::vector<TrialRecord> out;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        const auto f = splitCsv(line);
        if (f.size() != cols.size())
            throw UsageError("trial CSV: expected " + std::to_string(cols.size()) + " fields, got " +
                             std::to_string(f.size()));
        TrialRecord r;
        r.method = parseMethod(f[0]);
        r.snrDb = parseNum(f[1]);
        r.trialIndex = std::stoi(f[2]);
        r.seed = std::stoull(f[3]);
        r.nmseG = parseNum(f[4]);
        r.nmseH = parseNum(f[5]);
        r.nmseCColumnwise = parseNum(f[6]);
        r.nmseCBlockwise = parseNum(f[7]);
        r.iterations = std::stoi(f[8]);
        r.converged = f[9] == "1";
        r.runtimeMs = parseNum(f[10]);
        r.rankDiagnostics = f[11];
        r.nmseCEquivalent = parseNum(f[12]);
        r.status = f[13];
        out.push_back(std::move(r));
    }
    return out;
}

std::string summaryJson(const ExperimentConfig &cfg, const SweepResult &result)
{
    using nlohmann::json;
    const auto &s = cfg.system;

    json snrs = json::array();
    for (const double v : s.snrDb)
        snrs.push_back(snrJson(v));
    json methods = json::array();
    for (const auto m : cfg.methods)
        methods.push_back(toString(m));

    json doc;
    doc["format_version"] = 1;
    doc["config"] = {
        {"tx_antennas", s.txAntennas},
        {"rx_antennas", s.rxAntennas},
        {"elements", s.elements},
        {"groups", s.groups},
        {"group_size", s.groupSize()},
        {"slots", s.slots},
        {"blocks", s.blocks},
        {"rank", s.rank},
        {"snr_db", snrs},
        {"seed", s.masterSeed},
        {"trials", s.trials},
        {"conjugate_second_factor", s.conjugateSecondFactor},
        {"methods", methods},
        {"pals",
         {{"max_iterations", cfg.pals.maxIterations},
          {"threshold", cfg.pals.threshold},
          {"starts", cfg.pals.starts},
          {"extrapolate", cfg.pals.extrapolate},
          {"solver", cfg.pals.solver == PalsConfig::Solver::Svd ? "svd" : "normal"}}},
    };

    const auto report = checkIdentifiability(s);
    doc["identifiability"] = {
        {"k_times_t_ge_n", report.blocksTimesSlots},
        {"k_times_mr_ge_n", report.blocksTimesRx},
        {"t_ge_mt", report.pilotsFullRank},
        {"rank_exceeds_group", report.rankExceedsGroup},
        {"k_min", report.kMin},
        {"k_min_full_tensor", report.kMinFullTensor},
    };

    json arms = json::array();
    for (const auto &a : result.summary)
    {
        arms.push_back({
            {"method", toString(a.method)},
            {"groups", s.groups},
            {"rank", s.rank},
            {"snr_db", snrJson(a.snrDb)},
            {"trials", a.trials},
            {"failures", a.failures},
            {"nmse_db",
             {{"G", statsJson(a.G)},
              {"H", statsJson(a.H)},
              {"C_columnwise", statsJson(a.CColumnwise)},
              {"C_blockwise", statsJson(a.CBlockwise)},
              {"C_equivalent", statsJson(a.CEquivalent)}}},
        });
    }
    doc["arms"] = arms;

    json skipped = json::array();
    for (const auto &k : result.skips)
        skipped.push_back({{"method", toString(k.method)}, {"reason", k.reason}, {"detail", k.detail}});
    doc["skipped"] = skipped;
    doc["records"] = result.records.size();
    return doc.dump(2) + "\n";
}

std::vector<ComplexityRow> complexityTable(std::int64_t groupSize, std::int64_t rank, std::int64_t kMax,
                                           std::int64_t groups)
{
    if (kMax < 1)
        throw UsageError("complexityTable: k-max must be >= 1");
    std::vector<ComplexityRow> rows;
    rows.reserve(static_cast<std::size_t>(kMax));
    for (std::int64_t k = 1; k <= kMax; ++k)
        rows.push_back({k, trainingParameterCount(groupSize, k, rank, groups, TrainingScheme::Parafac),
                        trainingParameterCount(groupSize, k, rank, groups, TrainingScheme::FullTensor)});
    return rows;
}

void writeComplexityCsv(std::ostream &os, const std::vector<ComplexityRow> &rows)
{
    os << "blocks,parafac_per_group,parafac_total,parafac_shared_total,full_tensor_per_group,full_tensor_total,"
          "ratio,parafac_cheaper\n";
    for (const auto &r : rows)
    {
        const double ratio = static_cast<double>(r.parafac.perGroup) / static_cast<double>(r.fullTensor.perGroup);
        os << r.blocks << ',' << r.parafac.perGroup << ',' << r.parafac.total << ',' << r.parafac.sharedTotal << ','
           << r.fullTensor.perGroup << ',' << r.fullTensor.total << ',' << num(ratio) << ','
           << (r.parafac.perGroup < r.fullTensor.perGroup ? 1 : 0) << '\n';
    }
}

void emitResults(const ExperimentConfig &cfg, const SweepResult &result)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.outDir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + cfg.outDir.string() + ": " + ec.message());

    const auto csvPath = cfg.outDir / "trials.csv";
    auto csv = openForWrite(csvPath);
    writeTrialCsv(csv, result.records, cfg.recordRuntime);
    finish(csv, csvPath);

    const auto jsonPath = cfg.outDir / "summary.json";
    auto js = openForWrite(jsonPath);
    js << summaryJson(cfg, result);
    finish(js, jsonPath);

    const auto &s = cfg.system;
    const auto kMax = std::max<std::int64_t>(64, 2 * s.blocks);
    const auto cxPath = cfg.outDir / "complexity.csv";
    auto cx = openForWrite(cxPath);
    writeComplexityCsv(cx, complexityTable(s.groupSize(), s.rank, kMax, s.groups));
    finish(cx, cxPath);
}

} // namespace bdris
