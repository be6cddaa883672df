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

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bdris/harness.hpp"

using namespace bdris;

namespace
{

std::string csvOf(const std::vector<TrialRecord> &records, bool runtime = false)
{
    std::ostringstream os;
    writeTrialCsv(os, records, runtime);
    return os.str();
}

bool bitEqual(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0 || (std::isnan(a) && std::isnan(b)); }

ExperimentConfig smallSweep()
{
    ExperimentConfig cfg;
    cfg.system.snrDb = {10.0, 20.0};
    cfg.system.trials = 3;
    cfg.methods = {Method::Pals, Method::Krf, Method::Ls};
    return cfg;
}

} // namespace

TEST_CASE("config: parse, defaults, overrides, errors")
{
    const auto cfg = parseConfig(R"(
# reference scenario with two groups
groups = 2
snr_db = 0, 10, inf   # noiseless arm last
methods = pals, ls
seed = 99
pals_starts = 1
pals_solver = svd
record_runtime = yes
)");
    CHECK(cfg.system.groups == 2);
    CHECK(cfg.system.elements == 16);
    REQUIRE(cfg.system.snrDb.size() == 3);
    CHECK(std::isinf(cfg.system.snrDb[2]));
    CHECK(cfg.methods == std::vector<Method>{Method::Pals, Method::Ls});
    CHECK(cfg.system.masterSeed == 99);
    CHECK(cfg.pals.starts == 1);
    CHECK(cfg.pals.solver == PalsConfig::Solver::Svd);
    CHECK(cfg.recordRuntime);

    CHECK_THROWS_AS(parseConfig("bogus = 1"), UsageError);
    CHECK_THROWS_AS(parseConfig("groups"), UsageError);
    CHECK_THROWS_AS(parseConfig("groups = two"), UsageError);
    CHECK_THROWS_AS(parseConfig("methods = als"), UsageError);
    CHECK_THROWS_AS(parseConfig("seed = -1"), UsageError);
    CHECK_THROWS_AS(parseConfig("snr_db = nan"), UsageError);

    ExperimentConfig empty;
    empty.methods.clear();
    CHECK_THROWS_AS(empty.validate(), UsageError);
}

TEST_CASE("config: printed form parses back to the same configuration")
{
    auto cfg = smallSweep();
    cfg.system.snrDb = {-5.0, 12.5, kNoiselessSnr};
    cfg.pals.threshold = 3e-13;
    cfg.system.masterSeed = 18446744073709551615ull;
    const auto text = formatConfig(cfg);
    const auto back = parseConfig(text);
    CHECK(formatConfig(back) == text);
    CHECK(back.system.snrDb == cfg.system.snrDb);
    CHECK(back.pals.threshold == cfg.pals.threshold);
    CHECK(back.system.masterSeed == cfg.system.masterSeed);
}

TEST_CASE("runTrial: noiseless recovery and determinism")
{
    const ExperimentConfig cfg;
    const auto r = runTrial(cfg, Method::Pals, kNoiselessSnr, 0, 0);
    CHECK(r.ok());
    CHECK(r.nmseCColumnwise <= 1e-8);
    CHECK(r.nmseCBlockwise <= 1e-8);
    CHECK(r.nmseG <= 1e-8);
    CHECK(r.converged);

    const auto a = runTrial(cfg, Method::Pals, 10.0, 1, 4);
    const auto b = runTrial(cfg, Method::Pals, 10.0, 1, 4);
    CHECK(csvOf({a}) == csvOf({b}));
    const auto c = runTrial(cfg, Method::Pals, 10.0, 1, 5);
    CHECK(c.seed != a.seed);
    CHECK(c.nmseG != a.nmseG);
}

TEST_CASE("runTrial: baseline metrics")
{
    ExperimentConfig cfg;
    cfg.system.elements = 4;
    cfg.system.groups = 2;
    cfg.system.txAntennas = cfg.system.slots = 2;
    cfg.system.rxAntennas = 4;
    cfg.system.blocks = 8;
    cfg.system.rank = 2;
    const auto r = runTrial(cfg, Method::Ls, kNoiselessSnr, 0, 0);
    CHECK(r.ok());
    CHECK(r.nmseCBlockwise <= 1e-10);
    CHECK(r.nmseCColumnwise <= 1e-10);
    CHECK(std::isnan(r.nmseG));
    CHECK(std::isnan(r.nmseCEquivalent));
    CHECK(r.rankDiagnostics == "train=8/8");
}

TEST_CASE("checkArm: infeasible arms produce skip records")
{
    const SystemConfig cfg;
    CHECK_FALSE(checkArm(cfg, Method::Pals));
    const auto krf = checkArm(cfg, Method::Krf);
    REQUIRE(krf);
    CHECK(krf->reason == "identifiability");
    CHECK(krf->detail.find("K=10") != std::string::npos);
    CHECK(checkArm(cfg, Method::Ls));
}

TEST_CASE("runSweep: single record, partition of the arm cross-product")
{
    ExperimentConfig one;
    one.system.snrDb = {20.0};
    one.system.trials = 1;
    const auto r1 = runSweep(one);
    CHECK(r1.records.size() == 1);
    CHECK(r1.skips.empty());
    REQUIRE(r1.summary.size() == 1);
    CHECK(r1.summary[0].trials == 1);

    const auto cfg = smallSweep();
    const auto res = runSweep(cfg);
    std::set<Method> skipped, ran;
    for (const auto &s : res.skips)
        skipped.insert(s.method);
    for (const auto &r : res.records)
        ran.insert(r.method);
    CHECK(res.records.size() == 2 * 3);
    CHECK(ran == std::set<Method>{Method::Pals});
    CHECK(skipped == std::set<Method>{Method::Krf, Method::Ls});
    for (const auto m : cfg.methods)
        CHECK(skipped.count(m) + ran.count(m) == 1);

    for (std::size_t i = 1; i < res.records.size(); ++i)
    {
        const auto &p = res.records[i - 1], &q = res.records[i];
        CHECK((p.snrDb < q.snrDb || (p.snrDb == q.snrDb && p.trialIndex < q.trialIndex)));
    }
}

TEST_CASE("runSweep: records do not depend on the thread count")
{
    auto cfg = smallSweep();
    cfg.system.trials = 4;
    cfg.threads = 1;
    const auto serial = runSweep(cfg);
    cfg.threads = 3;
    const auto parallel = runSweep(cfg);
    CHECK(csvOf(serial.records) == csvOf(parallel.records));
}

TEST_CASE("summarize: mean and median in dB, failures excluded")
{
    std::vector<TrialRecord> recs(4);
    const double vals[] = {0.1, 0.01, 0.001, 1.0};
    for (int i = 0; i < 4; ++i)
    {
        recs[i].snrDb = 10.0;
        recs[i].trialIndex = i;
        recs[i].nmseG = recs[i].nmseH = recs[i].nmseCColumnwise = recs[i].nmseCBlockwise = vals[i];
        recs[i].nmseCEquivalent = std::numeric_limits<double>::quiet_NaN();
    }
    recs[3].status = "failed: test";
    const auto s = summarize(recs);
    REQUIRE(s.size() == 1);
    CHECK(s[0].trials == 4);
    CHECK(s[0].failures == 1);
    REQUIRE(s[0].G);
    CHECK(s[0].G->count == 3);
    CHECK(s[0].G->meanDb == doctest::Approx(10.0 * std::log10(0.111 / 3.0)));
    CHECK(s[0].G->medianDb == doctest::Approx(-20.0));
    CHECK_FALSE(s[0].CEquivalent);
}

TEST_CASE("trial CSV: header-only, columns, LF endings, exact round trip")
{
    const std::string empty = csvOf({});
    CHECK(empty ==
          "method,snr_db,trial_index,seed,nmse_G,nmse_H,nmse_C_columnwise,nmse_C_blockwise,iterations,converged,"
          "runtime_ms,rank_diagnostics,nmse_C_equivalent,status\n");

    auto cfg = smallSweep();
    cfg.system.snrDb = {10.0, kNoiselessSnr};
    cfg.system.trials = 2;
    auto res = runSweep(cfg);
    res.records[0].nmseG = 0.1 + 0.2; // needs all 17 digits
    res.records[1].status = "failed: example";
    const std::string text = csvOf(res.records, true);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');

    std::istringstream in(text);
    const auto back = readTrialCsv(in);
    REQUIRE(back.size() == res.records.size());
    for (std::size_t i = 0; i < back.size(); ++i)
    {
        const auto &a = res.records[i], &b = back[i];
        CHECK((a.method == b.method));
        CHECK(bitEqual(a.snrDb, b.snrDb));
        CHECK(a.trialIndex == b.trialIndex);
        CHECK(a.seed == b.seed);
        CHECK(bitEqual(a.nmseG, b.nmseG));
        CHECK(bitEqual(a.nmseH, b.nmseH));
        CHECK(bitEqual(a.nmseCColumnwise, b.nmseCColumnwise));
        CHECK(bitEqual(a.nmseCBlockwise, b.nmseCBlockwise));
        CHECK(bitEqual(a.nmseCEquivalent, b.nmseCEquivalent));
        CHECK(bitEqual(a.runtimeMs, b.runtimeMs));
        CHECK(a.iterations == b.iterations);
        CHECK(a.converged == b.converged);
        CHECK(a.rankDiagnostics == b.rankDiagnostics);
        CHECK(a.status == b.status);
    }
    std::istringstream noRuntime(csvOf(res.records, false));
    CHECK(std::isnan(readTrialCsv(noRuntime)[0].runtimeMs));
}

TEST_CASE("complexity CSV")
{
    const auto rows = complexityTable(4, 5, 10, 1);
    REQUIRE(rows.size() == 10);
    CHECK(rows.back().parafac.perGroup == 90);
    CHECK(rows.back().fullTensor.perGroup == 160);
    std::ostringstream os;
    writeComplexityCsv(os, rows);
    const auto text = os.str();
    CHECK(text.rfind("blocks,parafac_per_group,", 0) == 0);
    CHECK(text.find("\n10,90,90,90,160,160,0.5625,1\n") != std::string::npos);
    CHECK(text.find("\n3,55,55,55,48,48,") != std::string::npos); // K=3: full tensor still cheaper
    CHECK_THROWS_AS(complexityTable(4, 5, 0, 1), UsageError);
}

TEST_CASE("summary JSON: stable keys, config echo, skips")
{
    auto cfg = smallSweep();
    cfg.system.snrDb = {10.0, kNoiselessSnr};
    cfg.system.trials = 2;
    const auto res = runSweep(cfg);
    const auto doc = nlohmann::json::parse(summaryJson(cfg, res));
    CHECK(doc["format_version"] == 1);
    CHECK(doc["config"]["groups"] == 4);
    CHECK(doc["config"]["rank"] == 5);
    CHECK(doc["config"]["snr_db"][1] == "inf");
    CHECK(doc["config"]["methods"].size() == 3);
    REQUIRE(doc["arms"].size() == 2);
    CHECK(doc["arms"][0]["method"] == "pals");
    CHECK(doc["arms"][0]["snr_db"] == 10.0);
    CHECK(doc["arms"][0]["nmse_db"]["C_columnwise"]["mean"].is_number());
    CHECK(doc["arms"][1]["snr_db"] == "inf");
    REQUIRE(doc["skipped"].size() == 2);
    CHECK(doc["skipped"][0]["reason"] == "identifiability");
    CHECK(doc["records"] == 4);
}

TEST_CASE("emitResults: files on disk, I/O errors carry the path")
{
    auto cfg = smallSweep();
    cfg.system.trials = 1;
    cfg.outDir = std::filesystem::temp_directory_path() / "bdris_emit_test";
    std::filesystem::remove_all(cfg.outDir);
    const auto res = runSweep(cfg);
    emitResults(cfg, res);
    CHECK(std::filesystem::exists(cfg.outDir / "trials.csv"));
    CHECK(std::filesystem::exists(cfg.outDir / "summary.json"));
    CHECK(std::filesystem::exists(cfg.outDir / "complexity.csv"));
    std::ifstream in(cfg.outDir / "trials.csv");
    CHECK(readTrialCsv(in).size() == res.records.size());

    std::ofstream(std::filesystem::temp_directory_path() / "bdris_emit_file") << "x";
    cfg.outDir = std::filesystem::temp_directory_path() / "bdris_emit_file" / "sub";
    try
    {
        emitResults(cfg, res);
        FAIL("expected an I/O error");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()).find("bdris_emit_file") != std::string::npos);
    }
}

TEST_CASE("selftest passes")
{
    std::ostringstream os;
    CHECK(runSelfTest(os));
    CHECK(os.str().find("[FAIL]") == std::string::npos);
}
