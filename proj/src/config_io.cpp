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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bdris/harness.hpp"

namespace bdris
{

namespace
{

std::string trim(const std::string &s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> splitList(const std::string &text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

long long parseInt(const std::string &key, const std::string &value)
{
    std::size_t used = 0;
    long long v = 0;
    try
    {
        v = std::stoll(value, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used == 0 || used != value.size())
        throw UsageError("config: '" + key + "' expects an integer, got '" + value + "'");
    return v;
}

std::uint64_t parseUnsigned(const std::string &key, const std::string &value)
{
    std::size_t used = 0;
    unsigned long long v = 0;
    try
    {
        if (!value.empty() && value[0] != '-')
            v = std::stoull(value, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used == 0 || used != value.size())
        throw UsageError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
    return v;
}

double parseDouble(const std::string &key, const std::string &value)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(value, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used == 0 || used != value.size() || std::isnan(v))
        throw UsageError("config: '" + key + "' expects a number, got '" + value + "'");
    return v;
}

bool parseBool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw UsageError("config: '" + key + "' expects true or false, got '" + value + "'");
}

std::string formatDouble(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int digits = 15; digits <= 17; ++digits)
    {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

void apply(ExperimentConfig &cfg, const std::string &key, const std::string &value)
{
    auto &s = cfg.system;
    if (key == "tx_antennas")
        s.txAntennas = parseInt(key, value);
    else if (key == "rx_antennas")
        s.rxAntennas = parseInt(key, value);
    else if (key == "elements")
        s.elements = parseInt(key, value);
    else if (key == "groups")
        s.groups = parseInt(key, value);
    else if (key == "slots")
        s.slots = parseInt(key, value);
    else if (key == "blocks")
        s.blocks = parseInt(key, value);
    else if (key == "rank")
        s.rank = parseInt(key, value);
    else if (key == "snr_db")
        s.snrDb = parseDoubleList(value);
    else if (key == "seed")
        s.masterSeed = parseUnsigned(key, value);
    else if (key == "trials")
        s.trials = static_cast<int>(parseInt(key, value));
    else if (key == "conjugate_second_factor")
        s.conjugateSecondFactor = parseBool(key, value);
    else if (key == "methods")
        cfg.methods = parseMethodList(value);
    else if (key == "pals_max_iterations")
        cfg.pals.maxIterations = static_cast<int>(parseInt(key, value));
    else if (key == "pals_threshold")
        cfg.pals.threshold = parseDouble(key, value);
    else if (key == "pals_starts")
        cfg.pals.starts = static_cast<int>(parseInt(key, value));
    else if (key == "pals_extrapolate")
        cfg.pals.extrapolate = parseBool(key, value);
    else if (key == "pals_solver")
    {
        if (value == "normal")
            cfg.pals.solver = PalsConfig::Solver::NormalEquations;
        else if (value == "svd")
            cfg.pals.solver = PalsConfig::Solver::Svd;
        else
            throw UsageError("config: pals_solver must be 'normal' or 'svd', got '" + value + "'");
    }
    else if (key == "out")
        cfg.outDir = value;
    else if (key == "threads")
        cfg.threads = static_cast<int>(parseInt(key, value));
    else if (key == "record_runtime")
        cfg.recordRuntime = parseBool(key, value);
    else
        throw UsageError("config: unknown key '" + key + "'");
}

} // namespace

std::vector<double> parseDoubleList(const std::string &text)
{
    std::vector<double> out;
    for (const auto &item : splitList(text))
        out.push_back(parseDouble("snr_db", item));
    if (out.empty())
        throw UsageError("config: empty number list");
    return out;
}

std::vector<Method> parseMethodList(const std::string &text)
{
    std::vector<Method> out;
    for (const auto &item : splitList(text))
    {
        const auto m = parseMethod(item);
        if (std::find(out.begin(), out.end(), m) == out.end())
            out.push_back(m);
    }
    if (out.empty())
        throw UsageError("config: empty method list");
    return out;
}

ExperimentConfig parseConfig(const std::string &text, ExperimentConfig base)
{
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineNo) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        try
        {
            apply(base, key, value);
        }
        catch (const UsageError &e)
        {
            throw UsageError("config line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig loadConfig(const std::filesystem::path &path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parseConfig(buf.str(), std::move(base));
}

std::string formatConfig(const ExperimentConfig &cfg)
{
    const auto &s = cfg.system;
    std::ostringstream o;
    o << "tx_antennas = " << s.txAntennas << "\n"
      << "rx_antennas = " << s.rxAntennas << "\n"
      << "elements = " << s.elements << "\n"
      << "groups = " << s.groups << "\n"
      << "slots = " << s.slots << "\n"
      << "blocks = " << s.blocks << "\n"
      << "rank = " << s.rank << "\n"
      << "snr_db = ";
    for (std::size_t i = 0; i < s.snrDb.size(); ++i)
        o << (i ? ", " : "") << formatDouble(s.snrDb[i]);
    o << "\nseed = " << s.masterSeed << "\n"
      << "trials = " << s.trials << "\n"
      << "conjugate_second_factor = " << (s.conjugateSecondFactor ? "true" : "false") << "\n"
      << "methods = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
        o << (i ? ", " : "") << toString(cfg.methods[i]);
    o << "\npals_max_iterations = " << cfg.pals.maxIterations << "\n"
      << "pals_threshold = " << formatDouble(cfg.pals.threshold) << "\n"
      << "pals_starts = " << cfg.pals.starts << "\n"
      << "pals_extrapolate = " << (cfg.pals.extrapolate ? "true" : "false") << "\n"
      << "pals_solver = " << (cfg.pals.solver == PalsConfig::Solver::Svd ? "svd" : "normal") << "\n"
      << "out = " << cfg.outDir.string() << "\n"
      << "threads = " << cfg.threads << "\n"
      << "record_runtime = " << (cfg.recordRuntime ? "true" : "false") << "\n";
    return o.str();
}

} // namespace bdris
