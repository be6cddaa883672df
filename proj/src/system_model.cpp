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

#include "bdris/system_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bdris/products.hpp"
#include "bdris/random.hpp"

namespace bdris
{

namespace
{

// L-point DFT entries exp(-2 pi i r c / L), rows x cols leading block.
CMat dftBlock(Eigen::Index points, Eigen::Index rows, Eigen::Index cols)
{
    CMat out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
        {
            const auto phase = static_cast<double>((r * c) % points) / static_cast<double>(points);
            out(r, c) = std::polar(1.0, -2.0 * std::numbers::pi * phase);
        }
    return out;
}

} // namespace

void SystemConfig::validate() const
{
    if (txAntennas < 1 || rxAntennas < 1 || elements < 1 || groups < 1 || slots < 1 || blocks < 1 || rank < 1)
        throw UsageError("SystemConfig: all dimensions must be >= 1");
    if (elements % groups != 0)
        throw UsageError("SystemConfig: elements (" + std::to_string(elements) +
                         ") must be an exact multiple of groups (" + std::to_string(groups) + ")");
    if (slots < txAntennas)
        throw IdentifiabilityError("SystemConfig: pilot length T=" + std::to_string(slots) +
                                   " must be >= transmit antennas M_T=" + std::to_string(txAntennas));
    if (trials < 1)
        throw UsageError("SystemConfig: trials must be >= 1");
}

CMat ScatteringTensorSet::slice(Eigen::Index k) const
{
    std::vector<CMat> blocks;
    blocks.reserve(groups.size());
    for (const auto &g : groups)
        blocks.emplace_back(g.slice(k));
    return blockDiag(blocks);
}

ChannelPair generateChannels(const SystemConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    Rng rng(seed);
    ChannelPair ch;
    ch.groupSize = cfg.groupSize();
    ch.H = complexGaussian(cfg.txAntennas, cfg.elements, rng);
    ch.G = complexGaussian(cfg.rxAntennas, cfg.elements, rng);
    return ch;
}

CMat designPilots(const SystemConfig &cfg)
{
    if (cfg.slots < cfg.txAntennas)
        throw IdentifiabilityError("designPilots: T=" + std::to_string(cfg.slots) +
                                   " < M_T=" + std::to_string(cfg.txAntennas) +
                                   ", pilots cannot have full column rank");
    return dftBlock(cfg.slots, cfg.slots, cfg.txAntennas) / std::sqrt(static_cast<double>(cfg.slots));
}

TrainingDesign designTraining(const SystemConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    const Eigen::Index nbar = cfg.groupSize();
    const Eigen::Index points = std::max(nbar, cfg.rank);

    TrainingDesign d;
    d.X = designPilots(cfg);
    d.P1bar = dftBlock(points, nbar, cfg.rank) / std::sqrt(static_cast<double>(cfg.rank));
    d.P2bar = cfg.conjugateSecondFactor ? CMat(d.P1bar.conjugate()) : d.P1bar;

    d.P3.reserve(cfg.groups);
    for (Eigen::Index q = 0; q < cfg.groups; ++q)
    {
        Rng rng(deriveSeed(seed, SeedPurpose::Group, {static_cast<std::uint64_t>(q)}));
        d.P3.push_back(randomPhases(cfg.blocks, cfg.rank, rng));
    }

    d.P1 = blockDiagRepeat(d.P1bar, cfg.groups);
    d.P2 = blockDiagRepeat(d.P2bar, cfg.groups);
    d.PS.resize(cfg.blocks, cfg.rank * cfg.groups);
    for (Eigen::Index q = 0; q < cfg.groups; ++q)
        d.PS.middleCols(q * cfg.rank, cfg.rank) = d.P3[q];
    return d;
}

ScatteringTensorSet buildScattering(const TrainingDesign &design, const SystemConfig &cfg)
{
    ScatteringTensorSet set;
    const auto core = identityTensor(cfg.rank);
    const auto spatial = nModeProduct(nModeProduct(core, design.P1bar, 1), design.P2bar, 2);
    for (const auto &p3 : design.P3)
        set.groups.push_back(nModeProduct(spatial, p3, 3));
    return set;
}

ScatteringTensorSet randomScattering(const SystemConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    const Eigen::Index nbar = cfg.groupSize();
    ScatteringTensorSet set;
    for (Eigen::Index q = 0; q < cfg.groups; ++q)
    {
        Rng rng(deriveSeed(seed, SeedPurpose::Group, {static_cast<std::uint64_t>(q)}));
        const CMat phases = randomPhases(nbar * nbar, cfg.blocks, rng);
        set.groups.push_back(fold<cdouble>(phases.transpose(), 3, {nbar, nbar, cfg.blocks}));
    }
    return set;
}

CTensor3 synthesizeSlicewise(const ChannelPair &ch, const ScatteringTensorSet &scat, const CMat &X)
{
    const Eigen::Index K = scat.blocks();
    CTensor3 y(ch.G.rows(), X.rows(), K);
    const Eigen::Index Q = static_cast<Eigen::Index>(scat.groups.size());
    for (Eigen::Index k = 0; k < K; ++k)
    {
        CMat yk = CMat::Zero(ch.G.rows(), X.rows());
        for (Eigen::Index q = 0; q < Q; ++q)
            yk += ch.groupG(q) * scat.groups[q].slice(k) * ch.groupH(q).transpose() * X.transpose();
        y.slice(k) = yk;
    }
    return y;
}

CTensor3 synthesizeTensor(const ChannelPair &ch, const TrainingDesign &design)
{
    const CMat A = ch.G * design.P1;
    const CMat B = design.X * ch.H * design.P2;
    const CMat &C = design.PS;
    // mode-3 unfolding C (B kr A)^T, folded back.
    return fold<cdouble>(C * khatriRao(B, A).transpose(), 3, {A.rows(), B.rows(), C.rows()});
}

NoisyTensor addNoise(const CTensor3 &y, double snrDb, std::uint64_t seed)
{
    NoisyTensor out{y, 0.0};
    if (std::isinf(snrDb) && snrDb > 0)
        return out;
    if (std::isnan(snrDb))
        throw UsageError("addNoise: SNR is NaN");

    const double energy = y.squaredNorm();
    if (energy == 0.0)
        throw DegenerateInputError("addNoise: zero signal cannot be calibrated to a finite SNR");

    out.sigma2 = energy / (static_cast<double>(y.size()) * std::pow(10.0, snrDb / 10.0));
    Rng rng(seed);
    const CMat noise = complexGaussian(y.size(), 1, rng, out.sigma2);
    out.y.data() += noise.col(0);
    return out;
}

} // namespace bdris
