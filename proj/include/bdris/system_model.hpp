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
#include <limits>
#include <vector>

#include "bdris/tensor.hpp"

namespace bdris
{

/**
 * Scenario for a group-connected BD-RIS link.
 *
 * The surface has `elements` = N elements split into `groups` = Q groups of
 * N/Q fully interconnected elements. Training runs over `blocks` = K blocks
 * of `slots` = T pilot slots each; the surface response is fixed inside a
 * block. `rank` is the per-group PARAFAC rank of the training tensor.
 */
struct SystemConfig
{
    Eigen::Index txAntennas = 6;  // M_T
    Eigen::Index rxAntennas = 10; // M_R
    Eigen::Index elements = 16;   // N
    Eigen::Index groups = 4;      // Q
    Eigen::Index slots = 6;       // T
    Eigen::Index blocks = 10;     // K
    Eigen::Index rank = 5;        // per-group rank

    std::vector<double> snrDb{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    std::uint64_t masterSeed = 1;
    int trials = 200;

    // Second spatial factor uses the conjugate DFT truncation.
    bool conjugateSecondFactor = true;

    Eigen::Index groupSize() const { return groups > 0 ? elements / groups : 0; } // N/Q

    /// Throws UsageError / IdentifiabilityError on an invalid scenario.
    void validate() const;
};

struct ChannelPair
{
    CMat H; // M_T x N
    CMat G; // M_R x N

    Eigen::Index groupSize = 1;

    auto groupH(Eigen::Index q) const { return H.middleCols(q * groupSize, groupSize); }
    auto groupG(Eigen::Index q) const { return G.middleCols(q * groupSize, groupSize); }
};

struct TrainingDesign
{
    CMat X;                 // T x M_T pilots with orthonormal columns
    CMat P1bar;             // N/Q x R spatial factor (mode 1)
    CMat P2bar;             // N/Q x R spatial factor (mode 2)
    std::vector<CMat> P3;   // Q block factors, each K x R, unit modulus
    CMat P1;                // block_diag(P1bar, ..., P1bar), N x RQ
    CMat P2;                // block_diag(P2bar, ..., P2bar), N x RQ
    CMat PS;                // [P3^(1) ... P3^(Q)], K x RQ
};

struct ScatteringTensorSet
{
    std::vector<CTensor3> groups; // each N/Q x N/Q x K

    Eigen::Index blocks() const { return groups.empty() ? 0 : groups.front().dim(3); }

    /// Block-diagonal N x N scattering matrix applied during block k.
    CMat slice(Eigen::Index k) const;
};

struct NoisyTensor
{
    CTensor3 y;
    double sigma2 = 0.0;
};

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// i.i.d. CN(0,1) channels; deterministic in (cfg, seed).
ChannelPair generateChannels(const SystemConfig &cfg, std::uint64_t seed);

/// First M_T columns of the unitary T-point DFT.
CMat designPilots(const SystemConfig &cfg);

/// Truncated-DFT spatial factors plus random-phase block factors.
TrainingDesign designTraining(const SystemConfig &cfg, std::uint64_t seed);

/// Per-group PARAFAC scattering tensors I x1 P1bar x2 P2bar x3 P3^(q).
ScatteringTensorSet buildScattering(const TrainingDesign &design, const SystemConfig &cfg);

/// Unstructured unit-modulus scattering tensors (no low-rank constraint),
/// used by the cascaded LS baseline.
ScatteringTensorSet randomScattering(const SystemConfig &cfg, std::uint64_t seed);

/// Y_k = sum_q G^(q) S_k^(q) H^(q)^T X^T, stacked as frontal slices (M_R x T x K).
CTensor3 synthesizeSlicewise(const ChannelPair &ch, const ScatteringTensorSet &scat, const CMat &X);

/// PARAFAC form: I x1 (G P1) x2 (X H P2) x3 PS.
CTensor3 synthesizeTensor(const ChannelPair &ch, const TrainingDesign &design);

/**
 * Add CN(0, sigma2) noise with sigma2 = ||y||^2 / (numel * 10^(snr/10)).
 * An infinite SNR returns y unchanged with sigma2 = 0.
 */
NoisyTensor addNoise(const CTensor3 &y, double snrDb, std::uint64_t seed);

} // namespace bdris
