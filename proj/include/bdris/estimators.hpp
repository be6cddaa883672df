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
#include <string>
#include <vector>

#include "bdris/system_model.hpp"
#include "bdris/tensor.hpp"

namespace bdris
{

/**
 * Dimension conditions for unique channel estimates.
 *
 *   blocksTimesSlots   K T   >= N   (mode-1 system has full row rank)
 *   blocksTimesRx      K M_R >= N   (mode-2 system has full row rank)
 *   pilotsFullRank     T >= M_T
 *   rankExceedsGroup   R > N/Q, or N/Q == 1  (masks can be removed; otherwise
 *                      only the equivalent channels G P1, H P2 are unique)
 *
 * With R == N/Q the spatial factors are square and invertible, so any
 * diagonal rescaling of the equivalent channels maps to a non-diagonal
 * mixing of the physical channels; the strict inequality is required.
 */
struct IdentifiabilityReport
{
    bool blocksTimesSlots = false;
    bool blocksTimesRx = false;
    bool pilotsFullRank = false;
    bool rankExceedsGroup = false;

    double kMinFromSlots = 0.0; // N / T
    double kMinFromRx = 0.0;    // N / M_R
    Eigen::Index kMin = 0;      // ceil(max of the two)
    Eigen::Index kMinFullTensor = 0; // (N/Q)^2 Q, required by the cascaded LS baseline

    /// Conditions the alternating receiver needs to run at full rank.
    bool alsFeasible() const { return blocksTimesSlots && blocksTimesRx && pilotsFullRank; }
    /// Individual (unmasked) channels are recoverable up to per-group scalars.
    bool individualChannels() const { return alsFeasible() && rankExceedsGroup; }

    std::string describe() const;
};

IdentifiabilityReport checkIdentifiability(const SystemConfig &cfg);

struct PalsConfig
{
    enum class Solver
    {
        // M^+ = M^H (M M^H)^+ with the Gram formed through the Khatri-Rao
        // Hadamard identity; the N x N Gram is inverted by eigendecomposition.
        NormalEquations,
        // Explicit SVD pseudo-inverse of the N x KT / N x K M_R system.
        Svd,
    };

    int maxIterations = 200;
    // On |eps_i - eps_{i-1}|, eps normalised by ||Y||^2. Noiseless data needs
    // a threshold near machine precision before the factors stop moving.
    double threshold = 1e-16;
    std::uint64_t initSeed = 0;
    int starts = 1;          // independent random initialisations, best residual kept
    bool force = false;      // run even if the dimension conditions fail
    Solver solver = Solver::NormalEquations;
    // Line-search extrapolation along the last update direction, kept only
    // when it lowers the error.
    bool extrapolate = true;

    void validate() const;
};

struct RankDiagnostics
{
    Eigen::Index mode1Rank = 0;     // effective rank of P1 (PS kr X H P2)^T
    Eigen::Index mode2Rank = 0;     // effective rank of P2 (PS kr G P1)^T
    Eigen::Index requiredRank = 0;  // N (full row rank)

    bool deficient() const { return mode1Rank < requiredRank || mode2Rank < requiredRank; }
    std::string describe() const;
};

struct EstimateResult
{
    CMat G;    // M_R x N
    CMat H;    // M_T x N
    CMat Gbar; // equivalent channel G P1, M_R x RQ
    CMat Hbar; // equivalent channel H P2, M_T x RQ

    int iterations = 0;
    bool converged = false;
    std::vector<double> errorTrace;
    RankDiagnostics ranks;
    bool equivalentMode = false; // only Gbar / Hbar are meaningful
    int bestStart = 0;

    // Closed-form receiver only: sigma2 / sigma1 of each reshaped column.
    std::vector<double> rank1Ratios;
};

/**
 * Alternating least squares over the mode-1 and mode-2 unfoldings:
 *
 *   G <- Y1 [P1 (PS kr X H P2)^T]^+
 *   H <- X^H Y2 [P2 (PS kr G P1)^T]^+
 *
 * until the normalised mode-3 reconstruction error stops changing.
 * Throws IdentifiabilityError when the dimension conditions fail, unless
 * `pals.force` is set.
 */
EstimateResult palsEstimate(const CTensor3 &y, const TrainingDesign &design, const SystemConfig &cfg,
                            const PalsConfig &pals);

/// Closed-form receiver: LS on the mode-3 unfolding followed by a rank-1
/// factorisation of every column of the resulting Khatri-Rao product.
EstimateResult krfEstimate(const CTensor3 &y, const TrainingDesign &design, const SystemConfig &cfg);

struct CascadedEstimate
{
    CMat cascade;                   // M_T M_R x (N/Q)^2 Q, estimates [H^(q) (x) G^(q)]
    Eigen::Index trainingRank = 0;  // effective rank of the stacked training matrix
};

/// Conventional LS for the block-partitioned cascaded channel. Needs
/// K >= (N/Q)^2 Q and a full-rank (unstructured) training tensor.
CascadedEstimate lsCascadedEstimate(const CTensor3 &y, const ScatteringTensorSet &scat, const CMat &X,
                                    const SystemConfig &cfg);

} // namespace bdris
