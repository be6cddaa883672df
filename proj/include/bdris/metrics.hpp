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

#include <cmath>
#include <cstdint>
#include <vector>

#include "bdris/tensor.hpp"

namespace bdris
{

/// ||truth - est||_F^2 / ||truth||_F^2.
double nmse(const CMat &est, const CMat &truth);

inline double toDb(double linear) { return 10.0 * std::log10(linear); }

struct AlignmentResult
{
    CMat G;        // estimate after per-column scalar correction
    CMat H;
    CVec cG;       // correction factors (0 for zero estimated columns)
    CVec cH;
    std::vector<double> residualG; // ||g_n - c ghat_n|| / ||g_n|| per column
    std::vector<double> residualH;
    std::vector<bool> zeroColumn;  // true if either estimate column is zero
    double productDeviation = 0.0; // max_n |cG[n] cH[n] - 1| over non-zero columns
};

/// Per-column least-squares complex scalars mapping each estimated column
/// onto the matching true column, for both channels.
AlignmentResult alignAmbiguity(const CMat &Ghat, const CMat &Hhat, const CMat &G, const CMat &H);

enum class CombinedMode
{
    Columnwise, // column n = h_n (x) g_n
    Blockwise,  // [H^(1) (x) G^(1), ..., H^(Q) (x) G^(Q)]
};

CMat combinedChannel(const CMat &H, const CMat &G, Eigen::Index groups, Eigen::Index groupSize,
                     CombinedMode mode);

/// Columns of the blockwise cascade that coincide with the columnwise one.
CMat columnwiseFromBlockwise(const CMat &cascade, Eigen::Index groups, Eigen::Index groupSize);

enum class TrainingScheme
{
    Parafac,    // (2 N/Q + K) R per group
    FullTensor, // (N/Q)^2 K per group
};

struct ParameterCount
{
    std::int64_t perGroup = 0;
    std::int64_t total = 0; // perGroup * Q
    // Parafac only: spatial factors shared across groups, (2 N/Q + K Q) R.
    // Equal to `total` for the full-tensor scheme.
    std::int64_t sharedTotal = 0;
    bool inDomain = true; // false when K < 1
};

ParameterCount trainingParameterCount(std::int64_t groupSize, std::int64_t blocks, std::int64_t rank,
                                      std::int64_t groups, TrainingScheme scheme);

} // namespace bdris
