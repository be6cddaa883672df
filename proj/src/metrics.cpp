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

#include "bdris/metrics.hpp"

#include <algorithm>

#include "bdris/products.hpp"

namespace bdris
{

double nmse(const CMat &est, const CMat &truth)
{
    if (est.rows() != truth.rows() || est.cols() != truth.cols())
        throw UsageError("nmse: shape mismatch");
    const double ref = truth.squaredNorm();
    if (ref == 0.0)
        throw DegenerateInputError("nmse: reference matrix is zero");
    return (truth - est).squaredNorm() / ref;
}

namespace
{

void alignColumns(const CMat &est, const CMat &truth, CMat &corrected, CVec &c, std::vector<double> &residual,
                  std::vector<bool> &zero)
{
    corrected = est;
    c = CVec::Zero(est.cols());
    residual.assign(est.cols(), 0.0);
    for (Eigen::Index n = 0; n < est.cols(); ++n)
    {
        const double e2 = est.col(n).squaredNorm();
        if (e2 == 0.0)
        {
            zero[n] = true;
            corrected.col(n).setZero();
        }
        else
        {
            c[n] = est.col(n).dot(truth.col(n)) / e2; // dot() conjugates the left operand
            corrected.col(n) = est.col(n) * c[n];
        }
        const double t = truth.col(n).norm();
        const double r = (truth.col(n) - corrected.col(n)).norm();
        residual[n] = t > 0.0 ? r / t : r;
    }
}

} // namespace

AlignmentResult alignAmbiguity(const CMat &Ghat, const CMat &Hhat, const CMat &G, const CMat &H)
{
    if (Ghat.rows() != G.rows() || Ghat.cols() != G.cols() || Hhat.rows() != H.rows() ||
        Hhat.cols() != H.cols() || G.cols() != H.cols())
        throw UsageError("alignAmbiguity: shape mismatch");

    AlignmentResult out;
    out.zeroColumn.assign(G.cols(), false);
    alignColumns(Ghat, G, out.G, out.cG, out.residualG, out.zeroColumn);
    alignColumns(Hhat, H, out.H, out.cH, out.residualH, out.zeroColumn);
    for (Eigen::Index n = 0; n < G.cols(); ++n)
        if (!out.zeroColumn[n])
            out.productDeviation = std::max(out.productDeviation, std::abs(out.cG[n] * out.cH[n] - 1.0));
    return out;
}

CMat combinedChannel(const CMat &H, const CMat &G, Eigen::Index groups, Eigen::Index groupSize, CombinedMode mode)
{
    if (groups < 1 || groupSize < 1 || H.cols() != groups * groupSize || G.cols() != groups * groupSize)
        throw UsageError("combinedChannel: channels must have groups * groupSize columns");
    if (mode == CombinedMode::Columnwise)
        return khatriRao(H, G);
    return blockKhatriRao(H, G, groups, groupSize);
}

CMat columnwiseFromBlockwise(const CMat &cascade, Eigen::Index groups, Eigen::Index groupSize)
{
    if (cascade.cols() != groups * groupSize * groupSize)
        throw UsageError("columnwiseFromBlockwise: cascade must have groups * groupSize^2 columns");
    CMat out(cascade.rows(), groups * groupSize);
    for (Eigen::Index q = 0; q < groups; ++q)
        for (Eigen::Index n = 0; n < groupSize; ++n)
            out.col(q * groupSize + n) = cascade.col(q * groupSize * groupSize + n * groupSize + n);
    return out;
}

ParameterCount trainingParameterCount(std::int64_t groupSize, std::int64_t blocks, std::int64_t rank,
                                      std::int64_t groups, TrainingScheme scheme)
{
    if (groupSize < 1 || rank < 1 || groups < 1 || blocks < 0)
        throw UsageError("trainingParameterCount: sizes must be positive (blocks non-negative)");
    ParameterCount out;
    out.inDomain = blocks >= 1;
    if (scheme == TrainingScheme::Parafac)
    {
        out.perGroup = (2 * groupSize + blocks) * rank;
        out.total = out.perGroup * groups;
        out.sharedTotal = (2 * groupSize + blocks * groups) * rank;
    }
    else
    {
        out.perGroup = groupSize * groupSize * blocks;
        out.total = out.perGroup * groups;
        out.sharedTotal = out.total;
    }
    return out;
}

} // namespace bdris
