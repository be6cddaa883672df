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

#include <string>
#include <vector>

#include "bdris/tensor.hpp"

namespace bdris
{

/// Kronecker product; block (i, j) of the result is a(i, j) * b, so the
/// right operand's index runs fastest.
template <typename DerivedA, typename DerivedB>
Mat<typename DerivedA::Scalar> kronecker(const Eigen::MatrixBase<DerivedA> &a,
                                         const Eigen::MatrixBase<DerivedB> &b)
{
    using Scalar = typename DerivedA::Scalar;
    const Eigen::Index br = b.rows(), bc = b.cols();
    Mat<Scalar> out(a.rows() * br, a.cols() * bc);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    return out;
}

/// Column-wise Kronecker product: column r is a_r (x) b_r.
template <typename DerivedA, typename DerivedB>
Mat<typename DerivedA::Scalar> khatriRao(const Eigen::MatrixBase<DerivedA> &a,
                                         const Eigen::MatrixBase<DerivedB> &b)
{
    using Scalar = typename DerivedA::Scalar;
    if (a.cols() != b.cols())
        throw UsageError("khatriRao: column counts differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.cols()) + ")");
    const Eigen::Index br = b.rows();
    Mat<Scalar> out(a.rows() * br, a.cols());
    for (Eigen::Index r = 0; r < a.cols(); ++r)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.col(r).segment(i * br, br) = a(i, r) * b.col(r);
    return out;
}

/// (A kr B)^H (A kr B) computed as (A^H A) .* (B^H B), without forming
/// the Khatri-Rao product.
template <typename DerivedA, typename DerivedB>
Mat<typename DerivedA::Scalar> khatriRaoGram(const Eigen::MatrixBase<DerivedA> &a,
                                             const Eigen::MatrixBase<DerivedB> &b)
{
    if (a.cols() != b.cols())
        throw UsageError("khatriRaoGram: column counts differ");
    return (a.adjoint() * a).cwiseProduct(b.adjoint() * b);
}

/// Block-partitioned Khatri-Rao product: both inputs are split into
/// `blocks` column groups of width `blockCols`, and the result is
/// [A^(1) (x) B^(1), ..., A^(Q) (x) B^(Q)].
template <typename DerivedA, typename DerivedB>
Mat<typename DerivedA::Scalar> blockKhatriRao(const Eigen::MatrixBase<DerivedA> &a,
                                              const Eigen::MatrixBase<DerivedB> &b,
                                              Eigen::Index blocks, Eigen::Index blockCols)
{
    using Scalar = typename DerivedA::Scalar;
    if (blocks < 1 || blockCols < 1 || a.cols() != blocks * blockCols || b.cols() != blocks * blockCols)
        throw UsageError("blockKhatriRao: inputs must both have blocks * blockCols columns");
    const Eigen::Index w = blockCols * blockCols;
    Mat<Scalar> out(a.rows() * b.rows(), blocks * w);
    for (Eigen::Index q = 0; q < blocks; ++q)
        out.middleCols(q * w, w) = kronecker(a.middleCols(q * blockCols, blockCols),
                                             b.middleCols(q * blockCols, blockCols));
    return out;
}

template <typename Scalar>
Mat<Scalar> blockDiag(const std::vector<Mat<Scalar>> &blocks)
{
    if (blocks.empty())
        throw UsageError("blockDiag: empty block list");
    Eigen::Index rows = 0, cols = 0;
    for (const auto &b : blocks)
    {
        rows += b.rows();
        cols += b.cols();
    }
    Mat<Scalar> out = Mat<Scalar>::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto &b : blocks)
    {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

/// `copies` repetitions of the same block along the diagonal.
template <typename Derived>
Mat<typename Derived::Scalar> blockDiagRepeat(const Eigen::MatrixBase<Derived> &block, Eigen::Index copies)
{
    if (copies < 1)
        throw UsageError("blockDiagRepeat: need at least one copy");
    return blockDiag(std::vector<Mat<typename Derived::Scalar>>(copies, block.eval()));
}

/// Column-major vectorisation.
template <typename Derived>
Vec<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived> &m)
{
    const Mat<typename Derived::Scalar> tmp = m;
    return Eigen::Map<const Vec<typename Derived::Scalar>>(tmp.data(), tmp.size());
}

} // namespace bdris
