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

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>

#include "bdris/errors.hpp"

namespace bdris
{

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using cdouble = std::complex<double>;
using CMat = Mat<cdouble>;
using CVec = Vec<cdouble>;

using Dims3 = std::array<Eigen::Index, 3>;

/**
 * Dense order-3 tensor.
 *
 * Entries are stored column-major, i.e. element (i, j, k) lives at
 * i + d1 * (j + d2 * k). With this layout the mode-1 unfolding is a plain
 * reshape of the storage, and frontal slice k is a contiguous d1 x d2 block.
 *
 * Unfolding conventions (0-based):
 *   mode 1: d1 x (d2*d3), column j + d2*k      ([T_1 T_2 ... T_K])
 *   mode 2: d2 x (d1*d3), column i + d1*k      ([T_1^T ... T_K^T])
 *   mode 3: d3 x (d1*d2), column i + d1*j      (row k = vec(T_k)^T)
 *
 * For a PARAFAC tensor with factors A, B, C these give
 * A (C kr B)^T, B (C kr A)^T and C (B kr A)^T respectively.
 */
template <typename Scalar>
class Tensor3
{
public:
    Tensor3() = default;

    Tensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index d3)
        : dims_{d1, d2, d3}, data_(Vec<Scalar>::Zero(d1 * d2 * d3))
    {
        if (d1 < 1 || d2 < 1 || d3 < 1)
            throw UsageError("Tensor3: all dimensions must be positive");
    }

    explicit Tensor3(const Dims3 &dims) : Tensor3(dims[0], dims[1], dims[2]) {}

    static Tensor3 Zero(const Dims3 &dims) { return Tensor3(dims); }

    Eigen::Index dim(int mode) const
    {
        if (mode < 1 || mode > 3)
            throw UsageError("Tensor3::dim: mode must be 1, 2 or 3");
        return dims_[mode - 1];
    }
    const Dims3 &dims() const { return dims_; }
    Eigen::Index size() const { return data_.size(); }

    Scalar &operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k)
    {
        return data_[i + dims_[0] * (j + dims_[1] * k)];
    }
    const Scalar &operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const
    {
        return data_[i + dims_[0] * (j + dims_[1] * k)];
    }

    // Frontal slice k as a d1 x d2 view.
    auto slice(Eigen::Index k)
    {
        return Eigen::Map<Mat<Scalar>>(data_.data() + k * dims_[0] * dims_[1], dims_[0], dims_[1]);
    }
    auto slice(Eigen::Index k) const
    {
        return Eigen::Map<const Mat<Scalar>>(data_.data() + k * dims_[0] * dims_[1], dims_[0], dims_[1]);
    }

    const Vec<Scalar> &data() const { return data_; }
    Vec<Scalar> &data() { return data_; }

    double norm() const { return data_.norm(); }
    double squaredNorm() const { return data_.squaredNorm(); }

    bool allFinite() const { return data_.allFinite(); }

    Tensor3 operator+(const Tensor3 &other) const
    {
        requireSameDims(other);
        Tensor3 out(*this);
        out.data_ += other.data_;
        return out;
    }
    Tensor3 operator-(const Tensor3 &other) const
    {
        requireSameDims(other);
        Tensor3 out(*this);
        out.data_ -= other.data_;
        return out;
    }

    bool operator==(const Tensor3 &other) const
    {
        return dims_ == other.dims_ && data_ == other.data_;
    }

private:
    void requireSameDims(const Tensor3 &other) const
    {
        if (dims_ != other.dims_)
            throw UsageError("Tensor3: dimension mismatch");
    }

    Dims3 dims_{0, 0, 0};
    Vec<Scalar> data_;
};

using CTensor3 = Tensor3<cdouble>;

namespace detail
{
inline void checkMode(int mode, const char *who)
{
    if (mode < 1 || mode > 3)
        throw UsageError(std::string(who) + ": mode must be 1, 2 or 3, got " + std::to_string(mode));
}
} // namespace detail

template <typename Scalar>
Mat<Scalar> unfold(const Tensor3<Scalar> &t, int mode)
{
    detail::checkMode(mode, "unfold");
    const auto [d1, d2, d3] = t.dims();
    switch (mode)
    {
    case 1:
        return Eigen::Map<const Mat<Scalar>>(t.data().data(), d1, d2 * d3);
    case 2:
    {
        Mat<Scalar> out(d2, d1 * d3);
        for (Eigen::Index k = 0; k < d3; ++k)
            out.middleCols(k * d1, d1) = t.slice(k).transpose();
        return out;
    }
    default:
        return Eigen::Map<const Mat<Scalar>>(t.data().data(), d1 * d2, d3).transpose();
    }
}

template <typename Scalar>
Tensor3<Scalar> fold(const Mat<Scalar> &m, int mode, const Dims3 &dims)
{
    detail::checkMode(mode, "fold");
    const auto [d1, d2, d3] = dims;
    const Eigen::Index rows = dims[mode - 1];
    if (m.rows() != rows || m.cols() * rows != d1 * d2 * d3)
        throw UsageError("fold: matrix shape inconsistent with mode and target dimensions");

    Tensor3<Scalar> t(dims);
    switch (mode)
    {
    case 1:
        t.data() = Eigen::Map<const Vec<Scalar>>(m.data(), m.size());
        break;
    case 2:
        for (Eigen::Index k = 0; k < d3; ++k)
            t.slice(k) = m.middleCols(k * d1, d1).transpose();
        break;
    default:
    {
        const Mat<Scalar> mt = m.transpose();
        t.data() = Eigen::Map<const Vec<Scalar>>(mt.data(), mt.size());
        break;
    }
    }
    return t;
}

// T x_mode M: unfold(result, mode) == M * unfold(t, mode).
template <typename Scalar>
Tensor3<Scalar> nModeProduct(const Tensor3<Scalar> &t, const Mat<Scalar> &m, int mode)
{
    detail::checkMode(mode, "nModeProduct");
    if (m.cols() != t.dim(mode))
        throw UsageError("nModeProduct: matrix columns (" + std::to_string(m.cols()) +
                         ") must equal tensor size along mode " + std::to_string(mode) + " (" +
                         std::to_string(t.dim(mode)) + ")");
    Dims3 dims = t.dims();
    dims[mode - 1] = m.rows();
    return fold<Scalar>(m * unfold(t, mode), mode, dims);
}

// Superdiagonal r x r x r tensor.
template <typename Scalar = cdouble>
Tensor3<Scalar> identityTensor(Eigen::Index r)
{
    if (r < 1)
        throw UsageError("identityTensor: rank must be positive");
    Tensor3<Scalar> t(r, r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        t(i, i, i) = Scalar(1);
    return t;
}

} // namespace bdris
