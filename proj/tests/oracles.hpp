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

// Reference implementations written straight from the index definitions.
// They deliberately avoid the library's products and unfoldings so that a
// convention error in the library cannot cancel out in a test.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "bdris/tensor.hpp"

namespace oracle
{

using bdris::CMat;
using bdris::CTensor3;
using bdris::CVec;
using cd = std::complex<double>;

inline CMat randomMatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    CMat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = cd(n(rng), n(rng));
    return m;
}

inline CTensor3 randomTensor(Eigen::Index a, Eigen::Index b, Eigen::Index c, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    CTensor3 t(a, b, c);
    for (Eigen::Index k = 0; k < c; ++k)
        for (Eigen::Index j = 0; j < b; ++j)
            for (Eigen::Index i = 0; i < a; ++i)
                t(i, j, k) = cd(n(rng), n(rng));
    return t;
}

// Entry-by-entry: (a (x) b)(i*rb + k, j*cb + l) = a(i, j) b(k, l).
inline CMat kron(const CMat &a, const CMat &b)
{
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline CMat khatriRao(const CMat &a, const CMat &b)
{
    CMat out(a.rows() * b.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.cols(); ++r)
        out.col(r) = kron(a.col(r), b.col(r));
    return out;
}

inline CVec vec(const CMat &m)
{
    CVec v(m.size());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            v(j * m.rows() + i) = m(i, j);
    return v;
}

// unfold 1: column j + J k;  unfold 2: column i + I k;  unfold 3: column i + I j
inline CMat unfold(const CTensor3 &t, int mode)
{
    const auto I = t.dim(1), J = t.dim(2), K = t.dim(3);
    CMat out;
    if (mode == 1)
        out.resize(I, J * K);
    else if (mode == 2)
        out.resize(J, I * K);
    else
        out.resize(K, I * J);
    for (Eigen::Index i = 0; i < I; ++i)
        for (Eigen::Index j = 0; j < J; ++j)
            for (Eigen::Index k = 0; k < K; ++k)
            {
                if (mode == 1)
                    out(i, j + J * k) = t(i, j, k);
                else if (mode == 2)
                    out(j, i + I * k) = t(i, j, k);
                else
                    out(k, i + I * j) = t(i, j, k);
            }
    return out;
}

// Slice-wise PARAFAC: T_k = A diag(C(k, :)) B^T.
inline CTensor3 parafac(const CMat &A, const CMat &B, const CMat &C)
{
    CTensor3 t(A.rows(), B.rows(), C.rows());
    for (Eigen::Index k = 0; k < C.rows(); ++k)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < B.rows(); ++j)
            {
                cd s = 0.0;
                for (Eigen::Index r = 0; r < A.cols(); ++r)
                    s += A(i, r) * B(j, r) * C(k, r);
                t(i, j, k) = s;
            }
    return t;
}

inline CMat blockDiagonal(const std::vector<CMat> &blocks)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto &b : blocks)
    {
        rows += b.rows();
        cols += b.cols();
    }
    CMat out = CMat::Zero(rows, cols);
    Eigen::Index r0 = 0, c0 = 0;
    for (const auto &b : blocks)
    {
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j)
                out(r0 + i, c0 + j) = b(i, j);
        r0 += b.rows();
        c0 += b.cols();
    }
    return out;
}

// Unitary DFT column block with entry exp(-2 pi i t m / T) / sqrt(T).
inline CMat dftColumns(Eigen::Index T, Eigen::Index cols)
{
    CMat out(T, cols);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index m = 0; m < cols; ++m)
            out(t, m) = std::exp(cd(0.0, -2.0 * std::numbers::pi * double(t * m) / double(T))) / std::sqrt(double(T));
    return out;
}

inline double relErr(const CMat &a, const CMat &b)
{
    const double n = b.norm();
    return n > 0 ? (a - b).norm() / n : (a - b).norm();
}

} // namespace oracle
