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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <sstream>

#include "bdris/tensor.hpp"

namespace bdris
{

template <typename Scalar>
struct PseudoInverse
{
    Mat<Scalar> pinv;
    Eigen::Index rank = 0;
};

/**
 * Moore-Penrose pseudo-inverse through a thin SVD. Singular values below
 * max(rows, cols) * eps * sigma_max are treated as zero; the number kept is
 * returned as the effective rank.
 */
template <typename Derived>
PseudoInverse<typename Derived::Scalar> pseudoInverse(const Eigen::MatrixBase<Derived> &m)
{
    using Scalar = typename Derived::Scalar;
    using Real = typename Eigen::NumTraits<Scalar>::Real;

    PseudoInverse<Scalar> out;
    if (m.size() == 0)
    {
        out.pinv = Mat<Scalar>::Zero(m.cols(), m.rows());
        return out;
    }
    if (!m.allFinite())
        throw NumericalError("pseudoInverse: input contains non-finite entries");

    Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
    {
        std::ostringstream msg;
        msg << "pseudoInverse: SVD did not converge for " << m.rows() << "x" << m.cols()
            << " input (Frobenius norm " << m.norm() << ")";
        throw NumericalError(msg.str());
    }

    const auto &s = svd.singularValues();
    const Real smax = s.size() ? s[0] : Real(0);
    const Real tol = Real(std::max(m.rows(), m.cols())) * std::numeric_limits<Real>::epsilon() * smax;

    Vec<Real> inv = Vec<Real>::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
    {
        if (s[i] > tol && s[i] > Real(0))
        {
            inv[i] = Real(1) / s[i];
            ++out.rank;
        }
    }
    out.pinv = svd.matrixV() * inv.template cast<Scalar>().asDiagonal() * svd.matrixU().adjoint();
    return out;
}

/**
 * Pseudo-inverse of a Hermitian positive semi-definite matrix (a Gram
 * matrix M M^H) through its eigendecomposition. Eigenvalues at or below
 * n * eps * lambda_max are dropped; that is the resolution limit of a
 * squared system, so the reported rank is the numerical rank of M at
 * relative level sqrt(n * eps).
 */
template <typename Derived>
PseudoInverse<typename Derived::Scalar> gramPseudoInverse(const Eigen::MatrixBase<Derived> &gram)
{
    using Scalar = typename Derived::Scalar;
    using Real = typename Eigen::NumTraits<Scalar>::Real;

    if (gram.rows() != gram.cols())
        throw UsageError("gramPseudoInverse: matrix must be square");
    if (!gram.allFinite())
        throw NumericalError("gramPseudoInverse: input contains non-finite entries");

    PseudoInverse<Scalar> out;
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(gram);
    if (eig.info() != Eigen::Success)
        throw NumericalError("gramPseudoInverse: eigendecomposition did not converge");

    const auto &lambda = eig.eigenvalues(); // ascending
    const Real lmax = lambda.size() ? lambda[lambda.size() - 1] : Real(0);
    const Real tol = Real(gram.rows()) * std::numeric_limits<Real>::epsilon() * lmax;
    Vec<Real> inv = Vec<Real>::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
    {
        if (lambda[i] > tol && lambda[i] > Real(0))
        {
            inv[i] = Real(1) / lambda[i];
            ++out.rank;
        }
    }
    const auto &V = eig.eigenvectors();
    out.pinv = V * inv.template cast<Scalar>().asDiagonal() * V.adjoint();
    return out;
}

template <typename Scalar>
struct Rank1Factors
{
    Vec<Scalar> u;
    Vec<Scalar> v;
    typename Eigen::NumTraits<Scalar>::Real sigma1{};
    typename Eigen::NumTraits<Scalar>::Real sigma2{}; // 0 when the matrix has a single singular value
};

/// Best rank-1 approximation m ~ u * v^T from the leading singular triplet,
/// with sqrt(sigma1) put on each side.
template <typename Derived>
Rank1Factors<typename Derived::Scalar> rank1Factor(const Eigen::MatrixBase<Derived> &m)
{
    using Scalar = typename Derived::Scalar;
    using Real = typename Eigen::NumTraits<Scalar>::Real;

    if (m.size() == 0 || m.norm() == Real(0))
        throw DegenerateInputError("rank1Factor: zero matrix has no rank-1 factorisation");
    if (!m.allFinite())
        throw NumericalError("rank1Factor: input contains non-finite entries");

    Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("rank1Factor: SVD did not converge");

    Rank1Factors<Scalar> out;
    const auto &s = svd.singularValues();
    out.sigma1 = s[0];
    out.sigma2 = s.size() > 1 ? s[1] : Real(0);
    const Real root = std::sqrt(out.sigma1);
    out.u = root * svd.matrixU().col(0);
    out.v = root * svd.matrixV().col(0).conjugate();
    return out;
}

} // namespace bdris
