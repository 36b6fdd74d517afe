/*
 * Copyright 2026 The slr-irls Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "slr/core_model.h"

#include <algorithm>
#include <numeric>

#include <Eigen/SVD>

#include "slr/error.h"
#include "slr/rng.h"

namespace slr
{

namespace
{

constexpr double kOrthonormalTol = 1e-8;

double gram_deviation(const DenseMatrix& Q)
{
    if (Q.cols() == 0)
    {
        return 0.0;
    }
    const DenseMatrix gram = Q.transpose() * Q;
    return (gram - DenseMatrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

Index SvdFactors::numeric_rank(double rel_tol) const
{
    if (sigma.size() == 0 || sigma(0) <= 0.0)
    {
        return 0;
    }
    const double cut = rel_tol * sigma(0);
    return (sigma.array() > cut).count();
}

SvdFactors full_svd(const DenseMatrix& X)
{
    Eigen::BDCSVD<DenseMatrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return SvdFactors{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Vector row_norms(const DenseMatrix& X) { return X.rowwise().norm(); }

double frobenius_inner(const DenseMatrix& A, const DenseMatrix& B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols())
    {
        throw InvalidDimension("frobenius_inner: shape mismatch");
    }
    return A.cwiseProduct(B).sum();
}

Index numeric_row_support(const DenseMatrix& X, double rel_tol)
{
    const Vector norms = row_norms(X);
    if (norms.size() == 0 || norms.maxCoeff() <= 0.0)
    {
        return 0;
    }
    return (norms.array() > rel_tol * norms.maxCoeff()).count();
}

GroundTruth generate_ground_truth(Index n1, Index n2, Index r, Index s, std::uint64_t seed)
{
    if (n1 < 1 || n2 < 1)
    {
        throw InvalidDimension("generate_ground_truth: empty matrix");
    }
    if (r < 1 || r > std::min(s, n2) || s > n1)
    {
        throw InvalidDimension("generate_ground_truth: need 1 <= r <= min(s, n2) and s <= n1");
    }

    Rng rng(seed);
    for (;;)
    {
        const std::vector<Index> support = rng.choose(n1, s);
        DenseMatrix U = DenseMatrix::Zero(n1, r);
        for (Index row : support)
        {
            for (Index j = 0; j < r; ++j)
            {
                U(row, j) = rng.normal();
            }
        }
        Vector d(r);
        for (Index j = 0; j < r; ++j)
        {
            d(j) = rng.normal();
        }
        const DenseMatrix V = rng.normal_matrix(n2, r);

        DenseMatrix X = U * d.asDiagonal() * V.transpose();
        const double norm = X.norm();
        if (!(norm > 0.0))
        {
            continue;
        }
        X /= norm;

        if (full_svd(X).numeric_rank(1e-12) != r)
        {
            continue;
        }
        const Vector norms = row_norms(X);
        const bool rows_ok = std::all_of(support.begin(), support.end(),
                                         [&](Index i) { return norms(i) > 0.0; });
        if (!rows_ok)
        {
            continue;
        }
        return GroundTruth{std::move(X), support, r, s};
    }
}

std::vector<Index> rows_by_norm(const DenseMatrix& X)
{
    const Vector norms = row_norms(X);
    std::vector<Index> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return norms(a) > norms(b); });
    return order;
}

double rho(const DenseMatrix& X, Index i)
{
    if (i < 1 || i > X.rows())
    {
        throw InvalidDimension("rho: index out of range");
    }
    const Vector norms = row_norms(X);
    std::vector<double> sorted(norms.data(), norms.data() + norms.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return sorted[static_cast<std::size_t>(i - 1)];
}

DenseMatrix hard_threshold_rows(const DenseMatrix& X, Index s)
{
    if (s < 0 || s > X.rows())
    {
        throw InvalidDimension("hard_threshold_rows: s out of range");
    }
    const std::vector<Index> order = rows_by_norm(X);
    DenseMatrix out = DenseMatrix::Zero(X.rows(), X.cols());
    for (Index k = 0; k < s; ++k)
    {
        const Index row = order[static_cast<std::size_t>(k)];
        out.row(row) = X.row(row);
    }
    return out;
}

DenseMatrix truncate_rank(const DenseMatrix& X, Index r)
{
    const Index k = std::min(X.rows(), X.cols());
    if (r < 0 || r > k)
    {
        throw InvalidDimension("truncate_rank: r out of range");
    }
    if (r == k)
    {
        return X;
    }
    if (r == 0)
    {
        return DenseMatrix::Zero(X.rows(), X.cols());
    }
    const SvdFactors f = full_svd(X);
    return f.U.leftCols(r) * f.sigma.head(r).asDiagonal() * f.V.leftCols(r).transpose();
}

DenseMatrix project_tangent(const DenseMatrix& Z, const DenseMatrix& U, const DenseMatrix& V,
                            const std::optional<std::vector<Index>>& support)
{
    if (U.rows() != Z.rows() || V.rows() != Z.cols() || U.cols() != V.cols())
    {
        throw InvalidDimension("project_tangent: shape mismatch");
    }
    if (gram_deviation(U) > kOrthonormalTol || gram_deviation(V) > kOrthonormalTol)
    {
        throw InvalidArgument("project_tangent: U and V must have orthonormal columns");
    }

    const DenseMatrix UtZ = U.transpose() * Z;
    const DenseMatrix ZV = Z * V;
    DenseMatrix out = U * UtZ - U * (UtZ * V) * V.transpose();
    if (!support)
    {
        out += ZV * V.transpose();
        return out;
    }

    std::vector<bool> in_support(static_cast<std::size_t>(Z.rows()), false);
    for (Index i : *support)
    {
        if (i < 0 || i >= Z.rows())
        {
            throw InvalidDimension("project_tangent: support index out of range");
        }
        in_support[static_cast<std::size_t>(i)] = true;
    }
    for (Index i = 0; i < Z.rows(); ++i)
    {
        if (!in_support[static_cast<std::size_t>(i)])
        {
            if (U.cols() > 0 && U.row(i).cwiseAbs().maxCoeff() > kOrthonormalTol)
            {
                throw InvalidArgument("project_tangent: supp(U) must lie inside S");
            }
            continue;
        }
        out.row(i) += ZV.row(i) * V.transpose();
    }
    return out;
}

double rel_frobenius_error(const DenseMatrix& X, const DenseMatrix& X_ref)
{
    if (X.rows() != X_ref.rows() || X.cols() != X_ref.cols())
    {
        throw InvalidDimension("rel_frobenius_error: shape mismatch");
    }
    const double ref = X_ref.norm();
    if (!(ref > 0.0))
    {
        throw InvalidArgument("rel_frobenius_error: zero reference");
    }
    return (X - X_ref).norm() / ref;
}

}  // namespace slr
