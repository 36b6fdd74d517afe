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

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace slr
{

using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD X = U diag(sigma) V^T with k = min(n1, n2) triplets.
struct SvdFactors
{
    DenseMatrix U;  // n1 x k, orthonormal columns
    Vector sigma;   // k, nonincreasing, >= 0
    DenseMatrix V;  // n2 x k, orthonormal columns

    Index size() const { return sigma.size(); }

    // Number of singular values above rel_tol * sigma_1.
    Index numeric_rank(double rel_tol) const;
};

/// Full (thin) SVD via bidiagonalization + divide and conquer.
SvdFactors full_svd(const DenseMatrix& X);

/// Euclidean norms of the rows of X.
Vector row_norms(const DenseMatrix& X);

/// Frobenius inner product <A, B> = trace(A^T B).
double frobenius_inner(const DenseMatrix& A, const DenseMatrix& B);

/// Number of rows with norm above rel_tol * (largest row norm).
Index numeric_row_support(const DenseMatrix& X, double rel_tol);

struct GroundTruth
{
    DenseMatrix X_star;          // unit Frobenius norm
    std::vector<Index> support;  // sorted row indices, size s
    Index rank = 0;
    Index row_sparsity = 0;
};

/**
 * @brief Random rank-r, s-row-sparse matrix of unit Frobenius norm.
 *
 * X = U diag(d) V^T / ||U diag(d) V^T||_F where U has s nonzero rows at a
 * uniformly random location, and the nonzero entries of U, d and V are i.i.d.
 * standard normal. Draw order from Rng(seed): support indices, the s x r block
 * of U (row by row, support rows ascending), d, then V (row by row).
 * Degenerate draws (rank or support deficiency) are discarded and redrawn
 * from the same stream.
 */
GroundTruth generate_ground_truth(Index n1, Index n2, Index r, Index s, std::uint64_t seed);

/// i-th largest row norm (1-based i); equal norms keep row-index order.
double rho(const DenseMatrix& X, Index i);

/// Row indices ordered by nonincreasing norm, ties by smaller index first.
std::vector<Index> rows_by_norm(const DenseMatrix& X);

/// H_s: keep the s rows of largest norm, zero the rest.
DenseMatrix hard_threshold_rows(const DenseMatrix& X, Index s);

/// T_r: best rank-r approximation in Frobenius norm.
DenseMatrix truncate_rank(const DenseMatrix& X, Index r);

/**
 * Orthogonal projection onto the tangent space T_{U,V}:
 *   P(Z) = U U^T Z + Z V V^T - U U^T Z V V^T,
 * or onto T_{U,V,S} when a row support is given:
 *   P(Z) = U U^T Z + P_S Z V V^T - U U^T Z V V^T.
 * Throws InvalidArgument if U or V deviates from orthonormality by > 1e-8,
 * or if U has nonzero rows outside S.
 */
DenseMatrix project_tangent(const DenseMatrix& Z, const DenseMatrix& U, const DenseMatrix& V,
                            const std::optional<std::vector<Index>>& support = std::nullopt);

/// ||X - X_ref||_F / ||X_ref||_F. Throws InvalidArgument for a zero reference.
double rel_frobenius_error(const DenseMatrix& X, const DenseMatrix& X_ref);

}  // namespace slr
