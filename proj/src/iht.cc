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

#include "slr/iht.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "slr/error.h"

namespace slr
{

namespace
{

std::vector<Index> nonzero_rows(const DenseMatrix& X)
{
    std::vector<Index> rows;
    for (Index i = 0; i < X.rows(); ++i)
    {
        if (X.row(i).squaredNorm() > 0.0)
        {
            rows.push_back(i);
        }
    }
    return rows;
}

// Tangent space projection at a rank-r matrix supported on `support`. The
// factors are taken from the SVD of the support rows only, so supp(U) lies
// inside the support by construction.
DenseMatrix tangent_gradient(const DenseMatrix& X, const DenseMatrix& G,
                             const std::vector<Index>& support, Index r)
{
    const Index ns = static_cast<Index>(support.size());
    if (ns == 0)
    {
        return G;
    }
    DenseMatrix rows(ns, X.cols());
    for (Index q = 0; q < ns; ++q)
    {
        rows.row(q) = X.row(support[static_cast<std::size_t>(q)]);
    }
    const SvdFactors f = full_svd(rows);
    const Index k = std::min(r, f.size());
    DenseMatrix U = DenseMatrix::Zero(X.rows(), k);
    for (Index q = 0; q < ns; ++q)
    {
        U.row(support[static_cast<std::size_t>(q)]) = f.U.row(q).head(k);
    }
    return project_tangent(G, U, f.V.leftCols(k), support);
}

}  // namespace

DenseMatrix project_rank_sparse(const DenseMatrix& Z, Index r, Index s)
{
    const DenseMatrix H = hard_threshold_rows(Z, s);
    DenseMatrix T = truncate_rank(H, std::min(r, std::min(H.rows(), H.cols())));
    for (Index i = 0; i < H.rows(); ++i)
    {
        if (H.row(i).squaredNorm() == 0.0)
        {
            T.row(i).setZero();
        }
    }
    return T;
}

RecoveryResult run_iht(const MeasurementOperator& op, const Vector& y, const IhtConfig& config,
                       const std::optional<DenseMatrix>& ground_truth)
{
    if (config.r < 1 || config.r > std::min(op.n1(), op.n2()) || config.s < 1 ||
        config.s > op.n1())
    {
        throw InvalidDimension("run_iht: model orders out of range");
    }
    if (config.max_iter < 1 || (config.step_size && !(*config.step_size >= 0.0)))
    {
        throw InvalidArgument("run_iht: invalid iteration limit or step size");
    }
    if (y.size() != op.num_measurements())
    {
        throw InvalidDimension("run_iht: measurement vector has wrong length");
    }
    if (ground_truth && (ground_truth->rows() != op.n1() || ground_truth->cols() != op.n2()))
    {
        throw InvalidDimension("run_iht: ground truth shape does not match the operator");
    }

    const auto clock_start = std::chrono::steady_clock::now();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    RecoveryResult result;
    DenseMatrix X;
    if (config.initial_point)
    {
        if (config.initial_point->rows() != op.n1() || config.initial_point->cols() != op.n2())
        {
            throw InvalidDimension("run_iht: initial point has the wrong shape");
        }
        X = *config.initial_point;
    }
    else
    {
        X = project_rank_sparse(op.adjoint(y) / op.isometry_scale(), config.r, config.s);
    }
    Vector residual = op.apply(X) - y;
    const double initial_residual = std::max(residual.norm(), 1e-300);

    for (Index k = 1; k <= config.max_iter; ++k)
    {
        const DenseMatrix G = op.adjoint(residual);
        double mu = 0.0;
        if (config.step_size)
        {
            mu = *config.step_size;
        }
        else
        {
            DenseMatrix D = tangent_gradient(X, G, nonzero_rows(X), config.r);
            double denom = op.apply(D).squaredNorm();
            if (!(denom > 0.0))
            {
                D = G;
                denom = op.apply(D).squaredNorm();
            }
            mu = denom > 0.0 ? D.squaredNorm() / denom : 0.0;
        }

        const DenseMatrix X_next = project_rank_sparse(X - mu * G, config.r, config.s);
        residual = op.apply(X_next) - y;

        IterateRecord rec;
        rec.k = k;
        rec.eps = rec.delta = nan;
        rec.r_k = config.r;
        rec.s_k = config.s;
        const double nx = X_next.norm();
        rec.rel_change = nx > 0.0 ? (X_next - X).norm() / nx : 0.0;
        rec.F_lr = rec.F_sp = rec.F = nan;
        rec.rel_error = ground_truth ? rel_frobenius_error(X_next, *ground_truth) : nan;
        rec.wall_time_ms =
            config.record_timing
                ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            clock_start)
                      .count()
                : 0.0;
        result.trace.push_back(rec);

        X = X_next;
        result.X_final = X;
        result.iterations = k;
        if (!std::isfinite(residual.norm()) ||
            residual.norm() > config.divergence_factor * initial_residual)
        {
            result.reason = Termination::kDiverged;
            return result;
        }
        if (rec.rel_change < config.tol)
        {
            result.reason = Termination::kTolerance;
            return result;
        }
    }
    result.reason = Termination::kMaxIter;
    return result;
}

}  // namespace slr
