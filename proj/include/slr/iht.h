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

#include <optional>

#include "slr/core_model.h"
#include "slr/measurement.h"
#include "slr/trace.h"

namespace slr
{

/**
 * @brief Iterative hard thresholding onto rank-r, s-row-sparse matrices.
 *
 * This is a plain projected-gradient baseline built from H_s and T_r. It is
 * not a reimplementation of any published Riemannian or power-factorization
 * method.
 */
struct IhtConfig
{
    Index r = 1;
    Index s = 1;
    // Fixed step; when empty the step is chosen by exact line search along
    // the gradient projected onto the tangent space at the current iterate.
    std::optional<double> step_size;
    Index max_iter = 2000;
    double tol = 1e-10;  // on ||X_{k+1} - X_k||_F / ||X_{k+1}||_F
    // Abort when ||A(X) - y|| exceeds this multiple of the initial residual.
    double divergence_factor = 1e3;
    bool record_timing = true;
    // Overrides the spectral initialization.
    std::optional<DenseMatrix> initial_point;
};

/// T_r(H_s(Z)), with rows outside the kept support set exactly to zero.
DenseMatrix project_rank_sparse(const DenseMatrix& Z, Index r, Index s);

/**
 * X_0 = T_r(H_s(A^*(y) / scale)) with scale = op.isometry_scale() unless an
 * initial point is given, then
 * X_{k+1} = T_r(H_s(X_k - mu_k A^*(A(X_k) - y))).
 * Trace rows carry r and s as r_k, s_k; smoothing and objective columns are NaN.
 */
RecoveryResult run_iht(const MeasurementOperator& op, const Vector& y, const IhtConfig& config,
                       const std::optional<DenseMatrix>& ground_truth = std::nullopt);

}  // namespace slr
