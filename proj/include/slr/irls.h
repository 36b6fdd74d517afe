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
#include "slr/objective.h"
#include "slr/trace.h"
#include "slr/wls.h"

namespace slr
{

struct IrlsConfig
{
    Index r_tilde = 1;
    Index s_tilde = 1;
    Index max_iter = 250;
    double tol_rel_change = 1e-10;
    WlsOptions wls;
    // Floors for eps and delta, relative to sigma_1 and the largest row norm
    // of the first iterate.
    double eps_floor = 1e-14;
    double delta_floor = 1e-14;
    bool trace_objective = true;
    bool record_timing = true;
};

struct SmoothingUpdate
{
    SmoothingParams params;
    bool eps_clamped = false;
    bool delta_clamped = false;
};

/**
 * eps_k = max(eps_floor, min(eps_prev, sigma_{r~+1}(X))),
 * delta_k = max(delta_floor, min(delta_prev, rho_{s~+1}(X))).
 * The printed update rule indexes the singular value by s~; the step it
 * implements computes the (r~+1)-st singular value, which is used here.
 * Floors are absolute. A missing (r~+1)-st singular value or row counts as 0.
 */
SmoothingUpdate update_smoothing(const Vector& sigma, const Vector& row_norms, Index r_tilde,
                                 Index s_tilde, const SmoothingParams& previous, double eps_floor,
                                 double delta_floor);

SmoothingUpdate update_smoothing(const DenseMatrix& X, Index r_tilde, Index s_tilde,
                                 const SmoothingParams& previous, double eps_floor,
                                 double delta_floor);

/**
 * Runs the reweighting loop from W = Id, eps = delta = infinity. Each
 * iteration solves the weighted least-squares problem, updates the smoothing,
 * rebuilds the weight and records F_{eps_k, delta_k}(X_k).
 * Stops when the relative change drops below tol, both smoothing parameters
 * sit at their floors, or after max_iter iterations.
 */
RecoveryResult run_irls(const MeasurementOperator& op, const Vector& y, const IrlsConfig& config,
                        const std::optional<DenseMatrix>& ground_truth = std::nullopt);

/// Same, reusing a solver that has already whitened the operator.
RecoveryResult run_irls(const WlsSolver& solver, const MeasurementOperator& op, const Vector& y,
                        const IrlsConfig& config,
                        const std::optional<DenseMatrix>& ground_truth = std::nullopt);

struct MmStepReport
{
    double F_next = 0.0;  // F_{eps,delta}(X_next)
    double Q_next = 0.0;  // Q_lr(X_next | X_prev) + Q_sp(X_next | X_prev)
    double F_prev = 0.0;  // F_{eps,delta}(X_prev)
    double majorization_slack = 0.0;  // Q_next - F_next
    double descent_slack = 0.0;       // F_prev - Q_next
    bool ok = true;
};

/// Checks F(X_next) <= Q(X_next | X_prev) <= F(X_prev); violations beyond
/// `slack` (absolute) are reported through `ok`, never thrown.
MmStepReport check_mm_step(const DenseMatrix& X_prev, const DenseMatrix& X_next,
                           const SmoothingParams& params, double slack = 1e-9);

}  // namespace slr
