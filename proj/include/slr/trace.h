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

#include <iosfwd>
#include <string>
#include <vector>

#include "slr/core_model.h"

namespace slr
{

/// One row of an iterate trace. Quantities that do not apply (for example
/// the smoothing parameters of a hard-thresholding run, or the error when no
/// ground truth is known) are NaN.
struct IterateRecord
{
    Index k = 0;
    double eps = 0.0;
    double delta = 0.0;
    Index r_k = 0;
    Index s_k = 0;
    double rel_change = 0.0;
    double F_lr = 0.0;
    double F_sp = 0.0;
    double F = 0.0;
    double rel_error = 0.0;
    double wall_time_ms = 0.0;  // elapsed since the start of the run
    bool eps_clamped = false;
    bool delta_clamped = false;
};

using IterateTrace = std::vector<IterateRecord>;

enum class Termination
{
    kTolerance,
    kMaxIter,
    kSmoothingFloor,
    kDiverged,
};

std::string to_string(Termination reason);

struct RecoveryResult
{
    DenseMatrix X_final;
    Index iterations = 0;
    Termination reason = Termination::kMaxIter;
    IterateTrace trace;
};

/// Header plus one line per record, columns in IterateRecord order, floats
/// with 17 significant digits.
void write_trace_csv(std::ostream& out, const IterateTrace& trace);

/// Fit of err_{k+1} <= mu * err_k^2 over a window of consecutive iterations.
struct QuadraticRateFit
{
    bool found = false;
    Index first = 0;      // index into the error sequence of the first pair
    Index pairs = 0;      // number of consecutive (k, k+1) pairs in the window
    double mu_hat = 0.0;  // largest err_{k+1} / err_k^2 in the window
    double spread = 0.0;  // largest / smallest ratio in the window
};

struct QuadraticRateOptions
{
    double start_below = 0.1;  // only pairs with err_k at most this
    double noise_floor = 1e-13;  // and err_{k+1} at least this
    double max_spread = 10.0;
    Index min_pairs = 3;
};

/**
 * Looks for the longest run of consecutive pairs whose quotients
 * q_k = err_{k+1} / err_k^2 stay within a factor max_spread of each other and
 * whose contraction factors err_{k+1} / err_k strictly decrease (the
 * signature of a superlinear rate). Reports the first longest such window.
 */
QuadraticRateFit fit_quadratic_rate(const std::vector<double>& errors,
                                    const QuadraticRateOptions& options = {});

}  // namespace slr
