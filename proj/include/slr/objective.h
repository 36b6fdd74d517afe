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

#include <limits>

#include "slr/core_model.h"

namespace slr
{

/// Spectral (epsilon) and row (delta) smoothing; +infinity means the fully
/// quadratic regime.
struct SmoothingParams
{
    double epsilon = std::numeric_limits<double>::infinity();
    double delta = std::numeric_limits<double>::infinity();
};

/// f_tau(t) = t^2/2 for |t| <= tau, (tau^2/2) log(e t^2 / tau^2) otherwise.
double f_tau(double t, double tau);

/// f_tau'(t) = tau^2 t / max(t^2, tau^2).
double f_tau_prime(double t, double tau);

/// Sum of f_eps over the given singular values (tiny ones count as zero).
double F_lr_from_spectrum(const Vector& sigma, double epsilon);

/// Sum of f_delta over the given row norms.
double F_sp_from_norms(const Vector& norms, double delta);

double F_lr(const DenseMatrix& X, double epsilon);
double F_sp(const DenseMatrix& X, double delta);
double F(const DenseMatrix& X, const SmoothingParams& params);

/// Row i is delta^2 X_i / max(||X_i||^2, delta^2).
DenseMatrix grad_F_sp(const DenseMatrix& X, double delta);

/// U diag(sigma_i min(eps^2 / sigma_i^2, 1)) V^T.
DenseMatrix grad_F_lr(const DenseMatrix& X, double epsilon);

/// Quadratic model F_lr(X) + <grad F_lr(X), Z - X> + 1/2 <Z - X, W_lr(Z - X)>,
/// with W_lr built from (X, epsilon).
double Q_lr(const DenseMatrix& Z, const DenseMatrix& X, double epsilon);

/// Same for the row-sparsity term.
double Q_sp(const DenseMatrix& Z, const DenseMatrix& X, double delta);

}  // namespace slr
