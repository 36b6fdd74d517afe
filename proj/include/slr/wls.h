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

#include "slr/core_model.h"
#include "slr/measurement.h"
#include "slr/weight_operator.h"

namespace slr
{

enum class WlsMethod
{
    // Eigendecomposition of W in a rotated basis, with the near-null part of W
    // handled as a regularized least-squares problem. Stays accurate when W
    // spans twenty or more orders of magnitude.
    kDirect,
    // Conjugate gradients on (A W^{-1} A^*) lambda = y with W^{-1} applied
    // through Sherman-Morrison-Woodbury. Only reliable while W is moderately
    // conditioned; it throws ConvergenceError otherwise.
    kConjugateGradient,
};

struct WlsOptions
{
    WlsMethod method = WlsMethod::kDirect;
    double tol = 1e-12;  // relative residual target for the constraint
    // Eigenvalues of W below this threshold are treated as the near-null part
    // in the direct method.
    double split_threshold = 1e-4;
    int refinement_steps = 3;
    // CG only: cap on iterations (0 means 10 * number of measurements).
    Index max_cg_iterations = 0;
    // CG only: starting point for lambda, in the whitened coordinates.
    std::optional<Vector> initial_lambda;
    // Number of random kernel directions used for the reported orthogonality.
    int kernel_probes = 4;
    std::uint64_t probe_seed = 0x5EEDULL;
};

struct WlsSolution
{
    DenseMatrix X;
    double constraint_residual = 0.0;    // ||A(X) - y|| / ||y||
    double kernel_orthogonality = 0.0;   // max |<W(X), Xi>| / (||W(X)|| ||Xi||)
    Index iterations = 0;                // CG iterations, or refinement steps
    bool regularized = false;            // rank-deficiency fallback was used
    Vector lambda;                       // whitened multiplier (CG path only)
};

/**
 * @brief Reusable solver for min <X, W(X)> subject to A(X) = y.
 *
 * Construction materializes A once and whitens it: with A A^* = E L E^T and
 * eigenvalues below 1e-12 * max discarded, the rows of L^{-1/2} E^T A are
 * orthonormal. Redundant or zero measurements (as in the real/imaginary split
 * of Fourier data) drop out here. Every solve then works with the whitened
 * operator; the minimizer is unchanged for consistent y.
 */
class WlsSolver
{
   public:
    explicit WlsSolver(const MeasurementOperator& op);

    WlsSolution solve(const Vector& y, const WeightState& ws,
                      const WlsOptions& options = WlsOptions()) const;

    Index n1() const { return n1_; }
    Index n2() const { return n2_; }
    Index num_measurements() const { return m_; }

    /// Number of independent measurements kept after whitening.
    Index effective_rank() const { return whitened_t_.cols(); }

    /// Orthogonal projection of Z onto ker A.
    DenseMatrix project_kernel(const DenseMatrix& Z) const;

    /// max over `probes` random kernel directions of |<W(X), Xi>| / (||W(X)|| ||Xi||).
    double kernel_orthogonality(const DenseMatrix& X, const WeightState& ws, int probes,
                                std::uint64_t seed) const;

   private:
    Vector whiten(const Vector& y) const;
    Vector apply_whitened(const DenseMatrix& X) const;

    WlsSolution solve_direct(const Vector& y_w, const WeightState& ws,
                             const WlsOptions& options) const;
    WlsSolution solve_cg(const Vector& y_w, const WeightState& ws,
                         const WlsOptions& options) const;

    Index n1_;
    Index n2_;
    Index m_;
    DenseMatrix whitened_t_;  // n1*n2 x m', columns orthonormal
    DenseMatrix range_basis_;  // m x m', kept eigenvectors of A A^*
    Vector inv_root_;          // m', their eigenvalues^{-1/2}
    const MeasurementOperator* op_;
};

/// One-shot convenience wrapper around WlsSolver.
WlsSolution solve_wls(const MeasurementOperator& op, const Vector& y, const WeightState& ws,
                      const WlsOptions& options = WlsOptions());

}  // namespace slr
