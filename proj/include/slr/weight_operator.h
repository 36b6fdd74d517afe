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

#include <vector>

#include <Eigen/Cholesky>

#include "slr/core_model.h"

namespace slr
{

/**
 * @brief Frozen weight operator W = W_lr + W_sp built from one iterate.
 *
 *   W_lr(Z) = (I + U (D - I) U^T) Z (I + V (D - I) V^T),  D = diag(eps / sigma_i)
 *   W_sp(Z) = diag(min(delta^2 / ||X_{i,:}||^2, 1)) Z
 *
 * Only the r_k singular triplets with sigma_i > eps are kept; the orthogonal
 * complements of U and V are never formed.
 */
struct WeightState
{
    Index n1 = 0;
    Index n2 = 0;
    DenseMatrix U;     // n1 x r_k
    DenseMatrix V;     // n2 x r_k
    Vector sigma;      // r_k leading singular values, all > eps
    double eps = 0.0;
    double delta = 0.0;
    Index r_k = 0;
    Index s_k = 0;
    Vector row_norms;  // n1
    Vector lr_scale;   // r_k entries eps / sigma_i, in (0, 1)
    Vector sp_diag;    // n1 entries in (0, 1]
    double sigma_max = 0.0;  // sigma_1 of the iterate (0 for the zero matrix)
};

/// Weight operator of X for smoothing (eps, delta); either may be +infinity.
WeightState build_weight(const DenseMatrix& X, double eps, double delta);

/// Same, reusing an SVD and row norms that the caller already has.
WeightState build_weight(const SvdFactors& svd, const Vector& row_norms, double eps,
                         double delta);

/// eps = delta = infinity: both parts are the identity, W = 2 Id.
WeightState identity_weight(Index n1, Index n2);

DenseMatrix apply_W_lr(const WeightState& ws, const DenseMatrix& Z);
DenseMatrix apply_W_sp(const WeightState& ws, const DenseMatrix& Z);
DenseMatrix apply_W(const WeightState& ws, const DenseMatrix& Z);

/// min(delta^2 / max_i ||X_i||^2, 1) + min(eps^2 / sigma_1^2, 1).
double weight_lower_bound(const WeightState& ws);

/**
 * @brief Exact W^{-1} via Sherman-Morrison-Woodbury.
 *
 * Splitting Z = sum_j (Z v_j) v_j^T + Z (I - V V^T), W acts column-wise as
 *   M_j  = D_sp + d_j P_U        on Z v_j,
 *   M_perp = D_sp + P_U          on Z (I - V V^T),
 * with P_U = I - U (I - D) U^T. Each M(c) = (D_sp + c I) - c U (I - D) U^T is
 * diagonal minus rank r_k, inverted through an r_k x r_k capacity matrix
 *   K(c) = D + (I - D)^{1/2} U^T diag(g) U (I - D)^{1/2},  g = D_sp / (D_sp + c),
 * which is assembled without cancellation.
 */
class WeightInverse
{
   public:
    explicit WeightInverse(const WeightState& ws);

    DenseMatrix apply(const DenseMatrix& Z) const;

   private:
    struct Block
    {
        Vector b_inv;                   // 1 / (D_sp + c)
        DenseMatrix Y;                  // B^{-1} U C^{1/2}, n1 x r_k
        Eigen::LLT<DenseMatrix> K_llt;  // capacity matrix
    };

    Block make_block(double c) const;
    DenseMatrix solve_block(const Block& block, const DenseMatrix& Z) const;

    WeightState ws_;
    std::vector<Block> column_blocks_;  // one per retained singular vector
    Block perp_block_;
};

enum class InverseMethod
{
    kWoodbury,
    kConjugateGradient,  // Jacobi-preconditioned CG in matrix space
};

/**
 * Returns W^{-1}(Z) with ||W(W^{-1}(Z)) - Z||_F <= tol ||Z||_F. The CG path
 * throws ConvergenceError after 10 (n1 + n2) iterations.
 */
DenseMatrix apply_W_inv(const WeightState& ws, const DenseMatrix& Z, double tol = 1e-12,
                        InverseMethod method = InverseMethod::kWoodbury);

}  // namespace slr
