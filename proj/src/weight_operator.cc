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

#include "slr/weight_operator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slr/error.h"

namespace slr
{

namespace
{

// A singular value (or row norm) within this relative distance of the
// smoothing parameter counts as "not above" it.
constexpr double kActiveMargin = 1e-12;

bool above(double value, double threshold)
{
    if (std::isinf(threshold))
    {
        return false;
    }
    return value > threshold * (1.0 + kActiveMargin);
}

void check_smoothing(double eps, double delta)
{
    if (!(eps > 0.0) || !(delta > 0.0))
    {
        throw InvalidArgument("weight operator: eps and delta must be positive (or infinite)");
    }
}

void check_shape(const WeightState& ws, const DenseMatrix& Z)
{
    if (Z.rows() != ws.n1 || Z.cols() != ws.n2)
    {
        throw InvalidDimension("weight operator: argument shape mismatch");
    }
}

}  // namespace

WeightState build_weight(const DenseMatrix& X, double eps, double delta)
{
    return build_weight(full_svd(X), row_norms(X), eps, delta);
}

WeightState build_weight(const SvdFactors& svd, const Vector& norms, double eps, double delta)
{
    check_smoothing(eps, delta);
    if (svd.U.rows() != norms.size())
    {
        throw InvalidDimension("build_weight: row norms do not match the SVD");
    }

    WeightState ws;
    ws.n1 = svd.U.rows();
    ws.n2 = svd.V.rows();
    ws.eps = eps;
    ws.delta = delta;
    ws.sigma_max = svd.size() > 0 ? svd.sigma(0) : 0.0;

    Index r = 0;
    while (r < svd.size() && above(svd.sigma(r), eps))
    {
        ++r;
    }
    ws.r_k = r;
    ws.U = svd.U.leftCols(r);
    ws.V = svd.V.leftCols(r);
    ws.sigma = svd.sigma.head(r);
    ws.lr_scale = eps / ws.sigma.array();

    ws.row_norms = norms;
    ws.sp_diag = Vector::Ones(ws.n1);
    ws.s_k = 0;
    for (Index i = 0; i < ws.n1; ++i)
    {
        if (above(norms(i), delta))
        {
            ws.sp_diag(i) = (delta / norms(i)) * (delta / norms(i));
            ++ws.s_k;
        }
    }
    return ws;
}

WeightState identity_weight(Index n1, Index n2)
{
    if (n1 < 1 || n2 < 1)
    {
        throw InvalidDimension("identity_weight: empty shape");
    }
    const double inf = std::numeric_limits<double>::infinity();
    WeightState ws;
    ws.n1 = n1;
    ws.n2 = n2;
    ws.U = DenseMatrix(n1, 0);
    ws.V = DenseMatrix(n2, 0);
    ws.sigma = Vector(0);
    ws.eps = inf;
    ws.delta = inf;
    ws.lr_scale = Vector(0);
    ws.row_norms = Vector::Zero(n1);
    ws.sp_diag = Vector::Ones(n1);
    return ws;
}

DenseMatrix apply_W_lr(const WeightState& ws, const DenseMatrix& Z)
{
    check_shape(ws, Z);
    if (ws.r_k == 0)
    {
        return Z;
    }
    // P_U Z = Z - U (I - D) U^T Z, and likewise on the right.
    const Vector one_minus_d = Vector::Ones(ws.r_k) - ws.lr_scale;
    DenseMatrix left = Z - ws.U * (one_minus_d.asDiagonal() * (ws.U.transpose() * Z));
    return left - ((left * ws.V) * one_minus_d.asDiagonal()) * ws.V.transpose();
}

DenseMatrix apply_W_sp(const WeightState& ws, const DenseMatrix& Z)
{
    check_shape(ws, Z);
    return ws.sp_diag.asDiagonal() * Z;
}

DenseMatrix apply_W(const WeightState& ws, const DenseMatrix& Z)
{
    return apply_W_lr(ws, Z) + apply_W_sp(ws, Z);
}

double weight_lower_bound(const WeightState& ws)
{
    const double sp = ws.sp_diag.size() > 0 ? ws.sp_diag.minCoeff() : 1.0;
    double lr = 1.0;
    if (ws.r_k > 0)
    {
        lr = ws.lr_scale(0) * ws.lr_scale(0);
    }
    return sp + lr;
}

// ---------------------------------------------------------------------------

WeightInverse::WeightInverse(const WeightState& ws) : ws_(ws)
{
    column_blocks_.reserve(static_cast<std::size_t>(ws.r_k));
    for (Index j = 0; j < ws.r_k; ++j)
    {
        column_blocks_.push_back(make_block(ws.lr_scale(j)));
    }
    perp_block_ = make_block(1.0);
}

WeightInverse::Block WeightInverse::make_block(double c) const
{
    const WeightState& ws = ws_;
    Block block;
    const Vector b = ws.sp_diag.array() + c;
    block.b_inv = b.cwiseInverse();
    if (ws.r_k == 0)
    {
        return block;
    }
    const Vector d = ws.lr_scale;
    const Vector root = (Vector::Ones(ws.r_k) - d).cwiseSqrt();  // (I - D)^{1/2}
    const Vector g = ws.sp_diag.cwiseProduct(block.b_inv);

    const DenseMatrix Ur = ws.U * root.asDiagonal();
    DenseMatrix K = Ur.transpose() * g.asDiagonal() * Ur;
    K.diagonal() += d;
    block.K_llt.compute(K);
    if (block.K_llt.info() != Eigen::Success)
    {
        throw ResourceError("WeightInverse: capacity matrix is not positive definite");
    }
    block.Y = block.b_inv.asDiagonal() * Ur * std::sqrt(c);
    return block;
}

DenseMatrix WeightInverse::solve_block(const Block& block, const DenseMatrix& Z) const
{
    DenseMatrix out = block.b_inv.asDiagonal() * Z;
    if (ws_.r_k > 0)
    {
        out += block.Y * block.K_llt.solve(block.Y.transpose() * Z);
    }
    return out;
}

DenseMatrix WeightInverse::apply(const DenseMatrix& Z) const
{
    const WeightState& ws = ws_;
    check_shape(ws, Z);
    if (ws.r_k == 0)
    {
        return solve_block(perp_block_, Z);
    }
    const DenseMatrix ZV = Z * ws.V;
    DenseMatrix out = solve_block(perp_block_, Z - ZV * ws.V.transpose());
    for (Index j = 0; j < ws.r_k; ++j)
    {
        const Vector col = solve_block(column_blocks_[static_cast<std::size_t>(j)], ZV.col(j));
        out.noalias() += col * ws.V.col(j).transpose();
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace
{

DenseMatrix inverse_by_cg(const WeightState& ws, const DenseMatrix& Z, double tol)
{
    // Jacobi preconditioner: diag(W)_{ik} = D_sp,i + [P_U]_ii [P_V]_kk.
    Vector pu = Vector::Ones(ws.n1);
    Vector pv = Vector::Ones(ws.n2);
    if (ws.r_k > 0)
    {
        const Vector dm1 = ws.lr_scale.array() - 1.0;
        pu += ws.U.cwiseAbs2() * dm1;
        pv += ws.V.cwiseAbs2() * dm1;
    }
    DenseMatrix diag = pu * pv.transpose();
    diag.colwise() += ws.sp_diag;
    const DenseMatrix inv_diag = diag.cwiseInverse();

    const double target = tol * Z.norm();
    DenseMatrix X = DenseMatrix::Zero(ws.n1, ws.n2);
    DenseMatrix R = Z;
    if (R.norm() <= target)
    {
        return X;
    }
    DenseMatrix P = inv_diag.cwiseProduct(R);
    double rz = R.cwiseProduct(P).sum();
    const Index cap = 10 * (ws.n1 + ws.n2);
    for (Index it = 1; it <= cap; ++it)
    {
        const DenseMatrix WP = apply_W(ws, P);
        const double alpha = rz / P.cwiseProduct(WP).sum();
        X += alpha * P;
        R -= alpha * WP;
        if (R.norm() <= target)
        {
            return X;
        }
        const DenseMatrix S = inv_diag.cwiseProduct(R);
        const double rz_next = R.cwiseProduct(S).sum();
        P = S + (rz_next / rz) * P;
        rz = rz_next;
    }
    const double residual = (apply_W(ws, X) - Z).norm() / std::max(Z.norm(), 1e-300);
    throw ConvergenceError("apply_W_inv: CG did not reach the tolerance", residual,
                           static_cast<int>(cap));
}

}  // namespace

DenseMatrix apply_W_inv(const WeightState& ws, const DenseMatrix& Z, double tol,
                        InverseMethod method)
{
    check_shape(ws, Z);
    if (!(tol > 0.0))
    {
        throw InvalidArgument("apply_W_inv: tol must be positive");
    }
    if (method == InverseMethod::kConjugateGradient)
    {
        return inverse_by_cg(ws, Z, tol);
    }
    return WeightInverse(ws).apply(Z);
}

}  // namespace slr
