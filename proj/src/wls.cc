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

#include "slr/wls.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "slr/error.h"
#include "slr/rng.h"

namespace slr
{

namespace
{

// Eigenvalues of A A^* below this fraction of the largest are discarded.
constexpr double kWhiteningCut = 1e-12;
// y may have at most this relative component outside the range of A.
constexpr double kRangeTolerance = 1e-6;
// Reciprocal condition below which the Cholesky factor of the well-conditioned
// block is considered unreliable and a small shift is added.
constexpr double kMinRcond = 1e-14;

// Orthogonal n2 x n2 matrix whose leading columns are exactly V.
DenseMatrix complete_basis(const DenseMatrix& V)
{
    const Index n = V.rows();
    if (V.cols() == 0)
    {
        return DenseMatrix::Identity(n, n);
    }
    Eigen::HouseholderQR<DenseMatrix> qr(V);
    DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(n, n);
    Q.leftCols(V.cols()) = V;
    return Q;
}

// Precomputed pieces of the direct method for one weight operator.
struct EigenSplit
{
    Index n1 = 0;
    Index n2 = 0;
    Index r = 0;
    DenseMatrix QV;                  // right rotation
    std::vector<DenseMatrix> bases;  // eigenvectors of each column block
    Vector mu;                       // eigenvalues of W, in rotated coordinates
    DenseMatrix A_hat;               // N x m', whitened operator in the eigenbasis
    std::vector<Index> small;        // indices with mu < threshold
    std::vector<Index> large;        // the rest
    Eigen::LLT<DenseMatrix> M0;      // A_L diag(1/mu_L) A_L^T
    DenseMatrix H;                   // L0^{-1} A_S
    Eigen::CompleteOrthogonalDecomposition<DenseMatrix> ridge;  // [H; diag(sqrt mu_S)]
    bool regularized = false;

    Index block_of(Index column) const { return std::min(column, r); }

    // Solves min x^T diag(mu) x subject to A_hat^T x = b; returns x.
    Vector solve(const Vector& b) const
    {
        const Vector z = M0.matrixL().solve(b);
        Vector residual = z;
        Vector x = Vector::Zero(mu.size());
        if (!small.empty())
        {
            const Index ns = static_cast<Index>(small.size());
            Vector rhs = Vector::Zero(z.size() + ns);
            rhs.head(z.size()) = z;
            const Vector beta = ridge.solve(rhs);
            residual -= H * beta;
            for (Index q = 0; q < ns; ++q)
            {
                x(small[static_cast<std::size_t>(q)]) = beta(q);
            }
        }
        const Vector lambda = M0.matrixU().solve(residual);
        for (Index p : large)
        {
            x(p) = A_hat.row(p).dot(lambda) / mu(p);
        }
        return x;
    }

    DenseMatrix to_matrix(const Vector& x) const
    {
        DenseMatrix rotated(n1, n2);
        for (Index j = 0; j < n2; ++j)
        {
            rotated.col(j) = bases[static_cast<std::size_t>(block_of(j))] * x.segment(j * n1, n1);
        }
        return rotated * QV.transpose();
    }
};

DenseMatrix column_block(const WeightState& ws, double c)
{
    // D_sp + c P_U with P_U = I - U (I - D) U^T.
    DenseMatrix M = DenseMatrix::Zero(ws.n1, ws.n1);
    M.diagonal() = ws.sp_diag.array() + c;
    if (ws.r_k > 0)
    {
        const Vector one_minus_d = Vector::Ones(ws.r_k) - ws.lr_scale;
        M.noalias() -= c * ws.U * one_minus_d.asDiagonal() * ws.U.transpose();
    }
    return M;
}

EigenSplit build_split(const DenseMatrix& whitened_t, const WeightState& ws, double threshold)
{
    EigenSplit sp;
    sp.n1 = ws.n1;
    sp.n2 = ws.n2;
    sp.r = ws.r_k;
    const Index n1 = ws.n1;
    const Index n2 = ws.n2;
    const Index N = n1 * n2;
    const Index mw = whitened_t.cols();

    sp.QV = complete_basis(ws.V);
    std::vector<Vector> values;
    for (Index b = 0; b <= ws.r_k; ++b)
    {
        const double c = b < ws.r_k ? ws.lr_scale(b) : 1.0;
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(column_block(ws, c));
        sp.bases.push_back(eig.eigenvectors());
        values.push_back(eig.eigenvalues());
    }

    sp.mu.resize(N);
    for (Index j = 0; j < n2; ++j)
    {
        sp.mu.segment(j * n1, n1) = values[static_cast<std::size_t>(sp.block_of(j))];
    }

    // Rotate every measurement matrix A_i into the eigenbasis of W.
    sp.A_hat.resize(N, mw);
    DenseMatrix rotated(n1, n2);
    for (Index i = 0; i < mw; ++i)
    {
        const Eigen::Map<const DenseMatrix> Ai(whitened_t.col(i).data(), n1, n2);
        rotated.noalias() = Ai * sp.QV;
        Eigen::Map<DenseMatrix> out(sp.A_hat.col(i).data(), n1, n2);
        for (Index b = 0; b < ws.r_k; ++b)
        {
            out.col(b).noalias() = sp.bases[static_cast<std::size_t>(b)].transpose() * rotated.col(b);
        }
        const Index rest = n2 - ws.r_k;
        if (rest > 0)
        {
            out.rightCols(rest).noalias() =
                sp.bases.back().transpose() * rotated.rightCols(rest);
        }
    }

    for (Index p = 0; p < N; ++p)
    {
        (sp.mu(p) < threshold ? sp.small : sp.large).push_back(p);
    }

    DenseMatrix scaled = DenseMatrix::Zero(N, mw);
    for (Index p : sp.large)
    {
        scaled.row(p) = sp.A_hat.row(p) / std::sqrt(sp.mu(p));
    }
    DenseMatrix M0 = DenseMatrix::Zero(mw, mw);
    M0.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    scaled.resize(0, 0);
    sp.M0.compute(M0);
    if (sp.M0.info() != Eigen::Success || sp.M0.rcond() < kMinRcond)
    {
        const double shift = 1e-12 * M0.trace() / static_cast<double>(mw);
        M0.diagonal().array() += shift;
        sp.M0.compute(M0);
        sp.regularized = true;
        if (sp.M0.info() != Eigen::Success)
        {
            throw ResourceError("solve_wls: normal matrix is numerically singular");
        }
    }

    if (!sp.small.empty())
    {
        const Index ns = static_cast<Index>(sp.small.size());
        DenseMatrix G(mw, ns);
        for (Index q = 0; q < ns; ++q)
        {
            G.col(q) = sp.A_hat.row(sp.small[static_cast<std::size_t>(q)]).transpose();
        }
        sp.H = sp.M0.matrixL().solve(G);
        DenseMatrix stacked = DenseMatrix::Zero(mw + ns, ns);
        stacked.topRows(mw) = sp.H;
        for (Index q = 0; q < ns; ++q)
        {
            stacked(mw + q, q) = std::sqrt(std::max(sp.mu(sp.small[static_cast<std::size_t>(q)]), 0.0));
        }
        sp.ridge.compute(stacked);
    }
    return sp;
}

}  // namespace

WlsSolver::WlsSolver(const MeasurementOperator& op)
    : n1_(op.n1()), n2_(op.n2()), m_(op.num_measurements()), op_(&op)
{
    DenseMatrix At = op.adjoint_matrix();  // N x m
    DenseMatrix gram = DenseMatrix::Zero(m_, m_);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(At.transpose());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram.selfadjointView<Eigen::Lower>());
    const Vector& values = eig.eigenvalues();
    const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
    if (!(top > 0.0))
    {
        throw InvalidArgument("WlsSolver: measurement operator is zero");
    }
    std::vector<Index> keep;
    for (Index k = 0; k < values.size(); ++k)
    {
        if (values(k) > kWhiteningCut * top)
        {
            keep.push_back(k);
        }
    }
    const Index mw = static_cast<Index>(keep.size());
    DenseMatrix E(m_, mw);
    Vector inv_root(mw);
    for (Index q = 0; q < mw; ++q)
    {
        const Index k = keep[static_cast<std::size_t>(q)];
        E.col(q) = eig.eigenvectors().col(k);
        inv_root(q) = 1.0 / std::sqrt(values(k));
    }
    whitened_t_ = At * E * inv_root.asDiagonal();
    range_basis_ = std::move(E);
    inv_root_ = std::move(inv_root);
}

Vector WlsSolver::whiten(const Vector& y) const
{
    if (y.size() != m_)
    {
        throw InvalidDimension("solve_wls: measurement vector has wrong length");
    }
    const Vector coeff = range_basis_.transpose() * y;
    const double ny2 = y.squaredNorm();
    const double outside2 = std::max(ny2 - coeff.squaredNorm(), 0.0);
    if (std::sqrt(outside2) > kRangeTolerance * std::sqrt(ny2))
    {
        throw InvalidArgument("solve_wls: y lies outside the numerical range of A");
    }
    const Vector y_w = inv_root_.cwiseProduct(coeff);
    return y_w;
}

Vector WlsSolver::apply_whitened(const DenseMatrix& X) const
{
    return whitened_t_.transpose() * X.reshaped();
}

DenseMatrix WlsSolver::project_kernel(const DenseMatrix& Z) const
{
    if (Z.rows() != n1_ || Z.cols() != n2_)
    {
        throw InvalidDimension("project_kernel: shape mismatch");
    }
    const Vector coeff = apply_whitened(Z);
    const Vector flat = Z.reshaped() - whitened_t_ * coeff;
    return flat.reshaped(n1_, n2_);
}

double WlsSolver::kernel_orthogonality(const DenseMatrix& X, const WeightState& ws, int probes,
                                       std::uint64_t seed) const
{
    const DenseMatrix WX = apply_W(ws, X);
    const double nw = WX.norm();
    if (!(nw > 0.0))
    {
        return 0.0;
    }
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < probes; ++t)
    {
        const DenseMatrix Xi = project_kernel(rng.normal_matrix(n1_, n2_));
        const double nxi = Xi.norm();
        if (nxi > 0.0)
        {
            worst = std::max(worst, std::abs(frobenius_inner(WX, Xi)) / (nw * nxi));
        }
    }
    return worst;
}

WlsSolution WlsSolver::solve_direct(const Vector& y_w, const WeightState& ws,
                                    const WlsOptions& options) const
{
    const EigenSplit sp = build_split(whitened_t_, ws, options.split_threshold);
    WlsSolution sol;
    sol.regularized = sp.regularized;
    sol.X = sp.to_matrix(sp.solve(y_w));
    const double target = 0.1 * options.tol * y_w.norm();
    for (int step = 0; step < options.refinement_steps; ++step)
    {
        const Vector residual = y_w - apply_whitened(sol.X);
        if (residual.norm() <= target)
        {
            break;
        }
        sol.X += sp.to_matrix(sp.solve(residual));
        sol.iterations = step + 1;
    }
    return sol;
}

WlsSolution WlsSolver::solve_cg(const Vector& y_w, const WeightState& ws,
                                const WlsOptions& options) const
{
    const WeightInverse inverse(ws);
    const auto normal_apply = [&](const Vector& v) -> Vector {
        const Vector flat = whitened_t_ * v;
        return apply_whitened(inverse.apply(flat.reshaped(n1_, n2_)));
    };

    const Index mw = whitened_t_.cols();
    const Index cap = options.max_cg_iterations > 0 ? options.max_cg_iterations : 10 * mw;
    const double target = options.tol * y_w.norm();

    Vector lambda = Vector::Zero(mw);
    if (options.initial_lambda)
    {
        if (options.initial_lambda->size() != mw)
        {
            throw InvalidDimension("solve_wls: initial lambda has wrong length");
        }
        lambda = *options.initial_lambda;
    }
    Vector r = y_w - normal_apply(lambda);
    Vector p = r;
    double rr = r.squaredNorm();
    Index it = 0;
    while (std::sqrt(rr) > target)
    {
        if (it == cap)
        {
            throw ConvergenceError("solve_wls: CG did not reach the tolerance",
                                   std::sqrt(rr) / std::max(y_w.norm(), 1e-300),
                                   static_cast<int>(cap));
        }
        const Vector Mp = normal_apply(p);
        const double alpha = rr / p.dot(Mp);
        lambda += alpha * p;
        r -= alpha * Mp;
        const double rr_next = r.squaredNorm();
        p = r + (rr_next / rr) * p;
        rr = rr_next;
        ++it;
    }

    WlsSolution sol;
    const Vector flat = whitened_t_ * lambda;
    sol.X = inverse.apply(flat.reshaped(n1_, n2_));
    sol.iterations = it;
    sol.lambda = lambda;
    return sol;
}

WlsSolution WlsSolver::solve(const Vector& y, const WeightState& ws,
                             const WlsOptions& options) const
{
    if (ws.n1 != n1_ || ws.n2 != n2_)
    {
        throw InvalidDimension("solve_wls: weight operator shape does not match A");
    }
    if (!(options.tol > 0.0))
    {
        throw InvalidArgument("solve_wls: tol must be positive");
    }
    const Vector y_w = whiten(y);
    const double ny = y.norm();

    WlsSolution sol;
    if (!(ny > 0.0))
    {
        sol.X = DenseMatrix::Zero(n1_, n2_);
        sol.lambda = Vector::Zero(y_w.size());
        return sol;
    }
    sol = options.method == WlsMethod::kDirect ? solve_direct(y_w, ws, options)
                                               : solve_cg(y_w, ws, options);
    sol.constraint_residual = (op_->apply(sol.X) - y).norm() / ny;
    if (options.kernel_probes > 0)
    {
        sol.kernel_orthogonality =
            kernel_orthogonality(sol.X, ws, options.kernel_probes, options.probe_seed);
    }
    return sol;
}

WlsSolution solve_wls(const MeasurementOperator& op, const Vector& y, const WeightState& ws,
                      const WlsOptions& options)
{
    return WlsSolver(op).solve(y, ws, options);
}

}  // namespace slr
