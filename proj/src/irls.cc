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

#include "slr/irls.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "slr/error.h"
#include "slr/weight_operator.h"

namespace slr
{

namespace
{

double order_statistic(const Vector& sorted_desc, Index one_based)
{
    return one_based <= sorted_desc.size() ? sorted_desc(one_based - 1) : 0.0;
}

void check_config(const MeasurementOperator& op, const IrlsConfig& config)
{
    if (config.r_tilde < 1 || config.r_tilde > std::min(op.n1(), op.n2()))
    {
        throw InvalidDimension("run_irls: need 1 <= r_tilde <= min(n1, n2)");
    }
    if (config.s_tilde < 1 || config.s_tilde > op.n1())
    {
        throw InvalidDimension("run_irls: need 1 <= s_tilde <= n1");
    }
    if (config.max_iter < 1 || !(config.tol_rel_change >= 0.0) || !(config.eps_floor > 0.0) ||
        !(config.delta_floor > 0.0))
    {
        throw InvalidArgument("run_irls: invalid iteration limits or floors");
    }
}

}  // namespace

SmoothingUpdate update_smoothing(const Vector& sigma, const Vector& norms, Index r_tilde,
                                 Index s_tilde, const SmoothingParams& previous, double eps_floor,
                                 double delta_floor)
{
    if (r_tilde < 0 || s_tilde < 0 || !(eps_floor > 0.0) || !(delta_floor > 0.0) ||
        !(previous.epsilon > 0.0) || !(previous.delta > 0.0))
    {
        throw InvalidArgument("update_smoothing: invalid parameters");
    }
    Vector sorted_norms = norms;
    std::sort(sorted_norms.begin(), sorted_norms.end(), std::greater<>());

    SmoothingUpdate out;
    const double eps = std::min(previous.epsilon, order_statistic(sigma, r_tilde + 1));
    const double delta = std::min(previous.delta, order_statistic(sorted_norms, s_tilde + 1));
    out.eps_clamped = eps <= eps_floor;
    out.delta_clamped = delta <= delta_floor;
    out.params.epsilon = std::max(eps, eps_floor);
    out.params.delta = std::max(delta, delta_floor);
    return out;
}

SmoothingUpdate update_smoothing(const DenseMatrix& X, Index r_tilde, Index s_tilde,
                                 const SmoothingParams& previous, double eps_floor,
                                 double delta_floor)
{
    return update_smoothing(full_svd(X).sigma, row_norms(X), r_tilde, s_tilde, previous,
                            eps_floor, delta_floor);
}

RecoveryResult run_irls(const MeasurementOperator& op, const Vector& y, const IrlsConfig& config,
                        const std::optional<DenseMatrix>& ground_truth)
{
    check_config(op, config);
    const WlsSolver solver(op);
    return run_irls(solver, op, y, config, ground_truth);
}

RecoveryResult run_irls(const WlsSolver& solver, const MeasurementOperator& op, const Vector& y,
                        const IrlsConfig& config, const std::optional<DenseMatrix>& ground_truth)
{
    check_config(op, config);
    if (ground_truth && (ground_truth->rows() != op.n1() || ground_truth->cols() != op.n2()))
    {
        throw InvalidDimension("run_irls: ground truth shape does not match the operator");
    }
    const auto clock_start = std::chrono::steady_clock::now();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    RecoveryResult result;
    WeightState ws = identity_weight(op.n1(), op.n2());
    SmoothingParams smoothing;  // both infinite
    DenseMatrix X_prev = DenseMatrix::Zero(op.n1(), op.n2());
    double eps_floor = 0.0;
    double delta_floor = 0.0;

    for (Index k = 1; k <= config.max_iter; ++k)
    {
        WlsSolution sol;
        try
        {
            sol = solver.solve(y, ws, config.wls);
        }
        catch (const ConvergenceError& e)
        {
            throw ConvergenceError("iteration " + std::to_string(k) + ": " + e.what(),
                                   e.residual(), e.iterations());
        }
        catch (const ResourceError& e)
        {
            throw ResourceError("iteration " + std::to_string(k) + ": " + e.what());
        }
        const DenseMatrix& X = sol.X;
        const SvdFactors svd = full_svd(X);
        const Vector norms = row_norms(X);

        if (k == 1)
        {
            const double sigma1 = svd.size() > 0 ? svd.sigma(0) : 0.0;
            const double rho1 = norms.size() > 0 ? norms.maxCoeff() : 0.0;
            if (!(sigma1 > 0.0))
            {
                // y = 0: the zero matrix is the answer.
                result.X_final = X;
                result.iterations = 1;
                result.reason = Termination::kTolerance;
                return result;
            }
            eps_floor = config.eps_floor * sigma1;
            delta_floor = config.delta_floor * rho1;
        }

        const SmoothingUpdate update = update_smoothing(svd.sigma, norms, config.r_tilde,
                                                        config.s_tilde, smoothing, eps_floor,
                                                        delta_floor);
        smoothing = update.params;
        ws = build_weight(svd, norms, smoothing.epsilon, smoothing.delta);

        IterateRecord rec;
        rec.k = k;
        rec.eps = smoothing.epsilon;
        rec.delta = smoothing.delta;
        rec.r_k = ws.r_k;
        rec.s_k = ws.s_k;
        const double nx = X.norm();
        rec.rel_change = nx > 0.0 ? (X - X_prev).norm() / nx : 0.0;
        if (config.trace_objective)
        {
            rec.F_lr = F_lr_from_spectrum(svd.sigma, smoothing.epsilon);
            rec.F_sp = F_sp_from_norms(norms, smoothing.delta);
            rec.F = rec.F_lr + rec.F_sp;
        }
        else
        {
            rec.F_lr = rec.F_sp = rec.F = nan;
        }
        rec.rel_error = ground_truth ? rel_frobenius_error(X, *ground_truth) : nan;
        rec.wall_time_ms =
            config.record_timing
                ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            clock_start)
                      .count()
                : 0.0;
        rec.eps_clamped = update.eps_clamped;
        rec.delta_clamped = update.delta_clamped;
        result.trace.push_back(rec);

        result.X_final = X;
        result.iterations = k;
        if (k > 1 && rec.rel_change < config.tol_rel_change)
        {
            result.reason = Termination::kTolerance;
            return result;
        }
        if (update.eps_clamped && update.delta_clamped)
        {
            result.reason = Termination::kSmoothingFloor;
            return result;
        }
        X_prev = X;
    }
    result.reason = Termination::kMaxIter;
    return result;
}

MmStepReport check_mm_step(const DenseMatrix& X_prev, const DenseMatrix& X_next,
                           const SmoothingParams& params, double slack)
{
    MmStepReport report;
    report.F_next = F(X_next, params);
    report.F_prev = F(X_prev, params);
    report.Q_next = Q_lr(X_next, X_prev, params.epsilon) + Q_sp(X_next, X_prev, params.delta);
    report.majorization_slack = report.Q_next - report.F_next;
    report.descent_slack = report.F_prev - report.Q_next;
    report.ok = report.majorization_slack >= -slack && report.descent_slack >= -slack;
    return report;
}

}  // namespace slr
