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

#include "slr/objective.h"

#include <cmath>

#include "slr/error.h"
#include "slr/weight_operator.h"

namespace slr
{

namespace
{

// Singular values below this fraction of sigma_1 are treated as exact zeros.
constexpr double kSpectrumFloor = 1e-14;

void check_tau(double tau)
{
    if (!(tau > 0.0))
    {
        throw InvalidArgument("smoothing parameter must be positive");
    }
}

void check_same_shape(const DenseMatrix& Z, const DenseMatrix& X)
{
    if (Z.rows() != X.rows() || Z.cols() != X.cols())
    {
        throw InvalidDimension("quadratic model: Z and X differ in shape");
    }
}

}  // namespace

double f_tau(double t, double tau)
{
    check_tau(tau);
    const double a = std::abs(t);
    if (a <= tau)
    {
        return 0.5 * t * t;
    }
    // log(e t^2 / tau^2) = 1 + 2 log(|t| / tau)
    return 0.5 * tau * tau * (1.0 + 2.0 * std::log(a / tau));
}

double f_tau_prime(double t, double tau)
{
    check_tau(tau);
    if (std::isinf(tau) || std::abs(t) <= tau)
    {
        return t;
    }
    return (tau / t) * tau;
}

double F_lr_from_spectrum(const Vector& sigma, double epsilon)
{
    check_tau(epsilon);
    if (sigma.size() == 0)
    {
        return 0.0;
    }
    const double cut = kSpectrumFloor * sigma.maxCoeff();
    double total = 0.0;
    for (Index i = 0; i < sigma.size(); ++i)
    {
        if (sigma(i) > cut)
        {
            total += f_tau(sigma(i), epsilon);
        }
    }
    return total;
}

double F_sp_from_norms(const Vector& norms, double delta)
{
    check_tau(delta);
    double total = 0.0;
    for (Index i = 0; i < norms.size(); ++i)
    {
        total += f_tau(norms(i), delta);
    }
    return total;
}

double F_lr(const DenseMatrix& X, double epsilon)
{
    check_tau(epsilon);
    return F_lr_from_spectrum(full_svd(X).sigma, epsilon);
}

double F_sp(const DenseMatrix& X, double delta) { return F_sp_from_norms(row_norms(X), delta); }

double F(const DenseMatrix& X, const SmoothingParams& params)
{
    return F_lr(X, params.epsilon) + F_sp(X, params.delta);
}

DenseMatrix grad_F_sp(const DenseMatrix& X, double delta)
{
    check_tau(delta);
    DenseMatrix out = X;
    const Vector norms = row_norms(X);
    for (Index i = 0; i < X.rows(); ++i)
    {
        if (norms(i) > delta)
        {
            out.row(i) *= (delta / norms(i)) * (delta / norms(i));
        }
    }
    return out;
}

DenseMatrix grad_F_lr(const DenseMatrix& X, double epsilon)
{
    check_tau(epsilon);
    const SvdFactors f = full_svd(X);
    Vector scaled = f.sigma;
    for (Index i = 0; i < scaled.size(); ++i)
    {
        scaled(i) = f_tau_prime(f.sigma(i), epsilon);
    }
    return f.U * scaled.asDiagonal() * f.V.transpose();
}

double Q_lr(const DenseMatrix& Z, const DenseMatrix& X, double epsilon)
{
    check_same_shape(Z, X);
    const SvdFactors f = full_svd(X);
    const WeightState ws = build_weight(f, row_norms(X), epsilon,
                                        std::numeric_limits<double>::infinity());
    const DenseMatrix H = Z - X;
    return F_lr_from_spectrum(f.sigma, epsilon) + frobenius_inner(grad_F_lr(X, epsilon), H) +
           0.5 * frobenius_inner(H, apply_W_lr(ws, H));
}

double Q_sp(const DenseMatrix& Z, const DenseMatrix& X, double delta)
{
    check_same_shape(Z, X);
    const DenseMatrix H = Z - X;
    const WeightState ws = build_weight(X, std::numeric_limits<double>::infinity(), delta);
    return F_sp(X, delta) + frobenius_inner(grad_F_sp(X, delta), H) +
           0.5 * frobenius_inner(H, apply_W_sp(ws, H));
}

}  // namespace slr
