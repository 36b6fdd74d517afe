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

#include <chrono>
#include <complex>

#include <gtest/gtest.h>

#include "slr/error.h"
#include "slr/measurement.h"
#include "slr/rip.h"
#include "slr/rng.h"

namespace slr
{
namespace
{

constexpr double kAdjointTol = 1e-10;

void expect_linear_and_adjoint(const MeasurementOperator& op, std::uint64_t seed)
{
    Rng rng(seed);
    EXPECT_TRUE(op.apply(DenseMatrix::Zero(op.n1(), op.n2())).isZero());
    for (int t = 0; t < 50; ++t)
    {
        const DenseMatrix X = rng.normal_matrix(op.n1(), op.n2());
        const DenseMatrix Z = rng.normal_matrix(op.n1(), op.n2());
        const Vector w = rng.normal_matrix(op.num_measurements(), 1);
        const double a = rng.normal();
        const double b = rng.normal();

        const Vector lhs = op.apply(a * X + b * Z);
        const Vector rhs = a * op.apply(X) + b * op.apply(Z);
        EXPECT_LE((lhs - rhs).norm(), kAdjointTol * (1.0 + rhs.norm()));

        const double left = op.apply(Z).dot(w);
        const double right = (Z.cwiseProduct(op.adjoint(w))).sum();
        EXPECT_NEAR(left, right, kAdjointTol * (1.0 + std::abs(left)));
    }
}

TEST(DenseOperator, TraceFunctional)
{
    // m = 1 with A_1 = I: A(X) = trace(X).
    const DenseMatrix I = DenseMatrix::Identity(3, 3);
    DenseMatrix rows(1, 9);
    rows.row(0) = I.reshaped().transpose();
    const DenseOperator op(3, 3, rows);
    Rng rng(1);
    const DenseMatrix X = rng.normal_matrix(3, 3);
    EXPECT_NEAR(op.apply(X)(0), X.trace(), 1e-14);
}

TEST(DenseOperator, LinearityAndAdjoint)
{
    expect_linear_and_adjoint(gaussian_dense(7, 5, 20, 3), 4);
}

TEST(DenseOperator, MaterializationMatchesApply)
{
    const DenseOperator op = gaussian_dense(6, 4, 15, 5);
    const DenseMatrix A = op.materialize();
    Rng rng(6);
    const DenseMatrix X = rng.normal_matrix(6, 4);
    EXPECT_LE((A * X.reshaped() - op.apply(X)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(op.materialize(10), ResourceError);
}

TEST(DenseOperator, DimensionChecks)
{
    const DenseOperator op = gaussian_dense(4, 3, 5, 1);
    EXPECT_THROW(op.apply(DenseMatrix::Zero(3, 4)), InvalidDimension);
    EXPECT_THROW(op.adjoint(Vector::Zero(4)), InvalidDimension);
    EXPECT_THROW(gaussian_dense(4, 3, 0, 1), InvalidDimension);
}

TEST(DenseOperator, Deterministic)
{
    const DenseOperator a = gaussian_dense(5, 4, 6, 77);
    const DenseOperator b = gaussian_dense(5, 4, 6, 77);
    EXPECT_TRUE(a.rows() == b.rows());
}

TEST(RankOneOperator, Bilinearity)
{
    const RankOneOperator op = gaussian_rank_one(6, 5, 12, 8);
    Rng rng(9);
    const Vector x = rng.normal_matrix(6, 1);
    const Vector y = rng.normal_matrix(5, 1);
    const Vector direct = op.apply(x * y.transpose());
    const Vector factored = op.apply_factored(x, y);
    EXPECT_LE((direct - factored).norm(), 1e-12 * (1.0 + direct.norm()));

    // Compare with explicit a_j^T x y^T b_j from the materialized rows.
    const DenseMatrix A = op.materialize();
    const Vector explicit_y = A * (x * y.transpose()).reshaped();
    EXPECT_LE((direct - explicit_y).norm(), 1e-12 * (1.0 + direct.norm()));
}

TEST(RankOneOperator, LinearityAndAdjoint)
{
    expect_linear_and_adjoint(gaussian_rank_one(8, 6, 30, 10), 11);
}

TEST(RankOneOperator, ApplyDoesNotMaterialize)
{
    // Applying through the factors is much cheaper than the dense product.
    const Index n = 64;
    const Index m = 2000;
    const RankOneOperator op = gaussian_rank_one(n, n, m, 12);
    Rng rng(13);
    const DenseMatrix X = rng.normal_matrix(n, n);

    const auto t0 = std::chrono::steady_clock::now();
    Vector y;
    for (int rep = 0; rep < 5; ++rep)
    {
        y = op.apply(X);
    }
    const auto t1 = std::chrono::steady_clock::now();
    const DenseMatrix A = op.adjoint_matrix().transpose();
    const auto t2 = std::chrono::steady_clock::now();
    Vector y_dense;
    for (int rep = 0; rep < 5; ++rep)
    {
        y_dense = A * X.reshaped();
    }
    const auto t3 = std::chrono::steady_clock::now();
    EXPECT_LE((y - y_dense).norm(), 1e-10 * y.norm());
    EXPECT_LT(t1 - t0, (t3 - t2) + (t2 - t1));
}

TEST(FourierOperator, MatchesDirectComplexEvaluation)
{
    const Index n1 = 5;
    const Index n2 = 3;
    const Index m = 8;
    Rng rng(14);
    const DenseMatrix A = rng.normal_matrix(m, n1);
    const DenseMatrix B = rng.normal_matrix(m, n2);
    const FourierRankOneOperator op(A, B);
    const DenseMatrix X = rng.normal_matrix(n1, n2);

    // Direct O(m^2) DFT written out independently.
    const double pi = std::acos(-1.0);
    const Vector y = op.apply(X);
    ASSERT_EQ(y.size(), 2 * m);
    for (Index j = 0; j < m; ++j)
    {
        Eigen::VectorXcd p = Eigen::VectorXcd::Zero(n1);
        Eigen::VectorXcd q = Eigen::VectorXcd::Zero(n2);
        for (Index l = 0; l < m; ++l)
        {
            const std::complex<double> w =
                std::exp(std::complex<double>(0.0, -2.0 * pi * static_cast<double>(j * l) / m)) /
                std::sqrt(static_cast<double>(m));
            p += w * A.row(l).transpose().cast<std::complex<double>>();
            q += w * B.row(l).transpose().cast<std::complex<double>>();
        }
        const std::complex<double> expected =
            (p.transpose() * X.cast<std::complex<double>>() * q)(0, 0);
        EXPECT_NEAR(y(j), expected.real(), 1e-10);
        EXPECT_NEAR(y(m + j), expected.imag(), 1e-10);
    }
}

TEST(FourierOperator, SelectorInjection)
{
    // A = B with every row e_1: only the first column of F A is nonzero.
    const Index m = 4;
    DenseMatrix A = DenseMatrix::Zero(m, 2);
    A.col(0).setOnes();
    const FourierRankOneOperator op(A, A);
    DenseMatrix X = DenseMatrix::Zero(2, 2);
    X(0, 0) = 3.0;
    const Eigen::VectorXcd y = op.apply_complex(X);
    // F applied to the all-ones vector is sqrt(m) e_0.
    EXPECT_NEAR(y(0).real(), 3.0 * m, 1e-12);
    for (Index j = 1; j < m; ++j)
    {
        EXPECT_NEAR(std::abs(y(j)), 0.0, 1e-12);
    }
}

TEST(FourierOperator, LinearityAndAdjoint)
{
    expect_linear_and_adjoint(fourier_rank_one(6, 4, 16, 15), 16);
    expect_linear_and_adjoint(fourier_rank_one(5, 3, 7, 17), 18);
}

TEST(MakeOperator, DispatchAndErrors)
{
    EXPECT_EQ(make_operator(MeasurementKind::kDenseGaussian, 4, 3, 5, 1)->kind(),
              MeasurementKind::kDenseGaussian);
    EXPECT_EQ(make_operator(MeasurementKind::kRankOneGaussian, 4, 3, 5, 1)->num_measurements(), 5);
    EXPECT_EQ(make_operator(MeasurementKind::kFourierRankOne, 4, 3, 5, 1)->num_measurements(), 10);
    EXPECT_THROW(make_operator(MeasurementKind::kExplicit, 4, 3, 5, 1), InvalidArgument);
    EXPECT_EQ(parse_measurement_kind(to_string(MeasurementKind::kFourierRankOne)),
              MeasurementKind::kFourierRankOne);
    EXPECT_THROW(parse_measurement_kind("bogus"), InvalidArgument);
}

TEST(RipProbe, IdentityEmbeddingIsIsometry)
{
    const DenseOperator op(6, 4, DenseMatrix::Identity(24, 24));
    const RipEstimate est = rip_probe(op, 2, 3, 20, 1);
    EXPECT_LT(est.lower_bound, 1e-10);
    EXPECT_EQ(est.trials, 20);
}

TEST(RipProbe, GaussianNearIsometryWithManyMeasurements)
{
    const DenseOperator op = gaussian_dense(20, 6, 400, 2);
    const RipEstimate est = rip_probe(op, 1, 4, 20, 3);
    EXPECT_LT(est.lower_bound, 1.0);
    EXPECT_LE(est.min_ratio, est.max_ratio);
}

TEST(RipProbe, SingleMeasurementIsFarFromIsometry)
{
    // With m = 1 the ratio is g^2 for a chi-square(1) variable; over 20 draws
    // the extreme deviation from 1 is almost surely large.
    int large = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const DenseOperator op = gaussian_dense(10, 5, 1, seed);
        if (rip_probe(op, 1, 3, 20, seed + 100).lower_bound > 0.5)
        {
            ++large;
        }
    }
    EXPECT_GE(large, 9);
}

TEST(RipProbe, RejectsZeroTrials)
{
    const DenseOperator op(2, 2, DenseMatrix::Identity(4, 4));
    EXPECT_THROW(rip_probe(op, 1, 1, 0, 1), InvalidArgument);
}

TEST(Noise, AddsSeededPerturbation)
{
    const Vector y = Vector::Ones(50);
    const Vector a = add_noise(y, 0.1, 3);
    EXPECT_TRUE(a == add_noise(y, 0.1, 3));
    EXPECT_GT((a - y).norm(), 0.0);
    EXPECT_TRUE(add_noise(y, 0.0, 3) == y);
}

}  // namespace
}  // namespace slr
