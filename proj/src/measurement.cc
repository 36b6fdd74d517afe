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

#include "slr/measurement.h"

#include <cmath>
#include <numbers>

#include "slr/error.h"
#include "slr/rng.h"

namespace slr
{

namespace
{

// Storage cap for operators that keep an m x n1*n2 matrix.
constexpr double kDenseStorageBudget = 2.0e8;

void check_storage(Index n1, Index n2, Index m)
{
    if (static_cast<double>(n1) * static_cast<double>(n2) * static_cast<double>(m) >
        kDenseStorageBudget)
    {
        throw ResourceError("measurement operator exceeds the dense storage budget");
    }
}

}  // namespace

std::string to_string(MeasurementKind kind)
{
    switch (kind)
    {
        case MeasurementKind::kDenseGaussian:
            return "dense-gaussian";
        case MeasurementKind::kRankOneGaussian:
            return "rank-one-gaussian";
        case MeasurementKind::kFourierRankOne:
            return "fourier-rank-one";
        case MeasurementKind::kExplicit:
            return "explicit";
    }
    return "unknown";
}

MeasurementKind parse_measurement_kind(const std::string& name)
{
    if (name == "dense-gaussian")
    {
        return MeasurementKind::kDenseGaussian;
    }
    if (name == "rank-one-gaussian")
    {
        return MeasurementKind::kRankOneGaussian;
    }
    if (name == "fourier-rank-one")
    {
        return MeasurementKind::kFourierRankOne;
    }
    throw InvalidArgument("unknown measurement kind: " + name);
}

MeasurementOperator::MeasurementOperator(Index n1, Index n2, Index m) : n1_(n1), n2_(n2), m_(m)
{
    if (n1 < 1 || n2 < 1 || m < 1)
    {
        throw InvalidDimension("measurement operator: n1, n2, m must be positive");
    }
}

Vector MeasurementOperator::apply(const DenseMatrix& X) const
{
    if (X.rows() != n1_ || X.cols() != n2_)
    {
        throw InvalidDimension("apply: input shape does not match the operator");
    }
    return do_apply(X);
}

DenseMatrix MeasurementOperator::adjoint(const Vector& w) const
{
    if (w.size() != m_)
    {
        throw InvalidDimension("adjoint: measurement vector has wrong length");
    }
    return do_adjoint(w);
}

DenseMatrix MeasurementOperator::adjoint_matrix() const
{
    check_storage(n1_, n2_, m_);
    DenseMatrix out(n1_ * n2_, m_);
    Vector e = Vector::Zero(m_);
    for (Index j = 0; j < m_; ++j)
    {
        e(j) = 1.0;
        out.col(j) = do_adjoint(e).reshaped();
        e(j) = 0.0;
    }
    return out;
}

DenseMatrix MeasurementOperator::materialize(Index budget) const
{
    if (static_cast<double>(n1_) * static_cast<double>(n2_) * static_cast<double>(m_) >
        static_cast<double>(budget))
    {
        throw ResourceError("materialize: operator too large for the requested budget");
    }
    return adjoint_matrix().transpose();
}

// ---------------------------------------------------------------------------

DenseOperator::DenseOperator(Index n1, Index n2, DenseMatrix rows, MeasurementKind kind,
                             double isometry_scale)
    : MeasurementOperator(n1, n2, rows.rows()),
      rows_(std::move(rows)),
      kind_(kind),
      scale_(isometry_scale)
{
    if (rows_.cols() != n1 * n2)
    {
        throw InvalidDimension("DenseOperator: rows must have n1*n2 columns");
    }
}

Vector DenseOperator::do_apply(const DenseMatrix& X) const { return rows_ * X.reshaped(); }

DenseMatrix DenseOperator::do_adjoint(const Vector& w) const
{
    Vector flat = rows_.transpose() * w;
    return flat.reshaped(n1(), n2());
}

// ---------------------------------------------------------------------------

RankOneOperator::RankOneOperator(DenseMatrix left, DenseMatrix right, MeasurementKind kind,
                                 double isometry_scale)
    : MeasurementOperator(left.cols(), right.cols(), left.rows()),
      left_(std::move(left)),
      right_(std::move(right)),
      kind_(kind),
      scale_(isometry_scale)
{
    if (left_.rows() != right_.rows())
    {
        throw InvalidDimension("RankOneOperator: factor row counts differ");
    }
}

Vector RankOneOperator::do_apply(const DenseMatrix& X) const
{
    const DenseMatrix T = left_ * X;  // m x n2, row j = a_j^T X
    return T.cwiseProduct(right_).rowwise().sum();
}

Vector RankOneOperator::apply_factored(const DenseMatrix& L, const DenseMatrix& R) const
{
    if (L.rows() != n1() || R.rows() != n2() || L.cols() != R.cols())
    {
        throw InvalidDimension("apply_factored: factor shapes do not match the operator");
    }
    const DenseMatrix AL = left_ * L;   // m x k
    const DenseMatrix BR = right_ * R;  // m x k
    return AL.cwiseProduct(BR).rowwise().sum();
}

DenseMatrix RankOneOperator::do_adjoint(const Vector& w) const
{
    return left_.transpose() * w.asDiagonal() * right_;
}

DenseMatrix RankOneOperator::adjoint_matrix() const
{
    check_storage(n1(), n2(), num_measurements());
    DenseMatrix out(n1() * n2(), num_measurements());
    for (Index j = 0; j < num_measurements(); ++j)
    {
        for (Index k = 0; k < n2(); ++k)
        {
            out.col(j).segment(k * n1(), n1()) = right_(j, k) * left_.row(j).transpose();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd unitary_dft_columns(const DenseMatrix& M)
{
    const Index m = M.rows();
    Eigen::MatrixXcd F(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Index j = 0; j < m; ++j)
    {
        for (Index l = 0; l < m; ++l)
        {
            // Reduce j*l mod m first so the phase stays accurate for large m.
            const auto jl = static_cast<double>((j * l) % m);
            const double angle = -2.0 * std::numbers::pi * jl / static_cast<double>(m);
            F(j, l) = std::polar(scale, angle);
        }
    }
    return F * M.cast<std::complex<double>>();
}

FourierRankOneOperator::FourierRankOneOperator(const DenseMatrix& A, const DenseMatrix& B,
                                               MeasurementKind kind, double isometry_scale)
    : MeasurementOperator(A.cols(), B.cols(), 2 * A.rows()),
      P_(unitary_dft_columns(A)),
      Q_(unitary_dft_columns(B)),
      kind_(kind),
      scale_(isometry_scale)
{
    if (A.rows() != B.rows())
    {
        throw InvalidDimension("FourierRankOneOperator: A and B need the same row count");
    }
}

Eigen::VectorXcd FourierRankOneOperator::apply_complex(const DenseMatrix& X) const
{
    if (X.rows() != n1() || X.cols() != n2())
    {
        throw InvalidDimension("apply_complex: input shape does not match the operator");
    }
    const Eigen::MatrixXcd T = P_ * X.cast<std::complex<double>>();  // m x n2
    return T.cwiseProduct(Q_).rowwise().sum();
}

Vector FourierRankOneOperator::do_apply(const DenseMatrix& X) const
{
    const Eigen::VectorXcd y = apply_complex(X);
    const Index m = y.size();
    Vector out(2 * m);
    out.head(m) = y.real();
    out.tail(m) = y.imag();
    return out;
}

DenseMatrix FourierRankOneOperator::do_adjoint(const Vector& w) const
{
    // <A(X), w> = Re sum_j y_j conj(c_j) with c = w_re + i w_im, hence
    // A^*(w) = Re(P^T diag(conj c) Q).
    const Index m = P_.rows();
    Eigen::VectorXcd c_conj(m);
    for (Index j = 0; j < m; ++j)
    {
        c_conj(j) = std::complex<double>(w(j), -w(m + j));
    }
    return (P_.transpose() * c_conj.asDiagonal() * Q_).real();
}

// ---------------------------------------------------------------------------

DenseOperator gaussian_dense(Index n1, Index n2, Index m, std::uint64_t seed)
{
    if (m < 1)
    {
        throw InvalidDimension("gaussian_dense: m must be positive");
    }
    check_storage(n1, n2, m);
    Rng rng(seed);
    DenseMatrix rows(m, n1 * n2);
    for (Index j = 0; j < m; ++j)
    {
        for (Index i = 0; i < n1; ++i)
        {
            for (Index k = 0; k < n2; ++k)
            {
                rows(j, i + k * n1) = rng.normal();
            }
        }
    }
    return DenseOperator(n1, n2, std::move(rows), MeasurementKind::kDenseGaussian,
                         static_cast<double>(m));
}

RankOneOperator gaussian_rank_one(Index n1, Index n2, Index m, std::uint64_t seed)
{
    if (m < 1)
    {
        throw InvalidDimension("gaussian_rank_one: m must be positive");
    }
    Rng rng(seed);
    DenseMatrix left = rng.normal_matrix(m, n1);
    DenseMatrix right = rng.normal_matrix(m, n2);
    return RankOneOperator(std::move(left), std::move(right), MeasurementKind::kRankOneGaussian,
                           static_cast<double>(m));
}

FourierRankOneOperator fourier_rank_one(Index n1, Index n2, Index m, std::uint64_t seed)
{
    if (m < 1)
    {
        throw InvalidDimension("fourier_rank_one: m must be positive");
    }
    Rng rng(seed);
    const DenseMatrix A = rng.normal_matrix(m, n1);
    const DenseMatrix B = rng.normal_matrix(m, n2);
    // With the unitary DFT, E sum_j |y_j|^2 = m ||X||_F^2.
    return FourierRankOneOperator(A, B, MeasurementKind::kFourierRankOne, static_cast<double>(m));
}

std::unique_ptr<MeasurementOperator> make_operator(MeasurementKind kind, Index n1, Index n2,
                                                   Index m, std::uint64_t seed)
{
    switch (kind)
    {
        case MeasurementKind::kDenseGaussian:
            return std::make_unique<DenseOperator>(gaussian_dense(n1, n2, m, seed));
        case MeasurementKind::kRankOneGaussian:
            return std::make_unique<RankOneOperator>(gaussian_rank_one(n1, n2, m, seed));
        case MeasurementKind::kFourierRankOne:
            return std::make_unique<FourierRankOneOperator>(fourier_rank_one(n1, n2, m, seed));
        case MeasurementKind::kExplicit:
            break;
    }
    throw InvalidArgument("make_operator: explicit operators have no random ensemble");
}

Vector add_noise(const Vector& y, double sigma, std::uint64_t seed)
{
    Rng rng(seed);
    Vector out = y;
    for (Index j = 0; j < out.size(); ++j)
    {
        out(j) += sigma * rng.normal();
    }
    return out;
}

}  // namespace slr
