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

#include <complex>
#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "slr/core_model.h"

namespace slr
{

enum class MeasurementKind
{
    kDenseGaussian,
    kRankOneGaussian,
    kFourierRankOne,
    kExplicit,  // user-supplied matrices, mainly for tests
};

std::string to_string(MeasurementKind kind);
MeasurementKind parse_measurement_kind(const std::string& name);

/**
 * @brief Linear map A : R^{n1 x n2} -> R^m and its adjoint.
 *
 * Vectorization is column-major throughout: vec(X)(i + k * n1) = X(i, k).
 * Implementations are immutable after construction.
 */
class MeasurementOperator
{
   public:
    MeasurementOperator(Index n1, Index n2, Index m);
    virtual ~MeasurementOperator() = default;

    Index n1() const { return n1_; }
    Index n2() const { return n2_; }
    Index num_measurements() const { return m_; }

    virtual MeasurementKind kind() const = 0;

    Vector apply(const DenseMatrix& X) const;
    DenseMatrix adjoint(const Vector& w) const;

    /// n1*n2 x m matrix whose column j is vec(A^*(e_j)).
    virtual DenseMatrix adjoint_matrix() const;

    /// m x n1*n2 matrix representation. Throws ResourceError above `budget`
    /// stored entries.
    DenseMatrix materialize(Index budget = 10'000'000) const;

    /// Expected ||A(Z)||^2 / ||Z||_F^2 of the ensemble; the RIP probe divides
    /// by this so that a well-conditioned ensemble reads as a near-isometry.
    virtual double isometry_scale() const { return 1.0; }

   protected:
    virtual Vector do_apply(const DenseMatrix& X) const = 0;
    virtual DenseMatrix do_adjoint(const Vector& w) const = 0;

   private:
    Index n1_;
    Index n2_;
    Index m_;
};

/// A_j given explicitly as rows of an m x n1*n2 matrix.
class DenseOperator final : public MeasurementOperator
{
   public:
    DenseOperator(Index n1, Index n2, DenseMatrix rows,
                  MeasurementKind kind = MeasurementKind::kExplicit, double isometry_scale = 1.0);

    MeasurementKind kind() const override { return kind_; }
    DenseMatrix adjoint_matrix() const override { return rows_.transpose(); }
    double isometry_scale() const override { return scale_; }
    const DenseMatrix& rows() const { return rows_; }

   protected:
    Vector do_apply(const DenseMatrix& X) const override;
    DenseMatrix do_adjoint(const Vector& w) const override;

   private:
    DenseMatrix rows_;
    MeasurementKind kind_;
    double scale_;
};

/// A(X)_j = a_j^T X b_j. Stores only the m x n1 and m x n2 factor matrices.
class RankOneOperator final : public MeasurementOperator
{
   public:
    RankOneOperator(DenseMatrix left, DenseMatrix right,
                    MeasurementKind kind = MeasurementKind::kExplicit, double isometry_scale = 1.0);

    MeasurementKind kind() const override { return kind_; }
    DenseMatrix adjoint_matrix() const override;
    double isometry_scale() const override { return scale_; }

    /// A(L R^T) in O(m (n1 + n2) k) for factors L (n1 x k), R (n2 x k).
    Vector apply_factored(const DenseMatrix& L, const DenseMatrix& R) const;

   protected:
    Vector do_apply(const DenseMatrix& X) const override;
    DenseMatrix do_adjoint(const Vector& w) const override;

   private:
    DenseMatrix left_;   // rows a_j^T
    DenseMatrix right_;  // rows b_j^T
    MeasurementKind kind_;
    double scale_;
};

/**
 * @brief Fourier rank-one measurements from the blind deconvolution model.
 *
 * With P = F A and Q = F B (F the unitary size-m DFT, A in R^{m x n1},
 * B in R^{m x n2}), the complex measurements are y_j = P_{j,:} X Q_{j,:}^T,
 * i.e. <(FA)_{j,:}^* conj(FB)_{j,:}, X>_F. The real output has length 2m:
 * real parts first, then imaginary parts.
 */
class FourierRankOneOperator final : public MeasurementOperator
{
   public:
    using ComplexMatrix = Eigen::MatrixXcd;

    FourierRankOneOperator(const DenseMatrix& A, const DenseMatrix& B,
                           MeasurementKind kind = MeasurementKind::kExplicit,
                           double isometry_scale = 1.0);

    MeasurementKind kind() const override { return kind_; }
    double isometry_scale() const override { return scale_; }
    Index num_complex() const { return P_.rows(); }

    /// The complex measurement vector, before flattening.
    Eigen::VectorXcd apply_complex(const DenseMatrix& X) const;

    const ComplexMatrix& left_spectrum() const { return P_; }
    const ComplexMatrix& right_spectrum() const { return Q_; }

   protected:
    Vector do_apply(const DenseMatrix& X) const override;
    DenseMatrix do_adjoint(const Vector& w) const override;

   private:
    ComplexMatrix P_;
    ComplexMatrix Q_;
    MeasurementKind kind_;
    double scale_;
};

/// Unitary DFT applied to the columns of a real matrix, O(m^2) per column.
Eigen::MatrixXcd unitary_dft_columns(const DenseMatrix& M);

/// A_j with i.i.d. standard normal entries, drawn j-major then row-major.
DenseOperator gaussian_dense(Index n1, Index n2, Index m, std::uint64_t seed);

/// a_j, b_j i.i.d. standard normal; all a_j rows are drawn before the b_j rows.
RankOneOperator gaussian_rank_one(Index n1, Index n2, Index m, std::uint64_t seed);

/// m complex (2m real) measurements; A then B drawn row by row.
FourierRankOneOperator fourier_rank_one(Index n1, Index n2, Index m, std::uint64_t seed);

std::unique_ptr<MeasurementOperator> make_operator(MeasurementKind kind, Index n1, Index n2,
                                                   Index m, std::uint64_t seed);

/// Optional additive Gaussian noise: y + sigma * g with g from Rng(seed).
Vector add_noise(const Vector& y, double sigma, std::uint64_t seed);

}  // namespace slr
