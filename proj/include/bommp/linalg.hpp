// Copyright 2026 The bommp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "bommp/blockmodel.hpp"

namespace bommp {

/// m x n real matrix whose columns are partitioned by a BlockPattern.
class DenseMatrix {
public:
    DenseMatrix() = default;
    /// Throws std::invalid_argument if pattern.dim() != cols or an entry is not finite.
    DenseMatrix(Eigen::MatrixXd values, BlockPattern column_pattern);
    /// Single-block column pattern.
    explicit DenseMatrix(Eigen::MatrixXd values);

    std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    const BlockPattern& pattern() const { return pattern_; }

    auto block(std::size_t i) const {
        return values_.middleCols(static_cast<Eigen::Index>(pattern_.offset(i)),
                                  static_cast<Eigen::Index>(pattern_.length(i)));
    }

    Eigen::VectorXd apply(const BlockVector& x) const;

private:
    Eigen::MatrixXd values_;
    BlockPattern pattern_;
};

/// Columns of block i, with a single-block pattern. Throws std::out_of_range.
DenseMatrix column_block(const DenseMatrix& a, std::size_t i);

/// A_S: column blocks of S concatenated in ascending order, pattern I_S.
DenseMatrix submatrix(const DenseMatrix& a, const SupportSet& support);

inline constexpr double kDefaultRankTol = 1e-10;

struct LeastSquaresResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residual;
    std::size_t rank = 0;
};

/// Minimum-norm minimizer of ||y - B u||_2 via a complete orthogonal
/// decomposition with column pivoting. Columns whose pivot falls below
/// rank_tol times the largest pivot are treated as dependent.
LeastSquaresResult least_squares_min_norm(const Eigen::MatrixXd& b, const Eigen::VectorXd& y,
                                          double rank_tol = kDefaultRankTol);
LeastSquaresResult least_squares_min_norm(const DenseMatrix& b, const Eigen::VectorXd& y,
                                          double rank_tol = kDefaultRankTol);

/// (I - P_B) y, the component of y orthogonal to range(B).
Eigen::VectorXd residual_projection(const DenseMatrix& b, const Eigen::VectorXd& y);

struct EigenResult {
    Eigen::VectorXd eigenvalues;  // ascending
    std::optional<Eigen::MatrixXd> eigenvectors;
};

/// Eigenvalues (and optionally eigenvectors) of a symmetric matrix.
/// Throws std::invalid_argument if g is not symmetric to 1e-12 relative.
EigenResult sym_eig(const Eigen::MatrixXd& g, double tol = 1e-12, bool want_vectors = false);

}  // namespace bommp
