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

#include "bommp/linalg.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace bommp {

DenseMatrix::DenseMatrix(Eigen::MatrixXd values, BlockPattern column_pattern)
    : values_(std::move(values)), pattern_(std::move(column_pattern)) {
    if (pattern_.dim() != static_cast<std::size_t>(values_.cols())) {
        throw std::invalid_argument("column pattern dimension " + std::to_string(pattern_.dim()) +
                                    " does not match " + std::to_string(values_.cols()) +
                                    " columns");
    }
    if (!values_.allFinite()) {
        throw std::invalid_argument("matrix entries must be finite");
    }
}

DenseMatrix::DenseMatrix(Eigen::MatrixXd values)
    : DenseMatrix(values,
                  values.cols() == 0 ? BlockPattern{}
                                     : BlockPattern{static_cast<std::size_t>(values.cols())}) {}

Eigen::VectorXd DenseMatrix::apply(const BlockVector& x) const {
    if (!(x.pattern() == pattern_)) {
        throw std::invalid_argument("signal pattern does not match matrix column pattern");
    }
    return values_ * x.values();
}

DenseMatrix column_block(const DenseMatrix& a, std::size_t i) {
    if (i >= a.pattern().block_count()) {
        throw std::out_of_range("block index " + std::to_string(i) + " out of range");
    }
    return DenseMatrix(a.block(i));
}

DenseMatrix submatrix(const DenseMatrix& a, const SupportSet& support) {
    if (!(support.pattern() == a.pattern())) {
        throw std::invalid_argument("support pattern does not match matrix column pattern");
    }
    Eigen::MatrixXd out(a.values().rows(), static_cast<Eigen::Index>(support.coordinate_count()));
    Eigen::Index col = 0;
    for (std::size_t i : support) {
        const auto len = static_cast<Eigen::Index>(a.pattern().length(i));
        out.middleCols(col, len) = a.block(i);
        col += len;
    }
    return DenseMatrix(std::move(out), support.restricted_pattern());
}

LeastSquaresResult least_squares_min_norm(const Eigen::MatrixXd& b, const Eigen::VectorXd& y,
                                          double rank_tol) {
    if (b.rows() != y.size()) {
        throw std::invalid_argument("least squares: matrix has " + std::to_string(b.rows()) +
                                    " rows but y has length " + std::to_string(y.size()));
    }
    if (!(rank_tol > 0.0)) throw std::invalid_argument("rank tolerance must be positive");

    LeastSquaresResult out;
    if (b.cols() == 0) {
        out.coefficients.resize(0);
        out.residual = y;
        return out;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(rank_tol);
    cod.compute(b);
    out.coefficients = cod.solve(y);
    out.residual = y - b * out.coefficients;
    out.rank = static_cast<std::size_t>(cod.rank());
    return out;
}

LeastSquaresResult least_squares_min_norm(const DenseMatrix& b, const Eigen::VectorXd& y,
                                          double rank_tol) {
    return least_squares_min_norm(b.values(), y, rank_tol);
}

Eigen::VectorXd residual_projection(const DenseMatrix& b, const Eigen::VectorXd& y) {
    return least_squares_min_norm(b, y).residual;
}

namespace {
constexpr double kSymmetryTol = 1e-12;
}

// The Householder tridiagonalization + implicit QL solver is backward stable,
// so every eigenvalue is within a small multiple of eps * ||G||_2 of exact;
// `tol` only has to be positive.
EigenResult sym_eig(const Eigen::MatrixXd& g, double tol, bool want_vectors) {
    if (g.rows() != g.cols()) throw std::invalid_argument("sym_eig: matrix is not square");
    if (!(tol > 0.0)) throw std::invalid_argument("sym_eig: tolerance must be positive");
    EigenResult out;
    if (g.rows() == 0) {
        out.eigenvalues.resize(0);
        if (want_vectors) out.eigenvectors = Eigen::MatrixXd(0, 0);
        return out;
    }
    const double scale = g.cwiseAbs().maxCoeff();
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw std::invalid_argument("sym_eig: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        g, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("sym_eig: eigensolver did not converge");
    }
    out.eigenvalues = solver.eigenvalues();
    if (want_vectors) out.eigenvectors = solver.eigenvectors();
    return out;
}

}  // namespace bommp
