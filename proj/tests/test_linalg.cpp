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

#include "doctest.h"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "bommp/harness.hpp"
#include "bommp/linalg.hpp"
#include "bommp/random.hpp"

using namespace bommp;

namespace {

Eigen::MatrixXd gaussian(Philox4x64& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    return g;
}

}  // namespace

TEST_CASE("column blocks and submatrices") {
    const DenseMatrix eye(Eigen::MatrixXd::Identity(4, 4), BlockPattern{2, 2});
    const DenseMatrix b2 = column_block(eye, 1);
    CHECK(b2.values() == Eigen::MatrixXd::Identity(4, 4).rightCols(2));
    CHECK_THROWS_AS(column_block(eye, 2), std::out_of_range);

    const DenseMatrix single(Eigen::MatrixXd::Identity(3, 3));
    CHECK(column_block(single, 0).values() == single.values());

    CHECK(submatrix(eye, SupportSet::all(eye.pattern())).values() == eye.values());
    const DenseMatrix empty = submatrix(eye, SupportSet(eye.pattern(), {}));
    CHECK(empty.rows() == 4);
    CHECK(empty.cols() == 0);
    CHECK(submatrix(eye, SupportSet(eye.pattern(), {1})).values() == eye.values().rightCols(2));

    CHECK_THROWS_AS(DenseMatrix(Eigen::MatrixXd::Identity(2, 3), BlockPattern{2}), std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(DenseMatrix{bad}, std::invalid_argument);
}

TEST_CASE("least squares small cases") {
    {
        const auto r = least_squares_min_norm(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3));
        CHECK((r.coefficients - Eigen::Vector3d(1, 2, 3)).norm() < 1e-14);
        CHECK(r.residual.norm() < 1e-14);
        CHECK(r.rank == 3);
    }
    {
        const auto r = least_squares_min_norm(Eigen::MatrixXd(3, 0), Eigen::Vector3d(4, 5, 6));
        CHECK(r.coefficients.size() == 0);
        CHECK(r.residual == Eigen::Vector3d(4, 5, 6));
    }
    {
        Eigen::MatrixXd b(2, 1);
        b << 1, 1;
        const auto r = least_squares_min_norm(b, Eigen::Vector2d(1, 3));
        CHECK(r.coefficients[0] == doctest::Approx(2.0));
        CHECK((r.residual - Eigen::Vector2d(-1, 1)).norm() < 1e-14);
    }
    CHECK_THROWS_AS(least_squares_min_norm(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector2d(1, 2)),
                    std::invalid_argument);
}

TEST_CASE("least squares on rank-deficient matrices returns the minimum-norm solution") {
    // Two identical columns: the minimum-norm split is even.
    Eigen::MatrixXd b(3, 2);
    b << 1, 1, 0, 0, 0, 0;
    const auto r = least_squares_min_norm(b, Eigen::Vector3d(4, 1, 0));
    CHECK(r.rank == 1);
    CHECK((r.coefficients - Eigen::Vector2d(2, 2)).norm() < 1e-12);
    CHECK((r.residual - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);

    // Against the SVD pseudo-inverse on random rank-deficient products.
    Philox4x64 rng(5, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd low = gaussian(rng, 12, 3) * gaussian(rng, 3, 6);
        const Eigen::VectorXd y = gaussian(rng, 12, 1);
        const auto got = least_squares_min_norm(low, y);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(low, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-10);
        const Eigen::VectorXd want = svd.solve(y);
        CHECK(got.rank == 3);
        CHECK((got.coefficients - want).norm() <= 1e-9 * (1.0 + want.norm()));
    }
}

TEST_CASE("least squares satisfies the normal equations on random systems") {
    Philox4x64 rng(11, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = static_cast<Eigen::Index>(2 + rng.below(30));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(m)));
        const Eigen::MatrixXd b = gaussian(rng, m, n);
        const Eigen::VectorXd y = gaussian(rng, m, 1);
        const auto r = least_squares_min_norm(b, y);
        const double scale = b.norm() * y.norm();
        CHECK((b.transpose() * r.residual).cwiseAbs().maxCoeff() <= 1e-9 * scale);

        // Full column rank: agrees with a Cholesky solve of the normal equations.
        const Eigen::VectorXd normal = (b.transpose() * b).llt().solve(b.transpose() * y);
        CHECK((r.coefficients - normal).norm() <= 1e-7 * (1.0 + normal.norm()));
    }
}

TEST_CASE("residual projection") {
    Philox4x64 rng(3, 0);
    const DenseMatrix full(gaussian(rng, 5, 5));
    CHECK(residual_projection(full, Eigen::VectorXd::Ones(5)).norm() < 1e-12);

    const DenseMatrix none(Eigen::MatrixXd(4, 0), BlockPattern{});
    const Eigen::Vector4d y(1, 2, 3, 4);
    CHECK(residual_projection(none, y) == y);

    Eigen::MatrixXd e1(2, 1);
    e1 << 1, 0;
    CHECK((residual_projection(DenseMatrix(e1), Eigen::Vector2d(3, 4)) - Eigen::Vector2d(0, 4)).norm() < 1e-15);

    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix b(gaussian(rng, 10, 1 + static_cast<Eigen::Index>(rng.below(9))));
        const Eigen::VectorXd v = gaussian(rng, 10, 1);
        const Eigen::VectorXd once = residual_projection(b, v);
        const Eigen::VectorXd twice = residual_projection(b, once);
        CHECK((twice - once).norm() <= 1e-10 * v.norm());
        CHECK(once.norm() <= v.norm() * (1.0 + 1e-12));
    }
}

TEST_CASE("symmetric eigenvalues against closed forms") {
    {
        const auto r = sym_eig(Eigen::Vector3d(3, 1, 2).asDiagonal().toDenseMatrix());
        CHECK((r.eigenvalues - Eigen::Vector3d(1, 2, 3)).norm() < 1e-14);
    }
    {
        Eigen::Matrix2d g;
        g << 0.5, 0.5, 0.5, 1.5;
        const auto r = sym_eig(g);
        CHECK(r.eigenvalues[0] == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-13));
        CHECK(r.eigenvalues[1] == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-13));
        CHECK(r.eigenvalues[0] == doctest::Approx(0.29289321881345248).epsilon(1e-13));
    }
    {
        const auto r = sym_eig(Eigen::MatrixXd::Identity(6, 6));
        CHECK((r.eigenvalues - Eigen::VectorXd::Ones(6)).norm() < 1e-14);
    }
    Eigen::Matrix2d asym;
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(sym_eig(asym), std::invalid_argument);
    CHECK_THROWS_AS(sym_eig(Eigen::MatrixXd::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST_CASE("eigenvalue sum and product match trace and determinant") {
    Philox4x64 rng(17, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(4));
        const Eigen::MatrixXd h = gaussian(rng, n, n);
        const Eigen::MatrixXd g = h + h.transpose();
        const auto r = sym_eig(g, 1e-12, true);
        CHECK(r.eigenvalues.sum() == doctest::Approx(g.trace()).epsilon(1e-9).scale(g.norm()));
        CHECK(r.eigenvalues.prod() ==
              doctest::Approx(g.determinant()).epsilon(1e-9).scale(std::pow(g.norm(), static_cast<double>(n))));
        for (Eigen::Index i = 1; i < n; ++i) CHECK(r.eigenvalues[i - 1] <= r.eigenvalues[i]);
        REQUIRE(r.eigenvectors.has_value());
        const Eigen::MatrixXd& v = *r.eigenvectors;
        CHECK((g * v - v * r.eigenvalues.asDiagonal()).norm() <= 1e-12 * (1.0 + g.norm()));
    }
}
