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

#include "bommp/blockmodel.hpp"
#include "bommp/random.hpp"

using namespace bommp;

namespace {

BlockVector make(std::initializer_list<std::size_t> lens, std::initializer_list<double> vals) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return BlockVector(BlockPattern(lens), v);
}

}  // namespace

TEST_CASE("block pattern offsets and dimension") {
    const BlockPattern p{1, 2, 1};
    CHECK(p.block_count() == 3);
    CHECK(p.dim() == 4);
    CHECK(p.offset(0) == 0);
    CHECK(p.offset(1) == 1);
    CHECK(p.offset(2) == 3);
    CHECK_THROWS_AS(BlockPattern({2, 0}), std::invalid_argument);
    CHECK(BlockPattern::uniform(3, 2) == BlockPattern({2, 2, 2}));
}

TEST_CASE("mixed norms") {
    const auto x = make({2, 2}, {3, 4, 0, 0});
    CHECK(mixed_norm(x, MixedNorm::l1) == doctest::Approx(5.0));
    CHECK(mixed_norm(x, MixedNorm::linf) == doctest::Approx(5.0));
    const auto y = make({2, 2}, {1, 0, 0, 1});
    CHECK(mixed_norm(y, MixedNorm::l2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("block support") {
    CHECK(block_support(BlockVector::zeros(BlockPattern{2, 2}), 0.0).empty());

    const auto x = make({2, 2, 2}, {3, 4, 0, 0, 0, 1e-12});
    const auto s = block_support(x, 1e-9);
    REQUIRE(s.size() == 1);
    CHECK(s.indices()[0] == 0);

    const auto y = make({2, 2}, {1, 0, 0, 1});
    CHECK(block_support(y, 0.0).size() == 2);
    CHECK_THROWS(block_support(y, -1.0));

    // Default tolerance is relative to the largest block.
    CHECK(block_support(x).size() == 1);
    CHECK(default_support_tolerance(BlockVector::zeros(BlockPattern{1})) == 1e-300);
}

TEST_CASE("embed places coefficients by offset") {
    const BlockPattern p22{2, 2};
    CHECK(embed(Eigen::VectorXd(0), SupportSet(p22, {})).values().isZero());

    const auto e = embed(Eigen::Vector2d(7, 8), SupportSet(p22, {1}));
    CHECK(e.values() == Eigen::Vector4d(0, 0, 7, 8));

    const BlockPattern p121{1, 2, 1};
    const auto f = embed(Eigen::Vector2d(5, 9), SupportSet(p121, {0, 2}));
    CHECK(f.values() == Eigen::Vector4d(5, 0, 0, 9));

    CHECK_THROWS_AS(embed(Eigen::Vector3d(1, 2, 3), SupportSet(p22, {1})), std::invalid_argument);
}

TEST_CASE("support set validation and algebra") {
    const BlockPattern p = BlockPattern::uniform(5, 1);
    CHECK_THROWS_AS(SupportSet(p, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(SupportSet(p, {5}), std::out_of_range);

    const SupportSet a(p, {3, 0, 2});
    CHECK(std::vector<std::size_t>(a.begin(), a.end()) == std::vector<std::size_t>{0, 2, 3});
    const SupportSet b(p, {2, 4});
    CHECK(a.united(b) == SupportSet(p, {0, 2, 3, 4}));
    CHECK(a.minus(b) == SupportSet(p, {0, 3}));
    CHECK(a.complement() == SupportSet(p, {1, 4}));
    CHECK(SupportSet(p, {0, 3}).is_subset_of(a));
    CHECK_FALSE(b.is_subset_of(a));
}

TEST_CASE("norm chain and embed/restrict identities on random vectors") {
    Philox4x64 rng(2024, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::size_t> lens(1 + rng.below(8));
        for (auto& d : lens) d = 1 + rng.below(4);
        const BlockPattern p(lens);
        Eigen::VectorXd v(static_cast<Eigen::Index>(p.dim()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform() < 0.3 ? 0.0 : rng.normal();
        const BlockVector x(p, v);

        const double n1 = mixed_norm(x, MixedNorm::l1);
        const double n2 = mixed_norm(x, MixedNorm::l2);
        const double ninf = mixed_norm(x, MixedNorm::linf);
        const double slack = 1e-12 * (1.0 + n1);
        CHECK(ninf <= n2 + slack);
        CHECK(n2 <= n1 + slack);
        CHECK(n1 <= std::sqrt(static_cast<double>(p.block_count())) * n2 + slack);

        double sq = 0.0;
        for (double w : x.block_norms()) sq += w * w;
        CHECK(std::sqrt(sq) == doctest::Approx(n2).epsilon(1e-14));

        const SupportSet s = block_support(x, 0.0);
        CHECK(s.size() == block_l0(x));
        // restrict then embed is the identity on vectors supported in s.
        CHECK(embed(restrict_to(x, s), s).values() == x.values());

        const auto gamma = SupportSet(p, rng.sample_without_replacement(p.block_count(),
                                                                        rng.below(p.block_count() + 1)));
        Eigen::VectorXd coef(static_cast<Eigen::Index>(gamma.coordinate_count()));
        for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] = rng.normal();
        const auto e = embed(coef, gamma);
        CHECK(restrict_to(e, gamma) == coef);
        CHECK(block_support(e, 0.0).is_subset_of(gamma));
    }
}
