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
#include <sstream>

#include "bommp/harness.hpp"
#include "bommp/random.hpp"
#include "bommp/ric.hpp"
#include "bommp/textio.hpp"

using namespace bommp;

TEST_CASE("gaussian matrices are reproducible and scaled by 1/sqrt(m)") {
    const auto p = BlockPattern::uniform(6, 2);
    const auto a = gen_gaussian_matrix(10, p, 5);
    const auto b = gen_gaussian_matrix(10, p, 5);
    CHECK(a.values() == b.values());
    CHECK(a.pattern() == p);

    const auto c = gen_gaussian_matrix(10, p, 6);
    const auto d = gen_gaussian_matrix(10, p, 5, 1);
    CHECK(((a.values() - c.values()).array() != 0.0).count() >= 119);
    CHECK(((a.values() - d.values()).array() != 0.0).count() >= 119);

    // Row-major fill: entry (0, 1) is the second normal from the stream.
    Philox4x64 rng(5, 0);
    const double first = rng.normal();
    const double second = rng.normal();
    CHECK(a.values()(0, 0) == doctest::Approx(first / std::sqrt(10.0)).epsilon(1e-15));
    CHECK(a.values()(0, 1) == doctest::Approx(second / std::sqrt(10.0)).epsilon(1e-15));

    const auto big = gen_gaussian_matrix(50, BlockPattern::uniform(10000, 1), 9);
    const double mean_sq = big.values().colwise().squaredNorm().mean();
    CHECK(std::abs(mean_sq - 1.0) <= 0.05);
}

TEST_CASE("signals are block sparse with uniformly drawn supports") {
    const auto p = BlockPattern::uniform(8, 3);
    const auto x = gen_signal(p, 3, 1);
    CHECK(block_l0(x) == 3);
    CHECK(gen_signal(p, 3, 1).values() == x.values());
    CHECK(block_l0(gen_signal(p, 0, 1)) == 0);
    CHECK_THROWS_AS(gen_signal(p, 9, 1), std::invalid_argument);

    const auto u = gen_signal(p, 4, 2, SignalDistribution::constant_magnitude);
    for (std::size_t i : block_support(u)) CHECK(u.block_norm(i) == doctest::Approx(1.0).epsilon(1e-12));

    // Each block should appear with frequency K/l = 1/4 over many draws.
    std::vector<int> hits(8, 0);
    const int draws = 8000;
    for (int s = 0; s < draws; ++s) {
        for (std::size_t i : block_support(gen_signal(p, 2, static_cast<std::uint64_t>(s)))) ++hits[i];
    }
    // Binomial standard deviation is about 39; allow five of them.
    for (int h : hits) CHECK(std::abs(h - draws / 4) <= 200);
}

TEST_CASE("noise has the requested norm") {
    CHECK(gen_noise(30, 0.25, 3).norm() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(gen_noise(30, 0.0, 3).isZero());
    CHECK(gen_noise(30, 0.25, 3) == gen_noise(30, 0.25, 3));
    CHECK(gen_noise(30, 0.25, 3) != gen_noise(30, 0.25, 3, 1));
    CHECK_THROWS_AS(gen_noise(3, -1.0, 0), std::invalid_argument);
}

TEST_CASE("l2/l0 oracle") {
    const DenseMatrix eye(Eigen::MatrixXd::Identity(6, 6), BlockPattern::uniform(3, 2));
    {
        const auto r = oracle_l20(eye, Eigen::VectorXd::Zero(6), 0.0, 2);
        CHECK(r.feasible);
        CHECK(r.support.empty());
        CHECK(r.estimate.values().isZero());
    }
    {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
        y << 0, 0, 5, 6, 0, 0;
        const auto r = oracle_l20(eye, y, 0.0, 1);
        REQUIRE(r.feasible);
        CHECK(std::vector<std::size_t>(r.support.begin(), r.support.end()) == std::vector<std::size_t>{1});
        CHECK(r.estimate.values() == y);
    }
    {
        Eigen::VectorXd y(6);
        y << 1, 0, 1, 0, 1, 0;
        CHECK_FALSE(oracle_l20(eye, y, 0.0, 2).feasible);
        // With slack 1.01 a two-block fit suffices.
        CHECK(oracle_l20(eye, y, 1.01, 2).feasible);
        CHECK(oracle_l20(eye, y, 1.01, 2).support.size() == 2);
    }
    const auto big = gen_gaussian_matrix(10, BlockPattern::uniform(40, 1), 1);
    CHECK_THROWS_AS(oracle_l20(big, Eigen::VectorXd::Ones(10), 0.0, 10, 1000), BudgetExceeded);

    // Agrees with the true signal on a well-posed Gaussian instance.
    const auto p = BlockPattern::uniform(12, 2);
    const auto a = gen_gaussian_matrix(20, p, 42);
    const auto x = gen_signal(p, 2, 42);
    const auto r = oracle_l20(a, a.apply(x), 0.0, 2);
    REQUIRE(r.feasible);
    CHECK(r.support == block_support(x));
    CHECK((r.estimate.values() - x.values()).norm() <= 1e-8 * x.values().norm());
}

TEST_CASE("single trials") {
    const auto p = BlockPattern::uniform(10, 2);
    const auto a = gen_gaussian_matrix(30, p, 3);
    const auto x = gen_signal(p, 2, 3);

    TrialCell cell;
    cell.K = 2;
    cell.N = 2;
    cell.seed = 3;
    cell.certify = true;
    const auto ok = run_trial(a, x, cell);
    CHECK(ok.exact_recovery);
    CHECK(ok.support_match);
    CHECK(ok.relative_error <= 1e-6);
    REQUIRE(ok.certified.has_value());

    TrialCell zero;
    zero.K = 0;
    const auto z = run_trial(a, BlockVector::zeros(p), zero);
    CHECK(z.exact_recovery);
    CHECK(z.iterations == 0);
    CHECK_THROWS_AS(run_trial(a, x, zero), std::invalid_argument);

    TrialCell noisy = cell;
    noisy.epsilon = 1e-3;
    noisy.certify = false;
    const auto n = run_trial(a, x, noisy);
    CHECK(n.support_match);
    CHECK(n.relative_error < 1e-2);
    CHECK_FALSE(n.certified.has_value());
}

TEST_CASE("noisy support criterion") {
    const BlockPattern p = BlockPattern::uniform(4, 1);
    RecoveryResult r;
    r.support = SupportSet(p, {0, 1, 3});
    r.estimate = BlockVector(p, Eigen::Vector4d(2.0, 0.01, 0.0, 3.0));
    CHECK(noisy_support_recovered(r, SupportSet(p, {0, 3}), 2));
    CHECK_FALSE(noisy_support_recovered(r, SupportSet(p, {0, 1}), 2));
    CHECK_FALSE(noisy_support_recovered(r, SupportSet(p, {0, 2}), 2));
}

TEST_CASE("experiment config parsing") {
    const auto c = parse_experiment_config(
        R"({"m": 20, "l": 10, "d": 2, "K_range": [0, 3], "N_list": [1, 2], "trials": 5,
            "master_seed": 9, "tie_break": "highest", "signal_distribution": "constant_magnitude"})");
    CHECK(c.m == 20);
    CHECK(c.block_lengths == std::vector<std::size_t>(10, 2));
    CHECK(c.K_values == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(c.N_values == std::vector<std::size_t>{1, 2});
    CHECK(c.tie_break == TieBreak::highest_index);
    CHECK(c.signal_distribution == SignalDistribution::constant_magnitude);
    CHECK(c.master_seed == 9);

    const auto b = parse_experiment_config(R"({"m": 8, "block_lengths": [1, 2, 3], "K_list": [1], "N_list": [1]})");
    CHECK(b.pattern() == BlockPattern{1, 2, 3});

    CHECK_THROWS_AS(parse_experiment_config(R"({"m": 8, "l": 4, "d": 1, "K_list": [1], "N_list": [1], "x": 1})"),
                    ParseError);
    CHECK_THROWS_AS(parse_experiment_config("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config("{not json"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"m": 8, "l": 4, "d": 1, "K_range": [3, 1], "N_list": [1]})"),
                    ParseError);
    CHECK_THROWS(parse_experiment_config(R"({"m": 8, "l": 4, "d": 1, "K_list": [9], "N_list": [1]})"));
    CHECK_THROWS(parse_experiment_config(
        R"({"m": 8, "l": 4, "d": 1, "K_list": [1], "N_list": [1], "matrix_ensemble": "bernoulli"})"));
}

TEST_CASE("phase runs are deterministic and skip invalid cells") {
    ExperimentConfig c;
    c.m = 16;
    c.block_lengths.assign(12, 2);
    c.K_values = {0, 1, 2, 3};
    c.N_values = {1, 2};
    c.trials = 12;
    c.master_seed = 4;

    const auto one = run_phase(c, 1);
    const auto many = run_phase(c, 4);
    std::ostringstream a, b;
    write_phase_csv(a, one);
    write_phase_csv(b, many);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("K,N,trials,successes,success_rate,mean_iterations,mean_rel_error\n", 0) == 0);

    // K=0 is trivial for every N; (K=1, N=2) is invalid and skipped.
    std::size_t zero_rows = 0;
    for (const auto& r : one) {
        CHECK(cell_is_valid(r.K, r.N, c.m));
        if (r.K == 0) {
            ++zero_rows;
            CHECK(r.success_rate == 1.0);
        }
        CHECK(!(r.K == 1 && r.N == 2));
        CHECK(r.trials == 12);
    }
    CHECK(zero_rows == 2);
    CHECK(one.size() == 7);

    std::ostringstream svg;
    write_phase_svg(svg, one);
    CHECK(svg.str().find("<svg") != std::string::npos);
    CHECK(svg.str().find("</svg>") != std::string::npos);

    CHECK(cell_is_valid(0, 5, 1));
    CHECK_FALSE(cell_is_valid(3, 4, 100));
    CHECK_FALSE(cell_is_valid(5, 2, 9));
}

TEST_CASE("polarization sweep") {
    const auto s = polarization_sweep(200, 17);
    CHECK(s.draws == 200);
    CHECK(s.max_relative_gap <= 1e-9);
    const auto again = polarization_sweep(200, 17);
    CHECK(again.max_abs_gap == s.max_abs_gap);
}
