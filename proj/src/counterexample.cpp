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

#include "bommp/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bommp/ric.hpp"

namespace bommp {

void CounterexampleSpec::validate() const {
    if (K < 1 || d < 1 || N < 1 || N > K) {
        throw std::invalid_argument("counterexample requires K, d >= 1 and 1 <= N <= K");
    }
}

DenseMatrix build_counterexample(const CounterexampleSpec& spec) {
    spec.validate();
    const std::size_t l = spec.blocks();
    const auto d = static_cast<Eigen::Index>(spec.d);
    const double kd = static_cast<double>(spec.K);
    const double nd = static_cast<double>(spec.N);
    const double top_scale = std::sqrt(kd / (kd + nd));
    const double coupling = 1.0 / std::sqrt(kd * (kd + nd));
    const std::size_t last_first = l - spec.N;

    const auto n = static_cast<Eigen::Index>(spec.dim());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const auto eye = Eigen::MatrixXd::Identity(d, d);
    auto at = [&](std::size_t row_block, std::size_t col_block) {
        return a.block(static_cast<Eigen::Index>(row_block) * d,
                       static_cast<Eigen::Index>(col_block) * d, d, d);
    };
    for (std::size_t j = 0; j < spec.K; ++j) at(j, j) = top_scale * eye;
    for (std::size_t j = spec.K; j < last_first; ++j) at(j, j) = eye;
    for (std::size_t j = last_first; j < l; ++j) {
        for (std::size_t i = 0; i < spec.K; ++i) at(i, j) = coupling * eye;
        at(j, j) = eye;
    }
    return DenseMatrix(std::move(a), BlockPattern::uniform(l, spec.d));
}

std::vector<SpectrumEntry> expected_spectrum(const CounterexampleSpec& spec) {
    spec.validate();
    const double kd = static_cast<double>(spec.K);
    const double nd = static_cast<double>(spec.N);
    const double spread = 1.0 / std::sqrt(kd / nd + 1.0);
    std::vector<SpectrumEntry> all = {
        {kd / (kd + nd), spec.d * (spec.K - 1)},
        {1.0, spec.d * (spec.N * spec.K - spec.K)},
        {1.0 - spread, spec.d},
        {1.0 + spread, spec.d},
    };
    std::erase_if(all, [](const SpectrumEntry& e) { return e.multiplicity == 0; });
    std::sort(all.begin(), all.end(),
              [](const SpectrumEntry& x, const SpectrumEntry& y) { return x.value < y.value; });
    return all;
}

std::vector<SpectrumEntry> cluster_spectrum(const Eigen::VectorXd& sorted_eigenvalues,
                                            double radius) {
    std::vector<SpectrumEntry> out;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sorted_eigenvalues.size(); ++i) {
        const double v = sorted_eigenvalues[i];
        if (i == 0 || v - sorted_eigenvalues[i - 1] > radius) {
            if (!out.empty()) out.back().value = sum / static_cast<double>(out.back().multiplicity);
            out.push_back({v, 0});
            sum = 0.0;
        }
        sum += v;
        ++out.back().multiplicity;
    }
    if (!out.empty()) out.back().value = sum / static_cast<double>(out.back().multiplicity);
    return out;
}

BlockVector worst_case_signal(const CounterexampleSpec& spec) {
    spec.validate();
    BlockPattern pattern = BlockPattern::uniform(spec.blocks(), spec.d);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dim()));
    for (std::size_t i = 0; i < spec.K; ++i) v[static_cast<Eigen::Index>(i * spec.d)] = 1.0;
    return BlockVector(std::move(pattern), std::move(v));
}

CounterexampleReport verify_counterexample(const CounterexampleSpec& spec, double eig_tol,
                                           TieBreak tie_break) {
    spec.validate();
    CounterexampleReport rep;
    rep.spec = spec;
    rep.tie_break = tie_break;

    const DenseMatrix a = build_counterexample(spec);
    const Eigen::MatrixXd gram = a.values().transpose() * a.values();
    const EigenResult eig = sym_eig(0.5 * (gram + gram.transpose()));
    rep.spectrum_expected = expected_spectrum(spec);
    rep.spectrum_observed = cluster_spectrum(eig.eigenvalues);
    rep.spectrum_matches = rep.spectrum_observed.size() == rep.spectrum_expected.size();
    for (std::size_t i = 0; rep.spectrum_matches && i < rep.spectrum_expected.size(); ++i) {
        const auto& want = rep.spectrum_expected[i];
        const auto& got = rep.spectrum_observed[i];
        rep.spectrum_matches = got.multiplicity == want.multiplicity &&
                               std::abs(got.value - want.value) <= eig_tol;
    }
    // Per-eigenvalue check as well: a cluster mean can hide a stray member.
    if (rep.spectrum_matches) {
        Eigen::Index pos = 0;
        for (const auto& want : rep.spectrum_expected) {
            for (std::size_t j = 0; j < want.multiplicity; ++j, ++pos) {
                if (std::abs(eig.eigenvalues[pos] - want.value) > eig_tol) rep.spectrum_matches = false;
            }
        }
    }

    rep.delta_observed = block_ric_exact(a, spec.blocks()).delta;
    rep.bound = bound_sharp(spec.K, spec.N);

    const BlockVector x = worst_case_signal(spec);
    const Eigen::VectorXd y = a.apply(x);
    rep.first_scores = block_scores(a, y);
    const double share = static_cast<double>(spec.K) / static_cast<double>(spec.K + spec.N);
    const std::size_t l = spec.blocks();
    rep.scores_match = true;
    for (std::size_t i = 0; i < l; ++i) {
        const bool middle = i >= spec.K && i < l - spec.N;
        const double want = middle ? 0.0 : share;
        if (std::abs(rep.first_scores[i] - want) > 1e-12) rep.scores_match = false;
    }

    std::vector<std::size_t> truth_idx(spec.K);
    for (std::size_t i = 0; i < spec.K; ++i) truth_idx[i] = i;
    const SupportSet truth(x.pattern(), truth_idx);
    const IdentificationMargin margin = alpha_beta(a, y, SupportSet(x.pattern(), {}), truth, spec.N);
    rep.alpha_1 = margin.alpha;
    rep.beta_1 = margin.beta;

    const auto config = PursuitConfig::create(spec.K, spec.N, a.rows(), 0.0, tie_break);
    const RecoveryResult run = bommp(a, y, config);
    rep.first_selection = run.trace.empty() ? SupportSet(x.pattern(), {}) : run.trace.front().selected;
    rep.failure_demonstrated = true;
    for (std::size_t i : rep.first_selection) {
        if (truth.contains(i)) rep.failure_demonstrated = false;
    }
    rep.recovered = block_support(run.estimate) == truth &&
                    (run.estimate.values() - x.values()).norm() <= 1e-8 * x.values().norm();
    return rep;
}

}  // namespace bommp
