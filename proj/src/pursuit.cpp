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

#include "bommp/pursuit.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bommp/textio.hpp"

namespace bommp {

std::string_view to_string(TieBreak t) {
    return t == TieBreak::lowest_index ? "lowest_index" : "highest_index";
}

TieBreak parse_tie_break(std::string_view s) {
    if (s == "lowest_index" || s == "lowest") return TieBreak::lowest_index;
    if (s == "highest_index" || s == "highest") return TieBreak::highest_index;
    throw std::invalid_argument("unknown tie-break policy '" + std::string(s) + "'");
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::residual_below_epsilon: return "residual_below_epsilon";
        case StopReason::iteration_cap: return "iteration_cap";
        case StopReason::numerical_stall: return "numerical_stall";
    }
    return "unknown";
}

PursuitConfig PursuitConfig::create(std::size_t K, std::size_t N, std::size_t m, double epsilon,
                                    TieBreak tie_break) {
    PursuitConfig c;
    c.K = K;
    c.N = N;
    c.epsilon = epsilon;
    c.max_iterations = K;
    c.tie_break = tie_break;
    c.validate(m);
    return c;
}

void PursuitConfig::validate(std::size_t m) const {
    if (K < 1) throw std::invalid_argument("K must be at least 1");
    if (N < 1 || N > K) throw std::invalid_argument("N must satisfy 1 <= N <= K");
    if (N * K > m) throw std::invalid_argument("N must satisfy N <= m / K");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    if (!(support_tol >= 0.0) || !(tie_rtol >= 0.0)) {
        throw std::invalid_argument("tolerances must be nonnegative");
    }
}

std::vector<double> block_scores(const DenseMatrix& a, const Eigen::VectorXd& r) {
    if (static_cast<std::size_t>(r.size()) != a.rows()) {
        throw std::invalid_argument("residual length does not match matrix rows");
    }
    const Eigen::VectorXd corr = a.values().transpose() * r;
    const BlockPattern& p = a.pattern();
    std::vector<double> scores(p.block_count());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = corr.segment(static_cast<Eigen::Index>(p.offset(i)),
                                 static_cast<Eigen::Index>(p.length(i)))
                        .norm();
    }
    return scores;
}

std::vector<std::size_t> select_largest(std::span<const double> scores, std::size_t n,
                                        TieBreak tie_break, double tie_rtol) {
    if (n > scores.size()) {
        throw std::invalid_argument("cannot select " + std::to_string(n) + " of " +
                                    std::to_string(scores.size()) + " blocks");
    }
    if (n == 0) return {};

    std::vector<double> sorted(scores.begin(), scores.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n - 1),
                     sorted.end(), std::greater<>());
    const double nth = sorted[n - 1];
    const double top = *std::max_element(scores.begin(), scores.end());
    const double band = tie_rtol * top;

    std::vector<std::size_t> chosen;
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > nth + band) {
            chosen.push_back(i);
        } else if (scores[i] >= nth - band) {
            tied.push_back(i);
        }
    }
    if (tie_break == TieBreak::highest_index) std::reverse(tied.begin(), tied.end());
    for (std::size_t i = 0; chosen.size() < n; ++i) chosen.push_back(tied[i]);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

SupportSet identify(const DenseMatrix& a, const Eigen::VectorXd& r, std::size_t n,
                    TieBreak tie_break, double tie_rtol) {
    const auto scores = block_scores(a, r);
    return SupportSet(a.pattern(), select_largest(scores, n, tie_break, tie_rtol));
}

RecoveryResult bommp(const DenseMatrix& a, const Eigen::VectorXd& y, const PursuitConfig& config) {
    const std::size_t m = a.rows();
    if (static_cast<std::size_t>(y.size()) != m) {
        throw std::invalid_argument("measurement length " + std::to_string(y.size()) +
                                    " does not match matrix rows " + std::to_string(m));
    }
    config.validate(m);
    if (config.N > a.pattern().block_count()) {
        throw std::invalid_argument("N exceeds the number of blocks");
    }

    const double y_norm = y.norm();
    const double stop_threshold = std::max(config.epsilon, 1e-12 * y_norm);
    const double stall_threshold = 1e-14 * y_norm;
    const std::size_t cap = std::min(config.max_iterations, config.K);

    RecoveryResult out;
    out.support = SupportSet(a.pattern(), {});
    out.residual = y;
    out.initial_residual_norm = y_norm;
    Eigen::VectorXd coefficients(0);
    double r_norm = y_norm;

    out.stop_reason = StopReason::iteration_cap;
    if (r_norm <= stop_threshold) out.stop_reason = StopReason::residual_below_epsilon;

    for (std::size_t k = 1; r_norm > stop_threshold && k <= cap; ++k) {
        IterationRecord rec;
        rec.k = k;
        rec.scores = block_scores(a, out.residual);
        rec.selected = SupportSet(
            a.pattern(), select_largest(rec.scores, config.N, config.tie_break, config.tie_rtol));
        rec.cumulative = out.support.united(rec.selected);

        // Keep A_Lambda overdetermined: never fit more columns than rows.
        if (rec.cumulative.coordinate_count() > m) {
            out.stop_reason = StopReason::numerical_stall;
            break;
        }

        const bool grew = rec.cumulative.size() > out.support.size();
        auto fit = least_squares_min_norm(submatrix(a, rec.cumulative), y);
        const double new_norm = fit.residual.norm();
        if (!grew && r_norm - new_norm < stall_threshold) {
            out.stop_reason = StopReason::numerical_stall;
            break;
        }

        rec.residual_norm = new_norm;
        out.support = rec.cumulative;
        out.residual = std::move(fit.residual);
        coefficients = std::move(fit.coefficients);
        r_norm = new_norm;
        out.trace.push_back(std::move(rec));

        if (r_norm <= stop_threshold) {
            out.stop_reason = StopReason::residual_below_epsilon;
        }
    }

    out.estimate = embed(coefficients, out.support);
    return out;
}

RecoveryResult bomp(const DenseMatrix& a, const Eigen::VectorXd& y, PursuitConfig config) {
    config.N = 1;
    return bommp(a, y, config);
}

std::optional<IdentificationMargin> alpha_beta_from_scores(std::span<const double> scores,
                                                           const SupportSet& lambda,
                                                           const SupportSet& truth,
                                                           std::size_t n) {
    const SupportSet missing = truth.minus(lambda);
    if (missing.empty()) return std::nullopt;

    std::vector<double> wrong;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!truth.contains(i) && !lambda.contains(i)) wrong.push_back(scores[i]);
    }
    if (n == 0 || wrong.size() < n) return std::nullopt;

    std::nth_element(wrong.begin(), wrong.begin() + static_cast<std::ptrdiff_t>(n - 1), wrong.end(),
                     std::greater<>());
    IdentificationMargin margin;
    margin.alpha = wrong[n - 1];
    for (std::size_t i : missing) margin.beta = std::max(margin.beta, scores[i]);
    return margin;
}

IdentificationMargin alpha_beta(const DenseMatrix& a, const Eigen::VectorXd& r,
                                const SupportSet& lambda, const SupportSet& truth, std::size_t n) {
    if (truth.minus(lambda).empty()) {
        throw std::domain_error("beta is undefined: true support already contained in Lambda");
    }
    const auto scores = block_scores(a, r);
    auto margin = alpha_beta_from_scores(scores, lambda, truth, n);
    if (!margin) {
        throw std::domain_error("alpha is undefined: fewer than N blocks outside T u Lambda");
    }
    return *margin;
}

void write_trace_csv(std::ostream& out, const RecoveryResult& result, std::size_t n,
                     const std::optional<SupportSet>& truth) {
    out << "k,selected_blocks,cumulative_size,residual_norm,alpha_N,beta_1\n";
    SupportSet previous(result.support.pattern(), {});
    for (const auto& rec : result.trace) {
        out << rec.k << ',';
        bool first = true;
        for (std::size_t i : rec.selected) {
            out << (first ? "" : ";") << i + 1;
            first = false;
        }
        out << ',' << rec.cumulative.size() << ',' << format_roundtrip(rec.residual_norm) << ',';
        if (truth) {
            if (auto margin = alpha_beta_from_scores(rec.scores, previous, *truth, n)) {
                out << format_roundtrip(margin->alpha) << ',' << format_roundtrip(margin->beta);
            } else {
                out << ',';
            }
        } else {
            out << ',';
        }
        out << '\n';
        previous = rec.cumulative;
    }
}

}  // namespace bommp
