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
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bommp/blockmodel.hpp"
#include "bommp/linalg.hpp"

namespace bommp {

/// How blocks whose scores tie at the selection boundary are chosen.
enum class TieBreak { lowest_index, highest_index };

std::string_view to_string(TieBreak t);
TieBreak parse_tie_break(std::string_view s);

struct PursuitConfig {
    std::size_t K = 1;  // block sparsity level
    std::size_t N = 1;  // blocks selected per iteration
    double epsilon = 0.0;
    std::size_t max_iterations = 1;
    TieBreak tie_break = TieBreak::lowest_index;
    /// Relative tolerance used when reporting the support of the estimate.
    double support_tol = 1e-9;
    /// Scores within tie_rtol * (largest score) of the N-th largest are tied.
    double tie_rtol = 1e-12;

    /// Validated config with max_iterations = K. Throws std::invalid_argument
    /// unless 1 <= N <= K, N * K <= m and epsilon >= 0.
    static PursuitConfig create(std::size_t K, std::size_t N, std::size_t m, double epsilon = 0.0,
                                TieBreak tie_break = TieBreak::lowest_index);

    void validate(std::size_t m) const;
};

struct IterationRecord {
    std::size_t k = 0;
    SupportSet selected;    // T^k
    SupportSet cumulative;  // Lambda^k
    double residual_norm = 0.0;  // ||r^k||_2
    std::vector<double> scores;  // ||A[i]^T r^{k-1}||_2, i = 0..l-1
};

enum class StopReason { residual_below_epsilon, iteration_cap, numerical_stall };

std::string_view to_string(StopReason r);

struct RecoveryResult {
    BlockVector estimate;
    SupportSet support;  // Lambda at termination
    std::vector<IterationRecord> trace;
    StopReason stop_reason = StopReason::residual_below_epsilon;
    Eigen::VectorXd residual;
    double initial_residual_norm = 0.0;

    std::size_t iterations() const { return trace.size(); }
    double residual_norm() const { return residual.norm(); }
};

/// ||A[i]^T r||_2 for every block i.
std::vector<double> block_scores(const DenseMatrix& a, const Eigen::VectorXd& r);

/// Indices of the N largest scores. Scores within tie_rtol * max(score) of
/// the N-th largest form the tie band; slots left after the strictly larger
/// scores are filled from the band by the tie-break policy.
std::vector<std::size_t> select_largest(std::span<const double> scores, std::size_t n,
                                        TieBreak tie_break, double tie_rtol = 1e-12);

/// Identification step: the N blocks with the largest correlation with r.
/// Throws std::invalid_argument if N exceeds the block count.
SupportSet identify(const DenseMatrix& a, const Eigen::VectorXd& r, std::size_t n,
                    TieBreak tie_break, double tie_rtol = 1e-12);

/// Block orthogonal multi-matching pursuit.
///
/// Each iteration selects the N blocks with the largest ||A[i]^T r||_2, adds
/// them to the running support, refits y by minimum-norm least squares on
/// that support and updates the residual. Runs until ||r|| <= max(epsilon,
/// 1e-12 ||y||) or K iterations have been made.
RecoveryResult bommp(const DenseMatrix& a, const Eigen::VectorXd& y, const PursuitConfig& config);

/// bommp with N = 1.
RecoveryResult bomp(const DenseMatrix& a, const Eigen::VectorXd& y, PursuitConfig config);

struct IdentificationMargin {
    double alpha = 0.0;  // N-th largest score over blocks outside T u Lambda
    double beta = 0.0;   // largest score over T \ Lambda
};

/// alpha/beta from precomputed scores; nullopt when either is undefined
/// (T subset of Lambda, or fewer than N blocks outside T u Lambda).
std::optional<IdentificationMargin> alpha_beta_from_scores(std::span<const double> scores,
                                                           const SupportSet& lambda,
                                                           const SupportSet& truth, std::size_t n);

/// Throws std::domain_error when alpha or beta is undefined.
IdentificationMargin alpha_beta(const DenseMatrix& a, const Eigen::VectorXd& r,
                                const SupportSet& lambda, const SupportSet& truth, std::size_t n);

/// CSV with columns k,selected_blocks,cumulative_size,residual_norm,alpha_N,beta_1.
/// Blocks are written 1-based. alpha/beta are filled when `truth` is given
/// and defined for that iteration.
void write_trace_csv(std::ostream& out, const RecoveryResult& result, std::size_t n,
                     const std::optional<SupportSet>& truth = std::nullopt);

}  // namespace bommp
