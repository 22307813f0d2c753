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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bommp/blockmodel.hpp"
#include "bommp/linalg.hpp"
#include "bommp/pursuit.hpp"

namespace bommp {

enum class SignalDistribution { unit_gaussian, constant_magnitude };

std::string_view to_string(SignalDistribution d);
SignalDistribution parse_signal_distribution(std::string_view s);

/// m x n matrix with i.i.d. N(0, 1/m) entries. Entries are filled row by
/// row from the Philox stream (seed, stream), one normal per entry.
DenseMatrix gen_gaussian_matrix(std::size_t m, const BlockPattern& pattern, std::uint64_t seed,
                                std::uint64_t stream = 0);

/// Block K-sparse signal: K distinct blocks drawn uniformly, then each
/// nonzero block (ascending order) filled with N(0,1) entries, or with a
/// uniformly random unit vector for constant_magnitude.
BlockVector gen_signal(const BlockPattern& pattern, std::size_t K, std::uint64_t seed,
                       SignalDistribution dist = SignalDistribution::unit_gaussian,
                       std::uint64_t stream = 0);

/// Gaussian direction rescaled to ||e||_2 = epsilon.
Eigen::VectorXd gen_noise(std::size_t m, double epsilon, std::uint64_t seed,
                          std::uint64_t stream = 0);

inline constexpr std::uint64_t kDefaultOracleBudget = 1'000'000;

struct OracleResult {
    bool feasible = false;
    BlockVector estimate;
    SupportSet support;
    double residual_norm = 0.0;
};

/// Sparsest solution of min ||x||_{2,0} s.t. ||Ax - y||_2 <= epsilon by
/// enumerating supports of size 0, 1, ..., K_max. At the first feasible size
/// the support with the smallest residual wins (lexicographic on ties).
/// Throws BudgetExceeded if more than `budget` supports would be needed.
OracleResult oracle_l20(const DenseMatrix& a, const Eigen::VectorXd& y, double epsilon,
                        std::size_t k_max, std::uint64_t budget = kDefaultOracleBudget);

struct TrialCell {
    std::size_t K = 0;
    std::size_t N = 1;
    double epsilon = 0.0;
    double success_rel_tol = 1e-6;
    TieBreak tie_break = TieBreak::lowest_index;
    std::uint64_t seed = 0;
    std::uint64_t noise_stream = 0;
    bool certify = false;
};

struct TrialOutcome {
    std::uint64_t seed = 0;
    std::size_t K = 0;
    std::size_t N = 0;
    bool exact_recovery = false;
    bool support_match = false;
    std::size_t iterations = 0;
    double relative_error = 0.0;
    StopReason stop_reason = StopReason::residual_below_epsilon;
    std::optional<bool> certified;
};

/// Support recovered in the noisy sense: the true support lies inside the
/// pursuit support and the K largest estimated blocks are exactly the true
/// ones.
bool noisy_support_recovered(const RecoveryResult& result, const SupportSet& truth, std::size_t K);

/// y = A x_true + e with ||e|| = epsilon, then bommp.
/// Noiseless success: estimated support equals the true support and the
/// relative error is at most success_rel_tol. Noisy success:
/// noisy_support_recovered.
TrialOutcome run_trial(const DenseMatrix& a, const BlockVector& x_true, const TrialCell& cell);

struct ExperimentConfig {
    std::size_t m = 32;
    std::vector<std::size_t> block_lengths;  // column pattern
    std::vector<std::size_t> K_values;
    std::vector<std::size_t> N_values;
    std::size_t trials = 1;
    double noise_epsilon = 0.0;
    std::uint64_t master_seed = 1;
    double success_rel_tol = 1e-6;
    std::string matrix_ensemble = "gaussian";
    SignalDistribution signal_distribution = SignalDistribution::unit_gaussian;
    TieBreak tie_break = TieBreak::lowest_index;
    bool certify = false;

    BlockPattern pattern() const { return BlockPattern(block_lengths); }
    /// Throws std::invalid_argument on empty ranges, trials < 1, tol <= 0, etc.
    void validate() const;
};

/// Parses the JSON experiment config. Recognized keys: m, l, d or
/// block_lengths, K_range [lo, hi] or K_list, N_list, trials, noise_epsilon,
/// master_seed, success_rel_tol, matrix_ensemble, signal_distribution,
/// tie_break, certify. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct PhaseRow {
    std::size_t K = 0;
    std::size_t N = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double mean_iterations = 0.0;
    double mean_rel_error = 0.0;
    std::size_t certified_trials = 0;
    std::size_t certified_successes = 0;
};

/// A (K, N) cell can run when K == 0 (trivial) or 1 <= N <= K and N K <= m.
bool cell_is_valid(std::size_t K, std::size_t N, std::size_t m);

/// Runs every valid (K, N) cell. Trial t of sparsity K draws its matrix,
/// signal and noise from substreams keyed by (master_seed, K, t), so cells
/// with different N see identical instances and the output does not depend
/// on `workers`.
std::vector<PhaseRow> run_phase(const ExperimentConfig& config, unsigned workers = 1);

void write_phase_csv(std::ostream& out, const std::vector<PhaseRow>& rows);

/// Static line plot of success rate against K, one line per N.
void write_phase_svg(std::ostream& out, const std::vector<PhaseRow>& rows);

struct PolarizationSweep {
    std::size_t draws = 0;
    double max_relative_gap = 0.0;  // |gap| / (sum of the magnitudes of both sides)
    double max_abs_gap = 0.0;
};

/// Evaluates polarization_gap on `draws` random instances: A is m x n and
/// x, h_i have length n with m, n in [1, max_n], 1-5 vectors h_i, a random
/// nonempty W, and S, C log-uniform in [e^-3, e^3].
PolarizationSweep polarization_sweep(std::size_t draws, std::uint64_t seed, std::size_t max_n = 40);

}  // namespace bommp
