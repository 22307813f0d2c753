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
#include <vector>

#include "bommp/blockmodel.hpp"
#include "bommp/linalg.hpp"
#include "bommp/pursuit.hpp"

namespace bommp {

/// Parameters of the sharpness matrix A(d): (NK+1) blocks of length d.
struct CounterexampleSpec {
    std::size_t K = 1;
    std::size_t N = 1;
    std::size_t d = 1;

    /// Throws std::invalid_argument unless K, d >= 1 and 1 <= N <= K.
    void validate() const;
    std::size_t blocks() const { return N * K + 1; }
    std::size_t dim() const { return blocks() * d; }
};

struct SpectrumEntry {
    double value = 0.0;
    std::size_t multiplicity = 0;
};

/// Square matrix of size (NK+1)d with l = NK+1 column blocks of length d:
///   blocks 0..K-1       sqrt(K/(K+N)) I_d on their own row block among the first K;
///   blocks K..NK-N      identity on the middle rows;
///   blocks NK+1-N..NK   (1/b) I_d in each of the first K row blocks and
///                       I_d on their own row block among the last N,
/// with b = sqrt(K(K+N)). A^T A then has spectrum K/(K+N), 1 and
/// 1 -/+ 1/sqrt(K/N+1), so delta_{NK+1} sits exactly on the sharp bound.
DenseMatrix build_counterexample(const CounterexampleSpec& spec);

/// Ascending eigenvalues of A^T A with multiplicities d(K-1), d(NK-K), d, d;
/// entries with multiplicity 0 are omitted.
std::vector<SpectrumEntry> expected_spectrum(const CounterexampleSpec& spec);

/// Sorted eigenvalues grouped into clusters of radius `radius` (gap between
/// consecutive members); each cluster reports its mean.
std::vector<SpectrumEntry> cluster_spectrum(const Eigen::VectorXd& sorted_eigenvalues,
                                            double radius = 1e-7);

/// x[i] = e_1 for the first K blocks, zero elsewhere.
BlockVector worst_case_signal(const CounterexampleSpec& spec);

struct CounterexampleReport {
    CounterexampleSpec spec;
    std::vector<SpectrumEntry> spectrum_expected;
    std::vector<SpectrumEntry> spectrum_observed;
    bool spectrum_matches = false;
    double delta_observed = 0.0;
    double bound = 0.0;
    std::vector<double> first_scores;  // ||A[i]^T A x||_2 for the worst-case x
    bool scores_match = false;
    double alpha_1 = 0.0;
    double beta_1 = 0.0;
    TieBreak tie_break = TieBreak::highest_index;
    SupportSet first_selection;
    /// The first selection holds no block of the true support.
    bool failure_demonstrated = false;
    /// Final support equals the true support and the estimate matches x.
    bool recovered = false;
};

/// Builds A(d), compares its spectrum with expected_spectrum within eig_tol,
/// measures delta_{NK+1}, evaluates the first-iteration scores for the
/// worst-case signal and runs bommp with the given tie-break policy.
CounterexampleReport verify_counterexample(const CounterexampleSpec& spec, double eig_tol = 1e-9,
                                           TieBreak tie_break = TieBreak::highest_index);

}  // namespace bommp
