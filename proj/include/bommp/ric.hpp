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
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bommp/blockmodel.hpp"
#include "bommp/linalg.hpp"

namespace bommp {

/// Thrown when exact enumeration would exceed the support budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the certified order NK+1 exceeds the number of blocks.
class GuaranteeUncheckable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultRicBudget = 2'000'000;

struct RicOptions {
    std::uint64_t budget = kDefaultRicBudget;
    /// Worker threads for support enumeration; results do not depend on it.
    unsigned workers = 1;
};

struct RicReport {
    std::size_t order = 0;
    double delta = 0.0;
    SupportSet witness;
    double lambda_min = 0.0;  // smallest Gram eigenvalue over the enumerated supports
    double lambda_max = 0.0;  // largest Gram eigenvalue over the enumerated supports
    bool exact = false;
    std::uint64_t supports_examined = 0;
    /// Upper bound on the floating-point error in delta.
    double error_bound = 0.0;
};

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Exact block-RIC of the given order.
///
/// Enumerates every block support of size exactly `order` and takes the
/// extreme eigenvalues of A_S^T A_S. Smaller supports need no enumeration:
/// their Gram matrices are principal submatrices of some size-`order` Gram,
/// so by Cauchy interlacing their spectra lie inside it. Ties in delta are
/// resolved toward the lexicographically smallest support, independent of
/// the worker count.
RicReport block_ric_exact(const DenseMatrix& a, std::size_t order, const RicOptions& opts = {});

/// Lower bound on the block-RIC from `samples` uniformly drawn supports.
/// When samples >= C(l, order) every support is visited instead.
RicReport block_ric_sampled(const DenseMatrix& a, std::size_t order, std::uint64_t samples,
                            std::uint64_t seed);

/// 1 / sqrt(K/N + 1).
double bound_sharp(std::size_t K, std::size_t N);

/// 1 / (1 + sqrt((K - k + 1) / N)), the earlier sufficient condition on
/// delta_{K + (N-2)k + N}.
double bound_prior(std::size_t K, std::size_t N, std::size_t k);

enum class GuaranteeMode { noiseless, noisy };

std::string_view to_string(GuaranteeMode m);

struct GuaranteeReport {
    bool condition_holds = false;
    double delta = 0.0;       // computed delta_{NK+1}
    double delta_used = 0.0;  // delta + its floating-point error bound
    double bound = 0.0;
    double margin = 0.0;  // bound - delta_used
    GuaranteeMode mode = GuaranteeMode::noiseless;
    double min_norm_threshold = 0.0;  // noisy mode
    double min_block_norm = 0.0;      // noisy mode; +inf for the zero signal
    std::size_t order = 0;
};

/// Checks delta_{NK+1}(A) < 1/sqrt(K/N + 1) with no slack. Throws
/// GuaranteeUncheckable when NK+1 exceeds the block count.
GuaranteeReport certify_noiseless(const DenseMatrix& a, std::size_t K, std::size_t N,
                                  const RicOptions& opts = {});
GuaranteeReport certify_noiseless(const RicReport& ric, std::size_t K, std::size_t N);

/// Smallest admissible nonzero block norm for support recovery under
/// ||e||_2 <= epsilon. Throws std::domain_error when delta >= bound_sharp(K, N).
double min_norm_threshold(std::size_t K, std::size_t N, double delta, double epsilon);

/// Noiseless condition plus min_{i in supp(x)} ||x[i]||_2 > min_norm_threshold.
GuaranteeReport certify_noisy(const DenseMatrix& a, const BlockVector& x, std::size_t K,
                              std::size_t N, double epsilon, const RicOptions& opts = {});
GuaranteeReport certify_noisy(const RicReport& ric, const BlockVector& x, std::size_t K,
                              std::size_t N, double epsilon);

/// t = (sqrt(S+1) - 1) / sqrt(S).
double polarization_t(double s);

/// Difference between the two sides of the polarization identity
///   ||A(x + sum t_i h_i)||^2 - ||A(t^2 x - sum t_i h_i)||^2
///     = (1 - t^4) (<Ax, Ax> - C sum <Ax, A h_i>),
/// with t = polarization_t(S), t_i = -(C/2)(1 - t^2), sums over i in W.
/// The identity holds exactly, so the result is rounding error only.
double polarization_gap(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                        std::span<const Eigen::VectorXd> h, std::span<const std::size_t> w,
                        double s, double c);

}  // namespace bommp
