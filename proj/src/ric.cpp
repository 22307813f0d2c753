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

#include "bommp/ric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "bommp/random.hpp"

namespace bommp {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(acc);
}

namespace {

using Combination = std::vector<std::size_t>;

Combination unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
    Combination comb;
    comb.reserve(k);
    std::size_t x = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (;; ++x) {
            const std::uint64_t count = binomial(n - x - 1, k - i - 1);
            if (rank < count) break;
            rank -= count;
        }
        comb.push_back(x++);
    }
    return comb;
}

bool next_combination(Combination& comb, std::size_t n) {
    const std::size_t k = comb.size();
    for (std::size_t i = k; i-- > 0;) {
        if (comb[i] < n - k + i) {
            ++comb[i];
            for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

struct Extremes {
    double lambda_min = std::numeric_limits<double>::infinity();
    double lambda_max = -std::numeric_limits<double>::infinity();
    double delta = -1.0;
    Combination witness;
    std::uint64_t examined = 0;

    // Strictly larger delta wins; equal delta keeps the lexicographically
    // smaller support.
    void absorb(double lo, double hi, const Combination& comb) {
        lambda_min = std::min(lambda_min, lo);
        lambda_max = std::max(lambda_max, hi);
        const double d = std::max(hi - 1.0, 1.0 - lo);
        if (d > delta || (d == delta && comb < witness)) {
            delta = d;
            witness = comb;
        }
        ++examined;
    }

    void merge(const Extremes& other) {
        lambda_min = std::min(lambda_min, other.lambda_min);
        lambda_max = std::max(lambda_max, other.lambda_max);
        if (other.delta > delta || (other.delta == delta && other.witness < witness)) {
            delta = other.delta;
            witness = other.witness;
        }
        examined += other.examined;
    }
};

class GramScanner {
public:
    explicit GramScanner(const DenseMatrix& a)
        : gram_(a.values().transpose() * a.values()), pattern_(a.pattern()) {}

    std::pair<double, double> extremes(const Combination& blocks) {
        columns_.clear();
        for (std::size_t b : blocks) {
            for (std::size_t j = 0; j < pattern_.length(b); ++j) {
                columns_.push_back(static_cast<Eigen::Index>(pattern_.offset(b) + j));
            }
        }
        const auto s = static_cast<Eigen::Index>(columns_.size());
        sub_.resize(s, s);
        for (Eigen::Index c = 0; c < s; ++c) {
            for (Eigen::Index r = 0; r < s; ++r) sub_(r, c) = gram_(columns_[r], columns_[c]);
        }
        solver_.compute(sub_, Eigen::EigenvaluesOnly);
        if (solver_.info() != Eigen::Success) {
            throw std::runtime_error("eigensolver did not converge on a support Gram matrix");
        }
        const auto& ev = solver_.eigenvalues();
        return {ev[0], ev[s - 1]};
    }

private:
    Eigen::MatrixXd gram_;
    BlockPattern pattern_;
    std::vector<Eigen::Index> columns_;
    Eigen::MatrixXd sub_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

void check_order(const DenseMatrix& a, std::size_t order) {
    const std::size_t l = a.pattern().block_count();
    if (order < 1 || order > l) {
        throw std::out_of_range("RIC order " + std::to_string(order) + " outside [1, " +
                                std::to_string(l) + "]");
    }
}

// Largest coordinate count over supports of the given order.
std::size_t widest_support(const BlockPattern& p, std::size_t order) {
    std::vector<std::size_t> lens(p.lengths().begin(), p.lengths().end());
    std::sort(lens.begin(), lens.end(), std::greater<>());
    std::size_t s = 0;
    for (std::size_t i = 0; i < order; ++i) s += lens[i];
    return s;
}

// Backward error of forming A^T A and of the symmetric eigensolver, both
// bounded by a modest multiple of eps * ||A_S||^2.
double delta_error_bound(const DenseMatrix& a, std::size_t order, double lambda_max) {
    const double dims = static_cast<double>(widest_support(a.pattern(), order) + a.rows());
    return 32.0 * dims * std::numeric_limits<double>::epsilon() * std::max(lambda_max, 1.0);
}

RicReport make_report(const DenseMatrix& a, std::size_t order, const Extremes& e, bool exact) {
    RicReport r;
    r.order = order;
    r.delta = std::max(e.delta, 0.0);
    r.witness = SupportSet(a.pattern(), e.witness);
    r.lambda_min = e.lambda_min;
    r.lambda_max = e.lambda_max;
    r.exact = exact;
    r.supports_examined = e.examined;
    r.error_bound = delta_error_bound(a, order, e.lambda_max);
    return r;
}

Extremes scan_range(const DenseMatrix& a, std::size_t order, std::uint64_t first,
                    std::uint64_t count) {
    Extremes e;
    if (count == 0) return e;
    GramScanner scanner(a);
    const std::size_t l = a.pattern().block_count();
    Combination comb = unrank_combination(l, order, first);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto [lo, hi] = scanner.extremes(comb);
        e.absorb(lo, hi, comb);
        if (i + 1 < count) next_combination(comb, l);
    }
    return e;
}

}  // namespace

RicReport block_ric_exact(const DenseMatrix& a, std::size_t order, const RicOptions& opts) {
    check_order(a, order);
    const std::uint64_t total = binomial(a.pattern().block_count(), order);
    if (total > opts.budget) {
        throw BudgetExceeded("C(" + std::to_string(a.pattern().block_count()) + ", " +
                             std::to_string(order) + ") supports exceed the enumeration budget of " +
                             std::to_string(opts.budget) + "; use block_ric_sampled");
    }

    const std::uint64_t workers =
        std::clamp<std::uint64_t>(opts.workers, 1, std::max<std::uint64_t>(total, 1));
    std::vector<Extremes> partial(workers);
    if (workers == 1) {
        partial[0] = scan_range(a, order, 0, total);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t begin = total * w / workers;
            const std::uint64_t end = total * (w + 1) / workers;
            threads.emplace_back([&, w, begin, end] { partial[w] = scan_range(a, order, begin, end - begin); });
        }
        for (auto& t : threads) t.join();
    }
    Extremes all;
    for (const auto& p : partial) all.merge(p);
    return make_report(a, order, all, true);
}

RicReport block_ric_sampled(const DenseMatrix& a, std::size_t order, std::uint64_t samples,
                            std::uint64_t seed) {
    check_order(a, order);
    if (samples < 1) throw std::invalid_argument("samples must be at least 1");
    const std::size_t l = a.pattern().block_count();
    const std::uint64_t total = binomial(l, order);
    if (samples >= total) {
        RicReport r = make_report(a, order, scan_range(a, order, 0, total), false);
        return r;
    }
    Philox4x64 rng(seed, stream_id(StreamPurpose::support, 0, 0));
    GramScanner scanner(a);
    Extremes e;
    for (std::uint64_t i = 0; i < samples; ++i) {
        Combination comb = rng.sample_without_replacement(l, order);
        std::sort(comb.begin(), comb.end());
        const auto [lo, hi] = scanner.extremes(comb);
        e.absorb(lo, hi, comb);
    }
    return make_report(a, order, e, false);
}

double bound_sharp(std::size_t K, std::size_t N) {
    if (K < 1 || N < 1 || N > K) throw std::invalid_argument("bound_sharp requires 1 <= N <= K");
    return 1.0 / std::sqrt(static_cast<double>(K) / static_cast<double>(N) + 1.0);
}

double bound_prior(std::size_t K, std::size_t N, std::size_t k) {
    if (K < 1 || N < 1) throw std::invalid_argument("bound_prior requires K, N >= 1");
    if (k < 1 || k > K) throw std::invalid_argument("bound_prior requires 1 <= k <= K");
    return 1.0 / (1.0 + std::sqrt(static_cast<double>(K - k + 1) / static_cast<double>(N)));
}

std::string_view to_string(GuaranteeMode m) {
    return m == GuaranteeMode::noiseless ? "noiseless" : "noisy";
}

namespace {

std::size_t certified_order(const DenseMatrix& a, std::size_t K, std::size_t N) {
    if (K < 1 || N < 1 || N > K) throw std::invalid_argument("certification requires 1 <= N <= K");
    const std::size_t order = N * K + 1;
    if (order > a.pattern().block_count()) {
        throw GuaranteeUncheckable("order NK+1 = " + std::to_string(order) + " exceeds the " +
                                   std::to_string(a.pattern().block_count()) + " blocks of A");
    }
    return order;
}

}  // namespace

GuaranteeReport certify_noiseless(const RicReport& ric, std::size_t K, std::size_t N) {
    if (ric.order != N * K + 1) {
        throw std::invalid_argument("RIC report has order " + std::to_string(ric.order) +
                                    ", expected NK+1 = " + std::to_string(N * K + 1));
    }
    if (!ric.exact) throw std::invalid_argument("certification needs an exact RIC");
    GuaranteeReport g;
    g.mode = GuaranteeMode::noiseless;
    g.order = ric.order;
    g.delta = ric.delta;
    g.delta_used = ric.delta + ric.error_bound;
    g.bound = bound_sharp(K, N);
    g.margin = g.bound - g.delta_used;
    g.condition_holds = g.delta_used < g.bound;
    return g;
}

GuaranteeReport certify_noiseless(const DenseMatrix& a, std::size_t K, std::size_t N,
                                  const RicOptions& opts) {
    const std::size_t order = certified_order(a, K, N);
    return certify_noiseless(block_ric_exact(a, order, opts), K, N);
}

double min_norm_threshold(std::size_t K, std::size_t N, double delta, double epsilon) {
    const double bound = bound_sharp(K, N);
    if (!(delta >= 0.0) || !(delta < bound)) {
        throw std::domain_error("min_norm_threshold requires 0 <= delta < 1/sqrt(K/N + 1)");
    }
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    const double kd = static_cast<double>(K);
    const double root = std::sqrt(kd / static_cast<double>(N) + 1.0);
    const double identification = (std::sqrt(2.0 * kd * (1.0 + delta)) * epsilon / root) / (1.0 / root - delta);
    const double stopping = 2.0 * epsilon / std::sqrt(1.0 - delta);
    return std::max(identification, stopping);
}

GuaranteeReport certify_noisy(const RicReport& ric, const BlockVector& x, std::size_t K,
                              std::size_t N, double epsilon) {
    if (block_l0(x) > K) throw std::invalid_argument("signal is not block K-sparse");
    GuaranteeReport g = certify_noiseless(ric, K, N);
    g.mode = GuaranteeMode::noisy;
    g.min_block_norm = std::numeric_limits<double>::infinity();
    for (double v : x.block_norms()) {
        if (v > 0.0) g.min_block_norm = std::min(g.min_block_norm, v);
    }
    if (!g.condition_holds) {
        g.min_norm_threshold = std::numeric_limits<double>::infinity();
        return g;
    }
    g.min_norm_threshold = min_norm_threshold(K, N, g.delta_used, epsilon);
    g.condition_holds = g.min_block_norm > g.min_norm_threshold;
    return g;
}

GuaranteeReport certify_noisy(const DenseMatrix& a, const BlockVector& x, std::size_t K,
                              std::size_t N, double epsilon, const RicOptions& opts) {
    const std::size_t order = certified_order(a, K, N);
    return certify_noisy(block_ric_exact(a, order, opts), x, K, N, epsilon);
}

double polarization_t(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("S must be positive");
    return (std::sqrt(s + 1.0) - 1.0) / std::sqrt(s);
}

double polarization_gap(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                        std::span<const Eigen::VectorXd> h, std::span<const std::size_t> w,
                        double s, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("C must be positive");
    const double t = polarization_t(s);
    if (w.empty()) throw std::invalid_argument("index set W must be nonempty");
    if (x.size() != a.cols()) throw std::invalid_argument("x length does not match A");
    const double t2 = t * t;
    const double ti = -0.5 * c * (1.0 - t2);

    const Eigen::VectorXd ax = a * x;
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(x.size());
    double cross = 0.0;
    for (std::size_t i : w) {
        if (i >= h.size()) throw std::out_of_range("W references a missing h_i");
        if (h[i].size() != x.size()) throw std::invalid_argument("h_i length does not match A");
        combo += ti * h[i];
        cross += ax.dot(a * h[i]);
    }
    const double lhs = (a * (x + combo)).squaredNorm() - (a * (t2 * x - combo)).squaredNorm();
    const double rhs = (1.0 - t2 * t2) * (ax.squaredNorm() - c * cross);
    return lhs - rhs;
}

}  // namespace bommp
