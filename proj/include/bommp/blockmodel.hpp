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
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bommp {

/// Partition of {0, ..., n-1} into l consecutive blocks of lengths d_0..d_{l-1}.
///
/// Block indices are 0-based throughout the library; the CLI converts to
/// 1-based indices for display.
class BlockPattern {
public:
    BlockPattern() = default;
    explicit BlockPattern(std::vector<std::size_t> lengths);
    BlockPattern(std::initializer_list<std::size_t> lengths)
        : BlockPattern(std::vector<std::size_t>(lengths)) {}

    static BlockPattern uniform(std::size_t blocks, std::size_t length);

    std::size_t block_count() const { return lengths_.size(); }
    std::size_t dim() const { return dim_; }
    std::size_t length(std::size_t i) const { return lengths_.at(i); }
    std::size_t offset(std::size_t i) const { return offsets_.at(i); }
    std::span<const std::size_t> lengths() const { return lengths_; }

    bool operator==(const BlockPattern&) const = default;

private:
    std::vector<std::size_t> lengths_;
    std::vector<std::size_t> offsets_;
    std::size_t dim_ = 0;
};

/// Ascending set of distinct block indices valid for a pattern.
class SupportSet {
public:
    SupportSet() = default;
    SupportSet(BlockPattern pattern, std::vector<std::size_t> indices);

    static SupportSet all(const BlockPattern& pattern);

    const BlockPattern& pattern() const { return pattern_; }
    std::span<const std::size_t> indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(std::size_t block) const;

    /// Sum of block lengths over the support.
    std::size_t coordinate_count() const;
    /// Pattern I_S of the blocks in the support, in ascending order.
    BlockPattern restricted_pattern() const;

    SupportSet united(const SupportSet& other) const;
    SupportSet minus(const SupportSet& other) const;
    SupportSet complement() const;
    bool is_subset_of(const SupportSet& other) const;

    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }

    bool operator==(const SupportSet& other) const {
        return indices_ == other.indices_ && pattern_ == other.pattern_;
    }

private:
    BlockPattern pattern_;
    std::vector<std::size_t> indices_;
};

/// Length-n real vector read through a BlockPattern.
class BlockVector {
public:
    BlockVector() = default;
    BlockVector(BlockPattern pattern, Eigen::VectorXd values);

    static BlockVector zeros(BlockPattern pattern);

    const BlockPattern& pattern() const { return pattern_; }
    const Eigen::VectorXd& values() const { return values_; }
    std::size_t dim() const { return pattern_.dim(); }

    auto block(std::size_t i) const {
        return values_.segment(static_cast<Eigen::Index>(pattern_.offset(i)),
                               static_cast<Eigen::Index>(pattern_.length(i)));
    }
    double block_norm(std::size_t i) const { return block(i).norm(); }
    std::vector<double> block_norms() const;

private:
    BlockPattern pattern_;
    Eigen::VectorXd values_;
};

enum class MixedNorm { l1, l2, linf };

double mixed_norm(const BlockVector& x, MixedNorm p);

/// Number of blocks with nonzero l2 norm.
std::size_t block_l0(const BlockVector& x);

/// {i : ||x[i]||_2 > tol}.
SupportSet block_support(const BlockVector& x, double tol);

/// Support with the default relative tolerance 1e-9 * ||x||_{2,inf}, floored at 1e-300.
SupportSet block_support(const BlockVector& x);
double default_support_tolerance(const BlockVector& x);

/// Places coefficients for the blocks of `support` (ascending order) into a
/// zero vector over the full pattern. Throws std::invalid_argument on a
/// length mismatch.
BlockVector embed(const Eigen::VectorXd& coefficients, const SupportSet& support);

/// Inverse of embed: concatenates the blocks of x listed in `support`.
Eigen::VectorXd restrict_to(const BlockVector& x, const SupportSet& support);

}  // namespace bommp
