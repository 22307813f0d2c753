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

#include "bommp/blockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bommp {

BlockPattern::BlockPattern(std::vector<std::size_t> lengths) : lengths_(std::move(lengths)) {
    offsets_.reserve(lengths_.size());
    for (std::size_t len : lengths_) {
        if (len == 0) {
            throw std::invalid_argument("block lengths must be positive");
        }
        offsets_.push_back(dim_);
        dim_ += len;
    }
}

BlockPattern BlockPattern::uniform(std::size_t blocks, std::size_t length) {
    return BlockPattern(std::vector<std::size_t>(blocks, length));
}

SupportSet::SupportSet(BlockPattern pattern, std::vector<std::size_t> indices)
    : pattern_(std::move(pattern)), indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw std::invalid_argument("support indices must be distinct");
    }
    if (!indices_.empty() && indices_.back() >= pattern_.block_count()) {
        throw std::out_of_range("support index " + std::to_string(indices_.back()) +
                                " out of range for " +
                                std::to_string(pattern_.block_count()) + " blocks");
    }
}

SupportSet SupportSet::all(const BlockPattern& pattern) {
    std::vector<std::size_t> idx(pattern.block_count());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return SupportSet(pattern, std::move(idx));
}

bool SupportSet::contains(std::size_t block) const {
    return std::binary_search(indices_.begin(), indices_.end(), block);
}

std::size_t SupportSet::coordinate_count() const {
    std::size_t total = 0;
    for (std::size_t i : indices_) total += pattern_.length(i);
    return total;
}

BlockPattern SupportSet::restricted_pattern() const {
    std::vector<std::size_t> lens;
    lens.reserve(indices_.size());
    for (std::size_t i : indices_) lens.push_back(pattern_.length(i));
    return BlockPattern(std::move(lens));
}

SupportSet SupportSet::united(const SupportSet& other) const {
    std::vector<std::size_t> out;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                   other.indices_.end(), std::back_inserter(out));
    return SupportSet(pattern_, std::move(out));
}

SupportSet SupportSet::minus(const SupportSet& other) const {
    std::vector<std::size_t> out;
    std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(),
                        other.indices_.end(), std::back_inserter(out));
    return SupportSet(pattern_, std::move(out));
}

SupportSet SupportSet::complement() const {
    return SupportSet::all(pattern_).minus(*this);
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                         indices_.end());
}

BlockVector::BlockVector(BlockPattern pattern, Eigen::VectorXd values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != pattern_.dim()) {
        throw std::invalid_argument("vector length " + std::to_string(values_.size()) +
                                    " does not match pattern dimension " +
                                    std::to_string(pattern_.dim()));
    }
}

BlockVector BlockVector::zeros(BlockPattern pattern) {
    const auto n = static_cast<Eigen::Index>(pattern.dim());
    return BlockVector(std::move(pattern), Eigen::VectorXd::Zero(n));
}

std::vector<double> BlockVector::block_norms() const {
    std::vector<double> out(pattern_.block_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = block_norm(i);
    return out;
}

double mixed_norm(const BlockVector& x, MixedNorm p) {
    const auto w = x.block_norms();
    switch (p) {
        case MixedNorm::l1: {
            double s = 0.0;
            for (double v : w) s += v;
            return s;
        }
        case MixedNorm::l2:
            return x.values().norm();
        case MixedNorm::linf: {
            double m = 0.0;
            for (double v : w) m = std::max(m, v);
            return m;
        }
    }
    return 0.0;
}

std::size_t block_l0(const BlockVector& x) {
    const auto w = x.block_norms();
    return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double v) { return v > 0.0; }));
}

SupportSet block_support(const BlockVector& x, double tol) {
    if (!(tol >= 0.0)) throw std::invalid_argument("support tolerance must be nonnegative");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < x.pattern().block_count(); ++i) {
        if (x.block_norm(i) > tol) idx.push_back(i);
    }
    return SupportSet(x.pattern(), std::move(idx));
}

double default_support_tolerance(const BlockVector& x) {
    return std::max(1e-9 * mixed_norm(x, MixedNorm::linf), 1e-300);
}

SupportSet block_support(const BlockVector& x) {
    return block_support(x, default_support_tolerance(x));
}

BlockVector embed(const Eigen::VectorXd& coefficients, const SupportSet& support) {
    const BlockPattern& pattern = support.pattern();
    if (static_cast<std::size_t>(coefficients.size()) != support.coordinate_count()) {
        throw std::invalid_argument("embed: coefficient length " +
                                    std::to_string(coefficients.size()) +
                                    " does not match support size " +
                                    std::to_string(support.coordinate_count()));
    }
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pattern.dim()));
    Eigen::Index pos = 0;
    for (std::size_t i : support) {
        const auto len = static_cast<Eigen::Index>(pattern.length(i));
        full.segment(static_cast<Eigen::Index>(pattern.offset(i)), len) =
            coefficients.segment(pos, len);
        pos += len;
    }
    return BlockVector(pattern, std::move(full));
}

Eigen::VectorXd restrict_to(const BlockVector& x, const SupportSet& support) {
    if (!(x.pattern() == support.pattern())) {
        throw std::invalid_argument("restrict_to: support pattern differs from vector pattern");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(support.coordinate_count()));
    Eigen::Index pos = 0;
    for (std::size_t i : support) {
        const auto len = static_cast<Eigen::Index>(x.pattern().length(i));
        out.segment(pos, len) = x.block(i);
        pos += len;
    }
    return out;
}

}  // namespace bommp
