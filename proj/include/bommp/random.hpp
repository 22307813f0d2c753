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

#include <array>
#include <cstdint>
#include <vector>

namespace bommp {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is identified by its 128-bit key. The key is (seed, stream id),
/// so any number of independent substreams can be derived from one master
/// seed without coordination, which is what makes parallel runs reproducible.
class Philox4x64 {
public:
    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static Block bijection(Block counter, Key key);

    Philox4x64(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

    /// 64 random bits. The counter is incremented before each block is
    /// generated, so the first block comes from counter (1, 0, 0, 0).
    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller; pairs are consumed in order.
    double normal();
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    Key key_;
    Block counter_{0, 0, 0, 0};
    Block buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Substream identifiers used by the experiment harness.
enum class StreamPurpose : std::uint64_t {
    matrix = 1,
    signal = 2,
    noise = 3,
    support = 4,
    misc = 5,
};

/// Packs (purpose, cell, trial) into a stream id. cell < 2^24, trial < 2^32.
std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t cell, std::uint64_t trial);

}  // namespace bommp
