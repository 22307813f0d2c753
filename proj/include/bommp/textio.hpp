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

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "bommp/blockmodel.hpp"
#include "bommp/linalg.hpp"

namespace bommp {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal that round-trips to the same double.
std::string format_roundtrip(double v);

/// Fixed number of significant digits, for human-readable output.
std::string format_significant(double v, int digits = 9);

// .bsv block-vector format:
//   bsv 1
//   <block lengths>
//   <n values>
void write_bsv(std::ostream& out, const BlockVector& x);
BlockVector read_bsv(std::istream& in);
BlockVector load_bsv(const std::filesystem::path& path);
void save_bsv(const std::filesystem::path& path, const BlockVector& x);

// .bsm block-matrix format:
//   bsm 1
//   <m> <n>
//   <column block lengths>
//   m rows of n values
void write_bsm(std::ostream& out, const DenseMatrix& a);
DenseMatrix read_bsm(std::istream& in);
DenseMatrix load_bsm(const std::filesystem::path& path);
void save_bsm(const std::filesystem::path& path, const DenseMatrix& a);

}  // namespace bommp
