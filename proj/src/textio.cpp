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

#include "bommp/textio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace bommp {

std::string format_roundtrip(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_roundtrip: conversion failed");
    return std::string(buf, ptr);
}

std::string format_significant(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

namespace {

std::string next_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(std::string("unexpected end of input while reading ") + what);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_double(const std::string& tok) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ParseError("invalid number '" + tok + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& tok) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError("invalid integer '" + tok + "'");
    }
    return v;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(std::move(t));
    return out;
}

void expect_header(std::istream& in, const std::string& magic) {
    const auto tok = tokens(next_line(in, "header"));
    if (tok.size() != 2 || tok[0] != magic || tok[1] != "1") {
        throw ParseError("expected header '" + magic + " 1'");
    }
}

BlockPattern parse_pattern(const std::string& line) {
    std::vector<std::size_t> lens;
    for (const auto& t : tokens(line)) {
        const std::size_t len = parse_size(t);
        if (len == 0) throw ParseError("block lengths must be positive");
        lens.push_back(len);
    }
    return BlockPattern(std::move(lens));
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

}  // namespace

void write_bsv(std::ostream& out, const BlockVector& x) {
    out << "bsv 1\n";
    const auto lens = x.pattern().lengths();
    for (std::size_t i = 0; i < lens.size(); ++i) out << (i ? " " : "") << lens[i];
    out << '\n';
    for (Eigen::Index i = 0; i < x.values().size(); ++i) {
        out << (i ? " " : "") << format_roundtrip(x.values()[i]);
    }
    out << '\n';
}

BlockVector read_bsv(std::istream& in) {
    expect_header(in, "bsv");
    BlockPattern pattern = parse_pattern(next_line(in, "block lengths"));
    const auto tok = tokens(next_line(in, "values"));
    if (tok.size() != pattern.dim()) {
        throw ParseError("expected " + std::to_string(pattern.dim()) + " values, got " +
                         std::to_string(tok.size()));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(tok.size()));
    for (std::size_t i = 0; i < tok.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(tok[i]);
    return BlockVector(std::move(pattern), std::move(v));
}

void write_bsm(std::ostream& out, const DenseMatrix& a) {
    out << "bsm 1\n" << a.rows() << ' ' << a.cols() << '\n';
    const auto lens = a.pattern().lengths();
    for (std::size_t i = 0; i < lens.size(); ++i) out << (i ? " " : "") << lens[i];
    out << '\n';
    for (Eigen::Index r = 0; r < a.values().rows(); ++r) {
        for (Eigen::Index c = 0; c < a.values().cols(); ++c) {
            out << (c ? " " : "") << format_roundtrip(a.values()(r, c));
        }
        out << '\n';
    }
}

DenseMatrix read_bsm(std::istream& in) {
    expect_header(in, "bsm");
    const auto dims = tokens(next_line(in, "dimensions"));
    if (dims.size() != 2) throw ParseError("expected 'm n' on line 2");
    const std::size_t m = parse_size(dims[0]);
    const std::size_t n = parse_size(dims[1]);
    BlockPattern pattern = parse_pattern(next_line(in, "column block lengths"));
    if (pattern.dim() != n) {
        throw ParseError("column block lengths sum to " + std::to_string(pattern.dim()) +
                         ", expected " + std::to_string(n));
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < m; ++r) {
        const auto tok = tokens(next_line(in, "matrix row"));
        if (tok.size() != n) {
            throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(tok.size()) +
                             " values, expected " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(tok[c]);
        }
    }
    return DenseMatrix(std::move(values), std::move(pattern));
}

BlockVector load_bsv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_bsv(in);
}

DenseMatrix load_bsm(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_bsm(in);
}

void save_bsv(const std::filesystem::path& path, const BlockVector& x) {
    write_file(path, [&](std::ostream& out) { write_bsv(out, x); });
}

void save_bsm(const std::filesystem::path& path, const DenseMatrix& a) {
    write_file(path, [&](std::ostream& out) { write_bsm(out, a); });
}

}  // namespace bommp
