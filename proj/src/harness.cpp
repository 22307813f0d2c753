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

#include "bommp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "bommp/random.hpp"
#include "bommp/ric.hpp"
#include "bommp/textio.hpp"

namespace bommp {

std::string_view to_string(SignalDistribution d) {
    return d == SignalDistribution::unit_gaussian ? "unit_gaussian" : "constant_magnitude";
}

SignalDistribution parse_signal_distribution(std::string_view s) {
    if (s == "unit_gaussian" || s == "unit-gaussian") return SignalDistribution::unit_gaussian;
    if (s == "constant_magnitude" || s == "constant-magnitude") {
        return SignalDistribution::constant_magnitude;
    }
    throw std::invalid_argument("unknown signal distribution '" + std::string(s) + "'");
}

DenseMatrix gen_gaussian_matrix(std::size_t m, const BlockPattern& pattern, std::uint64_t seed,
                                std::uint64_t stream) {
    if (m < 1) throw std::invalid_argument("matrix needs at least one row");
    Philox4x64 rng(seed, stream);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(pattern.dim()));
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = scale * rng.normal();
    }
    return DenseMatrix(std::move(a), pattern);
}

BlockVector gen_signal(const BlockPattern& pattern, std::size_t K, std::uint64_t seed,
                       SignalDistribution dist, std::uint64_t stream) {
    const std::size_t l = pattern.block_count();
    if (K > l) throw std::invalid_argument("K exceeds the number of blocks");
    Philox4x64 rng(seed, stream);
    auto blocks = rng.sample_without_replacement(l, K);
    std::sort(blocks.begin(), blocks.end());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pattern.dim()));
    for (std::size_t b : blocks) {
        auto seg = v.segment(static_cast<Eigen::Index>(pattern.offset(b)),
                             static_cast<Eigen::Index>(pattern.length(b)));
        // A Gaussian block is nonzero with probability one; redraw the
        // measure-zero exception so the support is exactly K blocks.
        do {
            for (Eigen::Index j = 0; j < seg.size(); ++j) seg[j] = rng.normal();
        } while (seg.norm() == 0.0);
        if (dist == SignalDistribution::constant_magnitude) seg /= seg.norm();
    }
    return BlockVector(pattern, std::move(v));
}

Eigen::VectorXd gen_noise(std::size_t m, double epsilon, std::uint64_t seed, std::uint64_t stream) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    if (epsilon == 0.0 || m == 0) return e;
    Philox4x64 rng(seed, stream);
    do {
        for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
    } while (e.norm() == 0.0);
    return e * (epsilon / e.norm());
}

OracleResult oracle_l20(const DenseMatrix& a, const Eigen::VectorXd& y, double epsilon,
                        std::size_t k_max, std::uint64_t budget) {
    if (static_cast<std::size_t>(y.size()) != a.rows()) {
        throw std::invalid_argument("measurement length does not match matrix rows");
    }
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    const std::size_t l = a.pattern().block_count();
    k_max = std::min(k_max, l);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k <= k_max; ++k) {
        const std::uint64_t c = binomial(l, k);
        total = (total > budget || c > budget) ? budget + 1 : total + c;
    }
    if (total > budget) {
        throw BudgetExceeded("oracle enumeration needs more than " + std::to_string(budget) +
                             " supports");
    }

    const double threshold = epsilon + 1e-12 * y.norm();
    OracleResult out;
    out.support = SupportSet(a.pattern(), {});
    out.estimate = BlockVector::zeros(a.pattern());
    out.residual_norm = y.norm();
    if (out.residual_norm <= threshold) {
        out.feasible = true;
        return out;
    }

    for (std::size_t k = 1; k <= k_max; ++k) {
        std::vector<std::size_t> comb(k);
        std::iota(comb.begin(), comb.end(), std::size_t{0});
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> best_comb;
        Eigen::VectorXd best_coef;
        for (;;) {
            const SupportSet s(a.pattern(), comb);
            auto fit = least_squares_min_norm(submatrix(a, s), y);
            const double r = fit.residual.norm();
            if (r < best) {
                best = r;
                best_comb = comb;
                best_coef = std::move(fit.coefficients);
            }
            // Advance to the next combination in lexicographic order.
            std::size_t i = k;
            while (i > 0 && comb[i - 1] == l - k + (i - 1)) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
        }
        if (best <= threshold) {
            out.feasible = true;
            out.support = SupportSet(a.pattern(), best_comb);
            out.estimate = embed(best_coef, out.support);
            out.residual_norm = best;
            return out;
        }
    }
    return out;
}

bool noisy_support_recovered(const RecoveryResult& result, const SupportSet& truth, std::size_t K) {
    if (!truth.is_subset_of(result.support)) return false;
    const auto norms = result.estimate.block_norms();
    std::vector<std::size_t> order(norms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });
    order.resize(std::min(K, order.size()));
    return SupportSet(truth.pattern(), order) == truth;
}

TrialOutcome run_trial(const DenseMatrix& a, const BlockVector& x_true, const TrialCell& cell) {
    TrialOutcome out;
    out.seed = cell.seed;
    out.K = cell.K;
    out.N = cell.N;

    const SupportSet truth = block_support(x_true, 0.0);
    if (truth.size() > cell.K) throw std::invalid_argument("signal has more than K nonzero blocks");
    const bool noisy = cell.epsilon > 0.0;
    const Eigen::VectorXd y =
        a.apply(x_true) + gen_noise(a.rows(), cell.epsilon, cell.seed, cell.noise_stream);
    const double x_norm = x_true.values().norm();
    auto rel_error = [&](const BlockVector& est) {
        const double diff = (est.values() - x_true.values()).norm();
        return x_norm > 0.0 ? diff / x_norm : diff;
    };

    if (cell.K == 0) {
        // Known sparsity zero: the only admissible estimate is the zero vector.
        const BlockVector zero = BlockVector::zeros(x_true.pattern());
        out.relative_error = rel_error(zero);
        out.support_match = truth.empty();
        out.exact_recovery = out.support_match && (noisy || out.relative_error <= cell.success_rel_tol);
        return out;
    }

    PursuitConfig config = PursuitConfig::create(cell.K, cell.N, a.rows(), cell.epsilon, cell.tie_break);
    const RecoveryResult run = bommp(a, y, config);
    out.iterations = run.iterations();
    out.stop_reason = run.stop_reason;
    out.relative_error = rel_error(run.estimate);
    if (noisy) {
        out.support_match = noisy_support_recovered(run, truth, cell.K);
        out.exact_recovery = out.support_match;
    } else {
        out.support_match = block_support(run.estimate) == truth;
        out.exact_recovery = out.support_match && out.relative_error <= cell.success_rel_tol;
    }

    if (cell.certify) {
        const std::size_t order = cell.N * cell.K + 1;
        if (order <= a.pattern().block_count()) {
            out.certified = certify_noiseless(a, cell.K, cell.N).condition_holds;
        } else {
            out.certified = false;
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (block_lengths.empty()) throw std::invalid_argument("pattern must have at least one block");
    if (K_values.empty() || N_values.empty()) throw std::invalid_argument("K and N ranges must be nonempty");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(noise_epsilon >= 0.0)) throw std::invalid_argument("noise_epsilon must be nonnegative");
    if (!(success_rel_tol > 0.0)) throw std::invalid_argument("success_rel_tol must be positive");
    if (matrix_ensemble != "gaussian") {
        throw std::invalid_argument("unsupported matrix ensemble '" + matrix_ensemble + "'");
    }
    const std::size_t l = block_lengths.size();
    for (std::size_t K : K_values) {
        if (K > l) throw std::invalid_argument("K exceeds the number of blocks");
    }
    for (std::size_t N : N_values) {
        if (N < 1) throw std::invalid_argument("N must be positive");
    }
    (void)pattern();
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("experiment config must be a JSON object");

    static const char* known[] = {"m", "l", "d", "block_lengths", "K_range", "K_list", "N_list",
                                  "trials", "noise_epsilon", "master_seed", "success_rel_tol",
                                  "matrix_ensemble", "signal_distribution", "tie_break", "certify"};
    for (const auto& item : j.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw ParseError("experiment config: unknown key '" + item.key() + "'");
        }
    }

    ExperimentConfig c;
    try {
        c.m = j.at("m").get<std::size_t>();
        if (j.contains("block_lengths")) {
            c.block_lengths = j["block_lengths"].get<std::vector<std::size_t>>();
        } else {
            c.block_lengths.assign(j.at("l").get<std::size_t>(), j.at("d").get<std::size_t>());
        }
        if (j.contains("K_list")) {
            c.K_values = j["K_list"].get<std::vector<std::size_t>>();
        } else {
            const auto range = j.at("K_range").get<std::vector<std::size_t>>();
            if (range.size() != 2 || range[0] > range[1]) {
                throw ParseError("K_range must be [lo, hi] with lo <= hi");
            }
            for (std::size_t k = range[0]; k <= range[1]; ++k) c.K_values.push_back(k);
        }
        c.N_values = j.at("N_list").get<std::vector<std::size_t>>();
        c.trials = j.value("trials", c.trials);
        c.noise_epsilon = j.value("noise_epsilon", c.noise_epsilon);
        c.master_seed = j.value("master_seed", c.master_seed);
        c.success_rel_tol = j.value("success_rel_tol", c.success_rel_tol);
        c.matrix_ensemble = j.value("matrix_ensemble", c.matrix_ensemble);
        if (j.contains("signal_distribution")) {
            c.signal_distribution = parse_signal_distribution(j["signal_distribution"].get<std::string>());
        }
        if (j.contains("tie_break")) c.tie_break = parse_tie_break(j["tie_break"].get<std::string>());
        c.certify = j.value("certify", c.certify);
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

bool cell_is_valid(std::size_t K, std::size_t N, std::size_t m) {
    return K == 0 || (N >= 1 && N <= K && N * K <= m);
}

std::vector<PhaseRow> run_phase(const ExperimentConfig& config, unsigned workers) {
    config.validate();
    const BlockPattern pattern = config.pattern();

    struct Cell {
        std::size_t K, N;
    };
    std::vector<Cell> cells;
    for (std::size_t K : config.K_values) {
        for (std::size_t N : config.N_values) {
            if (cell_is_valid(K, N, config.m)) cells.push_back({K, N});
        }
    }

    const std::size_t tasks = cells.size() * config.trials;
    std::vector<TrialOutcome> outcomes(tasks);
    auto run_task = [&](std::size_t task) {
        const Cell& cell = cells[task / config.trials];
        const std::uint64_t trial = task % config.trials;
        const std::uint64_t seed = config.master_seed;
        const DenseMatrix a = gen_gaussian_matrix(config.m, pattern, seed,
                                                  stream_id(StreamPurpose::matrix, cell.K, trial));
        const BlockVector x = gen_signal(pattern, cell.K, seed, config.signal_distribution,
                                         stream_id(StreamPurpose::signal, cell.K, trial));
        TrialCell tc;
        tc.K = cell.K;
        tc.N = cell.N;
        tc.epsilon = config.noise_epsilon;
        tc.success_rel_tol = config.success_rel_tol;
        tc.tie_break = config.tie_break;
        tc.seed = seed;
        tc.noise_stream = stream_id(StreamPurpose::noise, cell.K, trial);
        tc.certify = config.certify;
        outcomes[task] = run_trial(a, x, tc);
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(tasks, 1))));
    if (n_workers == 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
                    try {
                        run_task(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<PhaseRow> rows;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        PhaseRow row;
        row.K = cells[c].K;
        row.N = cells[c].N;
        row.trials = config.trials;
        double iter_sum = 0.0;
        double err_sum = 0.0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            const TrialOutcome& o = outcomes[c * config.trials + t];
            row.successes += o.exact_recovery ? 1 : 0;
            iter_sum += static_cast<double>(o.iterations);
            err_sum += o.relative_error;
            if (o.certified.value_or(false)) {
                ++row.certified_trials;
                row.certified_successes += o.exact_recovery ? 1 : 0;
            }
        }
        const double n = static_cast<double>(config.trials);
        row.success_rate = static_cast<double>(row.successes) / n;
        row.mean_iterations = iter_sum / n;
        row.mean_rel_error = err_sum / n;
        rows.push_back(row);
    }
    return rows;
}

void write_phase_csv(std::ostream& out, const std::vector<PhaseRow>& rows) {
    out << "K,N,trials,successes,success_rate,mean_iterations,mean_rel_error\n";
    for (const auto& r : rows) {
        out << r.K << ',' << r.N << ',' << r.trials << ',' << r.successes << ','
            << format_roundtrip(r.success_rate) << ',' << format_roundtrip(r.mean_iterations) << ','
            << format_roundtrip(r.mean_rel_error) << '\n';
    }
}

void write_phase_svg(std::ostream& out, const std::vector<PhaseRow>& rows) {
    constexpr double width = 640, height = 420;
    constexpr double left = 60, right = 130, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::size_t k_min = 0, k_max = 1;
    if (!rows.empty()) {
        k_min = k_max = rows.front().K;
        for (const auto& r : rows) {
            k_min = std::min(k_min, r.K);
            k_max = std::max(k_max, r.K);
        }
    }
    const double k_span = k_max > k_min ? static_cast<double>(k_max - k_min) : 1.0;
    auto px = [&](std::size_t K) { return left + plot_w * (static_cast<double>(K - k_min) / k_span); };
    auto py = [&](double rate) { return top + plot_h * (1.0 - rate); };
    auto num = [](double v) { return format_significant(v, 6); };

    std::map<std::size_t, std::vector<const PhaseRow*>> lines;
    for (const auto& r : rows) lines[r.N].push_back(&r);

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double rate = i / 4.0;
        out << "<line x1=\"" << left - 4 << "\" y1=\"" << num(py(rate)) << "\" x2=\"" << left
            << "\" y2=\"" << num(py(rate)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << num(py(rate) + 4)
            << "\" text-anchor=\"end\">" << num(rate) << "</text>\n";
    }
    for (std::size_t K = k_min; K <= k_max; ++K) {
        out << "<text x=\"" << num(px(K)) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << K << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\">block sparsity K</text>\n";
    out << "<text x=\"15\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << top + plot_h / 2 << ")\">success rate</text>\n";

    std::size_t idx = 0;
    for (const auto& [N, pts] : lines) {
        const char* color = colors[idx % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            out << (i ? " " : "") << num(px(pts[i]->K)) << ',' << num(py(pts[i]->success_rate));
        }
        out << "\"/>\n";
        for (const PhaseRow* p : pts) {
            out << "<circle cx=\"" << num(px(p->K)) << "\" cy=\"" << num(py(p->success_rate))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 20.0 * static_cast<double>(idx);
        out << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w + 46 << "\" y=\"" << ly + 4 << "\">N = " << N
            << "</text>\n";
        ++idx;
    }
    out << "</g>\n</svg>\n";
}

PolarizationSweep polarization_sweep(std::size_t draws, std::uint64_t seed, std::size_t max_n) {
    if (max_n < 1) throw std::invalid_argument("max_n must be positive");
    PolarizationSweep out;
    out.draws = draws;
    for (std::size_t draw = 0; draw < draws; ++draw) {
        Philox4x64 rng(seed, stream_id(StreamPurpose::misc, 0, draw));
        const auto m = static_cast<Eigen::Index>(1 + rng.below(max_n));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(max_n));
        auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
            Eigen::MatrixXd g(rows, cols);
            for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
            return g;
        };
        const Eigen::MatrixXd a = gaussian(m, n);
        const Eigen::VectorXd x = gaussian(n, 1);
        std::vector<Eigen::VectorXd> h(1 + rng.below(5));
        for (auto& v : h) v = gaussian(n, 1);
        std::vector<std::size_t> w;
        while (w.empty()) {
            for (std::size_t i = 0; i < h.size(); ++i) {
                if (rng.uniform() < 0.5) w.push_back(i);
            }
        }
        const double s = std::exp(6.0 * rng.uniform() - 3.0);
        const double c = std::exp(6.0 * rng.uniform() - 3.0);

        const double gap = polarization_gap(a, x, h, w, s, c);

        const double t2 = std::pow(polarization_t(s), 2);
        const double ti = -0.5 * c * (1.0 - t2);
        Eigen::VectorXd combo = Eigen::VectorXd::Zero(n);
        double cross = 0.0;
        for (std::size_t i : w) {
            combo += ti * h[i];
            cross += std::abs((a * x).dot(a * h[i]));
        }
        const double scale = (a * (x + combo)).squaredNorm() + (a * (t2 * x - combo)).squaredNorm() +
                             (1.0 - t2 * t2) * ((a * x).squaredNorm() + c * cross);
        const double rel = scale > 0.0 ? std::abs(gap) / scale : std::abs(gap);
        out.max_relative_gap = std::max(out.max_relative_gap, rel);
        out.max_abs_gap = std::max(out.max_abs_gap, std::abs(gap));
    }
    return out;
}

}  // namespace bommp
