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

#include "cli_app.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "bommp/blockmodel.hpp"
#include "bommp/counterexample.hpp"
#include "bommp/harness.hpp"
#include "bommp/linalg.hpp"
#include "bommp/pursuit.hpp"
#include "bommp/ric.hpp"
#include "bommp/textio.hpp"

namespace bommp::cli {

namespace {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void print_repro(std::ostream& err, const std::string& subcommand, const std::string& seed,
                 const std::vector<std::string>& args, std::string_view extra = {}) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& a : args) {
        h = fnv1a(a, h);
        h = fnv1a("\x1f", h);
    }
    h = fnv1a(extra, h);
    err << "# bommp " << kVersion << " subcommand=" << subcommand << " seed=" << seed
        << " config=fnv1a:" << hex64(h) << '\n';
}

Json one_based(const SupportSet& s) {
    Json arr = Json::array();
    for (std::size_t i : s) arr.push_back(i + 1);
    return arr;
}

std::string support_text(const SupportSet& s) {
    if (s.empty()) return "(empty)";
    std::string out;
    for (std::size_t i : s) out += (out.empty() ? "" : " ") + std::to_string(i + 1);
    return out;
}

Json spectrum_json(const std::vector<SpectrumEntry>& spec) {
    Json arr = Json::array();
    for (const auto& e : spec) arr.push_back(Json::array({e.value, e.multiplicity}));
    return arr;
}

Json guarantee_json(const GuaranteeReport& g) {
    Json j;
    j["mode"] = std::string(to_string(g.mode));
    j["order"] = g.order;
    j["delta"] = g.delta;
    j["delta_used"] = g.delta_used;
    j["bound"] = g.bound;
    j["margin"] = g.margin;
    j["condition_holds"] = g.condition_holds;
    if (g.mode == GuaranteeMode::noisy) {
        j["min_norm_threshold"] = g.min_norm_threshold;
        j["min_block_norm"] = g.min_block_norm;
    }
    return j;
}

struct RecoverArgs {
    std::string matrix_file;
    std::string input_file;
    std::size_t K = 0;
    std::size_t N = 1;
    double epsilon = 0.0;
    std::string tie_break = "lowest";
    std::string trace_out;
    std::string estimate_out;
    bool measurement = false;
};

int cmd_recover(const RecoverArgs& args, std::ostream& out) {
    const DenseMatrix a = load_bsm(args.matrix_file);
    const BlockVector input = load_bsv(args.input_file);

    std::optional<BlockVector> signal;
    Eigen::VectorXd y;
    if (!args.measurement && input.pattern() == a.pattern()) {
        signal = input;
        y = a.apply(input);
    } else if (input.dim() == a.rows()) {
        y = input.values();
    } else {
        throw std::invalid_argument("input has length " + std::to_string(input.dim()) +
                                    "; expected a signal over the matrix column pattern or a "
                                    "measurement of length " + std::to_string(a.rows()));
    }

    const auto config = PursuitConfig::create(args.K, args.N, a.rows(), args.epsilon,
                                              parse_tie_break(args.tie_break));
    const RecoveryResult result = bommp(a, y, config);

    for (const auto& rec : result.trace) {
        out << "iteration " << rec.k << ": selected " << support_text(rec.selected)
            << "; residual_norm " << format_significant(rec.residual_norm) << "; scores";
        for (double s : rec.scores) out << ' ' << format_significant(s);
        out << '\n';
    }
    const double y_norm = y.norm();
    out << "support: " << support_text(block_support(result.estimate)) << '\n';
    out << "pursuit_support: " << support_text(result.support) << '\n';
    out << "iterations: " << result.iterations() << '\n';
    out << "relative_residual: "
        << format_significant(y_norm > 0.0 ? result.residual_norm() / y_norm : result.residual_norm())
        << '\n';
    out << "stop_reason: " << to_string(result.stop_reason) << '\n';

    std::optional<SupportSet> truth;
    if (signal) {
        truth = block_support(*signal, 0.0);
        const double x_norm = signal->values().norm();
        const double err = (result.estimate.values() - signal->values()).norm();
        out << "relative_error: " << format_significant(x_norm > 0.0 ? err / x_norm : err) << '\n';
    }
    if (!args.trace_out.empty()) {
        std::ofstream f(args.trace_out);
        if (!f) throw std::runtime_error("cannot open " + args.trace_out);
        write_trace_csv(f, result, args.N, truth);
    }
    if (!args.estimate_out.empty()) save_bsv(args.estimate_out, result.estimate);
    return result.stop_reason == StopReason::numerical_stall ? kNumericalStall : kOk;
}

int cmd_bound(std::size_t K, std::size_t N, std::optional<std::size_t> k, std::ostream& out) {
    const double sharp = bound_sharp(K, N);
    out << "sharp bound: " << format_significant(sharp) << "  (delta_{NK+1} with NK+1 = "
        << N * K + 1 << ")\n";
    if (k) {
        const double prior = bound_prior(K, N, *k);
        out << "prior bound: " << format_significant(prior) << "  (delta_{K+(N-2)k+N} with order "
            << static_cast<long long>(K) + (static_cast<long long>(N) - 2) * static_cast<long long>(*k) +
                   static_cast<long long>(N)
            << ")\n";
        out << "prior < sharp: " << (prior < sharp ? "true" : "false") << '\n';
    }
    return kOk;
}

int cmd_ric(const std::string& matrix_file, std::size_t order, std::uint64_t samples,
            std::uint64_t seed, unsigned workers, std::ostream& out) {
    const DenseMatrix a = load_bsm(matrix_file);
    const RicReport r = samples > 0 ? block_ric_sampled(a, order, samples, seed)
                                    : block_ric_exact(a, order, RicOptions{kDefaultRicBudget, workers});
    Json j;
    j["order"] = r.order;
    j["delta"] = r.delta;
    j["lambda_min"] = r.lambda_min;
    j["lambda_max"] = r.lambda_max;
    j["witness"] = one_based(r.witness);
    j["exact"] = r.exact;
    out << j.dump() << '\n';
    return kOk;
}

int cmd_certify(const std::string& matrix_file, std::size_t K, std::size_t N,
                const std::string& signal_file, double epsilon, unsigned workers, std::ostream& out) {
    const DenseMatrix a = load_bsm(matrix_file);
    const RicOptions opts{kDefaultRicBudget, workers};
    const GuaranteeReport g = signal_file.empty()
                                  ? certify_noiseless(a, K, N, opts)
                                  : certify_noisy(a, load_bsv(signal_file), K, N, epsilon, opts);
    out << guarantee_json(g).dump() << '\n';
    return kOk;
}

int cmd_counterexample(const CounterexampleSpec& spec, const std::string& tie_break,
                       const std::string& matrix_out, std::ostream& out) {
    const auto rep = verify_counterexample(spec, 1e-9, parse_tie_break(tie_break));
    const DenseMatrix a = build_counterexample(spec);
    Json j;
    j["K"] = spec.K;
    j["N"] = spec.N;
    j["d"] = spec.d;
    j["tie_break"] = std::string(to_string(rep.tie_break));
    j["spectrum_expected"] = spectrum_json(rep.spectrum_expected);
    j["spectrum_observed"] = spectrum_json(rep.spectrum_observed);
    j["spectrum_matches"] = rep.spectrum_matches;
    j["delta_observed"] = rep.delta_observed;
    j["bound"] = rep.bound;
    j["margin"] = certify_noiseless(a, spec.K, spec.N).margin;
    j["first_scores"] = rep.first_scores;
    j["scores_match"] = rep.scores_match;
    j["alpha_1"] = rep.alpha_1;
    j["beta_1"] = rep.beta_1;
    j["first_selection"] = one_based(rep.first_selection);
    j["failure_demonstrated"] = rep.failure_demonstrated;
    j["recovered"] = rep.recovered;
    out << j.dump() << '\n';
    if (!matrix_out.empty()) save_bsm(matrix_out, a);
    return kOk;
}

int cmd_lemma_check(std::size_t draws, std::uint64_t seed, std::size_t max_n, double tol,
                    std::ostream& out) {
    const auto sweep = polarization_sweep(draws, seed, max_n);
    const bool pass = sweep.max_relative_gap <= tol;
    out << "draws: " << sweep.draws << '\n'
        << "max_relative_gap: " << format_significant(sweep.max_relative_gap) << '\n'
        << "max_abs_gap: " << format_significant(sweep.max_abs_gap) << '\n'
        << "result: " << (pass ? "pass" : "fail") << '\n';
    return pass ? kOk : kNumericalStall;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Block orthogonal multi-matching pursuit: recovery, RIC certification and experiments",
                 "bommp"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RecoverArgs rec;
    auto* recover = app.add_subcommand("recover", "Recover a block-sparse signal with BOMMP");
    recover->add_option("matrix", rec.matrix_file, "Sensing matrix (.bsm)")->required();
    recover->add_option("input", rec.input_file,
                        "Signal over the column pattern, or measurement y of length m (.bsv)")
        ->required();
    recover->add_option("--K", rec.K, "Block sparsity level")->required();
    recover->add_option("--N", rec.N, "Blocks selected per iteration")->capture_default_str();
    recover->add_option("--epsilon", rec.epsilon, "Stop when ||r||_2 <= epsilon")->capture_default_str();
    recover->add_option("--tie-break", rec.tie_break, "lowest or highest")
        ->check(CLI::IsMember({"lowest", "highest", "lowest_index", "highest_index"}))
        ->capture_default_str();
    recover->add_option("--trace-out", rec.trace_out, "Write the iteration trace as CSV");
    recover->add_option("--estimate-out", rec.estimate_out, "Write the estimate (.bsv)");
    recover->add_flag("--measurement", rec.measurement, "Treat the input as a measurement vector y");

    std::size_t bound_K = 0, bound_N = 0, bound_k = 0;
    auto* bound = app.add_subcommand("bound", "Print the sharp RIC bound and the prior bound");
    bound->add_option("--K", bound_K, "Block sparsity level")->required();
    bound->add_option("--N", bound_N, "Blocks selected per iteration")->required();
    auto* bound_k_opt = bound->add_option("--k", bound_k, "Iteration index for the prior bound");

    std::string ric_matrix;
    std::size_t ric_order = 0;
    std::uint64_t ric_samples = 0, ric_seed = 1;
    unsigned ric_workers = 1;
    auto* ric = app.add_subcommand("ric", "Compute the block restricted isometry constant");
    ric->add_option("matrix", ric_matrix, "Sensing matrix (.bsm)")->required();
    ric->add_option("--order", ric_order, "Block sparsity order")->required();
    ric->add_option("--samples", ric_samples, "Sample this many supports instead of enumerating");
    ric->add_option("--seed", ric_seed, "Seed for support sampling")->capture_default_str();
    ric->add_option("--workers", ric_workers, "Enumeration threads")->capture_default_str();

    std::string cert_matrix, cert_signal;
    std::size_t cert_K = 0, cert_N = 1;
    double cert_eps = 0.0;
    unsigned cert_workers = 1;
    auto* certify = app.add_subcommand("certify", "Check the sharp recovery condition for a matrix");
    certify->add_option("matrix", cert_matrix, "Sensing matrix (.bsm)")->required();
    certify->add_option("--K", cert_K, "Block sparsity level")->required();
    certify->add_option("--N", cert_N, "Blocks selected per iteration")->capture_default_str();
    certify->add_option("--signal", cert_signal, "Signal (.bsv) for the noisy condition");
    certify->add_option("--epsilon", cert_eps, "Noise bound for the noisy condition")->capture_default_str();
    certify->add_option("--workers", cert_workers, "Enumeration threads")->capture_default_str();

    CounterexampleSpec ce;
    std::string ce_tie = "highest", ce_matrix_out;
    auto* counter = app.add_subcommand("counterexample", "Build and verify the sharpness matrix A(d)");
    counter->add_option("--K", ce.K, "Block sparsity level")->required();
    counter->add_option("--N", ce.N, "Blocks selected per iteration")->required();
    counter->add_option("--d", ce.d, "Block length")->required();
    counter->add_option("--tie-break", ce_tie, "lowest or highest")
        ->check(CLI::IsMember({"lowest", "highest", "lowest_index", "highest_index"}))
        ->capture_default_str();
    counter->add_option("--matrix-out", ce_matrix_out, "Write A(d) (.bsm)");

    std::size_t lemma_draws = 1000, lemma_max_n = 40;
    std::uint64_t lemma_seed = 1;
    double lemma_tol = 1e-9;
    auto* lemma = app.add_subcommand("lemma-check", "Evaluate the polarization identity on random draws");
    lemma->add_option("--draws", lemma_draws, "Number of random instances")->capture_default_str();
    lemma->add_option("--seed", lemma_seed, "Master seed")->capture_default_str();
    lemma->add_option("--max-n", lemma_max_n, "Largest dimension drawn")->capture_default_str();
    lemma->add_option("--tol", lemma_tol, "Relative tolerance")->capture_default_str();

    std::string phase_config, phase_csv, phase_svg;
    unsigned phase_workers = 1;
    std::optional<std::size_t> phase_trials;
    std::optional<std::uint64_t> phase_seed;
    auto* phase = app.add_subcommand("phase", "Run a Monte Carlo phase-transition experiment");
    phase->add_option("config", phase_config, "Experiment config (JSON)")->required();
    phase->add_option("--out-csv", phase_csv, "Results CSV (stdout when omitted)");
    phase->add_option("--out-svg", phase_svg, "Success-rate plot (SVG)");
    phase->add_option("--workers", phase_workers, "Worker threads")->capture_default_str();
    phase->add_option("--trials", phase_trials, "Override trials per cell");
    phase->add_option("--seed", phase_seed, "Override master_seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (recover->parsed()) {
            print_repro(err, "recover", "-", args);
            return cmd_recover(rec, out);
        }
        if (bound->parsed()) {
            print_repro(err, "bound", "-", args);
            std::optional<std::size_t> k;
            if (bound_k_opt->count() > 0) k = bound_k;
            return cmd_bound(bound_K, bound_N, k, out);
        }
        if (ric->parsed()) {
            print_repro(err, "ric", ric_samples > 0 ? std::to_string(ric_seed) : "-", args);
            return cmd_ric(ric_matrix, ric_order, ric_samples, ric_seed, ric_workers, out);
        }
        if (certify->parsed()) {
            print_repro(err, "certify", "-", args);
            return cmd_certify(cert_matrix, cert_K, cert_N, cert_signal, cert_eps, cert_workers, out);
        }
        if (counter->parsed()) {
            print_repro(err, "counterexample", "-", args);
            return cmd_counterexample(ce, ce_tie, ce_matrix_out, out);
        }
        if (lemma->parsed()) {
            print_repro(err, "lemma-check", std::to_string(lemma_seed), args);
            return cmd_lemma_check(lemma_draws, lemma_seed, lemma_max_n, lemma_tol, out);
        }
        if (phase->parsed()) {
            std::ifstream cf(phase_config);
            if (!cf) throw ParseError("cannot open " + phase_config);
            std::stringstream text;
            text << cf.rdbuf();
            ExperimentConfig config = parse_experiment_config(text.str());
            if (phase_trials) config.trials = *phase_trials;
            if (phase_seed) config.master_seed = *phase_seed;
            config.validate();
            print_repro(err, "phase", std::to_string(config.master_seed), args, text.str());
            const auto rows = run_phase(config, phase_workers);
            if (phase_csv.empty()) {
                write_phase_csv(out, rows);
            } else {
                std::ofstream f(phase_csv);
                if (!f) throw std::runtime_error("cannot open " + phase_csv);
                write_phase_csv(f, rows);
                out << "wrote " << rows.size() << " rows to " << phase_csv << '\n';
            }
            if (!phase_svg.empty()) {
                std::ofstream f(phase_svg);
                if (!f) throw std::runtime_error("cannot open " + phase_svg);
                write_phase_svg(f, rows);
            }
            return kOk;
        }
    } catch (const GuaranteeUncheckable& e) {
        err << "error: " << e.what() << '\n';
        return kUncheckable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace bommp::cli
