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

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "bommp/counterexample.hpp"
#include "bommp/harness.hpp"
#include "bommp/textio.hpp"
#include "cli_app.hpp"

using namespace bommp;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("bommp_cli_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("bound") {
    const auto r = run({"bound", "--K", "2", "--N", "2", "--k", "1"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("sharp bound: 0.707106781") != std::string::npos);
    CHECK(r.out.find("prior bound: 0.5") != std::string::npos);
    CHECK(r.out.find("prior < sharp: true") != std::string::npos);
    CHECK(r.err.find("# bommp 1.0.0 subcommand=bound") != std::string::npos);

    CHECK(run({"bound", "--K", "1", "--N", "2"}).code == cli::kUsage);
    CHECK(run({"bound", "--K", "2", "--N", "1", "--bogus", "3"}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({}).code == cli::kUsage);
}

TEST_CASE("recover on an orthonormal matrix") {
    TempDir dir;
    save_bsm(dir / "a.bsm", DenseMatrix(Eigen::MatrixXd::Identity(6, 6), BlockPattern::uniform(3, 2)));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
    v[4] = 5;
    v[5] = 6;
    save_bsv(dir / "x.bsv", BlockVector(BlockPattern::uniform(3, 2), v));

    const auto r = run({"recover", dir / "a.bsm", dir / "x.bsv", "--K", "1", "--trace-out", dir / "t.csv",
                        "--estimate-out", dir / "e.bsv"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("support: 3\n") != std::string::npos);
    CHECK(r.out.find("iterations: 1") != std::string::npos);
    CHECK(r.out.find("stop_reason: residual_below_epsilon") != std::string::npos);
    CHECK(r.out.find("relative_error: 0") != std::string::npos);
    CHECK(load_bsv(dir / "e.bsv").values() == v);
    std::ifstream t(dir / "t.csv");
    std::string header;
    std::getline(t, header);
    CHECK(header == "k,selected_blocks,cumulative_size,residual_norm,alpha_N,beta_1");

    // The same vector read as a measurement.
    const auto m = run({"recover", dir / "a.bsm", dir / "x.bsv", "--K", "1", "--measurement"});
    CHECK(m.code == cli::kOk);
    CHECK(m.out.find("relative_error") == std::string::npos);

    CHECK(run({"recover", dir / "a.bsm", dir / "missing.bsv", "--K", "1"}).code == cli::kUsage);
    CHECK(run({"recover", dir / "a.bsm", dir / "x.bsv", "--K", "1", "--N", "2"}).code == cli::kUsage);
}

TEST_CASE("recover shows the counterexample tie") {
    TempDir dir;
    const CounterexampleSpec spec{2, 1, 1};
    save_bsm(dir / "a.bsm", build_counterexample(spec));
    save_bsv(dir / "x.bsv", worst_case_signal(spec));
    const auto r = run({"recover", dir / "a.bsm", dir / "x.bsv", "--K", "2", "--tie-break", "highest"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("iteration 1: selected 3;") != std::string::npos);
    CHECK(r.out.find("scores 0.666666667 0.666666667 0.666666667") != std::string::npos);
}

TEST_CASE("ric and certify") {
    TempDir dir;
    save_bsm(dir / "eye.bsm", DenseMatrix(Eigen::MatrixXd::Identity(8, 8), BlockPattern::uniform(4, 2)));
    save_bsm(dir / "cx.bsm", build_counterexample({2, 1, 1}));

    const auto r = run({"ric", dir / "cx.bsm", "--order", "3"});
    CHECK(r.code == cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["order"] == 3);
    CHECK(j["exact"] == true);
    CHECK(j["delta"].get<double>() == doctest::Approx(0.5773502691896258).epsilon(1e-12));
    CHECK(j.contains("lambda_min"));
    CHECK(j.contains("lambda_max"));
    CHECK(j["witness"] == nlohmann::json::array({1, 2, 3}));

    const auto s = run({"ric", dir / "eye.bsm", "--order", "2", "--samples", "3", "--seed", "4"});
    CHECK(s.code == cli::kOk);
    CHECK(nlohmann::json::parse(s.out)["exact"] == false);
    CHECK(run({"ric", dir / "eye.bsm", "--order", "9"}).code == cli::kUsage);

    const auto c = run({"certify", dir / "cx.bsm", "--K", "2", "--N", "1"});
    CHECK(c.code == cli::kOk);
    const auto cj = nlohmann::json::parse(c.out);
    CHECK(cj["condition_holds"] == false);

    const auto ok = run({"certify", dir / "eye.bsm", "--K", "1", "--N", "1"});
    CHECK(nlohmann::json::parse(ok.out)["condition_holds"] == true);
    CHECK(run({"certify", dir / "eye.bsm", "--K", "2", "--N", "2"}).code == cli::kUncheckable);
}

TEST_CASE("counterexample and lemma-check") {
    TempDir dir;
    const auto r = run({"counterexample", "--K", "2", "--N", "1", "--d", "1", "--tie-break", "highest",
                        "--matrix-out", dir / "a.bsm"});
    CHECK(r.code == cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["failure_demonstrated"] == true);
    CHECK(j["spectrum_matches"] == true);
    CHECK(load_bsm(dir / "a.bsm").rows() == 3);

    const auto l = run({"lemma-check", "--draws", "50", "--seed", "3"});
    CHECK(l.code == cli::kOk);
    CHECK(l.out.find("draws: 50") != std::string::npos);
}

TEST_CASE("phase") {
    TempDir dir;
    {
        std::ofstream f(dir / "cfg.json");
        f << R"({"m": 12, "l": 8, "d": 1, "K_range": [1, 2], "N_list": [1, 2], "trials": 4, "master_seed": 2})";
    }
    const auto r = run({"phase", dir / "cfg.json", "--out-csv", dir / "p.csv", "--out-svg", dir / "p.svg",
                        "--workers", "2"});
    CHECK(r.code == cli::kOk);
    CHECK(fs::exists(dir / "p.svg"));
    std::ifstream f(dir / "p.csv");
    std::stringstream csv;
    csv << f.rdbuf();
    const auto stdout_run = run({"phase", dir / "cfg.json"});
    CHECK(stdout_run.out == csv.str());
    CHECK(r.err.find("config=fnv1a:") != std::string::npos);
    CHECK(run({"phase", dir / "nope.json"}).code == cli::kUsage);
}
