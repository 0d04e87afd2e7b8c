// Copyright 2026 The cauchyloc authors
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

// End-to-end tests of the scenario runner binary. The binary path and the
// bundled scenario directory come in through compile definitions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const char *kCli = CAUCHYLOC_CLI_PATH;
const char *kScenarios = CAUCHYLOC_SCENARIO_DIR;

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

// Runs the CLI via the shell; stdout is captured to a scratch file.
RunResult run_cli(const std::string &args, const std::string &workdir) {
    const fs::path out = fs::path(workdir) / "stdout.txt";
    const std::string cmd =
        "cd " + workdir + " && " + std::string(kCli) + " " + args + " > " +
        out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    return r;
}

std::string scratch_dir(const char *tag) {
    const fs::path d = fs::temp_directory_path() / (std::string("cauchyloc_cli_") + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d.string();
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scenario(const char *name) {
    return (fs::path(kScenarios) / name).string();
}

} // namespace

TEST_CASE("normalization scenario passes with value near one") {
    const auto dir = scratch_dir("norm");
    const auto r = run_cli("run " + scenario("normalization.flat.json") + " -o report.csv", dir);
    CHECK(r.exit_code == 0);
    const std::string report = slurp(fs::path(dir) / "report.csv");
    REQUIRE(!report.empty());
    // First data row: the total-mass moment.
    std::stringstream ss(report);
    std::string header, row;
    std::getline(ss, header);
    CHECK(header ==
          "scenario,check,digest,x,value,quad_error,truncation_error,pass,detail");
    REQUIRE(std::getline(ss, row));
    std::stringstream rs(row);
    std::string col;
    for (int i = 0; i <= 4; ++i) {
        std::getline(rs, col, ',');
    }
    const double value = std::strtod(col.c_str(), nullptr);
    CHECK(value >= 0.999);
    CHECK(value <= 1.001);
    CHECK(row.find("pass") != std::string::npos);
}

TEST_CASE("the constant-kernel negative control exits 2 with min_eig < 0") {
    const auto dir = scratch_dir("neg");
    const auto r = run_cli("run " + scenario("kernelcheck.negative.json") + " -o report.csv", dir);
    CHECK(r.exit_code == 2);
    const std::string report = slurp(fs::path(dir) / "report.csv");
    CHECK(report.find("min_eig=-") != std::string::npos);
    CHECK(report.find(",fail,") != std::string::npos);
}

TEST_CASE("the positive kernel check exits 0") {
    const auto dir = scratch_dir("psd");
    const auto r = run_cli("run " + scenario("kernelcheck.psd.json") + " -o report.csv", dir);
    CHECK(r.exit_code == 0);
}

TEST_CASE("malformed scenario exits 1 without writing a report") {
    const auto dir = scratch_dir("bad");
    {
        std::ofstream f(fs::path(dir) / "bad.json");
        f << "{ \"schema_version\": 1, \"checks\": [ oops";
    }
    const auto r = run_cli("run bad.json -o report.csv", dir);
    CHECK(r.exit_code == 1);
    CHECK_FALSE(fs::exists(fs::path(dir) / "report.csv"));

    // Unsupported schema version is a configuration error too.
    {
        std::ofstream f(fs::path(dir) / "ver.json");
        f << "{\"schema_version\": 99, \"checks\": [{\"type\": \"moments\"}]}";
    }
    const auto r2 = run_cli("run ver.json -o report2.csv", dir);
    CHECK(r2.exit_code == 1);
    CHECK_FALSE(fs::exists(fs::path(dir) / "report2.csv"));
}

TEST_CASE("reports are byte-identical across reruns") {
    const auto dir = scratch_dir("det");
    const auto a = run_cli("run " + scenario("causality.flat.json") + " -o a.csv", dir);
    const auto b = run_cli("run " + scenario("causality.flat.json") + " -o b.csv", dir);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    const std::string ra = slurp(fs::path(dir) / "a.csv");
    const std::string rb = slurp(fs::path(dir) / "b.csv");
    CHECK(!ra.empty());
    CHECK(ra == rb);
}

TEST_CASE("CAUCHYLOC_SEED overrides the file seed") {
    const auto dir = scratch_dir("seed");
    const auto base = run_cli("run " + scenario("kernelcheck.psd.json") + " -o a.csv", dir);
    const std::string cmd = "cd " + dir + " && CAUCHYLOC_SEED=777 " + std::string(kCli) +
                            " run " + scenario("kernelcheck.psd.json") +
                            " -o b.csv > /dev/null 2>&1";
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(base.exit_code == 0);
    CHECK(rc == 0);
    // Different sample draw, different eigenvalues.
    CHECK(slurp(fs::path(dir) / "a.csv") != slurp(fs::path(dir) / "b.csv"));
}

TEST_CASE("json report format renders with fixed float formatting") {
    const auto dir = scratch_dir("json");
    const auto r = run_cli("run " + scenario("kernelcheck.psd.json") +
                               " -o report.json --format json",
                           dir);
    CHECK(r.exit_code == 0);
    const std::string report = slurp(fs::path(dir) / "report.json");
    CHECK(report.find("\"check\":\"kernel-check\"") != std::string::npos);
    CHECK(report.find("e+") != std::string::npos);
}

TEST_CASE("plotdata produces the long-format table") {
    const auto dir = scratch_dir("plot");
    run_cli("run " + scenario("causality.flat.json") + " -o report.csv", dir);
    const auto r = run_cli("plotdata report.csv --axis x -o plot.csv", dir);
    CHECK(r.exit_code == 0);
    const std::string plot = slurp(fs::path(dir) / "plot.csv");
    std::stringstream ss(plot);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "scenario,check,x,y,yerr");
    int rows = 0;
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty()) {
            ++rows;
        }
    }
    CHECK(rows == 2);

    // Header-only input gives header-only output.
    {
        std::ofstream f(fs::path(dir) / "empty.csv");
        f << "scenario,check,digest,x,value,quad_error,truncation_error,pass,detail\n";
    }
    const auto re = run_cli("plotdata empty.csv --axis index -o empty_plot.csv", dir);
    CHECK(re.exit_code == 0);
    CHECK(slurp(fs::path(dir) / "empty_plot.csv") == "scenario,check,x,y,yerr\n");

    // Unknown axis is an error.
    const auto rb = run_cli("plotdata report.csv --axis bogus", dir);
    CHECK(rb.exit_code == 1);
}

TEST_CASE("list-scenarios enumerates the bundled corpus") {
    const auto dir = scratch_dir("list");
    const auto r = run_cli(std::string("list-scenarios --dir ") + kScenarios, dir);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("normalization.flat.json") != std::string::npos);
    CHECK(r.stdout_text.find("hegerfeldt.leak.json") != std::string::npos);
    CHECK(r.stdout_text.find("kernelcheck.negative.json") != std::string::npos);
}

TEST_CASE("the --jobs flag is accepted") {
    const auto dir = scratch_dir("jobs");
    const auto r = run_cli("run --jobs 2 " + scenario("kernelcheck.psd.json") + " -o r.csv", dir);
    CHECK(r.exit_code == 0);
}
