// Copyright 2026 The pobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pobs: scenario runner and property verifier.
//
// Exit status: 0 success, 1 verification or validation failure, 2 I/O or
// parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include "CLI11.hpp"
#include "pobs/run.hpp"
#include "pobs/scenario.hpp"
#include "pobs/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kIoError = 2;

int write_output(const std::string &text, const std::string &path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return kOk;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "pobs: cannot write " << path << "\n";
        return kIoError;
    }
    return kOk;
}

int exit_code(const pobs::Error &e) {
    switch (e.kind()) {
        case pobs::ErrorKind::ParseError:
        case pobs::ErrorKind::IoError:
            return kIoError;
        default:
            return kFailure;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Pseudo-observable algebra: scenario runner and property verifier"};
    app.require_subcommand(1);

    std::string dims = "2..12";
    pobs::VerifyOptions vopt;
    std::string verify_out;
    auto *verify = app.add_subcommand("verify", "Run every property suite and emit a JSON report");
    verify->add_option("--dims", dims, "Dimension range lo..hi (or a single d)")->capture_default_str();
    verify->add_option("--trials", vopt.trials, "Trials per property")->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_option("--seed", vopt.seed, "Root seed")->capture_default_str();
    verify->add_option("--tol-scale", vopt.tol_scale, "Multiplier on every property tolerance")->capture_default_str();
    verify->add_option("--out", verify_out, "Output file (default stdout)");

    std::string scenario_path;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    std::string run_out;
    unsigned threads = 0;
    auto *run = app.add_subcommand("run", "Simulate a scenario file and emit a text report");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--samples", samples, "Override the Monte Carlo sample count");
    run->add_option("--seed", seed, "Override the root seed");
    run->add_option("--threads", threads, "Sampling threads (0: all cores); does not change the output");
    run->add_option("--out", run_out, "Output file (default stdout)");

    app.add_subcommand("schema", "Print the scenario file schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kIoError;
    }

    try {
        if (*verify) {
            static const std::regex range(R"((\d+)(?:\.\.(\d+))?)");
            std::smatch m;
            if (!std::regex_match(dims, m, range)) {
                std::cerr << "pobs: --dims expects lo..hi, got '" << dims << "'\n";
                return kIoError;
            }
            vopt.dim_lo = std::stoul(m[1].str());
            vopt.dim_hi = m[2].matched ? std::stoul(m[2].str()) : vopt.dim_lo;
            const pobs::VerificationReport rep = pobs::verify(vopt);
            const int rc = write_output(pobs::to_json(rep).dump(2) + "\n", verify_out);
            if (rc != kOk) {
                return rc;
            }
            if (!rep.passed()) {
                for (const auto &r : rep.results) {
                    if (!r.passed()) {
                        std::cerr << "FAIL " << r.name << " (" << r.failures << "/" << r.trials << " trials)\n";
                    }
                }
                return kFailure;
            }
            return kOk;
        }
        if (app.got_subcommand("run")) {
            const pobs::Scenario s = pobs::load_scenario(scenario_path);
            pobs::RunOptions ropt;
            ropt.samples = samples;
            ropt.seed = seed;
            ropt.threads = threads;
            const pobs::Report rep = pobs::run_scenario(s, ropt);
            const int rc = write_output(pobs::render_report(rep), run_out);
            if (rc != kOk) {
                return rc;
            }
            return rep.ok() ? kOk : kFailure;
        }
        if (app.got_subcommand("schema")) {
            std::cout << pobs::kScenarioSchema;
            return kOk;
        }
    } catch (const pobs::Error &e) {
        std::cerr << "pobs: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception &e) {
        std::cerr << "pobs: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
