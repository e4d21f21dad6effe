/*
   Copyright 2026 The ccdetect Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// ccdetect: collaborative compressive detection experiments.
//
//   ccdetect analyze  --config run.ini [--out report.txt]
//   ccdetect simulate --config run.ini [--out results.csv] [--trials N] [--seed S]
//   ccdetect design   --config run.ini --mode perfect|constrained [--out design.txt]
//   ccdetect figure   --figure 3a [--set key=value ...] [--describe] [--out fig3a.csv]

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ccd/commands.hpp"
#include "ccd/config.hpp"
#include "ccd/errors.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ccd::ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ccd::ConfigError("failed writing '" + path.string() + "'");
}

void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

struct Overrides {
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
};

ccd::ExperimentConfig load(const std::string& path, const Overrides& o)
{
    ccd::ExperimentConfig cfg = ccd::load_config(path);
    if (o.trials) cfg.scenario.trials = *o.trials;
    if (o.seed) cfg.scenario.seed = *o.seed;
    cfg.scenario = ccd::validate_scenario(cfg.scenario);
    return cfg;
}

// Percent-granularity progress line on stderr.
ccd::ProgressFn progress_printer()
{
    return [last = -1](std::uint64_t done, std::uint64_t total) mutable {
        const int pct = total ? static_cast<int>(100 * done / total) : 100;
        if (pct == last) return;
        last = pct;
        std::cerr << fmt::format("\rsimulate: {:3d}% ({}/{} trials)", pct, done, total);
        if (done == total) std::cerr << '\n';
    };
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Collaborative compressive detection with artificial noise injection"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    Overrides ov;
    std::string mode = "perfect";
    std::string figure;
    std::vector<std::string> sets;
    bool describe = false;

    auto* analyze = app.add_subcommand("analyze", "closed-form report for a scenario");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo error rates as CSV");
    auto* design = app.add_subcommand("design", "system design under the secrecy constraint");
    auto* fig = app.add_subcommand("figure", "data table for one figure");

    for (auto* sub : {analyze, simulate, design}) {
        sub->add_option("--config", config, "INI experiment file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output file (default: stdout)");
    }
    simulate->add_option("--trials", ov.trials, "override scenario.trials");
    simulate->add_option("--seed", ov.seed, "override scenario.seed");
    analyze->add_option("--seed", ov.seed, "override scenario.seed");
    design->add_option("--mode", mode, "perfect or constrained")->check(CLI::IsMember({"perfect", "constrained"}));
    fig->add_option("--figure", figure, "2, 3a, 3b, 4a, 4b, 5a, 5b, 6 or 7")->required();
    fig->add_option("--set", sets, "parameter override key=value (repeatable)");
    fig->add_flag("--describe", describe, "print the figure's parameters and exit");
    fig->add_option("--out", out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ccd::kExitOk : ccd::kExitConfig;
    }

    try {
        if (analyze->parsed()) {
            const ccd::AnalyzeOutput report = ccd::cmd_analyze(load(config, ov));
            if (out.empty()) {
                std::cout << report.report();
            } else {
                std::filesystem::path csv = out;
                csv.replace_extension(".csv");
                if (csv == std::filesystem::path(out)) csv += ".csv";
                write_file(out, report.report());
                write_file(csv, report.csv());
            }
        } else if (simulate->parsed()) {
            const ccd::ExperimentConfig cfg = load(config, ov);
            emit(out, ccd::cmd_simulate(cfg, progress_printer()));
        } else if (design->parsed()) {
            const ccd::ExperimentConfig cfg = load(config, ov);
            emit(out, ccd::design_report(ccd::cmd_design(cfg, ccd::parse_design_mode(mode))));
        } else if (fig->parsed()) {
            emit(out, ccd::cmd_figure(figure, sets, describe));
        }
    } catch (const std::exception& e) {
        std::cerr << "ccdetect: " << e.what() << '\n';
        return ccd::exit_code_for(e);
    }
    return ccd::kExitOk;
}
