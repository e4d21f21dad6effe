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

#pragma once

// Command drivers behind the ccdetect tool. Each returns its output as text;
// the tool decides where it goes.

#include <exception>
#include <string>
#include <vector>

#include "ccd/config.hpp"
#include "ccd/montecarlo.hpp"
#include "ccd/projection.hpp"
#include "ccd/secrecy.hpp"

namespace ccd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNumeric = 4;

int exit_code_for(const std::exception& e);

// phi from scenario.projection, or drawn from projection_stream(seed, 0).
ProjectionOperator config_projection(const ExperimentConfig& cfg);

struct AnalyzeOutput {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string report() const;  // key=value lines
    std::string csv() const;     // quantity,value
    const std::string& get(const std::string& key) const;
};

AnalyzeOutput cmd_analyze(const ExperimentConfig& cfg);

// Sweep table if the config has a [sweep] section, otherwise a single row
// keyed by the compression ratio.
std::string cmd_simulate(const ExperimentConfig& cfg, const ProgressFn& progress = {});

enum class DesignMode { Perfect, Constrained };
DesignMode parse_design_mode(const std::string& name);

DesignSolution cmd_design(const ExperimentConfig& cfg, DesignMode mode);
std::string design_report(const DesignSolution& s);

// CSV table, or the parameter listing when describe is set.
std::string cmd_figure(const std::string& id, const std::vector<std::string>& overrides, bool describe);

}  // namespace ccd
