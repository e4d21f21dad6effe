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

// INI experiment configuration. See README.md for the key reference.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccd/model.hpp"
#include "ccd/montecarlo.hpp"
#include "ccd/secrecy.hpp"

namespace ccd {

struct ExperimentConfig {
    Scenario scenario;  // validated

    // Read phi from this file instead of drawing it from the seed.
    std::optional<std::filesystem::path> projection_file;
    // > 0: simulate draws a fresh phi for every block of this many trials.
    std::uint64_t projection_batch = 0;
    unsigned workers = 1;

    // [analyze]
    double eps = 0.1;
    double delta = 0.05;

    // [sweep]
    std::optional<SweepAxis> sweep_axis;
    std::vector<double> sweep_grid;

    // [design]
    double c_max = 1.0;
    double fraction_min = 1.0;
    double tau = 0.0;
    std::size_t grid_points = kDefaultGridPoints;
    DesignGrids grids;
};

// Throws ConfigError for unreadable files, syntax errors and unknown keys,
// and the model errors for invalid scenarios.
ExperimentConfig load_config(const std::filesystem::path& path);
// Relative "file:" paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

// "1,2,3" | "constant:x" | "energy:E" (constant vector with ||mu||^2 = E) | "file:path"
Eigen::VectorXd parse_mean(const std::string& spec, std::size_t dim, const std::filesystem::path& base_dir);

// "a,b,c" or "lo:hi:n" (n evenly spaced points, both ends included).
std::vector<double> parse_grid(const std::string& spec);

}  // namespace ccd
