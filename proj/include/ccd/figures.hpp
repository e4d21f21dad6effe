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

// Data tables for the figure set. Each figure carries its own
// parameter set; any entry can be overridden before evaluation.

#include <map>
#include <string>
#include <vector>

namespace ccd {

struct FigureSpec {
    std::string id;
    std::string title;
    std::map<std::string, std::string> params;  // numbers or grids ("lo:hi:n", "a,b,c")
};

std::vector<std::string> figure_ids();  // 2 3a 3b 4a 4b 5a 5b 6 7

// Throws UnknownFigureError.
FigureSpec figure_spec(const std::string& id);

// Applies "key=value" overrides; ConfigError for unknown keys or bad syntax.
void apply_overrides(FigureSpec& spec, const std::vector<std::string>& overrides);

// Parameter listing for --describe.
std::string describe_figure(const FigureSpec& spec);

struct FigureTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

FigureTable evaluate_figure(const FigureSpec& spec);

std::string table_csv(const FigureTable& table);

}  // namespace ccd
