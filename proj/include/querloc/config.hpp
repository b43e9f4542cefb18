// Copyright 2026 The QuERLoc Authors
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


#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "querloc/experiment.hpp"
#include "querloc/model.hpp"

namespace querloc::config {

/// "3,4,5"
std::vector<std::size_t> parse_size_list(std::string_view text);
/// "0.01,0.02"
std::vector<double> parse_double_list(std::string_view text);
/// Either a comma list or "max:step" for {0, step, ..., max}.
std::vector<double> parse_rho_grid(std::string_view text);
/// "QuERLoc,TDoA-Chan"
std::vector<experiment::Method> parse_method_list(std::string_view text);
/// "(0,0,0);(50,0,0);..." with every point of the same dimension.
std::vector<Position> parse_anchor_list(std::string_view text);

/// Applies `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are ignored. Keys: d, kappa_s, kappa_a_ratio, n,
/// anchors, m, trials, seed, rho_grid, methods, experiment.
///
/// Throws Error(kConfig) naming the offending line.
experiment::ExperimentConfig parse_config(std::istream& in, experiment::ExperimentConfig base = {});

/// parse_config on a file; throws Error(kConfig) when it cannot be opened.
experiment::ExperimentConfig load_config_file(const std::string& path, experiment::ExperimentConfig base = {});

}  // namespace querloc::config
