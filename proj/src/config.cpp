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

#include "querloc/config.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "querloc/error.hpp"

namespace querloc::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::kConfig, std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (auto part : split(text, ',')) out.push_back(parse_number<std::size_t>(part, "integer"));
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_number<double>(part, "number"));
  return out;
}

std::vector<double> parse_rho_grid(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return parse_double_list(text);
  const double max = parse_number<double>(text.substr(0, colon), "rho max");
  const double step = parse_number<double>(text.substr(colon + 1), "rho step");
  return experiment::make_rho_grid(max, step);
}

std::vector<experiment::Method> parse_method_list(std::string_view text) {
  std::vector<experiment::Method> out;
  for (auto part : split(text, ',')) {
    const auto m = experiment::parse_method(part);
    if (!m) throw Error(ErrorKind::kConfig, "unknown method '" + std::string(part) + "'");
    out.push_back(*m);
  }
  return out;
}

std::vector<Position> parse_anchor_list(std::string_view text) {
  std::vector<Position> out;
  for (auto item : split(text, ';')) {
    if (item.empty()) continue;
    if (item.front() != '(' || item.back() != ')') {
      throw Error(ErrorKind::kConfig, "anchor '" + std::string(item) + "' is not of the form (x,y[,z])");
    }
    const auto coords = parse_double_list(item.substr(1, item.size() - 2));
    if (coords.size() != 2 && coords.size() != 3) {
      throw Error(ErrorKind::kConfig, "anchor '" + std::string(item) + "' must have 2 or 3 coordinates");
    }
    Vec v(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) v(static_cast<Eigen::Index>(i)) = coords[i];
    if (!out.empty() && out.front().dim() != coords.size()) {
      throw Error(ErrorKind::kConfig, "anchors mix dimensions");
    }
    out.emplace_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "anchor list is empty");
  return out;
}

experiment::ExperimentConfig parse_config(std::istream& in, experiment::ExperimentConfig cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    try {
      if (key == "d") {
        cfg.d = parse_number<std::size_t>(value, "d");
      } else if (key == "kappa_s") {
        cfg.kappa_s = parse_number<double>(value, "kappa_s");
      } else if (key == "kappa_a_ratio") {
        cfg.kappa_a_ratio = parse_number<double>(value, "kappa_a_ratio");
      } else if (key == "n") {
        cfg.n = parse_number<std::size_t>(value, "n");
      } else if (key == "anchors") {
        if (value == "table1") {
          cfg.anchor_topology = "table1";
          cfg.anchor_list.clear();
        } else {
          cfg.anchor_topology = "literal";
          cfg.anchor_list = parse_anchor_list(value);
        }
      } else if (key == "m") {
        cfg.m_list = parse_size_list(value);
      } else if (key == "trials") {
        cfg.trials = parse_number<std::size_t>(value, "trials");
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value, "seed");
      } else if (key == "rho_grid") {
        cfg.rho_grid = parse_rho_grid(value);
      } else if (key == "methods") {
        cfg.methods = parse_method_list(value);
      } else if (key == "experiment") {
        const auto kind = experiment::parse_kind(value);
        if (!kind) throw Error(ErrorKind::kConfig, "unknown experiment '" + std::string(value) + "'");
        cfg.kind = *kind;
      } else {
        throw Error(ErrorKind::kConfig, "unknown key '" + std::string(key) + "'");
      }
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

experiment::ExperimentConfig load_config_file(const std::string& path, experiment::ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

}  // namespace querloc::config
