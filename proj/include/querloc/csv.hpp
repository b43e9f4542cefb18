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

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace querloc::csv {

/// Locale-independent, 17 significant digits (round-trips a double).
std::string format_double(double v);
/// Empty field for nullopt.
std::string format_optional(const std::optional<double>& v);

/// Writes one comma-separated record terminated by '\n'. Fields containing
/// commas, quotes or newlines are quoted.
void write_row(std::ostream& os, std::initializer_list<std::string_view> fields);

}  // namespace querloc::csv
