// Copyright 2026 The TheftSentry Authors
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

// Minimal delimited-text helpers shared by the file readers. No quoting
// support beyond stripping one pair of surrounding double quotes.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace theftsentry::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source text
  std::vector<std::string_view> fields;
};

/// Splits text into non-blank rows. Views point into `text`.
std::vector<Row> split(std::string_view text, char delimiter = ',');

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::optional<double> to_double(std::string_view field) noexcept;
std::optional<long> to_long(std::string_view field) noexcept;

/// Throws a parse error mentioning `line` and `what` when the field is not a
/// number.
double parse_double(std::string_view field, std::size_t line, std::string_view what);
long parse_long(std::string_view field, std::size_t line, std::string_view what);

}  // namespace theftsentry::csv
