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

#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace theftsentry::csv {
namespace {

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::vector<Row> split(std::string_view text, char delimiter) {
  // UTF-8 byte order mark
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Row> rows;
  std::size_t line = 0;
  while (!text.empty()) {
    ++line;
    const std::size_t eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    if (trim(raw).empty()) continue;
    Row row;
    row.line = line;
    std::size_t start = 0;
    for (;;) {
      const std::size_t cut = raw.find(delimiter, start);
      row.fields.push_back(trim(raw.substr(start, cut - start)));
      if (cut == std::string_view::npos) break;
      start = cut + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::io, "failed writing '" + path.string() + "'");
}

std::optional<double> to_double(std::string_view field) noexcept {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::optional<long> to_long(std::string_view field) noexcept {
  if (field.empty()) return std::nullopt;
  long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

double parse_double(std::string_view field, std::size_t line, std::string_view what) {
  if (auto v = to_double(field)) return *v;
  fail(ErrorKind::parse, "line " + std::to_string(line) + ": " + std::string(what) +
                             " '" + std::string(field) + "' is not a number");
}

long parse_long(std::string_view field, std::size_t line, std::string_view what) {
  if (auto v = to_long(field)) return *v;
  fail(ErrorKind::parse, "line " + std::to_string(line) + ": " + std::string(what) +
                             " '" + std::string(field) + "' is not an integer");
}

}  // namespace theftsentry::csv
