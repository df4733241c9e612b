/*
 * Copyright 2026 The Uplift Policy Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "uplift/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uplift/error.h"

namespace uplift {

int CsvTable::ColumnIndex(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

// Splits one logical record starting at `pos`; advances `pos` past it.
std::vector<std::string> NextRecord(std::string_view text, size_t& pos) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cell.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
      ++pos;
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      cells.push_back(std::move(cell));
      return cells;
    } else {
      cell.push_back(c);
    }
    ++pos;
  }
  if (quoted) throw ParseError("unterminated quoted CSV field");
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

CsvTable ParseCsv(std::string_view text) {
  CsvTable table;
  size_t pos = 0;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  bool have_header = false;
  size_t line = 1;
  while (pos < text.size()) {
    auto record = NextRecord(text, pos);
    ++line;
    if (record.size() == 1 && record[0].empty()) continue;  // blank line
    if (!have_header) {
      table.header = std::move(record);
      have_header = true;
      continue;
    }
    if (record.size() != table.header.size()) {
      throw ParseError("CSV row " + std::to_string(table.rows.size() + 1) +
                       " has " + std::to_string(record.size()) +
                       " fields, header has " +
                       std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(record));
  }
  if (!have_header) throw ParseError("CSV input is empty");
  return table;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open CSV file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str());
}

std::string FormatCsvRow(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out.push_back(',');
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n\r") != std::string::npos) {
      out.push_back('"');
      for (char ch : c) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
      }
      out.push_back('"');
    } else {
      out += c;
    }
  }
  return out;
}

std::string CsvLine(const std::vector<std::string>& cells) {
  return FormatCsvRow(cells) + '\n';
}

void WriteCsv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << FormatCsvRow(table.header) << '\n';
  for (const auto& row : table.rows) out << FormatCsvRow(row) << '\n';
}

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "NA";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> ParseFiniteDouble(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace uplift
