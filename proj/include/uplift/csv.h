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

#ifndef UPLIFT_CSV_H_
#define UPLIFT_CSV_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uplift {

// RFC 4180-style table: header plus rows of raw string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // -1 when absent.
  int ColumnIndex(std::string_view name) const;
};

CsvTable ReadCsv(const std::filesystem::path& path);
CsvTable ParseCsv(std::string_view text);

std::string FormatCsvRow(const std::vector<std::string>& cells);
// FormatCsvRow followed by a newline.
std::string CsvLine(const std::vector<std::string>& cells);
void WriteCsv(const std::filesystem::path& path, const CsvTable& table);

// Shortest representation that round-trips through ParseDouble.
std::string FormatDouble(double value);

// Parses a finite decimal number; nullopt for anything else (including
// "nan" and "inf").
std::optional<double> ParseFiniteDouble(std::string_view text);

}  // namespace uplift

#endif  // UPLIFT_CSV_H_
