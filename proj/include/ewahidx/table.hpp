// Copyright 2026 The ewahidx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// -----------------------------------------------------------------------------
// File: table.hpp
// -----------------------------------------------------------------------------
//
// Delimited flat files: one row per line, a single-byte delimiter, no quoting.
// Lines starting with '#' before the first row are comments. Empty lines are
// skipped. Every row must have as many fields as the first one.
//
// Profiling reads a file once and builds, per column, a dictionary that maps
// each distinct value to a dense rank plus a histogram indexed by rank.
// Ranks follow byte order of the values, or numeric order for columns
// flagged as numeric.

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ewahidx {

using StringRows = std::vector<std::vector<std::string>>;

class TableReader {
 public:
  TableReader(const std::string& path, char delimiter);

  // Reads the next row into fields (views into an internal buffer, valid
  // until the next call). Returns false at end of file.
  bool next(std::vector<std::string_view>& fields);

  // Field count, known once the first row has been read (0 before).
  size_t columns() const { return columns_; }
  // 1-based line number of the row last returned.
  uint64_t line() const { return line_; }

 private:
  std::string path_;
  std::ifstream in_;
  char delimiter_;
  std::string buffer_;
  size_t columns_ = 0;
  uint64_t line_ = 0;
  bool in_header_ = true;
};

class TableWriter {
 public:
  TableWriter(const std::string& path, char delimiter);

  void comment(std::string_view text);
  void write_row(std::span<const std::string_view> fields);
  void write_row(std::span<const std::string> fields);
  // Flushes and reports write errors as IoError.
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  char delimiter_;
  std::string line_;
};

void write_table(const std::string& path, const StringRows& rows, char delimiter);
StringRows read_table(const std::string& path, char delimiter);

struct Dictionary {
  Dictionary() = default;
  Dictionary(const Dictionary& other) : values(other.values) { reindex(); }
  Dictionary& operator=(const Dictionary& other) {
    if (this != &other) {
      values = other.values;
      reindex();
    }
    return *this;
  }
  Dictionary(Dictionary&&) noexcept = default;
  Dictionary& operator=(Dictionary&&) noexcept = default;

  // values[r] is the value of rank r.
  std::vector<std::string> values;

  size_t size() const { return values.size(); }
  std::optional<uint32_t> rank(std::string_view value) const;
  // Rebuilds the lookup table after values changed.
  void reindex();
  // Entries in the lookup table; less than size() if values repeat.
  size_t distinct() const { return index_.size(); }

 private:
  std::unordered_map<std::string_view, uint32_t> index_;
};

struct ColumnProfile {
  Dictionary dict;
  // frequencies[r] is the number of rows holding the value of rank r.
  std::vector<uint64_t> frequencies;
  bool numeric = false;
  // Effective k and bitmap count; filled by configure().
  uint32_t k = 1;
  uint32_t N = 0;

  uint64_t cardinality() const { return dict.size(); }
  // Applies the k-limiting rule to requested and picks the minimal N.
  void configure(uint32_t requested_k);
  // Dense order by (frequency descending, rank ascending): result[r] is the
  // position of rank r in that order.
  std::vector<uint32_t> frequency_order() const;
};

struct TableProfile {
  uint64_t rows = 0;
  char delimiter = ',';
  std::vector<ColumnProfile> columns;

  size_t column_count() const { return columns.size(); }
  void configure(uint32_t requested_k);
};

struct ProfileOptions {
  char delimiter = ',';
  // Columns (0-based) whose ranks follow numeric order. Every value in them
  // must parse as a number.
  std::vector<uint32_t> numeric_columns;
};

TableProfile profile_table(const std::string& path, const ProfileOptions& options = {});
TableProfile profile_rows(const StringRows& rows, const ProfileOptions& options = {});

// Sidecar cache "<path>.profile": reused while the table's size and mtime are
// unchanged, rebuilt (and rewritten) otherwise.
std::string profile_path(const std::string& table_path);
void save_profile(const TableProfile& profile, const std::string& table_path);
std::optional<TableProfile> load_profile(const std::string& table_path);
TableProfile profile_cached(const std::string& path, const ProfileOptions& options = {});

// A table held as dictionary ranks, row-major.
struct EncodedTable {
  uint32_t columns = 0;
  uint64_t rows = 0;
  std::vector<uint32_t> ranks;

  std::span<const uint32_t> row(uint64_t r) const {
    return {ranks.data() + r * columns, columns};
  }
  uint32_t at(uint64_t r, uint32_t c) const { return ranks[r * columns + c]; }
};

// Throws DataError for values missing from the profile's dictionaries.
EncodedTable encode_table(const std::string& path, const TableProfile& profile);
EncodedTable encode_rows(const StringRows& rows, const TableProfile& profile);
StringRows decode_rows(const EncodedTable& table, const TableProfile& profile);
void write_encoded(const std::string& path, const EncodedTable& table,
                   const TableProfile& profile);

}  // namespace ewahidx
