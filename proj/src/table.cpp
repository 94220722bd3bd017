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

#include "ewahidx/table.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <numeric>

#include "bytes.hpp"
#include "ewahidx/codec.hpp"
#include "ewahidx/error.hpp"

namespace ewahidx {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kProfileMagic = "EWAHPROF";
constexpr uint32_t kProfileVersion = 1;

void split(std::string_view line, char delimiter, std::vector<std::string_view>& out) {
  out.clear();
  size_t start = 0;
  for (;;) {
    const size_t at = line.find(delimiter, start);
    if (at == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, at - start));
    start = at + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Counts values per column, then freezes the counts into sorted dictionaries.
class Profiler {
 public:
  explicit Profiler(const ProfileOptions& options) : options_(options) {}

  void add(std::span<const std::string_view> fields) {
    if (counts_.empty()) counts_.resize(fields.size());
    for (size_t c = 0; c < fields.size(); ++c) {
      auto& m = counts_[c];
      auto it = m.find(fields[c]);
      if (it == m.end()) {
        m.emplace(std::string(fields[c]), 1);
      } else {
        ++it->second;
      }
    }
    ++rows_;
  }

  TableProfile finish() {
    TableProfile p;
    p.rows = rows_;
    p.delimiter = options_.delimiter;
    p.columns.resize(counts_.size());
    for (uint32_t c : options_.numeric_columns) {
      if (c >= counts_.size() && !counts_.empty()) {
        throw InvalidArgument("numeric column " + std::to_string(c) + " does not exist");
      }
    }
    for (size_t c = 0; c < counts_.size(); ++c) {
      ColumnProfile& col = p.columns[c];
      col.numeric = std::find(options_.numeric_columns.begin(),
                              options_.numeric_columns.end(), c) !=
                    options_.numeric_columns.end();
      std::vector<std::pair<std::string, uint64_t>> entries(counts_[c].begin(),
                                                            counts_[c].end());
      if (col.numeric) {
        std::vector<double> keys(entries.size());
        for (size_t i = 0; i < entries.size(); ++i) {
          const auto v = parse_number(entries[i].first);
          if (!v) {
            throw DataError("column " + std::to_string(c) + " is numeric but holds '" +
                            entries[i].first + "'");
          }
          keys[i] = *v;
        }
        std::vector<size_t> order(entries.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
          if (keys[x] != keys[y]) return keys[x] < keys[y];
          return entries[x].first < entries[y].first;
        });
        std::vector<std::pair<std::string, uint64_t>> sorted;
        sorted.reserve(entries.size());
        for (size_t i : order) sorted.push_back(std::move(entries[i]));
        entries = std::move(sorted);
      } else {
        std::sort(entries.begin(), entries.end());
      }
      col.dict.values.reserve(entries.size());
      col.frequencies.reserve(entries.size());
      for (auto& [value, count] : entries) {
        col.dict.values.push_back(std::move(value));
        col.frequencies.push_back(count);
      }
      col.dict.reindex();
    }
    return p;
  }

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const { return std::hash<std::string_view>()(s); }
  };

  ProfileOptions options_;
  std::vector<std::unordered_map<std::string, uint64_t, Hash, std::equal_to<>>> counts_;
  uint64_t rows_ = 0;
};

struct FileStamp {
  uint64_t size = 0;
  int64_t mtime = 0;
};

FileStamp stamp(const std::string& path) {
  std::error_code ec;
  FileStamp s;
  s.size = fs::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path + "': " + ec.message());
  const auto t = fs::last_write_time(path, ec);
  if (ec) throw IoError("cannot stat '" + path + "': " + ec.message());
  s.mtime = std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reading and writing

TableReader::TableReader(const std::string& path, char delimiter)
    : path_(path), in_(path, std::ios::binary), delimiter_(delimiter) {
  if (!in_) throw IoError("cannot open '" + path + "' for reading");
}

bool TableReader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
    if (buffer_.empty()) continue;
    if (in_header_ && buffer_.front() == '#') continue;
    in_header_ = false;
    split(buffer_, delimiter_, fields);
    if (columns_ == 0) {
      columns_ = fields.size();
    } else if (fields.size() != columns_) {
      throw DataError(path_ + ":" + std::to_string(line_) + ": expected " +
                      std::to_string(columns_) + " fields, found " +
                      std::to_string(fields.size()));
    }
    return true;
  }
  if (in_.bad()) throw IoError("read error on '" + path_ + "'");
  return false;
}

TableWriter::TableWriter(const std::string& path, char delimiter)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), delimiter_(delimiter) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
}

void TableWriter::comment(std::string_view text) {
  out_ << '#' << text << '\n';
}

void TableWriter::write_row(std::span<const std::string_view> fields) {
  line_.clear();
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line_.push_back(delimiter_);
    line_.append(fields[i]);
  }
  line_.push_back('\n');
  out_.write(line_.data(), static_cast<std::streamsize>(line_.size()));
}

void TableWriter::write_row(std::span<const std::string> fields) {
  std::vector<std::string_view> views(fields.begin(), fields.end());
  write_row(std::span<const std::string_view>(views));
}

void TableWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write error on '" + path_ + "'");
  out_.close();
}

void write_table(const std::string& path, const StringRows& rows, char delimiter) {
  TableWriter w(path, delimiter);
  for (const auto& row : rows) w.write_row(std::span<const std::string>(row));
  w.close();
}

StringRows read_table(const std::string& path, char delimiter) {
  TableReader r(path, delimiter);
  StringRows rows;
  std::vector<std::string_view> fields;
  while (r.next(fields)) rows.emplace_back(fields.begin(), fields.end());
  return rows;
}

// ---------------------------------------------------------------------------
// Profiles

std::optional<uint32_t> Dictionary::rank(std::string_view value) const {
  const auto it = index_.find(value);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Dictionary::reindex() {
  index_.clear();
  index_.reserve(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    index_.emplace(values[i], static_cast<uint32_t>(i));
  }
}

void ColumnProfile::configure(uint32_t requested_k) {
  if (cardinality() == 0) {
    k = 1;
    N = 0;
    return;
  }
  k = effective_k(requested_k, cardinality());
  N = min_N(k, cardinality());
}

std::vector<uint32_t> ColumnProfile::frequency_order() const {
  std::vector<uint32_t> by_freq(frequencies.size());
  std::iota(by_freq.begin(), by_freq.end(), 0u);
  std::stable_sort(by_freq.begin(), by_freq.end(), [&](uint32_t x, uint32_t y) {
    return frequencies[x] > frequencies[y];
  });
  std::vector<uint32_t> position(frequencies.size());
  for (uint32_t i = 0; i < by_freq.size(); ++i) position[by_freq[i]] = i;
  return position;
}

void TableProfile::configure(uint32_t requested_k) {
  for (auto& c : columns) c.configure(requested_k);
}

TableProfile profile_table(const std::string& path, const ProfileOptions& options) {
  TableReader r(path, options.delimiter);
  Profiler p(options);
  std::vector<std::string_view> fields;
  while (r.next(fields)) p.add(fields);
  return p.finish();
}

TableProfile profile_rows(const StringRows& rows, const ProfileOptions& options) {
  Profiler p(options);
  std::vector<std::string_view> fields;
  for (const auto& row : rows) {
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("ragged row in table");
    }
    fields.assign(row.begin(), row.end());
    p.add(fields);
  }
  return p.finish();
}

std::string profile_path(const std::string& table_path) { return table_path + ".profile"; }

void save_profile(const TableProfile& profile, const std::string& table_path) {
  const FileStamp s = stamp(table_path);
  detail::ByteWriter w;
  w.raw(kProfileMagic);
  w.u32(kProfileVersion);
  w.u8(static_cast<uint8_t>(profile.delimiter));
  w.u64(s.size);
  w.i64(s.mtime);
  w.u64(profile.rows);
  w.u32(static_cast<uint32_t>(profile.columns.size()));
  for (const auto& c : profile.columns) {
    w.u8(c.numeric ? 1 : 0);
    w.u32(static_cast<uint32_t>(c.dict.size()));
    for (size_t r = 0; r < c.dict.size(); ++r) {
      w.u32(static_cast<uint32_t>(c.dict.values[r].size()));
      w.raw(c.dict.values[r]);
      w.u64(c.frequencies[r]);
    }
  }
  w.u32(detail::crc32_of(w.bytes()));
  const std::string path = profile_path(table_path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.size()));
  if (!out) throw IoError("cannot write '" + path + "'");
}

std::optional<TableProfile> load_profile(const std::string& table_path) {
  const std::string path = profile_path(table_path);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kProfileMagic.size() + 4) throw DataError(path + ": truncated");
  const size_t body = bytes.size() - 4;
  detail::ByteReader tail(std::span<const uint8_t>(bytes).subspan(body), path);
  if (tail.u32() != detail::crc32_of(std::span<const uint8_t>(bytes).first(body))) {
    throw DataError(path + ": checksum mismatch");
  }
  detail::ByteReader r(std::span<const uint8_t>(bytes).first(body), path);
  if (r.raw(kProfileMagic.size()) != kProfileMagic) throw DataError(path + ": bad magic");
  if (r.u32() != kProfileVersion) throw DataError(path + ": unsupported version");
  TableProfile p;
  p.delimiter = static_cast<char>(r.u8());
  const uint64_t size = r.u64();
  const int64_t mtime = r.i64();
  const FileStamp s = stamp(table_path);
  if (s.size != size || s.mtime != mtime) return std::nullopt;
  p.rows = r.u64();
  p.columns.resize(r.u32());
  for (auto& c : p.columns) {
    c.numeric = r.u8() != 0;
    const uint32_t n = r.u32();
    c.dict.values.resize(n);
    c.frequencies.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
      c.dict.values[i] = std::string(r.raw(r.u32()));
      c.frequencies[i] = r.u64();
    }
    c.dict.reindex();
  }
  return p;
}

TableProfile profile_cached(const std::string& path, const ProfileOptions& options) {
  if (auto cached = load_profile(path)) {
    std::vector<uint32_t> numeric;
    for (uint32_t c = 0; c < cached->columns.size(); ++c) {
      if (cached->columns[c].numeric) numeric.push_back(c);
    }
    if (cached->delimiter == options.delimiter && numeric == options.numeric_columns) {
      return *cached;
    }
  }
  TableProfile p = profile_table(path, options);
  save_profile(p, path);
  return p;
}

// ---------------------------------------------------------------------------
// Rank encoding

namespace {

void encode_fields(std::span<const std::string_view> fields, const TableProfile& profile,
                   std::vector<uint32_t>& out, uint64_t row) {
  if (fields.size() != profile.columns.size()) {
    throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                    " fields; the profile has " + std::to_string(profile.columns.size()));
  }
  for (size_t c = 0; c < fields.size(); ++c) {
    const auto r = profile.columns[c].dict.rank(fields[c]);
    if (!r) {
      throw DataError("row " + std::to_string(row) + ": value '" + std::string(fields[c]) +
                      "' is not in the dictionary of column " + std::to_string(c));
    }
    out.push_back(*r);
  }
}

}  // namespace

EncodedTable encode_table(const std::string& path, const TableProfile& profile) {
  EncodedTable t;
  t.columns = static_cast<uint32_t>(profile.columns.size());
  t.ranks.reserve(profile.rows * t.columns);
  TableReader r(path, profile.delimiter);
  std::vector<std::string_view> fields;
  while (r.next(fields)) {
    encode_fields(fields, profile, t.ranks, t.rows);
    ++t.rows;
  }
  return t;
}

EncodedTable encode_rows(const StringRows& rows, const TableProfile& profile) {
  EncodedTable t;
  t.columns = static_cast<uint32_t>(profile.columns.size());
  t.ranks.reserve(rows.size() * t.columns);
  std::vector<std::string_view> fields;
  for (const auto& row : rows) {
    fields.assign(row.begin(), row.end());
    encode_fields(fields, profile, t.ranks, t.rows);
    ++t.rows;
  }
  return t;
}

StringRows decode_rows(const EncodedTable& table, const TableProfile& profile) {
  StringRows rows(table.rows);
  for (uint64_t r = 0; r < table.rows; ++r) {
    rows[r].reserve(table.columns);
    for (uint32_t c = 0; c < table.columns; ++c) {
      rows[r].push_back(profile.columns[c].dict.values[table.at(r, c)]);
    }
  }
  return rows;
}

void write_encoded(const std::string& path, const EncodedTable& table,
                   const TableProfile& profile) {
  TableWriter w(path, profile.delimiter);
  std::vector<std::string_view> fields(table.columns);
  for (uint64_t r = 0; r < table.rows; ++r) {
    for (uint32_t c = 0; c < table.columns; ++c) {
      fields[c] = profile.columns[c].dict.values[table.at(r, c)];
    }
    w.write_row(std::span<const std::string_view>(fields));
  }
  w.close();
}

}  // namespace ewahidx
