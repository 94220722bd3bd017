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

#include "ewahidx/sort.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <queue>
#include <thread>

#include "ewahidx/codec.hpp"
#include "ewahidx/error.hpp"
#include "ewahidx/model.hpp"

namespace ewahidx {
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Plans and column orders

SortPlan SortPlan::parse(std::string_view text) {
  SortPlan p;
  if (text == "none") {
    p.ordering = Ordering::None;
  } else if (text == "lex") {
    p.ordering = Ordering::Lex;
  } else if (text == "gray-freq") {
    p.ordering = Ordering::GrayFrequency;
  } else if (text == "fc") {
    p.ordering = Ordering::FrequentComponent;
  } else if (text.starts_with("block:")) {
    p.ordering = Ordering::Block;
    const std::string_view b = text.substr(6);
    const auto [end, ec] = std::from_chars(b.data(), b.data() + b.size(), p.blocks);
    if (ec != std::errc() || end != b.data() + b.size() || p.blocks == 0) {
      throw InvalidArgument("block count must be a positive integer in '" + std::string(text) + "'");
    }
  } else {
    throw InvalidArgument("unknown sort '" + std::string(text) +
                          "' (expected none, lex, block:<B>, gray-freq or fc)");
  }
  return p;
}

std::string SortPlan::name() const {
  switch (ordering) {
    case Ordering::None: return "none";
    case Ordering::Lex: return "lex";
    case Ordering::Block: return "block:" + std::to_string(blocks);
    case Ordering::GrayFrequency: return "gray-freq";
    case Ordering::FrequentComponent: return "fc";
  }
  return "unknown";
}

std::vector<uint32_t> parse_column_order(std::string_view text, size_t columns) {
  std::vector<uint32_t> order;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view part = text.substr(start, comma - start);
    uint32_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || end != part.data() + part.size() || v < 1 || v > columns) {
      throw InvalidArgument("bad column '" + std::string(part) + "' in column order '" +
                            std::string(text) + "'");
    }
    order.push_back(v - 1);
    start = comma + 1;
  }
  std::vector<uint32_t> check = order;
  std::sort(check.begin(), check.end());
  if (check.size() != columns || std::adjacent_find(check.begin(), check.end()) != check.end()) {
    throw InvalidArgument("column order '" + std::string(text) + "' is not a permutation of 1.." +
                          std::to_string(columns));
  }
  return order;
}

std::string format_column_order(std::span<const uint32_t> order) {
  std::string s;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0) s.push_back(',');
    s += std::to_string(order[i] + 1);
  }
  return s;
}

std::vector<uint32_t> suggest_column_order(const TableProfile& profile, uint32_t k, unsigned w) {
  const size_t c = profile.columns.size();
  std::vector<double> score(c);
  for (size_t i = 0; i < c; ++i) {
    const uint64_t n_i = std::max<uint64_t>(1, profile.columns[i].cardinality());
    score[i] = model::column_score(static_cast<double>(n_i), effective_k(k, n_i), w);
  }
  std::vector<uint32_t> order(c);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](uint32_t a, uint32_t b) { return score[a] > score[b]; });
  return order;
}

// ---------------------------------------------------------------------------
// Keys

SortKey::SortKey(const SortPlan& plan, const TableProfile& profile)
    : plan_(plan), profile_(&profile), rows_(profile.rows) {
  const size_t c = profile.columns.size();
  order_ = plan.column_order;
  if (order_.empty()) {
    order_.resize(c);
    std::iota(order_.begin(), order_.end(), 0u);
  }
  if (order_.size() != c) throw InvalidArgument("column order does not match the table");
  if (profile.rows > UINT32_MAX) throw InvalidArgument("tables are limited to 2^32-1 rows");
  switch (plan.ordering) {
    case Ordering::None: width_ = 0; break;
    case Ordering::Lex: width_ = c; break;
    case Ordering::Block: width_ = c + 1; break;
    case Ordering::GrayFrequency:
      width_ = c;
      freq_position_.reserve(c);
      for (const auto& col : profile.columns) freq_position_.push_back(col.frequency_order());
      break;
    case Ordering::FrequentComponent: width_ = 3 * c; break;
  }
}

void SortKey::make(uint64_t row_index, std::span<const uint32_t> ranks, uint32_t* key) const {
  switch (plan_.ordering) {
    case Ordering::None:
      return;
    case Ordering::Block: {
      // Block b holds rows [floor(b n / B), floor((b + 1) n / B)).
      const unsigned __int128 rows = std::max<uint64_t>(rows_, 1);
      const unsigned __int128 scaled = static_cast<unsigned __int128>(row_index + 1) * plan_.blocks;
      *key++ = static_cast<uint32_t>((scaled + rows - 1) / rows - 1);
      [[fallthrough]];
    }
    case Ordering::Lex:
      for (uint32_t c : order_) *key++ = ranks[c];
      return;
    case Ordering::GrayFrequency:
      for (uint32_t c : order_) *key++ = freq_position_[c][ranks[c]];
      return;
    case Ordering::FrequentComponent: {
      struct Component {
        uint32_t freq, column, rank;
      };
      const size_t c = ranks.size();
      Component stack[16];
      std::vector<Component> heap;
      Component* comp = stack;
      if (c > 16) {
        heap.resize(c);
        comp = heap.data();
      }
      for (uint32_t i = 0; i < c; ++i) {
        comp[i] = {static_cast<uint32_t>(profile_->columns[i].frequencies[ranks[i]]), i, ranks[i]};
      }
      std::sort(comp, comp + c, [](const Component& a, const Component& b) {
        if (a.freq != b.freq) return a.freq < b.freq;
        if (a.column != b.column) return a.column < b.column;
        return a.rank < b.rank;
      });
      for (size_t i = 0; i < c; ++i) {
        *key++ = comp[i].freq;
        *key++ = comp[i].column;
        *key++ = comp[i].rank;
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// In-memory sorting

namespace {

// Stable order of n fixed-width keys laid out contiguously.
std::vector<uint64_t> order_keys(const std::vector<uint32_t>& keys, size_t width, uint64_t n) {
  std::vector<uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), uint64_t{0});
  if (width == 0) return idx;
  std::stable_sort(idx.begin(), idx.end(), [&](uint64_t a, uint64_t b) {
    const uint32_t* x = keys.data() + a * width;
    const uint32_t* y = keys.data() + b * width;
    return std::lexicographical_compare(x, x + width, y, y + width);
  });
  return idx;
}

}  // namespace

std::vector<uint64_t> sort_permutation(const EncodedTable& table, const TableProfile& profile,
                                       const SortPlan& plan) {
  const SortKey key(plan, profile);
  std::vector<uint32_t> keys(table.rows * key.width());
  for (uint64_t r = 0; r < table.rows; ++r) key.make(r, table.row(r), keys.data() + r * key.width());
  return order_keys(keys, key.width(), table.rows);
}

EncodedTable permute_rows(const EncodedTable& table, std::span<const uint64_t> permutation) {
  EncodedTable out;
  out.columns = table.columns;
  out.rows = table.rows;
  out.ranks.reserve(table.ranks.size());
  for (uint64_t r : permutation) {
    const auto row = table.row(r);
    out.ranks.insert(out.ranks.end(), row.begin(), row.end());
  }
  return out;
}

EncodedTable sort_encoded(const EncodedTable& table, const TableProfile& profile,
                          const SortPlan& plan) {
  return permute_rows(table, sort_permutation(table, profile, plan));
}

// ---------------------------------------------------------------------------
// External sorting
//
// Records are (key, ranks) as raw uint32 arrays. Phase one cuts the input
// into chunks, sorts each stably and spills it as a run file. Phase two merges
// runs with a heap keyed on (record key, run index); since runs hold
// consecutive input ranges in order, ties resolve to input order.

namespace {

constexpr size_t kMergeFanIn = 128;
constexpr size_t kReadBatch = 4096;

class RunWriter {
 public:
  explicit RunWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot create run file '" + path + "'");
  }
  void write(const uint32_t* rec, size_t width) {
    out_.write(reinterpret_cast<const char*>(rec), static_cast<std::streamsize>(width * 4));
  }
  void close() {
    out_.flush();
    if (!out_) throw IoError("write error on run file '" + path_ + "' (disk full?)");
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class RunReader {
 public:
  RunReader(const std::string& path, size_t width)
      : in_(path, std::ios::binary), width_(width), path_(path) {
    if (!in_) throw IoError("cannot open run file '" + path + "'");
    refill();
  }
  bool done() const { return pos_ >= count_; }
  const uint32_t* current() const { return buf_.data() + pos_ * width_; }
  void advance() {
    if (++pos_ >= count_) refill();
  }

 private:
  void refill() {
    buf_.resize(kReadBatch * width_);
    in_.read(reinterpret_cast<char*>(buf_.data()),
             static_cast<std::streamsize>(buf_.size() * 4));
    const auto got = static_cast<size_t>(in_.gcount());
    if (in_.bad() || got % (width_ * 4) != 0) throw IoError("corrupt run file '" + path_ + "'");
    count_ = got / (width_ * 4);
    pos_ = 0;
  }

  std::ifstream in_;
  size_t width_;
  std::string path_;
  std::vector<uint32_t> buf_;
  size_t count_ = 0;
  size_t pos_ = 0;
};

// Merges runs (in order) and hands each record to sink.
template <typename Sink>
void merge_runs(const std::vector<std::string>& runs, size_t width, size_t key_width, Sink&& sink) {
  std::vector<std::unique_ptr<RunReader>> readers;
  readers.reserve(runs.size());
  for (const auto& r : runs) readers.push_back(std::make_unique<RunReader>(r, width));
  auto greater = [&](size_t a, size_t b) {
    const uint32_t* x = readers[a]->current();
    const uint32_t* y = readers[b]->current();
    for (size_t i = 0; i < key_width; ++i) {
      if (x[i] != y[i]) return x[i] > y[i];
    }
    return a > b;
  };
  std::priority_queue<size_t, std::vector<size_t>, decltype(greater)> heap(greater);
  for (size_t i = 0; i < readers.size(); ++i) {
    if (!readers[i]->done()) heap.push(i);
  }
  while (!heap.empty()) {
    const size_t i = heap.top();
    heap.pop();
    sink(readers[i]->current());
    readers[i]->advance();
    if (!readers[i]->done()) heap.push(i);
  }
}

struct Chunk {
  uint64_t first_row = 0;
  std::vector<uint32_t> records;  // width uint32 per row
  std::vector<uint64_t> order;
};

}  // namespace

SortReport sort_table_file(const std::string& in_path, const std::string& out_path,
                           const TableProfile& profile, const SortPlan& plan,
                           const SortOptions& options) {
  const SortKey key(plan, profile);
  const size_t c = profile.columns.size();
  const size_t key_width = key.width();
  const size_t width = key_width + c;
  const unsigned threads = std::max(1u, options.threads);

  uint64_t chunk_rows = options.memory_rows;
  if (chunk_rows == 0) {
    // Records, the order vector and stream buffers; keep a 2x margin.
    chunk_rows = options.memory_bytes / (2 * (width * 4 + 8));
  }
  chunk_rows = std::max<uint64_t>(1, chunk_rows / threads);

  fs::path temp = options.temp_dir.empty() ? fs::absolute(out_path).parent_path()
                                           : fs::path(options.temp_dir);
  const std::string stem = (temp / fs::path(out_path).filename()).string() + ".run";

  SortReport report;
  std::vector<std::string> runs;
  std::vector<std::string> all_run_files;
  auto new_run_name = [&]() {
    std::string name = stem + std::to_string(all_run_files.size());
    all_run_files.push_back(name);
    return name;
  };
  auto cleanup = [&]() {
    std::error_code ec;
    for (const auto& f : all_run_files) fs::remove(f, ec);
  };

  TableWriter writer(out_path, profile.delimiter);
  std::vector<std::string_view> out_fields(c);
  auto emit = [&](const uint32_t* ranks) {
    for (size_t i = 0; i < c; ++i) out_fields[i] = profile.columns[i].dict.values[ranks[i]];
    writer.write_row(std::span<const std::string_view>(out_fields));
  };

  try {
    TableReader reader(in_path, profile.delimiter);
    std::vector<std::string_view> fields;
    uint64_t row = 0;
    bool eof = false;
    std::vector<Chunk> batch;
    bool single_chunk = false;
    std::vector<Chunk> kept;
    while (!eof) {
      batch.clear();
      for (unsigned t = 0; t < threads && !eof; ++t) {
        Chunk chunk;
        chunk.first_row = row;
        chunk.records.reserve(std::min<uint64_t>(chunk_rows, profile.rows) * width);
        uint64_t n = 0;
        while (n < chunk_rows) {
          if (!reader.next(fields)) {
            eof = true;
            break;
          }
          if (fields.size() != c) throw DataError("row width does not match the profile");
          const size_t at = chunk.records.size();
          chunk.records.resize(at + width);
          uint32_t* rec = chunk.records.data() + at;
          for (size_t i = 0; i < c; ++i) {
            const auto r = profile.columns[i].dict.rank(fields[i]);
            if (!r) {
              throw DataError(in_path + ":" + std::to_string(reader.line()) + ": value '" +
                              std::string(fields[i]) + "' missing from the profile");
            }
            rec[key_width + i] = *r;
          }
          key.make(row, std::span<const uint32_t>(rec + key_width, c), rec);
          ++row;
          ++n;
        }
        if (n > 0) batch.push_back(std::move(chunk));
      }
      auto sort_chunk = [&](Chunk& ch) {
        const uint64_t n = ch.records.size() / width;
        ch.order.resize(n);
        std::iota(ch.order.begin(), ch.order.end(), uint64_t{0});
        if (key_width == 0) return;
        std::stable_sort(ch.order.begin(), ch.order.end(), [&](uint64_t a, uint64_t b) {
          const uint32_t* x = ch.records.data() + a * width;
          const uint32_t* y = ch.records.data() + b * width;
          return std::lexicographical_compare(x, x + key_width, y, y + key_width);
        });
      };
      if (batch.size() > 1) {
        std::vector<std::thread> pool;
        for (size_t i = 1; i < batch.size(); ++i) pool.emplace_back(sort_chunk, std::ref(batch[i]));
        sort_chunk(batch[0]);
        for (auto& t : pool) t.join();
      } else if (batch.size() == 1) {
        sort_chunk(batch[0]);
      }
      if (eof && runs.empty() && batch.size() == 1) {
        single_chunk = true;
        kept = std::move(batch);
        break;
      }
      for (auto& ch : batch) {
        RunWriter w(new_run_name());
        for (uint64_t i : ch.order) w.write(ch.records.data() + i * width, width);
        w.close();
        runs.push_back(all_run_files.back());
      }
    }
    report.rows = row;
    if (single_chunk) {
      const Chunk& ch = kept.front();
      for (uint64_t i : ch.order) emit(ch.records.data() + i * width + key_width);
      report.runs = 1;
    } else {
      report.runs = runs.size();
      while (runs.size() > kMergeFanIn) {
        std::vector<std::string> next;
        for (size_t g = 0; g < runs.size(); g += kMergeFanIn) {
          const std::vector<std::string> group(runs.begin() + static_cast<ptrdiff_t>(g),
                                               runs.begin() + static_cast<ptrdiff_t>(std::min(runs.size(), g + kMergeFanIn)));
          RunWriter w(new_run_name());
          merge_runs(group, width, key_width, [&](const uint32_t* rec) { w.write(rec, width); });
          w.close();
          next.push_back(all_run_files.back());
          std::error_code ec;
          for (const auto& f : group) fs::remove(f, ec);
        }
        runs = std::move(next);
        ++report.merge_passes;
      }
      if (!runs.empty()) {
        merge_runs(runs, width, key_width, [&](const uint32_t* rec) { emit(rec + key_width); });
        ++report.merge_passes;
      }
    }
    writer.close();
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  return report;
}

}  // namespace ewahidx
