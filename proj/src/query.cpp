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

#include "ewahidx/query.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <numeric>

#include "ewahidx/error.hpp"

namespace ewahidx {
namespace {

enum class Kind : uint8_t { Zero, One, Dirty };

// One input seen as a sequence of word segments: a clean run, a single
// verbatim word, or the zero extension past the input's end.
class SegmentCursor {
 public:
  SegmentCursor(const CompressedBitmap& b, uint64_t total) : c_(b), total_(total) { load(); }

  uint64_t start() const { return start_; }
  uint64_t end() const { return end_; }
  Kind kind() const { return kind_; }
  uint64_t word() const { return word_; }

  void advance() {
    if (!c_.done()) {
      if (kind_ == Kind::Dirty) {
        c_.skip_dirty(1);
      } else {
        c_.skip_clean(end_ - start_ + 1);
      }
    }
    start_ = end_ + 1;
    load();
  }

 private:
  void load() {
    if (start_ >= total_) {
      end_ = UINT64_MAX;
      kind_ = Kind::Zero;
    } else if (c_.done()) {
      end_ = total_ - 1;
      kind_ = Kind::Zero;
    } else if (c_.clean_left() > 0) {
      end_ = start_ + c_.clean_left() - 1;
      kind_ = c_.fill() ? Kind::One : Kind::Zero;
    } else {
      end_ = start_;
      kind_ = Kind::Dirty;
      word_ = c_.dirty()[0];
    }
  }

  WordCursor c_;
  uint64_t total_;
  uint64_t start_ = 0;
  uint64_t end_ = 0;
  Kind kind_ = Kind::Zero;
  uint64_t word_ = 0;
};

struct Shape {
  WordParams params;
  uint64_t bit_length = 0;
  uint64_t words = 0;
};

Shape shape_of(std::span<const CompressedBitmap> inputs) {
  if (inputs.empty()) throw InvalidArgument("aggregation needs at least one bitmap");
  Shape s;
  s.params = inputs[0].params();
  for (const auto& b : inputs) {
    if (b.params() != s.params) throw InvalidArgument("bitmaps have different word sizes");
    s.bit_length = std::max(s.bit_length, b.bit_length());
  }
  s.words = (s.bit_length + s.params.bits() - 1) / s.params.bits();
  return s;
}

BitOp bit_op(AggOp op) {
  switch (op) {
    case AggOp::And: return BitOp::And;
    case AggOp::Or: return BitOp::Or;
    case AggOp::Xor: return BitOp::Xor;
  }
  return BitOp::And;
}

bool clean_value(AggOp op, uint64_t ones, uint64_t inputs) {
  switch (op) {
    case AggOp::And: return ones == inputs;
    case AggOp::Or: return ones > 0;
    case AggOp::Xor: return (ones & 1) != 0;
  }
  return false;
}

// Word value of a step with verbatim inputs, given how many inputs sit in
// clean runs of each kind.
class WordFold {
 public:
  WordFold(AggOp op, uint64_t full, uint64_t zeros, uint64_t ones) : op_(op) {
    switch (op) {
      case AggOp::And: acc_ = zeros > 0 ? 0 : full; break;
      case AggOp::Or: acc_ = ones > 0 ? full : 0; break;
      case AggOp::Xor: acc_ = (ones & 1) ? full : 0; break;
    }
  }
  void add(uint64_t word) { acc_ = apply(bit_op(op_), acc_, word); }
  uint64_t value() const { return acc_; }

 private:
  AggOp op_;
  uint64_t acc_ = 0;
};

CompressedBitmap zeros(const Shape& s) {
  CompressedBitmap out(s.params);
  out.add_clean_words(false, s.words);
  out.finish(s.bit_length);
  return out;
}

// Binary heap over input ids keyed by uint64, with each id's slot recorded
// so a key can change in O(log L).
template <typename Before>
class IndexedHeap {
 public:
  explicit IndexedHeap(size_t ids) : slot_(ids, kNone) {}

  bool empty() const { return heap_.empty(); }
  uint32_t top() const { return heap_[0].id; }
  uint64_t top_key() const { return heap_[0].key; }

  void push(uint32_t id, uint64_t key) {
    heap_.push_back({key, id});
    slot_[id] = heap_.size() - 1;
    up(heap_.size() - 1);
  }
  void pop() {
    slot_[heap_[0].id] = kNone;
    if (heap_.size() > 1) {
      heap_[0] = heap_.back();
      slot_[heap_[0].id] = 0;
    }
    heap_.pop_back();
    if (!heap_.empty()) down(0);
  }
  void update(uint32_t id, uint64_t key) {
    const size_t i = slot_[id];
    heap_[i].key = key;
    up(i);
    down(slot_[id]);
  }

 private:
  struct Entry {
    uint64_t key;
    uint32_t id;
  };
  static constexpr size_t kNone = static_cast<size_t>(-1);

  bool before(const Entry& a, const Entry& b) const { return Before{}(a.key, b.key); }
  void swap_at(size_t a, size_t b) {
    std::swap(heap_[a], heap_[b]);
    slot_[heap_[a].id] = a;
    slot_[heap_[b].id] = b;
  }
  void up(size_t i) {
    while (i > 0) {
      const size_t parent = (i - 1) / 2;
      if (!before(heap_[i], heap_[parent])) break;
      swap_at(i, parent);
      i = parent;
    }
  }
  void down(size_t i) {
    for (;;) {
      const size_t l = 2 * i + 1;
      const size_t r = l + 1;
      size_t best = i;
      if (l < heap_.size() && before(heap_[l], heap_[best])) best = l;
      if (r < heap_.size() && before(heap_[r], heap_[best])) best = r;
      if (best == i) return;
      swap_at(i, best);
      i = best;
    }
  }

  std::vector<Entry> heap_;
  std::vector<size_t> slot_;
};

bool parse_column(std::string_view text, uint32_t& out) {
  if (text.starts_with("col")) text.remove_prefix(3);
  uint32_t n = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || end != text.data() + text.size() || n == 0) return false;
  out = n - 1;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

// Bitmaps one predicate combines, and how.
struct Plan {
  std::vector<uint32_t> bitmaps;
  AggOp op = AggOp::And;
};

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Generic: return "generic";
    case Strategy::TwoHeap: return "two-heap";
    case Strategy::Pairwise: return "pairwise";
    case Strategy::InPlace: return "in-place";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::Auto, Strategy::Generic, Strategy::TwoHeap, Strategy::Pairwise,
                     Strategy::InPlace}) {
    if (text == strategy_name(s)) return s;
  }
  throw InvalidArgument("unknown strategy '" + std::string(text) +
                        "' (expected auto, generic, two-heap, pairwise or in-place)");
}

CompressedBitmap aggregate_generic(std::span<const CompressedBitmap> inputs, AggOp op) {
  const Shape s = shape_of(inputs);
  const uint64_t full = s.params.full_mask();
  std::vector<SegmentCursor> cur;
  cur.reserve(inputs.size());
  for (const auto& b : inputs) cur.emplace_back(b, s.words);

  CompressedBitmap out(s.params);
  uint64_t pos = 0;
  while (pos < s.words) {
    uint64_t end = UINT64_MAX;
    uint64_t counts[3] = {0, 0, 0};
    for (const auto& c : cur) {
      end = std::min(end, c.end());
      ++counts[static_cast<int>(c.kind())];
    }
    if (counts[2] == 0) {
      out.add_clean_words(clean_value(op, counts[1], cur.size()), end - pos + 1);
    } else {
      WordFold fold(op, full, counts[0], counts[1]);
      for (const auto& c : cur) {
        if (c.kind() == Kind::Dirty) fold.add(c.word());
      }
      out.add_word(fold.value());
    }
    for (auto& c : cur) {
      if (c.end() == end) c.advance();
    }
    pos = end + 1;
  }
  out.finish(s.bit_length);
  return out;
}

CompressedBitmap aggregate_two_heap(std::span<const CompressedBitmap> inputs, AggOp op) {
  const Shape s = shape_of(inputs);
  const uint64_t full = s.params.full_mask();
  const size_t L = inputs.size();
  std::vector<SegmentCursor> cur;
  cur.reserve(L);
  for (const auto& b : inputs) cur.emplace_back(b, s.words);

  // ends: min-heap of segment ends. starts: max-heap of segment starts; its
  // top is where the current output segment begins.
  IndexedHeap<std::less<>> ends(L);
  IndexedHeap<std::greater<>> starts(L);
  uint64_t counts[3] = {0, 0, 0};
  for (uint32_t i = 0; i < L; ++i) {
    ends.push(i, cur[i].end());
    starts.push(i, cur[i].start());
    ++counts[static_cast<int>(cur[i].kind())];
  }

  CompressedBitmap out(s.params);
  std::vector<uint32_t> finished;
  while (!ends.empty() && starts.top_key() < s.words) {
    const uint64_t pos = starts.top_key();
    const uint64_t end = ends.top_key();
    finished.clear();
    while (!ends.empty() && ends.top_key() == end) {
      finished.push_back(ends.top());
      ends.pop();
    }
    if (counts[2] == 0) {
      out.add_clean_words(clean_value(op, counts[1], L), end - pos + 1);
    } else {
      // Verbatim segments span one word, so they all end here.
      WordFold fold(op, full, counts[0], counts[1]);
      for (uint32_t i : finished) {
        if (cur[i].kind() == Kind::Dirty) fold.add(cur[i].word());
      }
      out.add_word(fold.value());
    }
    for (uint32_t i : finished) {
      --counts[static_cast<int>(cur[i].kind())];
      cur[i].advance();
      ++counts[static_cast<int>(cur[i].kind())];
      ends.push(i, cur[i].end());
      starts.update(i, cur[i].start());
    }
  }
  out.finish(s.bit_length);
  return out;
}

CompressedBitmap aggregate_pairwise(std::span<const CompressedBitmap> inputs, AggOp op) {
  const Shape s = shape_of(inputs);
  std::vector<size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return inputs[a].size_in_words() < inputs[b].size_in_words();
  });
  if (op == AggOp::And) {
    for (size_t i : order) {
      if (inputs[i].none()) return zeros(s);
    }
  }
  CompressedBitmap acc = inputs[order[0]];
  for (size_t j = 1; j < order.size(); ++j) {
    acc = binary_op(acc, inputs[order[j]], bit_op(op));
    if (op == AggOp::And && acc.none()) return zeros(s);
  }
  return acc;
}

CompressedBitmap aggregate_inplace(std::span<const CompressedBitmap> inputs, AggOp op,
                                   uint64_t max_bytes) {
  const Shape s = shape_of(inputs);
  const uint64_t full = s.params.full_mask();
  if (s.words > max_bytes / s.params.bytes()) {
    throw InvalidArgument("in-place aggregation needs " +
                          std::to_string(s.words * s.params.bytes()) +
                          " bytes, above the configured cap of " + std::to_string(max_bytes));
  }
  std::vector<uint64_t> buf(s.words, op == AggOp::And ? full : 0);
  const BitOp bop = bit_op(op);
  for (const auto& b : inputs) {
    WordCursor c(b);
    uint64_t pos = 0;
    while (!c.done()) {
      if (c.clean_left() > 0) {
        const uint64_t n = c.clean_left();
        // Only clean runs that change the buffer are touched.
        if (op == AggOp::And && !c.fill()) {
          std::fill_n(buf.begin() + static_cast<std::ptrdiff_t>(pos), n, 0);
        } else if (op == AggOp::Or && c.fill()) {
          std::fill_n(buf.begin() + static_cast<std::ptrdiff_t>(pos), n, full);
        } else if (op == AggOp::Xor && c.fill()) {
          const auto span = std::span<uint64_t>(buf).subspan(pos, n);
          simd::invert(span, span, full);
        }
        c.skip_clean(n);
        pos += n;
      } else {
        const auto d = c.dirty();
        const auto span = std::span<uint64_t>(buf).subspan(pos, d.size());
        simd::bitwise(bop, span, d, span);
        c.skip_dirty(d.size());
        pos += d.size();
      }
    }
    if (op == AggOp::And) std::fill(buf.begin() + static_cast<std::ptrdiff_t>(pos), buf.end(), 0);
  }
  const unsigned tail = static_cast<unsigned>(s.bit_length % s.params.bits());
  if (tail != 0) buf.back() &= (uint64_t{1} << tail) - 1;
  return CompressedBitmap::from_uncompressed(s.params, buf, s.bit_length);
}

Strategy resolve_strategy(size_t inputs, const AggregateOptions& options) {
  if (options.strategy != Strategy::Auto) return options.strategy;
  return inputs <= options.pairwise_max_inputs ? Strategy::Pairwise : Strategy::TwoHeap;
}

CompressedBitmap aggregate(std::span<const CompressedBitmap> inputs, AggOp op,
                           const AggregateOptions& options) {
  switch (resolve_strategy(inputs.size(), options)) {
    case Strategy::Generic: return aggregate_generic(inputs, op);
    case Strategy::TwoHeap: return aggregate_two_heap(inputs, op);
    case Strategy::InPlace: return aggregate_inplace(inputs, op, options.inplace_max_bytes);
    case Strategy::Pairwise:
    case Strategy::Auto: break;
  }
  return aggregate_pairwise(inputs, op);
}

// ---------------------------------------------------------------------------
// Queries

Predicate Predicate::equals(uint32_t column, std::string value) {
  Predicate p;
  p.column = column;
  p.kind = Kind::Equals;
  p.value = std::move(value);
  return p;
}

Predicate Predicate::range(uint32_t column, std::optional<std::string> lo,
                           std::optional<std::string> hi) {
  Predicate p;
  p.column = column;
  p.kind = Kind::Range;
  p.lo = std::move(lo);
  p.hi = std::move(hi);
  return p;
}

Query Query::parse(std::string_view text) {
  Query q;
  size_t start = 0;
  for (;;) {
    const size_t amp = text.find('&', start);
    const std::string_view term =
        trim(text.substr(start, amp == std::string_view::npos ? text.npos : amp - start));
    const size_t eq = term.find('=');
    uint32_t column = 0;
    if (eq == std::string_view::npos || !parse_column(trim(term.substr(0, eq)), column)) {
      throw InvalidArgument("bad query term '" + std::string(term) +
                            "' (expected col<N>=value or col<N>=lo..hi)");
    }
    const std::string_view rhs = term.substr(eq + 1);
    const size_t dots = rhs.find("..");
    if (dots == std::string_view::npos) {
      q.predicates.push_back(Predicate::equals(column, std::string(rhs)));
    } else {
      const std::string_view lo = rhs.substr(0, dots);
      const std::string_view hi = rhs.substr(dots + 2);
      q.predicates.push_back(Predicate::range(
          column, lo.empty() ? std::nullopt : std::optional<std::string>(lo),
          hi.empty() ? std::nullopt : std::optional<std::string>(hi)));
    }
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  return q;
}

std::string_view status_name(QueryStatus s) {
  switch (s) {
    case QueryStatus::Ok: return "ok";
    case QueryStatus::UnknownValue: return "unknown-value";
    case QueryStatus::EmptyRange: return "empty-range";
  }
  return "?";
}

std::vector<uint32_t> ranks_in_range(const ColumnCoding& column,
                                     const std::optional<std::string>& lo,
                                     const std::optional<std::string>& hi) {
  std::vector<uint32_t> out;
  const auto& values = column.dict.values;
  if (column.numeric) {
    std::optional<double> l, h;
    if (lo && !(l = parse_number(*lo))) throw InvalidArgument("range bound '" + *lo + "' is not a number");
    if (hi && !(h = parse_number(*hi))) throw InvalidArgument("range bound '" + *hi + "' is not a number");
    for (uint32_t r = 0; r < values.size(); ++r) {
      const double v = *parse_number(values[r]);
      if ((!l || v >= *l) && (!h || v <= *h)) out.push_back(r);
    }
  } else {
    for (uint32_t r = 0; r < values.size(); ++r) {
      if ((!lo || values[r] >= *lo) && (!hi || values[r] <= *hi)) out.push_back(r);
    }
  }
  return out;
}

QueryResult run_query(const IndexSource& index, const Query& query, const QueryOptions& options) {
  const IndexHeader& h = index.header();
  if (query.predicates.empty()) throw InvalidArgument("query has no predicates");
  QueryResult result;

  std::vector<Plan> plans;
  for (const auto& p : query.predicates) {
    if (p.column >= h.columns.size()) {
      throw InvalidArgument("query names column " + std::to_string(p.column + 1) +
                            " but the index has " + std::to_string(h.columns.size()));
    }
    const ColumnCoding& col = h.columns[p.column];
    const uint32_t base = h.bitmap_base(p.column);
    Plan plan;
    if (p.kind == Predicate::Kind::Equals) {
      const auto rank = col.dict.rank(p.value);
      if (!rank) {
        result.status = QueryStatus::UnknownValue;
        return result;
      }
      for (uint32_t pos : col.codes[*rank]) plan.bitmaps.push_back(base + pos - 1);
      plan.op = AggOp::And;
    } else {
      if (col.k != 1) {
        throw InvalidArgument("range predicates need a k = 1 column; column " +
                              std::to_string(p.column + 1) + " has k = " + std::to_string(col.k));
      }
      for (uint32_t r : ranks_in_range(col, p.lo, p.hi)) {
        plan.bitmaps.push_back(base + col.codes[r][0] - 1);
      }
      if (plan.bitmaps.empty()) {
        result.status = QueryStatus::EmptyRange;
        return result;
      }
      plan.op = AggOp::Or;
    }
    plans.push_back(std::move(plan));
  }

  struct DimOut {
    CompressedBitmap bitmap;
    uint64_t loaded = 0;
    uint64_t words = 0;
  };
  const auto eval = [&](size_t block, const Plan& plan) {
    DimOut d;
    std::vector<CompressedBitmap> in;
    in.reserve(plan.bitmaps.size());
    for (uint32_t id : plan.bitmaps) {
      in.push_back(index.load(block, id));
      d.words += in.back().size_in_words();
    }
    d.loaded = in.size();
    d.bitmap = in.size() == 1 ? std::move(in[0]) : aggregate(in, plan.op, options.aggregate);
    return d;
  };

  const unsigned threads = std::max(1u, options.threads);
  for (size_t block = 0; block < index.block_count(); ++block) {
    std::vector<DimOut> dims(plans.size());
    for (size_t first = 0; first < plans.size(); first += threads) {
      const size_t last = std::min(plans.size(), first + threads);
      std::vector<std::future<DimOut>> pending;
      for (size_t i = first + 1; i < last; ++i) {
        pending.push_back(std::async(std::launch::async, eval, block, std::cref(plans[i])));
      }
      dims[first] = eval(block, plans[first]);
      for (size_t i = first + 1; i < last; ++i) dims[i] = pending[i - first - 1].get();
    }
    std::vector<CompressedBitmap> parts;
    parts.reserve(dims.size());
    for (auto& d : dims) {
      result.bitmaps_loaded += d.loaded;
      result.words_scanned += d.words;
      parts.push_back(std::move(d.bitmap));
    }
    const CompressedBitmap hit =
        parts.size() == 1 ? std::move(parts[0]) : aggregate(parts, AggOp::And, options.aggregate);
    const uint64_t row_start = index.block_row_start(block);
    for (uint64_t p : hit.positions()) result.rows.push_back(row_start + p);
  }
  return result;
}

QueryResult equality_query(const IndexSource& index, uint32_t column, std::string_view value,
                           const QueryOptions& options) {
  Query q;
  q.predicates.push_back(Predicate::equals(column, std::string(value)));
  return run_query(index, q, options);
}

QueryResult range_query(const IndexSource& index, std::span<const Predicate> ranges,
                        const QueryOptions& options) {
  Query q;
  for (const auto& p : ranges) {
    if (p.kind != Predicate::Kind::Range) throw InvalidArgument("range_query takes range predicates");
    q.predicates.push_back(p);
  }
  return run_query(index, q, options);
}

}  // namespace ewahidx
