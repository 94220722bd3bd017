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
// ewahidx command-line tool.
//
//   gen      write a synthetic table
//   profile  per-column cardinalities (cached next to the table)
//   sort     reorder a table's rows
//   build    write an index, optionally sorting the table first
//   query    evaluate col<N>=value / col<N>=lo..hi conjunctions
//   stats    index size and compression counters
//   model    tab-separated curves of the cost models
//   bench    index sizes and query times per scheme, k and word size
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 I/O error.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ewahidx/codec.hpp"
#include "ewahidx/datagen.hpp"
#include "ewahidx/error.hpp"
#include "ewahidx/index.hpp"
#include "ewahidx/model.hpp"
#include "ewahidx/query.hpp"
#include "ewahidx/sort.hpp"
#include "ewahidx/table.hpp"

namespace fs = std::filesystem;
using namespace ewahidx;

namespace {

char parse_delimiter(const std::string& s) {
  if (s == "tab" || s == "\\t" || s == "\t") return '\t';
  if (s.size() != 1 || s[0] == '\n' || s[0] == '\r') {
    throw InvalidArgument("delimiter must be a single character (or 'tab'), got '" + s + "'");
  }
  return s[0];
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  if (text.empty()) return out;
  size_t start = 0;
  for (;;) {
    const size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos
                                                                            : comma - start);
    T v{};
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw InvalidArgument(std::string("bad ") + what + " list '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t comma = text.find(',', start);
    out.push_back(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct TableFlags {
  std::string delimiter = ",";
  std::string numeric;

  void add(CLI::App* app) {
    app->add_option("--delimiter", delimiter, "Field delimiter: one character or 'tab'")
        ->capture_default_str();
    app->add_option("--numeric", numeric, "1-based columns ranked numerically, e.g. 2,5");
  }
  ProfileOptions options() const {
    ProfileOptions o;
    o.delimiter = parse_delimiter(delimiter);
    for (uint32_t c : parse_list<uint32_t>(numeric, "column")) {
      if (c == 0) throw InvalidArgument("--numeric columns are 1-based");
      o.numeric_columns.push_back(c - 1);
    }
    return o;
  }
};

// --scheme also accepts freq-component: Gray-Frequency codes with rows in
// frequent-component order.
struct SchemeChoice {
  Scheme scheme = Scheme::GrayLex;
  bool frequent_component = false;
};

SchemeChoice parse_scheme_flag(const std::string& text) {
  if (text == "freq-component") return {Scheme::GrayFrequency, true};
  return {parse_scheme(text), false};
}

std::string scheme_flag_name(const SchemeChoice& s) {
  return s.frequent_component ? "freq-component" : std::string(scheme_name(s.scheme));
}

unsigned checked_word_size(unsigned w) { return WordParams::of(w).bits(); }

std::vector<uint32_t> resolve_order(const std::string& text, const TableProfile& profile,
                                    uint32_t k, unsigned w) {
  if (text == "auto") return suggest_column_order(profile, k, w);
  if (text == "identity") {
    std::vector<uint32_t> id(profile.column_count());
    for (uint32_t c = 0; c < id.size(); ++c) id[c] = c;
    return id;
  }
  return parse_column_order(text, profile.column_count());
}

SortPlan resolve_sort(const std::string& text, const SchemeChoice& scheme,
                      std::vector<uint32_t> order) {
  SortPlan plan = SortPlan::parse(text.empty() ? (scheme.frequent_component ? "fc" : "none") : text);
  plan.column_order = std::move(order);
  return plan;
}

uint64_t budget_bytes(double mib) {
  if (!(mib > 0)) throw InvalidArgument("--budget-mib must be positive");
  return static_cast<uint64_t>(std::max(1.0, mib * 1048576.0));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  uint64_t rows = 0;
  std::vector<std::string> columns;
  uint64_t seed = 1;
  std::string delimiter = ",";
  std::string output;
};

int cmd_gen(const GenArgs& a) {
  GenSpec spec;
  spec.rows = a.rows;
  spec.seed = a.seed;
  spec.delimiter = parse_delimiter(a.delimiter);
  for (const auto& c : a.columns) spec.columns.push_back(ColumnSpec::parse(c));
  generate_file(spec, a.output);
  return 0;
}

struct ProfileArgs {
  std::string table;
  TableFlags flags;
  uint32_t k = 1;
  unsigned w = 32;
};

int cmd_profile(const ProfileArgs& a) {
  const unsigned w = checked_word_size(a.w);
  TableProfile p = profile_cached(a.table, a.flags.options());
  p.configure(a.k);
  std::cout << "column\tcardinality\tk\tN\tmax_frequency\tnumeric\tscore\n";
  for (size_t c = 0; c < p.column_count(); ++c) {
    const ColumnProfile& col = p.columns[c];
    uint64_t top = 0;
    for (uint64_t f : col.frequencies) top = std::max(top, f);
    std::cout << c + 1 << '\t' << col.cardinality() << '\t' << col.k << '\t' << col.N << '\t' << top
              << '\t' << (col.numeric ? 1 : 0) << '\t'
              << fmt(model::column_score(static_cast<double>(col.cardinality()), col.k, w)) << '\n';
  }
  std::cout << "# rows=" << p.rows << " suggested_order="
            << format_column_order(suggest_column_order(p, a.k, w)) << '\n';
  return 0;
}

struct SortArgs {
  std::string table;
  std::string output;
  TableFlags flags;
  std::string sort = "lex";
  std::string column_order = "auto";
  uint32_t k = 1;
  unsigned w = 32;
  double memory_mib = 256;
  unsigned threads = 1;
  std::string temp_dir;
};

int cmd_sort(const SortArgs& a) {
  const TableProfile p = profile_cached(a.table, a.flags.options());
  SortPlan plan = SortPlan::parse(a.sort);
  plan.column_order = resolve_order(a.column_order, p, a.k, checked_word_size(a.w));
  SortOptions o;
  o.memory_bytes = budget_bytes(a.memory_mib);
  o.threads = std::max(1u, a.threads);
  o.temp_dir = a.temp_dir;
  const SortReport r = sort_table_file(a.table, a.output, p, plan, o);
  std::cout << "rows\t" << r.rows << "\nruns\t" << r.runs << "\nmerge_passes\t" << r.merge_passes
            << "\nplan\t" << plan.name() << "\ncolumn_order\t"
            << format_column_order(plan.column_order) << '\n';
  return 0;
}

struct BuildArgs {
  std::string table;
  std::string output;
  TableFlags flags;
  unsigned w = 32;
  uint32_t k = 1;
  std::string scheme = "gray-lex";
  std::string sort;
  std::string column_order = "auto";
  double budget_mib = 256;
  double memory_mib = 256;
  uint64_t seed = 0;
  unsigned threads = 1;
};

int cmd_build(const BuildArgs& a) {
  const unsigned w = checked_word_size(a.w);
  if (a.k < 1) throw InvalidArgument("--k must be at least 1");
  const SchemeChoice scheme = parse_scheme_flag(a.scheme);
  const TableProfile p = profile_cached(a.table, a.flags.options());
  const std::vector<uint32_t> order = resolve_order(a.column_order, p, a.k, w);
  const SortPlan plan = resolve_sort(a.sort, scheme, order);
  const uint64_t budget = budget_bytes(a.budget_mib);

  CodingOptions co;
  co.k = a.k;
  co.w = w;
  co.scheme = scheme.scheme;
  co.seed = a.seed;
  co.column_order = order;
  const IndexHeader header = make_header(p, co);

  const auto t0 = std::chrono::steady_clock::now();
  std::string source = a.table;
  const std::string sorted = a.output + ".sorted.tmp";
  if (plan.ordering != Ordering::None) {
    SortOptions so;
    so.memory_bytes = budget_bytes(a.memory_mib);
    so.threads = std::max(1u, a.threads);
    sort_table_file(a.table, sorted, p, plan, so);
    source = sorted;
  }
  BuildReport r;
  try {
    r = build_index_file(source, a.output, p, header, budget);
  } catch (...) {
    if (source == sorted) fs::remove(sorted);
    throw;
  }
  if (source == sorted) fs::remove(sorted);
  const double secs = seconds_since(t0);

  const IndexStats s = index_stats(IndexReader(a.output));
  std::cout << "rows\t" << r.rows << "\nblocks\t" << r.blocks << "\nbitmaps\t" << r.bitmaps
            << "\nscheme\t" << scheme_flag_name(scheme) << "\nsort\t" << plan.name()
            << "\ncolumn_order\t" << format_column_order(order) << "\nword_size\t" << w
            << "\ntotal_words\t" << s.total.words_total << "\ndirty_words\t" << s.total.dirty_words
            << "\nbuild_seconds\t" << fmt(secs) << '\n';
  return 0;
}

struct QueryArgs {
  std::string index;
  std::string query;
  std::string strategy = "auto";
  unsigned threads = 1;
  bool count = false;
};

int cmd_query(const QueryArgs& a) {
  IndexReader reader(a.index);
  const FileIndexSource src(reader);
  QueryOptions o;
  o.aggregate.strategy = parse_strategy(a.strategy);
  o.threads = std::max(1u, a.threads);
  const QueryResult r = run_query(src, Query::parse(a.query), o);
  if (r.status != QueryStatus::Ok) std::cerr << "warning: " << status_name(r.status) << '\n';
  if (a.count) {
    std::cout << r.rows.size() << '\n';
  } else {
    std::string out;
    for (uint64_t row : r.rows) {
      out += std::to_string(row);
      out += '\n';
    }
    std::cout << out;
  }
  return 0;
}

void print_stats(const IndexHeader& h, const IndexStats& s) {
  const BitmapStats& t = s.total;
  std::cout << "rows\t" << s.rows << "\nblocks\t" << s.blocks << "\nbitmaps\t" << s.bitmaps
            << "\nword_size\t" << h.w << "\ntotal_words\t" << t.words_total << "\ndirty_words\t"
            << t.dirty_words << "\nmarkers\t" << t.markers << "\nclean_runs\t"
            << t.clean_run_markers << "\nsaturated_clean_counters\t" << t.saturated_clean_counters
            << "\nclean_sequences\t" << t.clean_sequences << "\nstorage_cost\t" << t.storage_cost()
            << "\noverrun_pct\t" << fmt(t.overrun_pct()) << "\nclean_fraction\t"
            << fmt(t.clean_fraction()) << '\n';
  std::cout << "column\tcardinality\tk\tN\tscheme\ttotal_words\tdirty_words\toverrun_pct\n";
  for (size_t c = 0; c < h.columns.size(); ++c) {
    const auto& col = h.columns[c];
    const auto& cs = s.per_column[c];
    std::cout << c + 1 << '\t' << col.cardinality() << '\t' << col.k << '\t' << col.N << '\t'
              << scheme_name(col.scheme) << '\t' << cs.words_total << '\t' << cs.dirty_words << '\t'
              << fmt(cs.overrun_pct()) << '\n';
  }
}

int cmd_stats(const std::string& index) {
  IndexReader reader(index);
  print_stats(reader.header(), index_stats(reader));
  return 0;
}

struct ModelArgs {
  std::string curve = "gain";
  double n = 100000;
  unsigned w = 32;
  std::string ks = "1,2,3";
  uint64_t max_ni = 100000;
  uint64_t step = 1;
};

int cmd_model(const ModelArgs& a) {
  const unsigned w = checked_word_size(a.w);
  const auto ks = parse_list<uint32_t>(a.ks, "k");
  if (a.step == 0 || a.max_ni == 0) throw InvalidArgument("--step and --max-ni must be positive");
  for (uint32_t k : ks) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
  }
  if (a.curve == "gain") {
    std::cout << "k\tn_i\tgain\n";
    for (uint32_t k : ks) {
      for (uint64_t ni = 1; ni <= a.max_ni; ni += a.step) {
        std::cout << k << '\t' << ni << '\t' << fmt(model::sorting_gain(double(ni), k, a.n, w))
                  << '\n';
      }
    }
  } else if (a.curve == "query-cost") {
    std::cout << "k\tn_i\tratio\n";
    for (uint32_t k : ks) {
      for (uint64_t ni = 1; ni <= a.max_ni; ni += a.step) {
        std::cout << k << '\t' << ni << '\t' << fmt(model::query_cost_ratio(k, double(ni))) << '\n';
      }
    }
  } else if (a.curve == "peak") {
    std::cout << "k\tpeak_estimate\tnumeric_argmax\tmax_gain\n";
    for (uint32_t k : ks) {
      const auto m = model::sorting_gain_argmax(k, a.n, w, 1, a.max_ni);
      std::cout << k << '\t' << fmt(model::gain_peak_estimate(k, a.n, w)) << '\t' << m.n_i << '\t'
                << fmt(m.gain) << '\n';
    }
  } else {
    throw InvalidArgument("unknown curve '" + a.curve + "' (expected gain, query-cost or peak)");
  }
  return 0;
}

struct BenchArgs {
  std::string table;
  TableFlags flags;
  std::string dataset;
  std::string schemes = "gray-lex";
  std::string ks = "1";
  std::string word_sizes = "32";
  std::string sort = "lex";
  std::string column_order = "auto";
  std::string strategy = "auto";
  double budget_mib = 256;
  uint64_t queries = 100;
  uint64_t seed = 0;
  bool prefix_curve = false;
  uint64_t steps = 10;
};

EncodedTable prefix_of(const EncodedTable& t, uint64_t rows) {
  EncodedTable out;
  out.columns = t.columns;
  out.rows = rows;
  out.ranks.assign(t.ranks.begin(), t.ranks.begin() + static_cast<std::ptrdiff_t>(rows * t.columns));
  return out;
}

int cmd_bench(const BenchArgs& a) {
  const ProfileOptions po = a.flags.options();
  const StringRows rows = read_table(a.table, po.delimiter);
  const TableProfile profile = profile_rows(rows, po);
  const EncodedTable table = encode_rows(rows, profile);
  const std::string dataset = a.dataset.empty() ? fs::path(a.table).filename().string() : a.dataset;
  const uint64_t budget = budget_bytes(a.budget_mib);
  QueryOptions qo;
  qo.aggregate.strategy = parse_strategy(a.strategy);

  const auto ks = parse_list<uint32_t>(a.ks, "k");
  const auto ws = parse_list<unsigned>(a.word_sizes, "word size");
  if (a.prefix_curve) {
    std::cout << "dataset\tscheme\tk\tw\tprefix_rows\ttotal_words\twords_per_row\n";
  } else {
    std::cout << "dataset\tscheme\tk\tw\ttotal_words\tdirty_words\toverrun_pct\tbuild_seconds\t"
                 "mean_query_seconds\n";
  }
  for (const std::string& name : split_names(a.schemes)) {
    const SchemeChoice scheme = parse_scheme_flag(name);
    for (uint32_t k : ks) {
      for (unsigned w0 : ws) {
        const unsigned w = checked_word_size(w0);
        CodingOptions co;
        co.k = k;
        co.w = w;
        co.scheme = scheme.scheme;
        co.seed = a.seed;
        co.column_order = resolve_order(a.column_order, profile, k, w);
        const IndexHeader header = make_header(profile, co);
        const SortPlan plan = resolve_sort(a.sort, scheme, co.column_order);

        if (a.prefix_curve) {
          const uint64_t steps = std::max<uint64_t>(1, a.steps);
          for (uint64_t s = 1; s <= steps; ++s) {
            const uint64_t n = table.rows * s / steps;
            if (n == 0) continue;
            // Each prefix is sorted on its own, as a table of that size would be.
            const EncodedTable t = sort_encoded(prefix_of(table, n), profile, plan);
            const auto blocks = build_blocks(t, header, budget);
            const IndexStats st = index_stats(header, blocks);
            std::cout << dataset << '\t' << scheme_flag_name(scheme) << '\t' << k << '\t' << w
                      << '\t' << n << '\t' << st.total.words_total << '\t'
                      << fmt(double(st.total.words_total) / double(n)) << '\n';
          }
          continue;
        }

        const auto t0 = std::chrono::steady_clock::now();
        const EncodedTable t = sort_encoded(table, profile, plan);
        const auto blocks = build_blocks(t, header, budget);
        const double build_secs = seconds_since(t0);
        const IndexStats st = index_stats(header, blocks);

        double query_secs = 0;
        uint64_t issued = 0;
        if (table.rows > 0 && table.columns > 0) {
          const MemoryIndexSource src(header, blocks);
          std::mt19937_64 rng(a.seed + 1);
          for (uint64_t q = 0; q < a.queries; ++q) {
            const uint64_t row = rng() % table.rows;
            const uint32_t c = static_cast<uint32_t>(rng() % table.columns);
            const std::string& v = profile.columns[c].dict.values[table.at(row, c)];
            const auto q0 = std::chrono::steady_clock::now();
            const QueryResult r = equality_query(src, c, v, qo);
            query_secs += seconds_since(q0);
            issued += r.rows.empty() ? 0 : 1;
          }
        }
        std::cout << dataset << '\t' << scheme_flag_name(scheme) << '\t' << k << '\t' << w << '\t'
                  << st.total.words_total << '\t' << st.total.dirty_words << '\t'
                  << fmt(st.total.overrun_pct()) << '\t' << fmt(build_secs) << '\t'
                  << fmt(issued ? query_secs / double(issued) : 0.0) << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ewahidx: compressed k-of-N bitmap indexes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ewahidx 1.0");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic table");
  g->add_option("--rows", gen.rows, "Row count")->required();
  g->add_option("--column", gen.columns, "uniform:<n> or zipf:<n>[:<s>], once per column")
      ->required();
  g->add_option("--seed", gen.seed, "PRNG seed")->capture_default_str();
  g->add_option("--delimiter", gen.delimiter, "Field delimiter")->capture_default_str();
  g->add_option("-o,--output", gen.output, "Output file")->required();

  ProfileArgs prof;
  auto* p = app.add_subcommand("profile", "Per-column cardinalities and suggested column order");
  p->add_option("table", prof.table)->required();
  prof.flags.add(p);
  p->add_option("--k", prof.k, "Requested bitmaps per value")->capture_default_str();
  p->add_option("--word-size", prof.w, "16, 32 or 64")->capture_default_str();

  SortArgs sort;
  auto* s = app.add_subcommand("sort", "Reorder a table's rows");
  s->add_option("table", sort.table)->required();
  s->add_option("-o,--output", sort.output, "Output file")->required();
  sort.flags.add(s);
  s->add_option("--sort", sort.sort, "none | lex | block:<B> | gray-freq | fc")->capture_default_str();
  s->add_option("--column-order", sort.column_order, "auto | identity | 1-based permutation")
      ->capture_default_str();
  s->add_option("--k", sort.k, "Weight used by --column-order auto")->capture_default_str();
  s->add_option("--word-size", sort.w, "Word size used by --column-order auto")
      ->capture_default_str();
  s->add_option("--memory-mib", sort.memory_mib, "Sort memory budget")->capture_default_str();
  s->add_option("--threads", sort.threads, "Worker threads")->capture_default_str();
  s->add_option("--temp-dir", sort.temp_dir, "Directory for run files");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Write an index for a table");
  b->add_option("table", build.table)->required();
  b->add_option("-o,--output", build.output, "Index file")->required();
  build.flags.add(b);
  b->add_option("--word-size", build.w, "16, 32 or 64")->capture_default_str();
  b->add_option("--k", build.k, "Bitmaps per value (limited for small columns)")
      ->capture_default_str();
  b->add_option("--scheme", build.scheme,
                "binary-lex | gray-lex | alt-gray-lex | rand-lex | gray-freq | freq-component")
      ->capture_default_str();
  b->add_option("--sort", build.sort,
                "Sort rows first: none | lex | block:<B> | gray-freq | fc "
                "(default none, or fc for freq-component)");
  b->add_option("--column-order", build.column_order, "auto | identity | 1-based permutation")
      ->capture_default_str();
  b->add_option("--budget-mib", build.budget_mib, "Compressed bytes per index block")
      ->capture_default_str();
  b->add_option("--memory-mib", build.memory_mib, "Sort memory budget")->capture_default_str();
  b->add_option("--seed", build.seed, "Seed for rand-lex")->capture_default_str();
  b->add_option("--threads", build.threads, "Sort worker threads")->capture_default_str();

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Print the row ids matching a query");
  q->add_option("index", query.index)->required();
  q->add_option("query", query.query, "e.g. 'col1=cat & col2=10..20'")->required();
  q->add_option("--strategy", query.strategy, "auto | generic | two-heap | pairwise | in-place")
      ->capture_default_str();
  q->add_option("--threads", query.threads, "Predicates evaluated in parallel")
      ->capture_default_str();
  q->add_flag("--count", query.count, "Print only the number of matching rows");

  std::string stats_index;
  auto* st = app.add_subcommand("stats", "Index size and compression counters");
  st->add_option("index", stats_index)->required();

  ModelArgs mod;
  auto* m = app.add_subcommand("model", "Tab-separated curves of the cost models");
  m->add_option("--curve", mod.curve, "gain | query-cost | peak")->capture_default_str();
  m->add_option("--n", mod.n, "Rows")->capture_default_str();
  m->add_option("--word-size", mod.w, "16, 32 or 64")->capture_default_str();
  m->add_option("--k", mod.ks, "Comma-separated weights")->capture_default_str();
  m->add_option("--max-ni", mod.max_ni, "Largest cardinality")->capture_default_str();
  m->add_option("--step", mod.step, "Cardinality step")->capture_default_str();

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Index sizes and query times");
  be->add_option("table", bench.table)->required();
  bench.flags.add(be);
  be->add_option("--dataset", bench.dataset, "Name in the first column (default: file name)");
  be->add_option("--scheme", bench.schemes, "Comma-separated schemes")->capture_default_str();
  be->add_option("--k", bench.ks, "Comma-separated weights")->capture_default_str();
  be->add_option("--word-size", bench.word_sizes, "Comma-separated word sizes")
      ->capture_default_str();
  be->add_option("--sort", bench.sort, "Row order before building")->capture_default_str();
  be->add_option("--column-order", bench.column_order, "auto | identity | permutation")
      ->capture_default_str();
  be->add_option("--strategy", bench.strategy, "Aggregation strategy")->capture_default_str();
  be->add_option("--budget-mib", bench.budget_mib, "Compressed bytes per block")
      ->capture_default_str();
  be->add_option("--queries", bench.queries, "Equality queries per configuration")
      ->capture_default_str();
  be->add_option("--seed", bench.seed, "Seed for rand-lex and query sampling")
      ->capture_default_str();
  be->add_flag("--prefix-curve", bench.prefix_curve, "Index size of growing row prefixes");
  be->add_option("--steps", bench.steps, "Prefixes in the curve")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*p) return cmd_profile(prof);
    if (*s) return cmd_sort(sort);
    if (*b) return cmd_build(build);
    if (*q) return cmd_query(query);
    if (*st) return cmd_stats(stats_index);
    if (*m) return cmd_model(mod);
    if (*be) return cmd_bench(bench);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
