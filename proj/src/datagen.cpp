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

#include "ewahidx/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "ewahidx/error.hpp"
#include "ewahidx/rng.hpp"

namespace ewahidx {
namespace {

constexpr uint64_t kMaxZipfCardinality = 1'000'000;

template <typename T>
bool parse_num(std::string_view s, T& out) {
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && end == s.data() + s.size();
}

// Draws one column value per call.
class ColumnDrawer {
 public:
  explicit ColumnDrawer(const ColumnSpec& spec) : spec_(spec) {
    if (spec.kind == ColumnSpec::Kind::Zipf) zipf_.emplace(spec.cardinality, spec.s);
  }
  uint64_t draw(Rng& rng) const {
    if (zipf_) return zipf_->sample(rng.uniform());
    return 1 + rng.below(spec_.cardinality);
  }

 private:
  ColumnSpec spec_;
  std::optional<ZipfSampler> zipf_;
};

template <typename RowSink>
void generate(const GenSpec& spec, RowSink&& sink) {
  spec.validate();
  std::vector<ColumnDrawer> drawers(spec.columns.begin(), spec.columns.end());
  // Labels are precomputed per column; cardinalities are bounded above.
  std::vector<std::vector<std::string>> labels(spec.columns.size());
  for (size_t c = 0; c < spec.columns.size(); ++c) {
    const uint64_t n = spec.columns[c].cardinality;
    labels[c].reserve(n);
    for (uint64_t r = 1; r <= n; ++r) labels[c].push_back(value_label(r, n));
  }
  Rng rng(spec.seed);
  std::vector<std::string_view> row(spec.columns.size());
  for (uint64_t i = 0; i < spec.rows; ++i) {
    for (size_t c = 0; c < drawers.size(); ++c) row[c] = labels[c][drawers[c].draw(rng) - 1];
    sink(row);
  }
}

}  // namespace

ColumnSpec ColumnSpec::parse(std::string_view text) {
  ColumnSpec c;
  const auto bad = [&]() {
    return InvalidArgument("bad column spec '" + std::string(text) +
                           "' (expected uniform:<n> or zipf:<n>[:<s>])");
  };
  const size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw bad();
  const std::string_view kind = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  if (kind == "uniform") {
    c.kind = Kind::Uniform;
    if (!parse_num(rest, c.cardinality)) throw bad();
  } else if (kind == "zipf") {
    c.kind = Kind::Zipf;
    const size_t second = rest.find(':');
    if (!parse_num(rest.substr(0, second), c.cardinality)) throw bad();
    if (second != std::string_view::npos && !parse_num(rest.substr(second + 1), c.s)) throw bad();
  } else {
    throw bad();
  }
  if (c.cardinality < 1 || !(c.s > 0)) throw bad();
  return c;
}

std::string ColumnSpec::name() const {
  if (kind == Kind::Uniform) return "uniform:" + std::to_string(cardinality);
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, s);
  return "zipf:" + std::to_string(cardinality) + ":" + std::string(buf, end);
}

void GenSpec::validate() const {
  if (columns.empty()) throw InvalidArgument("at least one column is required");
  for (const auto& c : columns) {
    if (c.cardinality < 1) throw InvalidArgument("cardinality must be at least 1");
    if (c.kind == ColumnSpec::Kind::Zipf && c.cardinality > kMaxZipfCardinality) {
      throw InvalidArgument("Zipf cardinality is limited to " + std::to_string(kMaxZipfCardinality));
    }
    if (c.cardinality > UINT32_MAX) throw InvalidArgument("cardinality too large");
  }
}

std::string value_label(uint64_t rank, uint64_t cardinality) {
  const std::string digits = std::to_string(rank);
  const size_t width = std::to_string(cardinality).size();
  return std::string(width - std::min(width, digits.size()), '0') + digits;
}

ZipfSampler::ZipfSampler(uint64_t cardinality, double s) : cdf_(cardinality) {
  double total = 0;
  for (uint64_t r = 1; r <= cardinality; ++r) {
    total += std::pow(static_cast<double>(r), -s);
    cdf_[r - 1] = total;
  }
  for (double& x : cdf_) x /= total;
  cdf_.back() = 1.0;
}

uint64_t ZipfSampler::sample(double u) const {
  return static_cast<uint64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) + 1;
}

double ZipfSampler::probability(uint64_t rank) const {
  return cdf_[rank - 1] - (rank > 1 ? cdf_[rank - 2] : 0.0);
}

StringRows generate_rows(const GenSpec& spec) {
  StringRows rows;
  rows.reserve(spec.rows);
  generate(spec, [&](std::span<const std::string_view> row) { rows.emplace_back(row.begin(), row.end()); });
  return rows;
}

void generate_file(const GenSpec& spec, const std::string& path) {
  TableWriter w(path, spec.delimiter);
  std::string header = " ewahidx gen rng=" + std::string(Rng::kName) + " seed=" +
                       std::to_string(spec.seed) + " rows=" + std::to_string(spec.rows) + " columns=";
  for (size_t c = 0; c < spec.columns.size(); ++c) {
    if (c > 0) header += ';';
    header += spec.columns[c].name();
  }
  w.comment(header);
  generate(spec, [&](std::span<const std::string_view> row) { w.write_row(row); });
  w.close();
}

}  // namespace ewahidx
