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

#include "ewahidx/codec.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ewahidx/error.hpp"
#include "ewahidx/rng.hpp"

namespace ewahidx {
namespace {

// Walks the codes in ascending Gray-code order: level 0 runs downward, level
// 1 upward, and so on alternately. This is the reverse of the enumeration in
// which a_1 ascends, a_2 descends, ... (that one yields descending order).
class GcWalker {
 public:
  GcWalker(uint32_t k, uint32_t N, uint64_t limit, std::vector<Code>& out)
      : k_(k), N_(N), limit_(limit), out_(out), code_(k) {}

  void run() { level(0); }

 private:
  bool level(uint32_t i) {
    if (i == k_) {
      out_.push_back(code_);
      return out_.size() < limit_;
    }
    const uint32_t lo = i == 0 ? 1 : code_[i - 1] + 1;
    const uint32_t hi = N_ - k_ + i + 1;
    if (i % 2 == 0) {
      for (uint32_t v = hi; v >= lo; --v) {
        code_[i] = v;
        if (!level(i + 1)) return false;
      }
    } else {
      for (uint32_t v = lo; v <= hi; ++v) {
        code_[i] = v;
        if (!level(i + 1)) return false;
      }
    }
    return true;
  }

  uint32_t k_;
  uint32_t N_;
  uint64_t limit_;
  std::vector<Code>& out_;
  Code code_;
};

void check_kn(uint32_t k, uint32_t N) {
  if (k < 1 || k > N) {
    throw InvalidArgument("invalid k-of-N parameters k=" + std::to_string(k) +
                          " N=" + std::to_string(N));
  }
}

}  // namespace

uint64_t binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<uint64_t>::max()) {
      return std::numeric_limits<uint64_t>::max();
    }
  }
  return static_cast<uint64_t>(r);
}

uint32_t min_N(uint32_t k, uint64_t n) {
  if (k < 1 || n < 1) throw InvalidArgument("min_N needs k >= 1 and n >= 1");
  if (k == 1) {
    if (n > std::numeric_limits<uint32_t>::max()) {
      throw InvalidArgument("cardinality too large for a 1-of-N code");
    }
    return static_cast<uint32_t>(n);
  }
  uint32_t N = k;
  while (binomial(N, k) < n) ++N;
  return N;
}

uint32_t effective_k(uint32_t requested, uint64_t n) {
  if (requested < 1) throw InvalidArgument("k must be at least 1");
  if (n < 5) return 1;
  if (n < 21) return std::min<uint32_t>(requested, 2);
  if (n < 85) return std::min<uint32_t>(requested, 3);
  return requested;
}

std::vector<Code> enumerate_gc_prefix(uint32_t k, uint32_t N, uint64_t limit) {
  check_kn(k, N);
  std::vector<Code> out;
  if (limit == 0) return out;
  out.reserve(static_cast<size_t>(std::min(limit, binomial(N, k))));
  GcWalker(k, N, limit, out).run();
  return out;
}

std::vector<Code> enumerate_gc(uint32_t k, uint32_t N) {
  return enumerate_gc_prefix(k, N, std::numeric_limits<uint64_t>::max());
}

std::vector<Code> enumerate_lex(uint32_t k, uint32_t N) {
  check_kn(k, N);
  std::vector<Code> out;
  out.reserve(static_cast<size_t>(binomial(N, k)));
  Code c(k);
  std::iota(c.begin(), c.end(), 1u);
  for (;;) {
    out.push_back(c);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && c[i] == N - k + static_cast<uint32_t>(i) + 1) --i;
    if (i < 0) break;
    ++c[i];
    for (uint32_t j = static_cast<uint32_t>(i) + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

bool gc_less(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  bool f = true;
  const size_t m = std::min(a.size(), b.size());
  for (size_t p = 0; p < m; ++p) {
    if (a[p] > b[p]) return f;
    if (a[p] < b[p]) return !f;
    f = !f;
  }
  if (a.size() > b.size()) return !f;
  if (b.size() > a.size()) return f;
  return false;
}

std::string code_to_string(const Code& code, uint32_t N) {
  std::string s(N, '0');
  for (uint32_t p : code) s[p - 1] = '1';
  return s;
}

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::BinaryLex: return "binary-lex";
    case Scheme::GrayLex: return "gray-lex";
    case Scheme::AltGrayLex: return "alt-gray-lex";
    case Scheme::RandLex: return "rand-lex";
    case Scheme::GrayFrequency: return "gray-freq";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::BinaryLex, Scheme::GrayLex, Scheme::AltGrayLex,
                   Scheme::RandLex, Scheme::GrayFrequency}) {
    if (scheme_name(s) == name) return s;
  }
  throw InvalidArgument("unknown allocation scheme '" + std::string(name) + "'");
}

std::vector<std::vector<uint32_t>> CodeAllocation::ranks_by_bitmap() const {
  std::vector<std::vector<uint32_t>> out(N);
  for (size_t r = 0; r < codes.size(); ++r) {
    for (uint32_t p : codes[r]) out[p - 1].push_back(static_cast<uint32_t>(r));
  }
  return out;
}

CodeAllocation allocate(Scheme scheme, uint32_t k, uint32_t N,
                        std::span<const uint64_t> frequencies,
                        const AllocateOptions& options) {
  check_kn(k, N);
  const uint64_t n = frequencies.size();
  if (binomial(N, k) < n) {
    throw InvalidArgument(std::to_string(n) + " values exceed the capacity of " +
                          std::to_string(k) + "-of-" + std::to_string(N) + " codes");
  }
  CodeAllocation a;
  a.k = k;
  a.N = N;
  a.scheme = scheme;
  a.seed = options.seed;
  switch (scheme) {
    case Scheme::BinaryLex: {
      std::vector<Code> lex = enumerate_lex(k, N);
      a.codes.assign(lex.rbegin(), lex.rbegin() + static_cast<ptrdiff_t>(n));
      break;
    }
    case Scheme::GrayLex:
      a.codes = enumerate_gc_prefix(k, N, n);
      break;
    case Scheme::AltGrayLex:
      a.codes = enumerate_gc_prefix(k, N, n);
      if (options.preceding_k_sum % 2 == 1) std::reverse(a.codes.begin(), a.codes.end());
      break;
    case Scheme::RandLex: {
      a.codes = enumerate_gc_prefix(k, N, n);
      Rng rng(options.seed);
      rng.shuffle(std::span<Code>(a.codes));
      break;
    }
    case Scheme::GrayFrequency: {
      std::vector<Code> gc = enumerate_gc_prefix(k, N, n);
      std::vector<uint32_t> order(n);
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
        return frequencies[x] > frequencies[y];
      });
      a.codes.resize(n);
      for (size_t i = 0; i < n; ++i) a.codes[order[i]] = std::move(gc[i]);
      break;
    }
  }
  return a;
}

MulticomponentCount multicomponent_bitmap_count(std::span<const uint64_t> factors) {
  MulticomponentCount c;
  c.capacity = 1;
  for (uint64_t q : factors) {
    if (q < 2) throw InvalidArgument("multi-component factors must exceed 1");
    c.bitmaps += q;
    c.capacity *= q;
  }
  return c;
}

}  // namespace ewahidx
