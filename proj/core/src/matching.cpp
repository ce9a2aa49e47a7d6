// Copyright 2026 The irrev authors.
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

#include "irrev/matching.hpp"

#include <algorithm>

#include "irrev/errors.hpp"

namespace irrev {

namespace {

// Z-array over ints (sentinel-friendly): z[i] = longest common prefix of
// s and s[i..].
std::vector<int> z_array(std::span<const int> s) {
  const int n = static_cast<int>(s.size());
  std::vector<int> z(n, 0);
  if (n == 0) return z;
  z[0] = n;
  int l = 0, r = 0;
  for (int i = 1; i < n; ++i) {
    if (i < r) z[i] = std::min(r - i, z[i - l]);
    while (i + z[i] < n && s[z[i]] == s[i + z[i]]) ++z[i];
    if (i + z[i] > r) {
      l = i;
      r = i + z[i];
    }
  }
  return z;
}

TimeRecord make_found(TimeKind kind, int n, std::uint64_t shift, std::uint64_t cap) {
  return TimeRecord{kind, n, shift, false, cap, shift};
}

TimeRecord make_censored(TimeKind kind, int n, std::uint64_t cap) {
  return TimeRecord{kind, n, cap, true, cap, cap};
}

}  // namespace

std::vector<int> prefix_function(std::span<const Symbol> pattern) {
  const int n = static_cast<int>(pattern.size());
  std::vector<int> pf(n, 0);
  for (int i = 1; i < n; ++i) {
    int k = pf[i - 1];
    while (k > 0 && pattern[i] != pattern[k]) k = pf[k - 1];
    if (pattern[i] == pattern[k]) ++k;
    pf[i] = k;
  }
  return pf;
}

KmpMatcher::KmpMatcher(Word pattern)
    : pattern_(std::move(pattern)),
      prefix_(prefix_function(pattern_)),
      n_(static_cast<int>(pattern_.size())) {
  if (n_ < 1) throw ValidationError("empty pattern");
}

TimeRecord search_pattern(const std::function<Symbol()>& next_symbol, Word pattern,
                          std::uint64_t cap, TimeKind kind) {
  const int n = static_cast<int>(pattern.size());
  KmpMatcher matcher(std::move(pattern));
  // Feeding starts at trajectory position 2; the f-th fed symbol is position
  // f+1, so a match ending there is at shift k = f + 1 - n.
  const std::uint64_t max_fed = cap + static_cast<std::uint64_t>(n) - 1;
  for (std::uint64_t f = 1; f <= max_fed; ++f) {
    if (matcher.feed(next_symbol())) {
      return make_found(kind, n, f + 1 - static_cast<std::uint64_t>(n), cap);
    }
  }
  return make_censored(kind, n, cap);
}

TwoSearchResult search_two_patterns(const std::function<Symbol()>& next_symbol,
                                    Word pattern_a, Word pattern_b, std::uint64_t cap,
                                    TimeKind kind_a, TimeKind kind_b) {
  const int n_a = static_cast<int>(pattern_a.size());
  const int n_b = static_cast<int>(pattern_b.size());
  KmpMatcher ma(std::move(pattern_a));
  KmpMatcher mb(std::move(pattern_b));
  TwoSearchResult out{make_censored(kind_a, n_a, cap), make_censored(kind_b, n_b, cap)};
  bool found_a = false, found_b = false;
  const std::uint64_t max_fed =
      cap + static_cast<std::uint64_t>(std::max(n_a, n_b)) - 1;
  for (std::uint64_t f = 1; f <= max_fed && !(found_a && found_b); ++f) {
    const Symbol c = next_symbol();
    if (!found_a && ma.feed(c) && f >= static_cast<std::uint64_t>(n_a)) {
      const std::uint64_t k = f + 1 - static_cast<std::uint64_t>(n_a);
      if (k <= cap) {
        out.a = make_found(kind_a, n_a, k, cap);
        found_a = true;
      }
    }
    if (!found_b && mb.feed(c) && f >= static_cast<std::uint64_t>(n_b)) {
      const std::uint64_t k = f + 1 - static_cast<std::uint64_t>(n_b);
      if (k <= cap) {
        out.b = make_found(kind_b, n_b, k, cap);
        found_b = true;
      }
    }
  }
  return out;
}

namespace {

// Shared-trajectory search plumbing: clamps the cap to the searchable range
// and adapts the stored symbols to a stream starting at position 2.
struct StoredSource {
  const std::vector<Symbol>* symbols;
  std::size_t pos = 1;  // 0-based index; position 2 in 1-based terms
  Symbol operator()() { return (*symbols)[pos++]; }
};

std::uint64_t clamp_cap(const Trajectory& traj, int n, std::uint64_t cap) {
  if (n < 1) throw ValidationError("word length must be >= 1");
  if (traj.size() < n + 1) {
    throw InputError("trajectory shorter than n+1 symbols");
  }
  const std::uint64_t max_shift = static_cast<std::uint64_t>(traj.size() - n);
  return std::min(cap, max_shift);
}

}  // namespace

TimeRecord hitting_time(const Trajectory& traj, std::span<const Symbol> word,
                        std::uint64_t cap) {
  const int n = static_cast<int>(word.size());
  const std::uint64_t eff = clamp_cap(traj, n, cap);
  StoredSource src{&traj.symbols};
  return search_pattern(std::function<Symbol()>(std::ref(src)),
                        Word(word.begin(), word.end()), eff, TimeKind::Hit);
}

TimeRecord return_time(const Trajectory& traj, int n, std::uint64_t cap) {
  const std::uint64_t eff = clamp_cap(traj, n, cap);
  Word w(traj.symbols.begin(), traj.symbols.begin() + n);
  StoredSource src{&traj.symbols};
  TimeRecord rec = search_pattern(std::function<Symbol()>(std::ref(src)), std::move(w),
                                  eff, TimeKind::Return);
  return rec;
}

TimeRecord reverse_hitting_time(const Trajectory& traj, int n, std::uint64_t cap) {
  const std::uint64_t eff = clamp_cap(traj, n, cap);
  Word w(traj.symbols.rend() - n, traj.symbols.rend());
  // rend()-n .. rend() reverses the first n symbols.
  StoredSource src{&traj.symbols};
  return search_pattern(std::function<Symbol()>(std::ref(src)), std::move(w), eff,
                        TimeKind::Hit);
}

std::pair<TimeRecord, TimeRecord> waiting_times(const Trajectory& word_source,
                                                const Trajectory& target, int n,
                                                std::uint64_t cap) {
  if (word_source.size() < n) {
    throw InputError("word source shorter than n symbols");
  }
  const std::uint64_t eff = clamp_cap(target, n, cap);
  Word fwd(word_source.symbols.begin(), word_source.symbols.begin() + n);
  Word bwd = reversed(fwd);
  StoredSource src{&target.symbols};
  TwoSearchResult r =
      search_two_patterns(std::function<Symbol()>(std::ref(src)), std::move(fwd),
                          std::move(bwd), eff, TimeKind::Waiting, TimeKind::Waiting);
  return {r.a, r.b};
}

PeriodClass word_period(std::span<const Symbol> word) {
  const int n = static_cast<int>(word.size());
  if (n < 1) throw ValidationError("word length must be >= 1");
  const std::vector<int> pf = prefix_function(word);
  return PeriodClass{n, n - pf[n - 1]};
}

MatchingLengths matching_lengths(const Trajectory& traj, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (traj.size() < n) throw InputError("trajectory shorter than n symbols");

  std::vector<int> x(traj.symbols.begin(), traj.symbols.begin() + n);

  MatchingLengths out;

  // L+: a prefix x_1^k reappears iff some Z[i], i >= 2, reaches k.
  {
    const std::vector<int> z = z_array(x);
    int best = 0;
    for (int i = 1; i < n; ++i) best = std::max(best, z[i]);
    out.l_plus = best + 1;
    out.saturated_plus = out.l_plus > n;
    if (out.saturated_plus) out.l_plus = n + 1;
  }

  // L-: occurrences of the reversed prefix x_k^1 in x mirror occurrences of
  // x_1^k in reverse(x); "no second occurrence" means at most one match.
  {
    std::vector<int> combined;
    combined.reserve(2 * n + 1);
    combined.insert(combined.end(), x.begin(), x.end());
    combined.push_back(256);  // sentinel outside the symbol range
    combined.insert(combined.end(), x.rbegin(), x.rend());
    const std::vector<int> z = z_array(combined);
    int best = 0, second = 0;
    for (int j = 0; j < n; ++j) {
      const int v = std::min(z[n + 1 + j], n);
      if (v > best) {
        second = best;
        best = v;
      } else if (v > second) {
        second = v;
      }
    }
    out.l_minus = second + 1;
    out.saturated_minus = out.l_minus > n;
    if (out.saturated_minus) out.l_minus = n + 1;
  }

  return out;
}

}  // namespace irrev
