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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "irrev/alphabet.hpp"
#include "irrev/markov_model.hpp"

namespace irrev {

enum class TimeKind { Hit, Return, Waiting };

/// One observed hitting/return/waiting time, possibly censored at a search
/// cap. An occurrence at shift k means trajectory positions k+1..k+n match
/// the word (theta_k convention); searches consider k = 1..cap.
struct TimeRecord {
  TimeKind kind = TimeKind::Hit;
  int word_len = 0;
  std::uint64_t value = 0;  // shift if found, else the certified cap
  bool censored = false;
  std::uint64_t cap = 0;     // cap in effect (clamped to len - n for stored input)
  std::uint64_t scanned = 0; // shifts examined
};

/// Minimal self-overlap shift of a word; k = n when there is no proper
/// overlap.
struct PeriodClass {
  int n = 0;
  int k = 0;
};

/// KMP prefix automaton; memory O(n), amortized O(1) per fed symbol.
class KmpMatcher {
 public:
  explicit KmpMatcher(Word pattern);

  /// Feeds one symbol; true when an occurrence ends at this position.
  bool feed(Symbol c) {
    int q = state_;
    while (q > 0 && pattern_[q] != c) q = prefix_[q - 1];
    if (pattern_[q] == c) ++q;
    if (q == n_) {
      state_ = prefix_[n_ - 1];
      return true;
    }
    state_ = q;
    return false;
  }

  void reset() { state_ = 0; }
  int length() const { return n_; }

 private:
  Word pattern_;
  std::vector<int> prefix_;
  int n_;
  int state_ = 0;
};

std::vector<int> prefix_function(std::span<const Symbol> pattern);

/// Streams symbols from `source` (called once per trajectory position,
/// starting at position 2) and reports first occurrences of up to two
/// patterns, scanning shifts 1..cap. The source is consumed lazily, so
/// trajectories may be generated on the fly; memory stays O(n).
struct TwoSearchResult {
  TimeRecord a;
  TimeRecord b;
};

TimeRecord search_pattern(const std::function<Symbol()>& next_symbol, Word pattern,
                          std::uint64_t cap, TimeKind kind);
TwoSearchResult search_two_patterns(const std::function<Symbol()>& next_symbol,
                                    Word pattern_a, Word pattern_b, std::uint64_t cap,
                                    TimeKind kind_a, TimeKind kind_b);

/// T_{word}: first shift k >= 1 with trajectory[k+1..k+n] = word.
TimeRecord hitting_time(const Trajectory& traj, std::span<const Symbol> word,
                        std::uint64_t cap);

/// T^+_n: hitting time of the trajectory's own first n symbols.
TimeRecord return_time(const Trajectory& traj, int n, std::uint64_t cap);

/// T^-_n: hitting time of the reversed first n symbols.
TimeRecord reverse_hitting_time(const Trajectory& traj, int n, std::uint64_t cap);

/// (W^+, W^-): both patterns taken from word_source's prefix, searched in
/// target in a single streaming pass.
std::pair<TimeRecord, TimeRecord> waiting_times(const Trajectory& word_source,
                                                const Trajectory& target, int n,
                                                std::uint64_t cap);

PeriodClass word_period(std::span<const Symbol> word);

/// L^+ / L^-: shortest (reversed) prefix with no second occurrence inside
/// x_1^n. `saturated` marks the defensive n+1 result (every prefix
/// reoccurs), which no actual word attains.
struct MatchingLengths {
  int l_plus = 0;
  int l_minus = 0;
  bool saturated_plus = false;
  bool saturated_minus = false;
};

MatchingLengths matching_lengths(const Trajectory& traj, int n);

}  // namespace irrev
