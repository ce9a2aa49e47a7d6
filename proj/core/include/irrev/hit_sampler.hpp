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
#include <optional>
#include <vector>

#include "irrev/markov_model.hpp"

namespace irrev {

/// Nonnegative extended-range value mant * 2^(600 * exp2); keeps
/// absorbing-chain masses representable far below the double range
/// (cylinder probabilities reach e^-1200 and beyond at large n).
struct ExtReal {
  double mant = 0.0;
  int exp2 = 0;  // in units of 2^600

  static ExtReal from(double v);
  void canonicalize();
  bool zero() const { return mant == 0.0; }
};

ExtReal ext_add(ExtReal a, ExtReal b);
ExtReal ext_mul(ExtReal a, double p);
ExtReal ext_div(ExtReal a, ExtReal b);
double ext_to_double(ExtReal a);  // underflows to 0 / overflows to +inf
double ext_log(ExtReal a);

/// Exact sampler for the joint law of the first occurrences of one or two
/// equal-length patterns in a stationary stream of the model (shift
/// convention: occurrence at k means positions k+1..k+n match).
///
/// The law is computed by stepping the distribution of the absorbing
/// pattern-automaton x chain-memory product chain; once the conditional
/// absorption hazard stabilizes (quasi-stationary regime, detected at
/// relative 3e-14), the remaining tail is geometric to double precision and
/// is sampled in closed form. Times are therefore drawn from the exact
/// distribution even when they are far beyond any feasible scan
/// (e.g. e^1000), and are reported in log scale.
///
/// With a conditioning prefix (return-time mode) the stream is forced to
/// begin with the pattern source block and the automaton is warmed up on it;
/// the two patterns then race on the conditional continuation, which
/// reproduces the internal-periodicity floor exactly.
class PatternHitSampler {
 public:
  struct Draw {
    double ta = 0.0;      // shift of pattern A as a double; +inf when beyond 2^53
    double log_ta = 0.0;  // natural log of the shift (always finite)
    double tb = 0.0;
    double log_tb = 0.0;
  };

  /// Waiting-time mode: both patterns searched in an independent stationary
  /// stream. Patterns must have equal length n >= model order.
  PatternHitSampler(const MarkovModel& model, Word pattern_a, Word pattern_b);

  /// Return-time mode: the stream is conditioned to start with `prefix`
  /// (length == pattern length); searching starts at shift 1.
  PatternHitSampler(const MarkovModel& model, Word pattern_a, Word pattern_b,
                    Word prefix);

  Draw sample(std::uint64_t seed);

  /// Exact CDF of the first hit of either pattern at (real-valued) shift t;
  /// test hook.
  double first_hit_cdf(double t);

  /// Exact expectation of the first hit (finite-double regimes only).
  double expected_first_hit();

 private:
  struct Scan {
    std::vector<double> cdf;      // cdf[t-1] = P(scan-step absorption <= t)
    std::vector<double> split_a;  // P(pattern A | absorbed at step t)
    int t0 = 0;
    double ln_surv_t0 = 0.0;
    ExtReal haz_inf;              // per-step hazard at quasi-stationarity
    ExtReal neg_ln_lambda;        // -ln(1 - hazard)
    double split_a_inf = 0.0;
    double expected_steps = 0.0;  // sum of survival probabilities (may be +inf)
  };

  struct StepDraw {
    double steps;      // scan steps, exact integer when representable
    double log_steps;
    bool is_a;
  };

  void build(const MarkovModel& model, Word pattern_a, Word pattern_b,
             std::optional<Word> prefix);
  Scan run_scan(std::vector<ExtReal> init, unsigned mask) const;
  StepDraw draw_from(const Scan& scan, Rng& rng) const;
  const Scan& phase2(bool first_was_a);
  std::vector<ExtReal> point_init(int state) const;

  const MarkovModel* model_ = nullptr;
  int n_ = 0;            // pattern length
  int shift_offset_ = 0; // scan step t corresponds to shift t - shift_offset_
  bool single_ = false;  // pattern_a == pattern_b
  int m_ = 0;

  // automaton x memory product
  int n_states_ = 0;
  std::vector<int> tgt_;            // state*m + c -> state
  std::vector<double> prob_;        // transition probability per edge
  std::vector<unsigned char> abs_;  // completion bits of the edge (1 = A, 2 = B)
  int terminal_state_a_ = -1;
  int terminal_state_b_ = -1;
  std::vector<ExtReal> init_;

  Scan scan1_;
  std::optional<Scan> scan_after_a_;
  std::optional<Scan> scan_after_b_;
};

}  // namespace irrev
