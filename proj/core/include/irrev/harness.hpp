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
#include <string>
#include <utility>
#include <vector>

#include "irrev/estimators.hpp"
#include "irrev/markov_model.hpp"

namespace irrev {

/// How validation suites obtain estimator samples.
///
/// Stream: honest position-by-position search with a cap (the only mode that
/// exercises the matcher itself; hitting times grow like e^(n h), so it is
/// feasible only for short words or low-entropy models).
///
/// Spectral: draws (T+, T-) / (W+, W-) jointly from their exact law via the
/// absorbing-automaton sampler; feasible at any n and never censored.
enum class SamplerMode { Stream, Spectral };

enum class EstimatorChoice { H, W };

struct SuiteConfig {
  const MarkovModel* model = nullptr;
  std::vector<int> n_values;
  int trials = 100;
  std::uint64_t base_seed = 1;
  std::uint64_t cap = kDefaultCap;
  SamplerMode sampler = SamplerMode::Stream;
  EstimatorChoice estimator = EstimatorChoice::W;
  bool conditional_return = false;  // exponential suite: condition on [a]
  int threads = 0;                  // 0 = hardware concurrency

  // Statistical acceptance knobs (recorded defaults; not paper content).
  double ks_threshold = 0.04;        // exponential law
  double clt_ks_threshold = 0.06;
  double clt_var_rel_tol = 0.15;
  double se_multiplier = 3.0;
  double censor_fail_fraction = 0.01;
  double ldp_abs_tol = 0.01;
  double ldp_tail_tol = 0.05;

  std::string raw_csv_path;  // optional per-trial dump (suite,n,trial,value)
};

struct SuiteRow {
  int n = 0;
  std::vector<std::pair<std::string, double>> stats;
  bool pass = true;

  double stat(const std::string& name) const;
};

struct SuiteReport {
  std::string suite;
  SuiteConfig config;   // effective values (model echoed via model_id)
  std::string model_id;
  std::vector<SuiteRow> rows;
  std::vector<std::pair<std::string, double>> aux;  // suite-level diagnostics
  int censored_dropped = 0;
  bool pass = true;
  double wall_seconds = 0.0;  // excluded from the reproducibility contract
};

/// Key-lemma check: rescaled hitting (or conditional return) times of the
/// word's prefixes, fitted exponential rate by mean-inverse, KS distance and
/// the periodicity floor. Always runs in stream mode.
SuiteReport exponential_law_suite(const SuiteConfig& config, const Word& word);

/// Almost-sure approximation check: per-symbol estimates against the oracle
/// MEP and the 99th percentile of |estimate - exact|/log n across n.
SuiteReport consistency_suite(const SuiteConfig& config);

/// Central-limit check: estimates standardized by (n MEP, sqrt(n sigma^2))
/// against the standard normal; refuses reversible models.
SuiteReport clt_suite(const SuiteConfig& config);

/// Large-deviation check: empirical scaled-cumulant generating function of
/// the waiting-time estimator against the spectral SCGF on a p-grid, plus a
/// tail-frequency row against the rate function.
SuiteReport ldp_suite(const SuiteConfig& config, std::span<const double> p_grid);

struct SuiteSpec {
  std::string kind;  // exponential | consistency | clt | ldp
  SuiteConfig config;
  Word word;                   // exponential only
  std::vector<double> p_grid;  // ldp only
};

std::vector<SuiteReport> run_all(std::span<const SuiteSpec> specs);

/// One estimator draw as used by the suites; exposed for tests and the sign
/// test at scale.
struct EstimatorSample {
  double raw = 0.0;        // log ratio
  double exact = 0.0;      // exact block entropy production of the word
  bool censored = false;   // stream mode only
  bool indeterminate = false;
};

EstimatorSample sample_estimator(const MarkovModel& model, int n,
                                 EstimatorChoice which, SamplerMode mode,
                                 std::uint64_t cap, std::uint64_t word_seed,
                                 std::uint64_t search_seed);

/// Distributes fn(0..count-1) over a worker pool; results must be written
/// into per-index slots so aggregation stays order-independent.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace irrev
