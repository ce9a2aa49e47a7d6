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
#include <span>
#include <string>
#include <vector>

#include "irrev/alphabet.hpp"
#include "irrev/rng.hpp"

namespace irrev {

/// A finite realized symbol sequence, with generation metadata when it was
/// simulated rather than ingested.
struct Trajectory {
  std::vector<Symbol> symbols;
  std::uint64_t seed = 0;
  std::string model_id;  // empty for ingested data

  std::int64_t size() const { return static_cast<std::int64_t>(symbols.size()); }
};

/// Stationary, strictly positive Markov chain of finite order r over a finite
/// alphabet. This is the implemented class of Gibbs processes: the one-sided
/// energy is log p(state -> symbol) with zero pressure by construction, so all
/// cylinder probabilities are exact products with no sandwich slack.
///
/// States are the m^r blocks of the last r symbols, encoded most-significant
/// digit first: state(u_1..u_r) = u_1*m^(r-1) + ... + u_r.
class MarkovModel {
 public:
  /// `transitions` is row-major (m^r rows of m entries). Rows must be strictly
  /// positive and sum to 1 within 1e-12; they are renormalized exactly after
  /// validation.
  MarkovModel(Alphabet alphabet, int order, std::vector<double> transitions);

  const Alphabet& alphabet() const { return alphabet_; }
  int order() const { return order_; }
  int symbol_count() const { return m_; }
  int state_count() const { return n_states_; }

  double transition(int state, Symbol next) const { return trans_[state * m_ + next]; }
  double log_transition(int state, Symbol next) const { return log_trans_[state * m_ + next]; }

  /// pi_r, the unique stationary law of the lifted chain on A^r.
  const std::vector<double>& stationary() const { return stationary_; }
  double log_stationary(int state) const { return log_stationary_[state]; }

  int shift_state(int state, Symbol next) const {
    return (state % pow_m_r1_) * m_ + next;
  }
  /// State with the digit order reversed (u_1..u_r -> u_r..u_1).
  int reverse_state(int state) const { return rev_state_[state]; }
  int state_of(std::span<const Symbol> last_r) const;
  /// Digits of a state, u_1 first.
  Word state_symbols(int state) const;

  /// Distribution of the time-reversed process; again an order-r model whose
  /// stationary law is the coordinate reversal of this one's.
  MarkovModel reversed() const;

  /// Deterministic in (model, length, seed); the initial r-block is drawn
  /// from pi_r. length must be >= r.
  Trajectory simulate(std::int64_t length, std::uint64_t seed) const;

  /// log P([x_1^n]) for n >= r (natural log). Shorter cylinders are
  /// unsupported.
  double cylinder_log_prob(std::span<const Symbol> word) const;

  /// log P([x_1^n]) - log P([x_n^1]), the entropy production of the block.
  double entropy_production(std::span<const Symbol> word) const;

  /// Content hash over (alphabet, order, transitions rounded to 15
  /// significant digits); see kModelHashAlgorithm.
  const std::string& content_hash() const { return content_hash_; }

  /// Exact detailed-balance check on (r+1)-block probabilities.
  bool is_reversible(double tol = 1e-12) const;

  /// Stationary probability of an (r+1)-block given as (state, next symbol).
  double block_prob(int state, Symbol next) const {
    return stationary_[state] * transition(state, next);
  }

 private:
  void validate_and_normalize();
  void compute_stationary();
  void compute_hash();

  Alphabet alphabet_;
  int order_;
  int m_;
  int n_states_;
  int pow_m_r1_;  // m^(r-1)
  std::vector<double> trans_;
  std::vector<double> log_trans_;
  std::vector<double> stationary_;
  std::vector<double> log_stationary_;
  std::vector<int> rev_state_;
  std::string content_hash_;
};

inline constexpr const char* kModelHashAlgorithm = "fnv1a64-sig15";

/// Left fixed point of a row-stochastic matrix: power iteration at 1e-14
/// relative tolerance (cap 1e6 iterations) with a dense linear solve as
/// fallback; the returned vector satisfies |pi P - pi|_1 < 1e-12.
std::vector<double> stationary_distribution(std::span<const double> row_stochastic,
                                            int n_states);

/// Lazily generates a stationary trajectory symbol by symbol, optionally
/// forced to start with a given prefix (the continuation then follows the
/// conditional law). Memory is O(r) regardless of how far the stream runs.
class ModelStream {
 public:
  ModelStream(const MarkovModel& model, std::uint64_t seed);
  ModelStream(const MarkovModel& model, std::uint64_t seed, Word forced_prefix);

  Symbol next();
  std::uint64_t position() const { return position_; }  // symbols emitted so far

 private:
  const MarkovModel* model_;
  Rng rng_;
  Word prefix_;        // pending forced symbols (emitted first)
  std::size_t prefix_pos_ = 0;
  int state_ = -1;     // valid once r symbols are out
  int emitted_of_initial_ = 0;
  Word initial_block_;
  std::uint64_t position_ = 0;
};

}  // namespace irrev
