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

#include "irrev/markov_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <numeric>

#include "irrev/errors.hpp"

namespace irrev {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-12;
constexpr double kPowerIterRelTol = 1e-14;
constexpr int kPowerIterCap = 1'000'000;

int checked_state_count(int m, int order) {
  if (order < 1 || order > 4) {
    throw ValidationError("model order must be in 1..4");
  }
  std::int64_t n = 1;
  for (int i = 0; i < order; ++i) {
    n *= m;
    if (n > 256) {
      throw ValidationError("state space m^r exceeds 256");
    }
  }
  return static_cast<int>(n);
}

double l1_residual(std::span<const double> pi, std::span<const double> trans,
                   int n_states, int m) {
  const int pow_r1 = n_states / m;
  std::vector<double> out(n_states, 0.0);
  for (int s = 0; s < n_states; ++s) {
    const double w = pi[s];
    const int base = (s % pow_r1) * m;
    for (int b = 0; b < m; ++b) {
      out[base + b] += w * trans[s * m + b];
    }
  }
  double res = 0.0;
  for (int s = 0; s < n_states; ++s) res += std::abs(out[s] - pi[s]);
  return res;
}

std::vector<double> dense_stationary_solve(std::span<const double> trans,
                                           int n_states, int m) {
  // Solve (P^T - I) x = 0 with the last equation replaced by sum(x) = 1.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_states, n_states);
  const int pow_r1 = n_states / m;
  for (int s = 0; s < n_states; ++s) {
    const int base = (s % pow_r1) * m;
    for (int b = 0; b < m; ++b) {
      a(base + b, s) += trans[s * m + b];
    }
    a(s, s) -= 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_states);
  for (int s = 0; s < n_states; ++s) a(n_states - 1, s) = 1.0;
  rhs(n_states - 1) = 1.0;
  Eigen::VectorXd x = a.fullPivLu().solve(rhs);
  std::vector<double> pi(n_states);
  double sum = 0.0;
  for (int s = 0; s < n_states; ++s) {
    pi[s] = x(s);
    sum += pi[s];
  }
  for (double& v : pi) v /= sum;
  return pi;
}

}  // namespace

std::vector<double> stationary_distribution(std::span<const double> trans,
                                            int n_states) {
  if (n_states < 1 || trans.size() % static_cast<std::size_t>(n_states) != 0) {
    throw ValidationError("transition table shape does not match state count");
  }
  const int m = static_cast<int>(trans.size() / static_cast<std::size_t>(n_states));
  const int pow_r1 = n_states / m;
  if (pow_r1 * m != n_states) {
    throw ValidationError("state count is not a power of the alphabet size");
  }
  for (int s = 0; s < n_states; ++s) {
    double sum = 0.0;
    for (int b = 0; b < m; ++b) {
      const double p = trans[s * m + b];
      if (!(p > 0.0)) {
        throw ValidationError("transition row " + std::to_string(s) +
                              " has a non-positive entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw ValidationError("transition row " + std::to_string(s) +
                            " does not sum to 1");
    }
  }

  std::vector<double> pi(n_states, 1.0 / n_states);
  std::vector<double> next(n_states);
  for (int iter = 0; iter < kPowerIterCap; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n_states; ++s) {
      const double w = pi[s];
      const int base = (s % pow_r1) * m;
      for (int b = 0; b < m; ++b) {
        next[base + b] += w * trans[s * m + b];
      }
    }
    double norm = std::accumulate(next.begin(), next.end(), 0.0);
    double delta = 0.0;
    for (int s = 0; s < n_states; ++s) {
      next[s] /= norm;
      delta += std::abs(next[s] - pi[s]);
    }
    pi.swap(next);
    if (delta < kPowerIterRelTol) break;
  }

  if (l1_residual(pi, trans, n_states, m) >= kStationaryResidualTol) {
    pi = dense_stationary_solve(trans, n_states, m);
    if (l1_residual(pi, trans, n_states, m) >= kStationaryResidualTol) {
      throw NumericError("stationary distribution did not converge");
    }
  }
  return pi;
}

MarkovModel::MarkovModel(Alphabet alphabet, int order, std::vector<double> transitions)
    : alphabet_(std::move(alphabet)),
      order_(order),
      m_(alphabet_.size()),
      n_states_(checked_state_count(alphabet_.size(), order)),
      pow_m_r1_(n_states_ / alphabet_.size()),
      trans_(std::move(transitions)) {
  if (trans_.size() != static_cast<std::size_t>(n_states_) * m_) {
    throw ValidationError("transition table has wrong size");
  }
  validate_and_normalize();
  compute_stationary();

  rev_state_.resize(n_states_);
  for (int s = 0; s < n_states_; ++s) {
    int v = s, rev = 0;
    for (int i = 0; i < order_; ++i) {
      rev = rev * m_ + (v % m_);
      v /= m_;
    }
    rev_state_[s] = rev;
  }

  log_trans_.resize(trans_.size());
  for (std::size_t i = 0; i < trans_.size(); ++i) log_trans_[i] = std::log(trans_[i]);
  log_stationary_.resize(n_states_);
  for (int s = 0; s < n_states_; ++s) log_stationary_[s] = std::log(stationary_[s]);

  compute_hash();
}

void MarkovModel::validate_and_normalize() {
  for (int s = 0; s < n_states_; ++s) {
    double sum = 0.0;
    for (int b = 0; b < m_; ++b) {
      const double p = trans_[s * m_ + b];
      if (!(p > 0.0) || !std::isfinite(p)) {
        throw ValidationError("transition p(" + std::to_string(s) + " -> " +
                              std::to_string(b) + ") must be strictly positive");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw ValidationError("transition row " + std::to_string(s) +
                            " sums to " + std::to_string(sum));
    }
    for (int b = 0; b < m_; ++b) trans_[s * m_ + b] /= sum;
  }
}

void MarkovModel::compute_stationary() {
  stationary_ = stationary_distribution(trans_, n_states_);
}

void MarkovModel::compute_hash() {
  std::string canon;
  for (const auto& t : alphabet_.tokens()) {
    canon += t;
    canon += '\x1f';
  }
  canon += "order=" + std::to_string(order_) + ";";
  char buf[40];
  for (double p : trans_) {
    std::snprintf(buf, sizeof(buf), "%.15g,", p);
    canon += buf;
  }
  std::uint64_t h = fnv1a64(canon);
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  content_hash_ = buf;
}

int MarkovModel::state_of(std::span<const Symbol> last_r) const {
  if (last_r.size() != static_cast<std::size_t>(order_)) {
    throw ValidationError("state_of expects exactly r symbols");
  }
  int s = 0;
  for (Symbol c : last_r) {
    if (c >= m_) throw ValidationError("symbol index out of range");
    s = s * m_ + c;
  }
  return s;
}

Word MarkovModel::state_symbols(int state) const {
  Word w(order_);
  for (int i = order_ - 1; i >= 0; --i) {
    w[i] = static_cast<Symbol>(state % m_);
    state /= m_;
  }
  return w;
}

MarkovModel MarkovModel::reversed() const {
  // p^R(u -> b) = pi(rev(shift(u, b))) * p(rev(shift(u, b)) -> u_1) / pi(rev(u)).
  std::vector<double> rev_trans(trans_.size());
  for (int u = 0; u < n_states_; ++u) {
    const Symbol u1 = static_cast<Symbol>(u / pow_m_r1_);
    for (int b = 0; b < m_; ++b) {
      const int v = shift_state(u, static_cast<Symbol>(b));
      const int rv = rev_state_[v];
      rev_trans[u * m_ + b] =
          stationary_[rv] * transition(rv, u1) / stationary_[rev_state_[u]];
    }
  }
  return MarkovModel(alphabet_, order_, std::move(rev_trans));
}

Trajectory MarkovModel::simulate(std::int64_t length, std::uint64_t seed) const {
  if (length < order_) {
    throw ValidationError("trajectory length must be at least the model order");
  }
  Trajectory traj;
  traj.seed = seed;
  traj.model_id = content_hash_;
  traj.symbols.reserve(static_cast<std::size_t>(length));

  ModelStream stream(*this, seed);
  for (std::int64_t i = 0; i < length; ++i) traj.symbols.push_back(stream.next());
  return traj;
}

double MarkovModel::cylinder_log_prob(std::span<const Symbol> word) const {
  const int n = static_cast<int>(word.size());
  if (n < order_) {
    throw ValidationError("cylinder shorter than the model order is unsupported");
  }
  for (Symbol c : word) {
    if (c >= m_) throw ValidationError("symbol index out of range");
  }
  int s = state_of(word.subspan(0, order_));
  double lp = log_stationary_[s];
  for (int i = order_; i < n; ++i) {
    lp += log_trans_[s * m_ + word[i]];
    s = shift_state(s, word[i]);
  }
  return lp;
}

double MarkovModel::entropy_production(std::span<const Symbol> word) const {
  const Word rev = irrev::reversed(word);
  return cylinder_log_prob(word) - cylinder_log_prob(rev);
}

bool MarkovModel::is_reversible(double tol) const {
  for (int s = 0; s < n_states_; ++s) {
    for (int b = 0; b < m_; ++b) {
      // mu(w) vs mu(rev w) on (r+1)-blocks w = u.b; rev w has state rev(shift)
      // and next symbol u_1.
      const int v = shift_state(s, static_cast<Symbol>(b));
      const int rv = rev_state_[v];
      const Symbol u1 = static_cast<Symbol>(s / pow_m_r1_);
      const double fwd = block_prob(s, static_cast<Symbol>(b));
      const double bwd = block_prob(rv, u1);
      if (std::abs(std::log(fwd) - std::log(bwd)) > tol) return false;
    }
  }
  return true;
}

ModelStream::ModelStream(const MarkovModel& model, std::uint64_t seed)
    : model_(&model), rng_(seed) {
  const auto& pi = model.stationary();
  const int s0 = rng_.next_categorical(pi);
  initial_block_ = model.state_symbols(s0);
  state_ = s0;
}

ModelStream::ModelStream(const MarkovModel& model, std::uint64_t seed, Word forced_prefix)
    : model_(&model), rng_(seed), prefix_(std::move(forced_prefix)) {
  if (prefix_.size() < static_cast<std::size_t>(model.order())) {
    throw ValidationError("forced prefix must cover at least r symbols");
  }
  for (Symbol c : prefix_) {
    if (c >= model.symbol_count()) throw ValidationError("symbol index out of range");
  }
  state_ = model.state_of(
      std::span<const Symbol>(prefix_).subspan(prefix_.size() - model.order()));
  emitted_of_initial_ = -1;  // prefix mode
}

Symbol ModelStream::next() {
  ++position_;
  if (emitted_of_initial_ == -1) {
    if (prefix_pos_ < prefix_.size()) return prefix_[prefix_pos_++];
  } else if (emitted_of_initial_ < model_->order()) {
    return initial_block_[emitted_of_initial_++];
  }
  const int m = model_->symbol_count();
  const double u = rng_.next_unit();
  double acc = 0.0;
  Symbol sym = static_cast<Symbol>(m - 1);
  for (int b = 0; b < m - 1; ++b) {
    acc += model_->transition(state_, static_cast<Symbol>(b));
    if (u < acc) {
      sym = static_cast<Symbol>(b);
      break;
    }
  }
  state_ = model_->shift_state(state_, sym);
  return sym;
}

}  // namespace irrev
