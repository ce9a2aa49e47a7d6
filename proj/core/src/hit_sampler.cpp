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

#include "irrev/hit_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "irrev/errors.hpp"
#include "irrev/stats.hpp"

namespace irrev {

namespace {

constexpr double kBlock = 0x1p600;
constexpr double kBlockInv = 0x1p-600;
constexpr double kLnBlock = 600.0 * 0.69314718055994530942;
constexpr int kStabilityWindow = 64;
constexpr double kHazardStabilityRel = 3e-14;
constexpr double kSplitStabilityAbs = 1e-12;

// Aho-Corasick automaton over one or two patterns.
struct Automaton {
  int m = 0;
  std::vector<int> next;           // node*m + c
  std::vector<unsigned char> out;  // completion bits per node
  int terminal_a = 0;
  int terminal_b = 0;
  int node_count = 0;
};

Automaton build_automaton(const Word& a, const Word& b, int m) {
  Automaton ac;
  ac.m = m;
  std::vector<std::vector<int>> children(1, std::vector<int>(m, -1));
  std::vector<unsigned char> own(1, 0);

  const auto insert = [&](const Word& w, unsigned char bit) {
    int node = 0;
    for (Symbol c : w) {
      if (children[node][c] < 0) {
        children[node][c] = static_cast<int>(children.size());
        children.push_back(std::vector<int>(m, -1));
        own.push_back(0);
      }
      node = children[node][c];
    }
    own[node] |= bit;
    return node;
  };
  ac.terminal_a = insert(a, 1);
  ac.terminal_b = insert(b, 2);

  const int nodes = static_cast<int>(children.size());
  ac.node_count = nodes;
  ac.next.assign(static_cast<std::size_t>(nodes) * m, 0);
  ac.out = own;
  std::vector<int> fail(nodes, 0);
  std::queue<int> bfs;
  for (int c = 0; c < m; ++c) {
    const int child = children[0][c];
    if (child >= 0) {
      fail[child] = 0;
      ac.next[c] = child;
      bfs.push(child);
    }
  }
  while (!bfs.empty()) {
    const int node = bfs.front();
    bfs.pop();
    ac.out[node] |= ac.out[fail[node]];
    for (int c = 0; c < m; ++c) {
      const int child = children[node][c];
      const int via_fail = ac.next[static_cast<std::size_t>(fail[node]) * m + c];
      if (child >= 0) {
        fail[child] = via_fail;
        ac.next[static_cast<std::size_t>(node) * m + c] = child;
        bfs.push(child);
      } else {
        ac.next[static_cast<std::size_t>(node) * m + c] = via_fail;
      }
    }
  }
  return ac;
}

}  // namespace

ExtReal ExtReal::from(double v) {
  ExtReal x{v, 0};
  x.canonicalize();
  return x;
}

void ExtReal::canonicalize() {
  if (mant == 0.0) {
    exp2 = 0;
    return;
  }
  while (mant >= kBlock) {
    mant *= kBlockInv;
    ++exp2;
  }
  while (mant < 1.0) {
    mant *= kBlock;
    --exp2;
  }
}

ExtReal ext_add(ExtReal a, ExtReal b) {
  if (a.zero()) return b;
  if (b.zero()) return a;
  if (a.exp2 < b.exp2) std::swap(a, b);
  const int d = a.exp2 - b.exp2;
  if (d == 0) {
    ExtReal r{a.mant + b.mant, a.exp2};
    r.canonicalize();
    return r;
  }
  if (d == 1) {
    ExtReal r{a.mant + b.mant * kBlockInv, a.exp2};
    r.canonicalize();
    return r;
  }
  return a;  // relative contribution below 2^-600
}

ExtReal ext_mul(ExtReal a, double p) {
  if (a.zero() || p == 0.0) return ExtReal{};
  ExtReal r{a.mant * p, a.exp2};
  r.canonicalize();
  return r;
}

ExtReal ext_div(ExtReal a, ExtReal b) {
  if (a.zero()) return ExtReal{};
  ExtReal r{a.mant / b.mant, a.exp2 - b.exp2};
  r.canonicalize();
  return r;
}

double ext_to_double(ExtReal a) {
  if (a.zero()) return 0.0;
  if (a.exp2 == 0) return a.mant;
  if (a.exp2 < 0) {
    return a.exp2 < -2 ? 0.0 : a.mant * std::pow(kBlockInv, -a.exp2);
  }
  return a.exp2 > 2 ? std::numeric_limits<double>::infinity()
                    : a.mant * std::pow(kBlock, a.exp2);
}

double ext_log(ExtReal a) {
  if (a.zero()) return -std::numeric_limits<double>::infinity();
  return std::log(a.mant) + a.exp2 * kLnBlock;
}

PatternHitSampler::PatternHitSampler(const MarkovModel& model, Word pattern_a,
                                     Word pattern_b) {
  build(model, std::move(pattern_a), std::move(pattern_b), std::nullopt);
}

PatternHitSampler::PatternHitSampler(const MarkovModel& model, Word pattern_a,
                                     Word pattern_b, Word prefix) {
  build(model, std::move(pattern_a), std::move(pattern_b), std::move(prefix));
}

void PatternHitSampler::build(const MarkovModel& model, Word pattern_a, Word pattern_b,
                              std::optional<Word> prefix) {
  model_ = &model;
  m_ = model.symbol_count();
  n_ = static_cast<int>(pattern_a.size());
  if (pattern_b.size() != pattern_a.size()) {
    throw ValidationError("hit sampler expects equal-length patterns");
  }
  if (n_ < model.order()) {
    throw ValidationError("hit sampler needs pattern length >= model order");
  }
  for (Symbol c : pattern_a) {
    if (c >= m_) throw ValidationError("pattern symbol out of range");
  }
  for (Symbol c : pattern_b) {
    if (c >= m_) throw ValidationError("pattern symbol out of range");
  }
  single_ = (pattern_a == pattern_b);

  const Automaton ac = build_automaton(pattern_a, pattern_b, m_);
  const int r = model.order();
  const int mem_count = model.state_count();

  // Compact reachable (node, memory) product states; for depth >= r the
  // memory is a function of the node, so the product stays near |nodes|.
  std::vector<int> id(static_cast<std::size_t>(ac.node_count) * mem_count, -1);
  std::vector<int> node_of, mem_of;
  const auto intern = [&](int node, int mem) {
    const std::size_t key = static_cast<std::size_t>(node) * mem_count + mem;
    if (id[key] < 0) {
      id[key] = static_cast<int>(node_of.size());
      node_of.push_back(node);
      mem_of.push_back(mem);
    }
    return id[key];
  };

  std::vector<std::pair<int, double>> init_weights;
  int prefix_fed = 0;
  if (prefix.has_value()) {
    const Word& pre = *prefix;
    if (static_cast<int>(pre.size()) != n_) {
      throw ValidationError("conditioning prefix must have the pattern length");
    }
    int node = 0;
    for (std::size_t i = 1; i < pre.size(); ++i) {
      node = ac.next[static_cast<std::size_t>(node) * m_ + pre[i]];
    }
    prefix_fed = n_ - 1;
    const int mem = model.state_of(
        std::span<const Symbol>(pre).subspan(pre.size() - static_cast<std::size_t>(r)));
    init_weights.emplace_back(intern(node, mem), 1.0);
  } else {
    for (int mem = 0; mem < mem_count; ++mem) {
      init_weights.emplace_back(intern(0, mem), model.stationary()[mem]);
    }
  }
  shift_offset_ = n_ - 1 - prefix_fed;

  // BFS over reachable states, freezing edge tables as ids are assigned.
  tgt_.clear();
  prob_.clear();
  abs_.clear();
  for (std::size_t s = 0; s < node_of.size(); ++s) {
    const int node = node_of[s];
    const int mem = mem_of[s];
    for (int c = 0; c < m_; ++c) {
      const int nn = ac.next[static_cast<std::size_t>(node) * m_ + c];
      const int nm = model.shift_state(mem, static_cast<Symbol>(c));
      const int t = intern(nn, nm);
      tgt_.push_back(t);
      prob_.push_back(model.transition(mem, static_cast<Symbol>(c)));
      abs_.push_back(ac.out[nn]);
    }
  }
  n_states_ = static_cast<int>(node_of.size());

  // Post-completion states: the automaton sits at the pattern's terminal
  // node with memory equal to its last r symbols.
  terminal_state_a_ = intern(
      ac.terminal_a,
      model.state_of(std::span<const Symbol>(pattern_a)
                         .subspan(pattern_a.size() - static_cast<std::size_t>(r))));
  terminal_state_b_ = intern(
      ac.terminal_b,
      model.state_of(std::span<const Symbol>(pattern_b)
                         .subspan(pattern_b.size() - static_cast<std::size_t>(r))));
  if (static_cast<int>(node_of.size()) != n_states_) {
    // Terminal states are always reachable through their own patterns; a
    // growth here means the BFS missed them.
    throw NumericError("hit sampler state enumeration is inconsistent");
  }

  init_.assign(n_states_, ExtReal{});
  for (const auto& [s, w] : init_weights) {
    init_[s] = ext_add(init_[s], ExtReal::from(w));
  }

  scan1_ = run_scan(init_, single_ ? 1u : 3u);
}

PatternHitSampler::Scan PatternHitSampler::run_scan(std::vector<ExtReal> v,
                                                    unsigned mask) const {
  Scan scan;
  std::vector<ExtReal> w(v.size());
  const int max_steps = 60 * n_ + 50000;
  scan.cdf.reserve(1024);
  scan.split_a.reserve(1024);

  double ln_surv = 0.0;
  double surv = 1.0;
  double cdf_acc = 0.0;
  double expected = 0.0;

  std::vector<ExtReal> haz_hist;
  std::vector<double> split_hist;
  haz_hist.reserve(max_steps + 1);
  split_hist.reserve(max_steps + 1);

  for (int t = 1; t <= max_steps; ++t) {
    std::fill(w.begin(), w.end(), ExtReal{});
    ExtReal haz_a, haz_b, live;
    for (int s = 0; s < n_states_; ++s) {
      if (v[s].zero()) continue;
      const std::size_t base = static_cast<std::size_t>(s) * m_;
      for (int c = 0; c < m_; ++c) {
        const ExtReal contrib = ext_mul(v[s], prob_[base + c]);
        const unsigned bits = abs_[base + c] & mask;
        if (bits & 1u) {
          haz_a = ext_add(haz_a, contrib);
        } else if (bits & 2u) {
          haz_b = ext_add(haz_b, contrib);
        } else {
          w[tgt_[base + c]] = ext_add(w[tgt_[base + c]], contrib);
        }
      }
    }
    for (const ExtReal& x : w) live = ext_add(live, x);
    const ExtReal haz = ext_add(haz_a, haz_b);
    const ExtReal denom = ext_add(live, haz);
    if (denom.zero()) throw NumericError("hit sampler lost all probability mass");

    const ExtReal haz_frac = haz.zero() ? ExtReal{} : ext_div(haz, denom);
    const double haz_d = ext_to_double(haz_frac);
    const double split =
        haz.zero() ? 0.0 : ext_to_double(ext_div(haz_a, haz));

    expected += surv;
    cdf_acc += surv * haz_d;
    scan.cdf.push_back(cdf_acc);
    scan.split_a.push_back(split);

    ln_surv += std::log1p(-haz_d);
    surv *= (1.0 - haz_d);

    haz_hist.push_back(haz_frac);
    split_hist.push_back(split);

    if (live.zero()) {
      // Everything absorbed within the explicit prefix.
      scan.t0 = t;
      scan.ln_surv_t0 = -std::numeric_limits<double>::infinity();
      scan.haz_inf = ExtReal::from(1.0);
      scan.neg_ln_lambda = ExtReal::from(1.0);
      scan.split_a_inf = split;
      scan.expected_steps = expected;
      return scan;
    }

    // Renormalize the surviving distribution.
    for (int s = 0; s < n_states_; ++s) {
      if (!w[s].zero()) w[s] = ext_div(w[s], live);
    }
    v.swap(w);

    // Quasi-stationarity: hazard and split stable across the window.
    if (t >= n_ + kStabilityWindow) {
      bool stable = !haz_frac.zero();
      for (int j = 1; j < kStabilityWindow && stable; ++j) {
        const ExtReal& h0 = haz_hist[t - 1];
        const ExtReal& hj = haz_hist[t - 1 - j];
        if (hj.zero() || hj.exp2 != h0.exp2 ||
            std::abs(hj.mant / h0.mant - 1.0) > kHazardStabilityRel ||
            std::abs(split_hist[t - 1 - j] - split_hist[t - 1]) > kSplitStabilityAbs) {
          stable = false;
        }
      }
      if (stable) {
        scan.t0 = t;
        scan.ln_surv_t0 = ln_surv;
        scan.haz_inf = haz_frac;
        const double hd = ext_to_double(haz_frac);
        scan.neg_ln_lambda =
            hd > 1e-12 ? ExtReal::from(-std::log1p(-hd)) : haz_frac;
        scan.split_a_inf = split;
        // Geometric tail of the expected value; may overflow to +inf.
        scan.expected_steps =
            expected + std::exp(ln_surv - ext_log(haz_frac));
        return scan;
      }
    }
  }
  throw NumericError("hit sampler hazard did not stabilize");
}

PatternHitSampler::StepDraw PatternHitSampler::draw_from(const Scan& scan,
                                                         Rng& rng) const {
  StepDraw out{};
  const double u = rng.next_unit();
  const double u_split = rng.next_unit();
  if (!scan.cdf.empty() && u < scan.cdf.back()) {
    const auto it = std::upper_bound(scan.cdf.begin(), scan.cdf.end(), u);
    const int t = static_cast<int>(it - scan.cdf.begin()) + 1;
    out.steps = static_cast<double>(t);
    out.log_steps = std::log(out.steps);
    out.is_a = u_split < scan.split_a[t - 1];
    return out;
  }
  // Geometric tail: smallest k >= 1 with S(t0) lambda^k < 1 - u.
  const double num = std::max(0.0, scan.ln_surv_t0 - std::log1p(-u));
  const double log_k = num > 0.0
                           ? std::log(num) - ext_log(scan.neg_ln_lambda)
                           : -std::numeric_limits<double>::infinity();
  const double t0 = static_cast<double>(scan.t0);
  if (log_k < 36.0) {  // k fits comfortably in exact double integers
    const double k = std::max(1.0, std::ceil(std::exp(log_k)));
    out.steps = t0 + k;
    out.log_steps = std::log(out.steps);
  } else {
    out.steps = std::numeric_limits<double>::infinity();
    out.log_steps = log_add_exp(std::log(t0), log_k);
    if (out.log_steps < 36.0) {
      out.steps = std::ceil(std::exp(out.log_steps));
    }
  }
  out.is_a = u_split < scan.split_a_inf;
  return out;
}

const PatternHitSampler::Scan& PatternHitSampler::phase2(bool first_was_a) {
  if (first_was_a) {
    if (!scan_after_a_.has_value()) {
      scan_after_a_ = run_scan(point_init(terminal_state_a_), 2u);
    }
    return *scan_after_a_;
  }
  if (!scan_after_b_.has_value()) {
    scan_after_b_ = run_scan(point_init(terminal_state_b_), 1u);
  }
  return *scan_after_b_;
}

std::vector<ExtReal> PatternHitSampler::point_init(int state) const {
  std::vector<ExtReal> v(n_states_, ExtReal{});
  v[state] = ExtReal::from(1.0);
  return v;
}

PatternHitSampler::Draw PatternHitSampler::sample(std::uint64_t seed) {
  Rng rng(seed);
  Draw d{};
  const StepDraw first = draw_from(scan1_, rng);
  const double off = static_cast<double>(shift_offset_);

  const auto to_shift = [&](double steps, double log_steps) {
    // shift = scan steps - offset; offset is negligible out of double range.
    if (std::isfinite(steps)) {
      const double shift = steps - off;
      return std::pair<double, double>(shift, std::log(shift));
    }
    return std::pair<double, double>(steps, log_steps);
  };

  if (single_) {
    auto [sv, sl] = to_shift(first.steps, first.log_steps);
    d.ta = d.tb = sv;
    d.log_ta = d.log_tb = sl;
    return d;
  }

  const Scan& rest = phase2(first.is_a);
  const StepDraw second = draw_from(rest, rng);
  // The other pattern completes `second.steps` stream steps later.
  double other_steps, other_log;
  if (std::isfinite(first.steps) && std::isfinite(second.steps)) {
    other_steps = first.steps + second.steps;
    other_log = std::log(other_steps);
  } else {
    other_steps = std::numeric_limits<double>::infinity();
    other_log = log_add_exp(first.log_steps, second.log_steps);
  }
  auto [fv, fl] = to_shift(first.steps, first.log_steps);
  auto [ov, ol] = to_shift(other_steps, other_log);
  if (first.is_a) {
    d.ta = fv;
    d.log_ta = fl;
    d.tb = ov;
    d.log_tb = ol;
  } else {
    d.tb = fv;
    d.log_tb = fl;
    d.ta = ov;
    d.log_ta = ol;
  }
  return d;
}

double PatternHitSampler::first_hit_cdf(double t) {
  const double steps = t + static_cast<double>(shift_offset_);
  if (steps < 1.0) return 0.0;
  const Scan& s = scan1_;
  const int ti = static_cast<int>(std::min(steps, static_cast<double>(s.t0)));
  if (steps <= static_cast<double>(s.t0)) {
    return s.cdf[ti - 1];
  }
  const double extra = std::floor(steps) - static_cast<double>(s.t0);
  const double ln_tail = s.ln_surv_t0 - extra * ext_to_double(s.neg_ln_lambda);
  return 1.0 - std::exp(ln_tail);
}

double PatternHitSampler::expected_first_hit() {
  return scan1_.expected_steps - static_cast<double>(shift_offset_);
}

}  // namespace irrev
