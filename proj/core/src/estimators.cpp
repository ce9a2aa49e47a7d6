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

#include "irrev/estimators.hpp"

#include <cmath>
#include <limits>

#include "irrev/errors.hpp"
#include "irrev/stats.hpp"

namespace irrev {

EstimateReport report_from_times(EstimatorKind kind, int n, const TimeRecord& forward,
                                 const TimeRecord& backward) {
  EstimateReport rep;
  rep.estimator = kind;
  rep.n = n;
  rep.cap = forward.cap;
  rep.caps_used = (forward.censored ? 1 : 0) + (backward.censored ? 1 : 0);
  rep.censored = rep.caps_used > 0;

  const double lf = std::log(static_cast<double>(forward.value));
  const double lb = std::log(static_cast<double>(backward.value));
  if (forward.censored && backward.censored) {
    rep.bound = BoundKind::Indeterminate;
    rep.raw = std::numeric_limits<double>::quiet_NaN();
  } else if (backward.censored) {
    // True T^- exceeds its cap, so log(cap/T^+) under-reports the ratio.
    rep.bound = BoundKind::Lower;
    rep.raw = lb - lf;
  } else if (forward.censored) {
    rep.bound = BoundKind::Upper;
    rep.raw = lb - lf;
  } else {
    rep.bound = BoundKind::Exact;
    rep.raw = lb - lf;
  }
  rep.per_symbol = rep.raw / static_cast<double>(n);
  return rep;
}

EstimateReport estimate_H(const Trajectory& traj, int n, std::uint64_t cap) {
  if (traj.size() < n) throw InputError("trajectory shorter than n symbols");
  Word fwd(traj.symbols.begin(), traj.symbols.begin() + n);
  Word bwd = reversed(fwd);
  const std::uint64_t max_shift = traj.size() - n >= 1
                                      ? static_cast<std::uint64_t>(traj.size() - n)
                                      : 0;
  if (max_shift == 0) throw InputError("trajectory shorter than n+1 symbols");
  const std::uint64_t eff = std::min(cap, max_shift);
  std::size_t pos = 1;
  auto src = [&]() { return traj.symbols[pos++]; };
  TwoSearchResult r = search_two_patterns(src, std::move(fwd), std::move(bwd), eff,
                                          TimeKind::Return, TimeKind::Hit);
  return report_from_times(EstimatorKind::H, n, r.a, r.b);
}

EstimateReport estimate_W(const Trajectory& word_source, const Trajectory& target,
                          int n, std::uint64_t cap) {
  auto [wp, wm] = waiting_times(word_source, target, n, cap);
  return report_from_times(EstimatorKind::W, n, wp, wm);
}

EstimateReport estimate_dual(const Trajectory& traj, int n) {
  const MatchingLengths ml = matching_lengths(traj, n);
  EstimateReport rep;
  rep.estimator = EstimatorKind::Dual;
  rep.n = n;
  rep.raw = std::log(static_cast<double>(ml.l_plus)) -
            std::log(static_cast<double>(ml.l_minus));
  rep.per_symbol = rep.raw / static_cast<double>(n);
  rep.bound = BoundKind::Exact;
  return rep;
}

TestReport sign_test_from_estimates(std::span<const EstimateReport> estimates,
                                    double alpha) {
  TestReport rep;
  rep.method = TestMethod::Sign;
  rep.alpha = alpha;
  rep.m_pairs = static_cast<int>(estimates.size());

  int positives = 0, effective = 0;
  for (const auto& e : estimates) {
    rep.n = e.n;
    rep.cap = e.cap;
    if (e.is_tie()) {
      ++rep.ties_dropped;
      continue;
    }
    if (!e.sign_known()) {
      ++rep.indeterminate_dropped;
      continue;
    }
    ++effective;
    if (e.raw > 0.0) ++positives;
  }
  if (effective == 0) {
    throw ValidationError("sign test: every pair was censored-indeterminate or tied");
  }
  rep.statistic = static_cast<double>(positives);
  rep.p_value = binom_two_sided_p(positives, effective);
  rep.decision = (*rep.p_value < alpha) ? TestDecision::RejectReversibility
                                        : TestDecision::NoEvidence;
  return rep;
}

TestReport test_reversibility_sign(
    std::span<const std::pair<Trajectory, Trajectory>> pairs, int n,
    std::uint64_t cap, double alpha) {
  if (pairs.size() < 20) {
    throw ValidationError("sign test needs at least 20 independent pairs");
  }
  std::vector<EstimateReport> estimates;
  estimates.reserve(pairs.size());
  for (const auto& [src, tgt] : pairs) {
    estimates.push_back(estimate_W(src, tgt, n, cap));
  }
  return sign_test_from_estimates(estimates, alpha);
}

TestDecision threshold_decide(double statistic, BoundKind bound, int n, double c_thr) {
  const double threshold = c_thr * std::log(static_cast<double>(n));
  switch (bound) {
    case BoundKind::Exact:
      return std::abs(statistic) > threshold ? TestDecision::RejectReversibility
                                             : TestDecision::NoEvidence;
    case BoundKind::Lower:
      // statistic is a certified lower bound; only a reject can be concluded.
      return statistic > threshold ? TestDecision::RejectReversibility
                                   : TestDecision::Indeterminate;
    case BoundKind::Upper:
      return statistic < -threshold ? TestDecision::RejectReversibility
                                    : TestDecision::Indeterminate;
    case BoundKind::Indeterminate:
      break;
  }
  return TestDecision::Indeterminate;
}

TestReport test_reversibility_threshold(const Trajectory& traj, int n,
                                        std::uint64_t cap, double c_thr) {
  const EstimateReport est = estimate_H(traj, n, cap);
  TestReport rep;
  rep.method = TestMethod::Threshold;
  rep.statistic = est.raw;
  rep.n = n;
  rep.m_pairs = 1;
  rep.cap = cap;
  rep.c_threshold = c_thr;
  rep.decision = threshold_decide(est.raw, est.bound, n, c_thr);
  return rep;
}

}  // namespace irrev
