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
#include <span>
#include <vector>

#include "irrev/markov_model.hpp"
#include "irrev/matching.hpp"

namespace irrev {

inline constexpr std::uint64_t kDefaultCap = 100'000'000;  // scanned positions
inline constexpr double kDefaultAlpha = 0.05;

enum class EstimatorKind { H, W, Dual };

/// Direction of a censored estimate. A lower bound means the true log-ratio
/// is at least `raw` (the reversed pattern outlived its cap), an upper bound
/// the converse; Indeterminate means both searches were censored.
enum class BoundKind { Exact, Lower, Upper, Indeterminate };

struct EstimateReport {
  EstimatorKind estimator = EstimatorKind::H;
  int n = 0;
  double raw = 0.0;         // log-ratio in nats (NaN when indeterminate)
  double per_symbol = 0.0;  // raw / n
  bool censored = false;
  BoundKind bound = BoundKind::Exact;
  int caps_used = 0;        // searches that hit their cap (0..2)
  std::uint64_t cap = 0;

  bool sign_known() const {
    return (bound == BoundKind::Exact && raw != 0.0) ||
           (bound == BoundKind::Lower && raw > 0.0) ||
           (bound == BoundKind::Upper && raw < 0.0);
  }
  bool is_tie() const { return bound == BoundKind::Exact && raw == 0.0; }
};

/// Hitting-time estimator log(T^-_n / T^+_n) on a single trajectory.
EstimateReport estimate_H(const Trajectory& traj, int n, std::uint64_t cap);

/// Waiting-time estimator log(W^-_n / W^+_n); the word comes from
/// word_source, the search runs over target.
EstimateReport estimate_W(const Trajectory& word_source, const Trajectory& target,
                          int n, std::uint64_t cap);

/// Matching-length dual log(L^+_n / L^-_n); experimental, no convergence
/// theorem attached.
EstimateReport estimate_dual(const Trajectory& traj, int n);

/// Builds an estimate report from two raw search records (exposed for
/// harness samplers that obtain times without a stored trajectory).
EstimateReport report_from_times(EstimatorKind kind, int n, const TimeRecord& forward,
                                 const TimeRecord& backward);

enum class TestMethod { Sign, Threshold };
enum class TestDecision { RejectReversibility, NoEvidence, Indeterminate };

struct TestReport {
  TestMethod method = TestMethod::Sign;
  double statistic = 0.0;
  std::optional<double> p_value;  // Sign only
  TestDecision decision = TestDecision::NoEvidence;
  // effective parameters, echoed for provenance
  int n = 0;
  int m_pairs = 0;
  std::uint64_t cap = 0;
  double alpha = kDefaultAlpha;
  double c_threshold = 0.0;
  int ties_dropped = 0;
  int indeterminate_dropped = 0;
};

/// Exact two-sided sign test on waiting-time estimates: counts positives
/// among sign-determined estimates, drops ties, rejects when the binomial
/// p-value under P(sign > 0) = 1/2 falls below alpha.
TestReport sign_test_from_estimates(std::span<const EstimateReport> estimates,
                                    double alpha);

/// Convenience wrapper: computes estimate_W over the given independent pairs
/// (at least 20) and applies the sign test.
TestReport test_reversibility_sign(
    std::span<const std::pair<Trajectory, Trajectory>> pairs, int n,
    std::uint64_t cap, double alpha);

/// Decision core of the threshold test: reject when the statistic (or its
/// conclusive censored bound) exceeds c_thr * log n in absolute value.
TestDecision threshold_decide(double statistic, BoundKind bound, int n, double c_thr);

/// Threshold test on |S_H| > c_thr * log n for a stored trajectory.
TestReport test_reversibility_threshold(const Trajectory& traj, int n,
                                        std::uint64_t cap, double c_thr);

}  // namespace irrev
