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

#include "irrev/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irrev/errors.hpp"

namespace irrev {

double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ValidationError("ks_statistic needs a non-empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

double log_choose(int m, int i) {
  return std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0);
}

}  // namespace

double binom_two_sided_p(int k, int m) {
  if (m < 1 || k < 0 || k > m) throw ValidationError("binomial arguments out of range");
  const int hi = std::max(k, m - k);
  // Upper tail P(X >= hi) under p = 1/2, summed from the smallest terms.
  const double log_half_m = -m * std::log(2.0);
  double tail = 0.0;
  for (int i = m; i >= hi; --i) {
    tail += std::exp(log_choose(m, i) + log_half_m);
  }
  return std::min(1.0, 2.0 * tail);
}

double binom_cdf(int k, int m, double p) {
  if (k < 0) return 0.0;
  if (k >= m) return 1.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) {
    acc += std::exp(log_choose(m, i) + i * lp + (m - i) * lq);
  }
  return std::min(1.0, acc);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw ValidationError("variance needs at least 2 points");
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return s / static_cast<double>(xs.size() - 1);
}

double skewness(std::span<const double> xs) {
  if (xs.size() < 3) throw ValidationError("skewness needs at least 3 points");
  const double mu = mean(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - mu;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ValidationError("quantile of empty sample");
  if (q <= 0.0 || q > 1.0) throw ValidationError("quantile level must be in (0, 1]");
  std::sort(xs.begin(), xs.end());
  const auto idx = static_cast<std::size_t>(
      std::max<double>(1.0, std::ceil(q * static_cast<double>(xs.size()))) - 1.0);
  return xs[std::min(idx, xs.size() - 1)];
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace irrev
