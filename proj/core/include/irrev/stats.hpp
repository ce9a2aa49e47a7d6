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

#include <functional>
#include <span>
#include <vector>

namespace irrev {

/// sup_x |F_N(x) - cdf(x)| for the empirical CDF of `sample`.
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);

double normal_cdf(double x);

/// Exact two-sided binomial p-value for k successes out of m under p = 1/2:
/// min(1, 2 * min-tail).
double binom_two_sided_p(int k, int m);

/// P(Bin(m, p) <= k).
double binom_cdf(int k, int m, double p);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased (N-1)
double skewness(std::span<const double> xs);

/// Empirical quantile: sorted[ceil(q*N) - 1]. Deterministic, no
/// interpolation.
double quantile(std::vector<double> xs, double q);

/// log(sum_i exp(x_i)), stable.
double log_sum_exp(std::span<const double> xs);

/// log(exp(a) + exp(b)), stable.
double log_add_exp(double a, double b);

}  // namespace irrev
