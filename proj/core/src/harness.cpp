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

#include "irrev/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "irrev/errors.hpp"
#include "irrev/hit_sampler.hpp"
#include "irrev/matching.hpp"
#include "irrev/oracle.hpp"
#include "irrev/stats.hpp"

namespace irrev {

namespace {

std::uint64_t trial_seed(const SuiteConfig& c, std::string_view suite, int n,
                         int trial, int stream) {
  return mix_seed({c.base_seed, fnv1a64(suite), static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(trial),
                   static_cast<std::uint64_t>(stream)});
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void dump_raw_csv(const SuiteConfig& config, const std::string& suite,
                  std::span<const int> ns, std::span<const std::vector<double>> values) {
  if (config.raw_csv_path.empty()) return;
  std::ofstream out(config.raw_csv_path);
  if (!out) throw InputError("cannot open raw CSV path " + config.raw_csv_path);
  out << "suite,n,trial,value\n";
  char buf[64];
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t t = 0; t < values[i].size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[i][t]);
      out << suite << ',' << ns[i] << ',' << t << ',' << buf << '\n';
    }
  }
}

const MarkovModel& model_of(const SuiteConfig& config) {
  if (config.model == nullptr) throw ValidationError("suite config has no model");
  return *config.model;
}

// Streamed H-estimator search: generates the trajectory lazily, uses its
// first n symbols as the patterns and scans shifts 1..cap.
std::pair<TimeRecord, TimeRecord> stream_hitting_pair(const MarkovModel& model,
                                                      std::uint64_t seed, int n,
                                                      std::uint64_t cap) {
  ModelStream stream(model, seed);
  Word x;
  x.reserve(n);
  for (int i = 0; i < n; ++i) x.push_back(stream.next());
  Word rx = reversed(x);

  KmpMatcher ma(x), mb(rx);
  TimeRecord ra{TimeKind::Return, n, cap, true, cap, cap};
  TimeRecord rb{TimeKind::Hit, n, cap, true, cap, cap};
  bool found_a = false, found_b = false;
  std::uint64_t fed = 0;
  // positions 2..n come from the known prefix
  for (int i = 1; i < n; ++i) {
    ++fed;
    ma.feed(x[i]);
    mb.feed(x[i]);
  }
  const std::uint64_t max_fed = cap + static_cast<std::uint64_t>(n) - 1;
  while (fed < max_fed && !(found_a && found_b)) {
    ++fed;
    const Symbol c = stream.next();
    if (!found_a && ma.feed(c)) {
      ra = TimeRecord{TimeKind::Return, n, fed + 1 - static_cast<std::uint64_t>(n),
                      false, cap, fed + 1 - static_cast<std::uint64_t>(n)};
      found_a = true;
    }
    if (!found_b && mb.feed(c)) {
      rb = TimeRecord{TimeKind::Hit, n, fed + 1 - static_cast<std::uint64_t>(n),
                      false, cap, fed + 1 - static_cast<std::uint64_t>(n)};
      found_b = true;
    }
  }
  return {ra, rb};
}

}  // namespace

double SuiteRow::stat(const std::string& name) const {
  for (const auto& [k, v] : stats) {
    if (k == name) return v;
  }
  throw ValidationError("suite row has no stat '" + name + "'");
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

EstimatorSample sample_estimator(const MarkovModel& model, int n,
                                 EstimatorChoice which, SamplerMode mode,
                                 std::uint64_t cap, std::uint64_t word_seed,
                                 std::uint64_t search_seed) {
  EstimatorSample out;
  const Trajectory word_src = model.simulate(n, word_seed);
  const Word x(word_src.symbols.begin(), word_src.symbols.end());
  out.exact = model.entropy_production(x);

  if (mode == SamplerMode::Spectral) {
    const Word rx = reversed(x);
    if (which == EstimatorChoice::W) {
      PatternHitSampler sampler(model, x, rx);
      const auto d = sampler.sample(search_seed);
      out.raw = d.log_tb - d.log_ta;
    } else {
      PatternHitSampler sampler(model, x, rx, x);
      const auto d = sampler.sample(search_seed);
      out.raw = d.log_tb - d.log_ta;
    }
    return out;
  }

  if (which == EstimatorChoice::H) {
    // Regenerate the same trajectory lazily so the search is O(n) memory.
    auto [ra, rb] = stream_hitting_pair(model, word_seed, n, cap);
    const EstimateReport rep = report_from_times(EstimatorKind::H, n, ra, rb);
    out.raw = rep.raw;
    out.censored = rep.censored;
    out.indeterminate = rep.bound == BoundKind::Indeterminate;
    return out;
  }

  ModelStream target(model, search_seed);
  target.next();  // searching starts at position 2
  auto src = [&target]() { return target.next(); };
  const TwoSearchResult r =
      search_two_patterns(src, x, reversed(x), cap, TimeKind::Waiting,
                          TimeKind::Waiting);
  const EstimateReport rep = report_from_times(EstimatorKind::W, n, r.a, r.b);
  out.raw = rep.raw;
  out.censored = rep.censored;
  out.indeterminate = rep.bound == BoundKind::Indeterminate;
  return out;
}

SuiteReport exponential_law_suite(const SuiteConfig& config, const Word& word) {
  const MarkovModel& model = model_of(config);
  Stopwatch clock;
  SuiteReport rep;
  rep.suite = "exponential_law";
  rep.config = config;
  rep.model_id = model.content_hash();

  std::vector<int> lengths = config.n_values;
  if (lengths.empty()) lengths.push_back(static_cast<int>(word.size()));
  std::vector<std::vector<double>> raw_values(lengths.size());

  double rho_min = std::numeric_limits<double>::infinity();
  double rho_max = 0.0;

  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const int n = lengths[li];
    if (n < model.order() || n > static_cast<int>(word.size())) {
      throw ValidationError("exponential suite length outside word range");
    }
    const Word pattern(word.begin(), word.begin() + n);
    const double log_p = model.cylinder_log_prob(pattern);
    const double p_cyl = std::exp(log_p);
    const int period = word_period(pattern).k;

    std::vector<double> scaled(config.trials,
                               std::numeric_limits<double>::quiet_NaN());
    std::vector<int> floor_violation(config.trials, 0);
    std::atomic<int> censored{0};

    parallel_for(config.trials, config.threads, [&](int t) {
      const std::uint64_t seed = trial_seed(config, "exponential", n, t, 0);
      TimeRecord record;
      if (config.conditional_return) {
        ModelStream stream(model, seed, pattern);
        stream.next();  // position 1
        auto src = [&stream]() { return stream.next(); };
        record = search_pattern(src, pattern, config.cap, TimeKind::Return);
      } else {
        ModelStream stream(model, seed);
        stream.next();
        auto src = [&stream]() { return stream.next(); };
        record = search_pattern(src, pattern, config.cap, TimeKind::Hit);
      }
      if (record.censored) {
        censored.fetch_add(1);
        return;
      }
      if (config.conditional_return &&
          record.value < static_cast<std::uint64_t>(period)) {
        floor_violation[t] = 1;
      }
      scaled[t] = static_cast<double>(record.value) * p_cyl;
    });

    std::vector<double> sample;
    sample.reserve(config.trials);
    int violations = 0;
    for (int t = 0; t < config.trials; ++t) {
      if (!std::isnan(scaled[t])) sample.push_back(scaled[t]);
      violations += floor_violation[t];
    }
    if (sample.empty()) throw NumericError("exponential suite: all trials censored");

    const double rho_hat = 1.0 / mean(sample);
    rho_min = std::min(rho_min, rho_hat);
    rho_max = std::max(rho_max, rho_hat);
    const double ks = ks_statistic(
        sample, [rho_hat](double t) { return 1.0 - std::exp(-rho_hat * t); });

    const int cens = censored.load();
    rep.censored_dropped += cens;
    const double censor_frac =
        static_cast<double>(cens) / static_cast<double>(config.trials);

    SuiteRow row;
    row.n = n;
    row.stats = {{"trials", static_cast<double>(config.trials)},
                 {"effective", static_cast<double>(sample.size())},
                 {"censored", static_cast<double>(cens)},
                 {"cylinder_prob", p_cyl},
                 {"period", static_cast<double>(period)},
                 {"rho_hat", rho_hat},
                 {"ks", ks},
                 {"floor_violations", static_cast<double>(violations)},
                 {"min_scaled", *std::min_element(sample.begin(), sample.end())}};
    row.pass = ks < config.ks_threshold && violations == 0 &&
               censor_frac <= config.censor_fail_fraction;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
    raw_values[li] = std::move(sample);
  }

  rep.aux = {{"rho_min", rho_min}, {"rho_max", rho_max}};
  dump_raw_csv(config, rep.suite, lengths, raw_values);
  rep.wall_seconds = clock.seconds();
  return rep;
}

SuiteReport consistency_suite(const SuiteConfig& config) {
  const MarkovModel& model = model_of(config);
  Stopwatch clock;
  SuiteReport rep;
  rep.suite = "consistency";
  rep.config = config;
  rep.model_id = model.content_hash();

  const double mep = mep_exact(model);
  rep.aux.push_back({"mep", mep});

  std::vector<std::vector<double>> raw_values(config.n_values.size());
  std::vector<double> q99_ratios;

  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    std::vector<EstimatorSample> samples(config.trials);
    parallel_for(config.trials, config.threads, [&](int t) {
      samples[t] = sample_estimator(model, n, config.estimator, config.sampler,
                                    config.cap,
                                    trial_seed(config, "consistency", n, t, 0),
                                    trial_seed(config, "consistency", n, t, 1));
    });

    std::vector<double> per_symbol, ratios, raws;
    int censored = 0;
    for (const auto& s : samples) {
      if (s.censored || s.indeterminate) {
        ++censored;
        continue;
      }
      raws.push_back(s.raw);
      per_symbol.push_back(s.raw / n);
      ratios.push_back(std::abs(s.raw - s.exact) / std::log(static_cast<double>(n)));
    }
    if (per_symbol.size() < 2) throw NumericError("consistency suite: too few samples");
    rep.censored_dropped += censored;

    const double mu = mean(per_symbol);
    const double se = std::sqrt(variance(per_symbol) /
                                static_cast<double>(per_symbol.size()));
    const double q99 = quantile(ratios, 0.99);
    q99_ratios.push_back(q99);

    SuiteRow row;
    row.n = n;
    row.stats = {{"trials", static_cast<double>(config.trials)},
                 {"effective", static_cast<double>(per_symbol.size())},
                 {"censored", static_cast<double>(censored)},
                 {"mean_per_symbol", mu},
                 {"se_per_symbol", se},
                 {"mep", mep},
                 {"mean_deviation_se", std::abs(mu - mep) / se},
                 {"q99_ratio", q99}};
    row.pass = std::abs(mu - mep) <= config.se_multiplier * se &&
               static_cast<double>(censored) / config.trials <=
                   config.censor_fail_fraction;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
    raw_values[ni] = std::move(raws);
  }

  bool monotone = true;
  for (std::size_t i = 1; i < q99_ratios.size(); ++i) {
    if (q99_ratios[i] > q99_ratios[i - 1] * (1.0 + 1e-12)) monotone = false;
  }
  rep.aux.push_back({"q99_nonincreasing", monotone ? 1.0 : 0.0});
  rep.pass = rep.pass && monotone;

  dump_raw_csv(config, rep.suite, config.n_values, raw_values);
  rep.wall_seconds = clock.seconds();
  return rep;
}

SuiteReport clt_suite(const SuiteConfig& config) {
  const MarkovModel& model = model_of(config);
  Stopwatch clock;
  SuiteReport rep;
  rep.suite = "clt";
  rep.config = config;
  rep.model_id = model.content_hash();

  const double mep = mep_exact(model);
  const double sigma2 = sigma2_exact(model);
  if (sigma2 <= 1e-12) {
    throw ValidationError(
        "clt suite: model has degenerate variance (reversible); refusing");
  }
  rep.aux = {{"mep", mep}, {"sigma2", sigma2}};

  std::vector<std::vector<double>> raw_values(config.n_values.size());

  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    std::vector<EstimatorSample> samples(config.trials);
    parallel_for(config.trials, config.threads, [&](int t) {
      samples[t] = sample_estimator(model, n, config.estimator, config.sampler,
                                    config.cap, trial_seed(config, "clt", n, t, 0),
                                    trial_seed(config, "clt", n, t, 1));
    });

    std::vector<double> raws, z;
    int censored = 0;
    const double scale = std::sqrt(n * sigma2);
    for (const auto& s : samples) {
      if (s.censored || s.indeterminate) {
        ++censored;
        continue;
      }
      raws.push_back(s.raw);
      z.push_back((s.raw - n * mep) / scale);
    }
    if (z.size() < 3) throw NumericError("clt suite: too few samples");
    rep.censored_dropped += censored;

    const double ks = ks_statistic(z, [](double x) { return normal_cdf(x); });
    const double var_ratio = variance(raws) / (n * sigma2);
    const double skew = skewness(raws);

    SuiteRow row;
    row.n = n;
    row.stats = {{"trials", static_cast<double>(config.trials)},
                 {"effective", static_cast<double>(z.size())},
                 {"censored", static_cast<double>(censored)},
                 {"ks_normal", ks},
                 {"var_over_n_sigma2", var_ratio},
                 {"skewness", skew}};
    row.pass = ks < config.clt_ks_threshold &&
               std::abs(var_ratio - 1.0) <= config.clt_var_rel_tol &&
               static_cast<double>(censored) / config.trials <=
                   config.censor_fail_fraction;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
    raw_values[ni] = std::move(raws);
  }

  dump_raw_csv(config, rep.suite, config.n_values, raw_values);
  rep.wall_seconds = clock.seconds();
  return rep;
}

SuiteReport ldp_suite(const SuiteConfig& config, std::span<const double> p_grid) {
  const MarkovModel& model = model_of(config);
  Stopwatch clock;
  SuiteReport rep;
  rep.suite = "ldp";
  rep.config = config;
  rep.model_id = model.content_hash();

  for (double p : p_grid) {
    if (std::abs(p) > 0.6) {
      throw ValidationError(
          "ldp suite restricts the empirical SCGF to |p| <= 0.6");
    }
  }

  const double mep = mep_exact(model);
  const auto [c_minus, c_plus] = scgf_endpoints(model);
  rep.aux = {{"mep", mep}, {"c_minus", c_minus}, {"c_plus", c_plus}};

  std::vector<std::vector<double>> raw_values(config.n_values.size());

  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    std::vector<EstimatorSample> samples(config.trials);
    parallel_for(config.trials, config.threads, [&](int t) {
      samples[t] = sample_estimator(model, n, EstimatorChoice::W, config.sampler,
                                    config.cap, trial_seed(config, "ldp", n, t, 0),
                                    trial_seed(config, "ldp", n, t, 1));
    });

    std::vector<double> raws;
    int censored = 0;
    for (const auto& s : samples) {
      if (s.censored || s.indeterminate) {
        ++censored;
        continue;
      }
      raws.push_back(s.raw);
    }
    rep.censored_dropped += censored;
    const double censor_frac =
        static_cast<double>(censored) / static_cast<double>(config.trials);
    const bool censor_ok = censor_frac <= config.censor_fail_fraction;
    if (raws.empty()) throw NumericError("ldp suite: all trials censored");
    const double log_m = std::log(static_cast<double>(raws.size()));

    for (double p : p_grid) {
      std::vector<double> weighted;
      weighted.reserve(raws.size());
      for (double s : raws) weighted.push_back(p * s);
      const double w_hat = (log_sum_exp(weighted) - log_m) / n;
      const double e_oracle = scgf(model, p);

      SuiteRow row;
      row.n = n;
      row.stats = {{"p", p},
                   {"w_hat", w_hat},
                   {"scgf", e_oracle},
                   {"abs_err", std::abs(w_hat - e_oracle)},
                   {"effective", static_cast<double>(raws.size())},
                   {"censored", static_cast<double>(censored)},
                   {"censor_frac", censor_frac}};
      row.pass = std::abs(w_hat - e_oracle) < config.ldp_abs_tol && censor_ok;
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(std::move(row));
    }

    // Tail-frequency check on an interval right of the MEP, inside (c-, c+).
    {
      const double q1 = mep + 0.35 * (c_plus - mep);
      const double q2 = mep + 0.70 * (c_plus - mep);
      int count = 0;
      for (double s : raws) {
        const double q = s / n;
        if (q >= q1 && q <= q2) ++count;
      }
      SuiteRow row;
      row.n = n;
      const double target = -rate_function(model, q1).value;
      if (count > 0) {
        const double rate =
            std::log(static_cast<double>(count) / raws.size()) / n;
        row.stats = {{"tail_q1", q1},
                     {"tail_q2", q2},
                     {"tail_count", static_cast<double>(count)},
                     {"tail_rate", rate},
                     {"tail_rate_target", target},
                     {"tail_abs_err", std::abs(rate - target)}};
        row.pass = std::abs(rate - target) < config.ldp_tail_tol;
      } else {
        row.stats = {{"tail_q1", q1},
                     {"tail_q2", q2},
                     {"tail_count", 0.0},
                     {"tail_rate_target", target}};
        row.pass = false;
      }
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(std::move(row));
    }
    raw_values[ni] = std::move(raws);
  }

  dump_raw_csv(config, rep.suite, config.n_values, raw_values);
  rep.wall_seconds = clock.seconds();
  return rep;
}

std::vector<SuiteReport> run_all(std::span<const SuiteSpec> specs) {
  std::vector<SuiteReport> reports;
  reports.reserve(specs.size());
  for (const auto& spec : specs) {
    if (spec.kind == "exponential") {
      reports.push_back(exponential_law_suite(spec.config, spec.word));
    } else if (spec.kind == "consistency") {
      reports.push_back(consistency_suite(spec.config));
    } else if (spec.kind == "clt") {
      reports.push_back(clt_suite(spec.config));
    } else if (spec.kind == "ldp") {
      reports.push_back(ldp_suite(spec.config, spec.p_grid));
    } else {
      throw ValidationError("unknown suite kind '" + spec.kind + "'");
    }
  }
  return reports;
}

}  // namespace irrev
