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

#include "irrev/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irrev/errors.hpp"

namespace irrev {

namespace {

constexpr double kPerronTol = 2e-15;
constexpr double kPerronAcceptTol = 1e-13;
constexpr int kPerronCap = 500'000;
constexpr double kRateScanLimit = 40.0;
constexpr double kRateTolP = 1e-10;

// Tilted transfer matrix in sparse (state, symbol) form, log weights scaled
// by their maximum so the Perron iteration stays in range.
struct TiltedMatrix {
  int n_states = 0;
  int m = 0;
  std::vector<int> target;       // n_states * m
  std::vector<double> weight;    // exp(log weight - scale)
  std::vector<double> dlog;      // d/dp of the log weight
  double scale = 0.0;            // max log weight
};

TiltedMatrix build_tilted(const MarkovModel& model, double p) {
  const int S = model.state_count();
  const int m = model.symbol_count();
  TiltedMatrix t;
  t.n_states = S;
  t.m = m;
  t.target.resize(static_cast<std::size_t>(S) * m);
  t.weight.resize(static_cast<std::size_t>(S) * m);
  t.dlog.resize(static_cast<std::size_t>(S) * m);
  std::vector<double> logw(static_cast<std::size_t>(S) * m);
  double mx = -std::numeric_limits<double>::infinity();
  const int pow_r1 = S / m;
  for (int u = 0; u < S; ++u) {
    const Symbol u1 = static_cast<Symbol>(u / pow_r1);
    for (int b = 0; b < m; ++b) {
      const int v = model.shift_state(u, static_cast<Symbol>(b));
      const double la = model.log_transition(u, static_cast<Symbol>(b));
      const double lb = model.log_transition(model.reverse_state(v), u1);
      const std::size_t idx = static_cast<std::size_t>(u) * m + b;
      t.target[idx] = v;
      logw[idx] = (1.0 + p) * la - p * lb;
      t.dlog[idx] = la - lb;
      mx = std::max(mx, logw[idx]);
    }
  }
  t.scale = mx;
  for (std::size_t i = 0; i < logw.size(); ++i) t.weight[i] = std::exp(logw[i] - mx);
  return t;
}

void apply(const TiltedMatrix& t, std::span<const double> x, std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (int u = 0; u < t.n_states; ++u) {
    const double xu = x[u];
    const std::size_t base = static_cast<std::size_t>(u) * t.m;
    for (int b = 0; b < t.m; ++b) {
      y[t.target[base + b]] += xu * t.weight[base + b];
    }
  }
}

void apply_transpose(const TiltedMatrix& t, std::span<const double> x,
                     std::span<double> y) {
  for (int u = 0; u < t.n_states; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * t.m;
    double acc = 0.0;
    for (int b = 0; b < t.m; ++b) {
      acc += t.weight[base + b] * x[t.target[base + b]];
    }
    y[u] = acc;
  }
}

struct PerronPair {
  double log_radius = 0.0;        // includes the scale factor
  double lambda_scaled = 0.0;     // Perron root of the scaled matrix
  std::vector<double> right;
  std::vector<double> left;
};

// Power iteration with Collatz-Wielandt bounds. The tilted matrix is
// primitive (every row has m positive entries), so the iteration converges;
// stalling past the acceptance tolerance raises NumericError.
template <typename ApplyFn>
std::pair<double, std::vector<double>> perron_vector(int dim, ApplyFn&& apply_fn) {
  std::vector<double> x(dim, 1.0 / dim), y(dim);
  double best_gap = std::numeric_limits<double>::infinity();
  double lambda = 1.0;
  int stall = 0;
  for (int iter = 0; iter < kPerronCap; ++iter) {
    apply_fn(std::span<const double>(x), std::span<double>(y));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, norm = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double r = y[i] / x[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      norm += y[i];
    }
    for (int i = 0; i < dim; ++i) x[i] = y[i] / norm;
    lambda = 0.5 * (lo + hi);
    const double gap = (hi - lo) / lambda;
    if (gap < kPerronTol) return {lambda, std::move(x)};
    if (gap < best_gap * 0.999) {
      best_gap = std::min(best_gap, gap);
      stall = 0;
    } else if (++stall > 2000) {
      if (gap < kPerronAcceptTol) return {lambda, std::move(x)};
      break;
    }
  }
  if (best_gap < kPerronAcceptTol) return {lambda, std::move(x)};
  throw NumericError("Perron iteration did not converge");
}

PerronPair perron_pair(const TiltedMatrix& t, bool need_left) {
  PerronPair out;
  auto [lam, right] = perron_vector(
      t.n_states, [&](std::span<const double> x, std::span<double> y) { apply(t, x, y); });
  out.lambda_scaled = lam;
  out.right = std::move(right);
  out.log_radius = std::log(lam) + t.scale;
  if (need_left) {
    auto [lam_l, left] = perron_vector(
        t.n_states,
        [&](std::span<const double> x, std::span<double> y) { apply_transpose(t, x, y); });
    (void)lam_l;
    out.left = std::move(left);
  }
  return out;
}

double derivative_from_pair(const TiltedMatrix& t, const PerronPair& pp) {
  // lambda' = l^T (M o dlog) r / (l^T r); E' = lambda'/lambda (scale cancels).
  double num = 0.0, den = 0.0;
  for (int u = 0; u < t.n_states; ++u) {
    const std::size_t base = static_cast<std::size_t>(u) * t.m;
    for (int b = 0; b < t.m; ++b) {
      num += pp.left[u] * t.weight[base + b] * t.dlog[base + b] *
             pp.right[t.target[base + b]];
    }
    den += pp.left[u] * pp.right[u];
  }
  return num / (den * pp.lambda_scaled);
}

}  // namespace

double mep_exact(const MarkovModel& model) {
  // H_{n+1} - H_n telescopes to the (r+1)-block term minus the r-block term.
  const int S = model.state_count();
  const int m = model.symbol_count();
  const int pow_r1 = S / m;
  double blocks = 0.0;
  for (int u = 0; u < S; ++u) {
    const Symbol u1 = static_cast<Symbol>(u / pow_r1);
    for (int b = 0; b < m; ++b) {
      const int v = model.shift_state(u, static_cast<Symbol>(b));
      const int rv = model.reverse_state(v);
      const double fwd = model.block_prob(u, static_cast<Symbol>(b));
      const double bwd = model.block_prob(rv, u1);
      blocks += fwd * (std::log(fwd) - std::log(bwd));
    }
  }
  double states = 0.0;
  for (int u = 0; u < S; ++u) {
    states += model.stationary()[u] *
              (model.log_stationary(u) - model.log_stationary(model.reverse_state(u)));
  }
  return blocks - states;
}

double hn_relative_entropy(const MarkovModel& model, int n) {
  const int m = model.symbol_count();
  if (n < model.order()) {
    throw ValidationError("H_n needs n >= model order");
  }
  double count = 1.0;
  for (int i = 0; i < n; ++i) {
    count *= m;
    if (count > 2e6) throw ValidationError("H_n enumeration bound m^n <= 2e6 exceeded");
  }

  // DFS over words of length n carrying forward log-probabilities.
  double h = 0.0;
  Word word(n, 0);
  // Iterative odometer enumeration.
  while (true) {
    const double lp = model.cylinder_log_prob(word);
    const Word rev = reversed(word);
    const double lr = model.cylinder_log_prob(rev);
    h += std::exp(lp) * (lp - lr);
    int i = n - 1;
    while (i >= 0 && word[i] == m - 1) {
      word[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++word[i];
  }
  return h;
}

double scgf(const MarkovModel& model, double p) {
  const TiltedMatrix t = build_tilted(model, p);
  return perron_pair(t, false).log_radius;
}

double scgf_derivative(const MarkovModel& model, double p) {
  const TiltedMatrix t = build_tilted(model, p);
  const PerronPair pp = perron_pair(t, true);
  return derivative_from_pair(t, pp);
}

std::pair<double, double> scgf_endpoints(const MarkovModel& model) {
  return {scgf_derivative(model, -1.0), scgf_derivative(model, 1.0)};
}

double waiting_scgf(const MarkovModel& model, double p) {
  if (p <= -1.0 || p >= 1.0) {
    // Endpoints are mapped to +infinity as well.
    return std::numeric_limits<double>::infinity();
  }
  return scgf(model, p);
}

RateResult rate_function(const MarkovModel& model, double q) {
  const auto objective = [&](double p) { return p * q - scgf(model, p); };
  // Golden-section maximization of a concave objective.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -kRateScanLimit, b = kRateScanLimit;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > kRateTolP) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  RateResult out;
  out.argmax = 0.5 * (a + b);
  out.value = objective(out.argmax);
  out.boundary = (kRateScanLimit - std::abs(out.argmax)) < 1e-6;
  return out;
}

double sigma2_exact(const MarkovModel& model) {
  if (model.is_reversible()) return 0.0;  // g is identically zero
  const double e0 = scgf(model, 0.0);
  const double h = 1e-4;
  const auto second_diff = [&](double step) {
    return (scgf(model, step) + scgf(model, -step) - 2.0 * e0) / (step * step);
  };
  const double d1 = second_diff(h);
  const double d2 = second_diff(h / 2.0);
  return (4.0 * d2 - d1) / 3.0;
}

double sigma2_enumeration(const MarkovModel& model, int max_n) {
  const int m = model.symbol_count();
  const int r = model.order();

  // Clamp the horizon to the enumeration budget m^(n+r) <= 4e6.
  int n_max = 2;
  {
    double count = std::pow(static_cast<double>(m), r + 2);
    while (n_max < max_n && count * m <= 4e6) {
      count *= m;
      ++n_max;
    }
  }
  if (n_max < 4) throw ValidationError("alphabet too large for variance enumeration");

  const MarkovModel rev = model.reversed();
  // g over (r+1)-blocks, indexed by (state, next symbol).
  std::vector<double> g(static_cast<std::size_t>(model.state_count()) * m);
  for (int u = 0; u < model.state_count(); ++u) {
    for (int b = 0; b < m; ++b) {
      g[static_cast<std::size_t>(u) * m + b] =
          model.log_transition(u, static_cast<Symbol>(b)) -
          rev.log_transition(u, static_cast<Symbol>(b));
    }
  }

  const int depth_max = n_max + r;
  std::vector<double> e1(depth_max + 1, 0.0), e2(depth_max + 1, 0.0);

  // DFS over blocks of length depth_max, accumulating per-depth moments of
  // S = sum of g over windows.
  struct Frame {
    int symbol;
    double prob;
    double s;
    int state;
  };
  std::vector<Frame> stack;
  stack.reserve(depth_max + 1);

  const auto record = [&](int depth, double prob, double s) {
    if (depth >= r + 1) {
      e1[depth] += prob * s;
      e2[depth] += prob * s * s;
    }
  };

  // Seed with every initial state (depth r).
  for (int s0 = 0; s0 < model.state_count(); ++s0) {
    // Depth-first expansion from (state, prob, running sum).
    struct Node {
      int state;
      double prob;
      double s;
      int depth;
      int next_symbol;
    };
    std::vector<Node> dfs;
    dfs.push_back({s0, model.stationary()[s0], 0.0, r, 0});
    while (!dfs.empty()) {
      Node& node = dfs.back();
      if (node.depth == depth_max || node.next_symbol == m) {
        dfs.pop_back();
        continue;
      }
      const int b = node.next_symbol++;
      const double p = node.prob * model.transition(node.state, static_cast<Symbol>(b));
      const double s = node.s + g[static_cast<std::size_t>(node.state) * m + b];
      const int depth = node.depth + 1;
      record(depth, p, s);
      dfs.push_back({model.shift_state(node.state, static_cast<Symbol>(b)), p, s, depth, 0});
    }
  }

  // V_n = Var(S_n)/n at depth n + r; Richardson in 1/n, then Aitken on the
  // geometric residue.
  std::vector<double> v(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    const int d = n + r;
    v[n] = (e2[d] - e1[d] * e1[d]) / n;
  }
  std::vector<double> s_hat;
  for (int n = 2; n <= n_max; ++n) {
    s_hat.push_back(n * v[n] - (n - 1) * v[n - 1]);
  }
  const std::size_t k = s_hat.size();
  const double s1 = s_hat[k - 3], s2 = s_hat[k - 2], s3 = s_hat[k - 1];
  const double denom = s3 - 2.0 * s2 + s1;
  if (std::abs(denom) < 1e-13 * std::max({std::abs(s1), std::abs(s3), 1e-30})) {
    return s3;
  }
  const double aitken = s3 - (s3 - s2) * (s3 - s2) / denom;
  return aitken;
}

ScgfCurve scgf_curve(const MarkovModel& model, int grid_points, double delta) {
  if (grid_points < 2) throw ValidationError("scgf grid needs at least 2 points");
  ScgfCurve curve;
  const double lo = -1.0 - delta, hi = 1.0 + delta;
  curve.points.reserve(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double p = lo + (hi - lo) * i / (grid_points - 1);
    const TiltedMatrix t = build_tilted(model, p);
    const PerronPair pp = perron_pair(t, true);
    curve.points.push_back({p, pp.log_radius, derivative_from_pair(t, pp)});
  }
  auto [cm, cp] = scgf_endpoints(model);
  curve.c_minus = cm;
  curve.c_plus = cp;
  return curve;
}

RateCurve rate_curve(const MarkovModel& model, int grid_points) {
  if (grid_points < 2) throw ValidationError("rate grid needs at least 2 points");
  auto [cm, cp] = scgf_endpoints(model);
  RateCurve curve;
  const double margin = 0.05 * (cp - cm);
  const double lo = cm + margin, hi = cp - margin;
  curve.points.reserve(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double q = lo + (hi - lo) * i / (grid_points - 1);
    const RateResult r = rate_function(model, q);
    curve.points.push_back({q, r.value, r.argmax, r.boundary});
  }
  return curve;
}

SymmetryReport symmetry_report(const MarkovModel& model,
                               std::span<const double> p_grid) {
  const MarkovModel rev = model.reversed();
  SymmetryReport rep;
  rep.rows.reserve(p_grid.size());
  for (double p : p_grid) {
    SymmetryRow row;
    row.p = p;
    row.e_p = scgf(model, p);
    row.e_m1mp = scgf(model, -1.0 - p);
    row.e_rev_p = scgf(rev, p);
    row.e_rev_m1mp = scgf(rev, -1.0 - p);
    const double mx = std::max({row.e_p, row.e_m1mp, row.e_rev_p, row.e_rev_m1mp});
    const double mn = std::min({row.e_p, row.e_m1mp, row.e_rev_p, row.e_rev_m1mp});
    row.spread = mx - mn;
    rep.max_residual = std::max(rep.max_residual, row.spread);
    rep.rows.push_back(row);
  }
  return rep;
}

OracleSummary oracle_summary(const MarkovModel& model) {
  OracleSummary s;
  s.mep = mep_exact(model);
  s.sigma2 = sigma2_exact(model);
  s.sigma2_enum = sigma2_enumeration(model);
  const double scale = std::max({std::abs(s.sigma2), std::abs(s.sigma2_enum), 1e-30});
  s.sigma2_gap_rel = std::abs(s.sigma2 - s.sigma2_enum) / scale;
  auto [cm, cp] = scgf_endpoints(model);
  s.c_minus = cm;
  s.c_plus = cp;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(-1.0 + i * 0.05);
  s.symmetry_residual_max = symmetry_report(model, grid).max_residual;
  return s;
}

}  // namespace irrev
