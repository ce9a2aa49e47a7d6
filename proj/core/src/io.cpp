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

#include "irrev/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "irrev/errors.hpp"
#include "irrev/version.hpp"

namespace irrev {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string state_key(const MarkovModel& model, int state) {
  return model.alphabet().format(model.state_symbols(state));
}

// Splits a state key back into r tokens.
Word parse_state_key(const Alphabet& alphabet, const std::string& key, int order) {
  Word out;
  if (alphabet.single_char()) {
    for (char c : key) {
      const auto idx = alphabet.index(std::string(1, c));
      if (!idx) throw InputError("unknown token '" + std::string(1, c) + "' in state '" + key + "'");
      out.push_back(*idx);
    }
  } else {
    std::size_t start = 0;
    while (start <= key.size()) {
      const std::size_t comma = key.find(',', start);
      const std::string tok = key.substr(start, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - start);
      const auto idx = alphabet.index(tok);
      if (!idx) throw InputError("unknown token '" + tok + "' in state '" + key + "'");
      out.push_back(*idx);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (static_cast<int>(out.size()) != order) {
    throw InputError("state '" + key + "' does not have " + std::to_string(order) +
                     " tokens");
  }
  return out;
}

}  // namespace

MarkovModel model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model JSON parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("alphabet") || !j.contains("order") ||
      !j.contains("transitions")) {
    throw InputError("model JSON needs alphabet, order and transitions");
  }
  std::vector<std::string> tokens;
  for (const auto& t : j.at("alphabet")) tokens.push_back(t.get<std::string>());
  Alphabet alphabet(std::move(tokens));
  const int order = j.at("order").get<int>();
  if (order < 1 || order > 4) throw InputError("model order must be in 1..4");

  std::int64_t n_states = 1;
  for (int i = 0; i < order; ++i) {
    n_states *= alphabet.size();
    if (n_states > 256) throw InputError("state space m^r exceeds 256");
  }
  const int m = alphabet.size();
  std::vector<double> trans(static_cast<std::size_t>(n_states) * m, -1.0);

  for (const auto& [key, row] : j.at("transitions").items()) {
    const Word state_word = parse_state_key(alphabet, key, order);
    int state = 0;
    for (Symbol c : state_word) state = state * m + c;
    for (const auto& [tok, value] : row.items()) {
      const auto idx = alphabet.index(tok);
      if (!idx) throw InputError("unknown token '" + tok + "' in transitions");
      if (!value.is_number()) {
        throw InputError("probability for '" + tok + "' must parse as a decimal");
      }
      trans[static_cast<std::size_t>(state) * m + *idx] = value.get<double>();
    }
  }
  for (std::size_t i = 0; i < trans.size(); ++i) {
    if (trans[i] < 0.0) {
      throw InputError("transitions table is missing entries");
    }
  }
  try {
    return MarkovModel(std::move(alphabet), order, std::move(trans));
  } catch (const ValidationError& e) {
    throw InputError(std::string("invalid model: ") + e.what());
  }
}

MarkovModel load_model(const std::string& path) {
  return model_from_json_text(read_file(path));
}

std::string model_to_json_text(const MarkovModel& model) {
  ordered_json j;
  j["alphabet"] = model.alphabet().tokens();
  j["order"] = model.order();
  ordered_json rows = ordered_json::object();
  for (int s = 0; s < model.state_count(); ++s) {
    ordered_json row = ordered_json::object();
    for (int b = 0; b < model.symbol_count(); ++b) {
      row[model.alphabet().token(static_cast<Symbol>(b))] =
          model.transition(s, static_cast<Symbol>(b));
    }
    rows[state_key(model, s)] = std::move(row);
  }
  j["transitions"] = std::move(rows);
  return j.dump(2);
}

void save_model(const MarkovModel& model, const std::string& path) {
  write_text(model_to_json_text(model), path);
}

Trajectory ingest_trajectory(const std::string& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);

  Trajectory traj;
  std::string line;
  int line_no = 0;
  bool compact_mode = false;
  bool saw_any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_any) {
      saw_any = true;
      compact_mode = alphabet.single_char() && line.size() > 1;
    }
    if (compact_mode) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        const auto idx = alphabet.index(std::string_view(&line[i], 1));
        if (!idx) {
          throw InputError("unknown token '" + std::string(1, line[i]) + "' at line " +
                           std::to_string(line_no) + ", offset " + std::to_string(i + 1));
        }
        traj.symbols.push_back(*idx);
      }
    } else {
      const auto idx = alphabet.index(line);
      if (!idx) {
        throw InputError("unknown token '" + line + "' at line " +
                         std::to_string(line_no));
      }
      traj.symbols.push_back(*idx);
    }
  }
  if (traj.symbols.empty()) throw InputError("trajectory file " + path + " is empty");
  return traj;
}

void write_trajectory(const Trajectory& traj, const Alphabet& alphabet,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  if (alphabet.single_char()) {
    std::string line;
    line.reserve(traj.symbols.size() + 1);
    for (Symbol s : traj.symbols) line += alphabet.token(s);
    line += '\n';
    out << line;
  } else {
    for (Symbol s : traj.symbols) out << alphabet.token(s) << '\n';
  }
  if (!out.good()) throw InputError("failed writing " + path);
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << text;
  if (!out.good()) throw InputError("failed writing " + path);
}

const char* to_string(TimeKind kind) {
  switch (kind) {
    case TimeKind::Hit: return "hit";
    case TimeKind::Return: return "return";
    case TimeKind::Waiting: return "waiting";
  }
  return "?";
}

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::H: return "H";
    case EstimatorKind::W: return "W";
    case EstimatorKind::Dual: return "dual";
  }
  return "?";
}

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Exact: return "exact";
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
    case BoundKind::Indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(TestDecision decision) {
  switch (decision) {
    case TestDecision::RejectReversibility: return "reject_reversibility";
    case TestDecision::NoEvidence: return "no_evidence";
    case TestDecision::Indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(TestMethod method) {
  switch (method) {
    case TestMethod::Sign: return "sign";
    case TestMethod::Threshold: return "threshold";
  }
  return "?";
}

std::string time_records_to_csv(std::span<const TimeRecord> records) {
  std::string out = "kind,n,value,censored,scanned\n";
  for (const auto& r : records) {
    out += to_string(r.kind);
    out += ',' + std::to_string(r.word_len) + ',' + std::to_string(r.value) + ',' +
           (r.censored ? "1" : "0") + ',' + std::to_string(r.scanned) + '\n';
  }
  return out;
}

std::string estimate_to_json(const EstimateReport& r) {
  ordered_json j;
  j["estimator"] = to_string(r.estimator);
  j["n"] = r.n;
  j["raw"] = number_or_null(r.raw);
  j["per_symbol"] = number_or_null(r.per_symbol);
  j["censored"] = r.censored;
  j["bound"] = to_string(r.bound);
  j["caps_used"] = r.caps_used;
  j["cap"] = r.cap;
  return j.dump(2);
}

std::string estimate_to_csv(const EstimateReport& r) {
  std::string out = "estimator,n,raw,per_symbol,censored,bound,caps_used,cap\n";
  out += std::string(to_string(r.estimator)) + ',' + std::to_string(r.n) + ',' +
         fmt17(r.raw) + ',' + fmt17(r.per_symbol) + ',' + (r.censored ? "1" : "0") +
         ',' + to_string(r.bound) + ',' + std::to_string(r.caps_used) + ',' +
         std::to_string(r.cap) + '\n';
  return out;
}

std::string test_to_json(const TestReport& r) {
  ordered_json j;
  j["method"] = to_string(r.method);
  j["statistic"] = number_or_null(r.statistic);
  if (r.p_value.has_value()) {
    j["p_value"] = *r.p_value;
  } else {
    j["p_value"] = nullptr;
  }
  j["decision"] = to_string(r.decision);
  j["params"] = {{"n", r.n},
                 {"pairs", r.m_pairs},
                 {"cap", r.cap},
                 {"alpha", r.alpha},
                 {"c_threshold", r.c_threshold},
                 {"ties_dropped", r.ties_dropped},
                 {"indeterminate_dropped", r.indeterminate_dropped}};
  return j.dump(2);
}

std::string test_to_csv(const TestReport& r) {
  std::string out =
      "method,statistic,p_value,decision,n,pairs,cap,alpha,c_threshold,ties_dropped,"
      "indeterminate_dropped\n";
  out += std::string(to_string(r.method)) + ',' + fmt17(r.statistic) + ',' +
         (r.p_value ? fmt17(*r.p_value) : "") + ',' + to_string(r.decision) + ',' +
         std::to_string(r.n) + ',' + std::to_string(r.m_pairs) + ',' +
         std::to_string(r.cap) + ',' + fmt17(r.alpha) + ',' + fmt17(r.c_threshold) +
         ',' + std::to_string(r.ties_dropped) + ',' +
         std::to_string(r.indeterminate_dropped) + '\n';
  return out;
}

namespace {

ordered_json suite_json_impl(const SuiteReport& r, bool with_wall) {
  ordered_json j;
  j["suite"] = r.suite;
  j["model_id"] = r.model_id;
  ordered_json cfg;
  cfg["n_values"] = r.config.n_values;
  cfg["trials"] = r.config.trials;
  cfg["base_seed"] = r.config.base_seed;
  cfg["cap"] = r.config.cap;
  cfg["sampler"] = r.config.sampler == SamplerMode::Spectral ? "spectral" : "stream";
  cfg["estimator"] = r.config.estimator == EstimatorChoice::H ? "H" : "W";
  cfg["conditional_return"] = r.config.conditional_return;
  cfg["thresholds"] = {{"ks", r.config.ks_threshold},
                       {"clt_ks", r.config.clt_ks_threshold},
                       {"clt_var_rel", r.config.clt_var_rel_tol},
                       {"se_multiplier", r.config.se_multiplier},
                       {"censor_fail_fraction", r.config.censor_fail_fraction},
                       {"ldp_abs", r.config.ldp_abs_tol},
                       {"ldp_tail", r.config.ldp_tail_tol}};
  j["config"] = std::move(cfg);
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json jr;
    jr["n"] = row.n;
    for (const auto& [k, v] : row.stats) jr[k] = number_or_null(v);
    jr["pass"] = row.pass;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  ordered_json aux;
  for (const auto& [k, v] : r.aux) aux[k] = number_or_null(v);
  j["aux"] = std::move(aux);
  j["censored_dropped"] = r.censored_dropped;
  j["pass"] = r.pass;
  if (with_wall) j["wall_seconds"] = r.wall_seconds;
  return j;
}

}  // namespace

std::string suite_to_json(const SuiteReport& r) {
  return suite_json_impl(r, true).dump(2);
}

std::string suite_to_json_deterministic(const SuiteReport& r) {
  return suite_json_impl(r, false).dump(2);
}

std::string scgf_curve_to_csv(const ScgfCurve& curve) {
  std::string out = "p,value,derivative\n";
  for (const auto& pt : curve.points) {
    out += fmt17(pt.p) + ',' + fmt17(pt.value) + ',' + fmt17(pt.derivative) + '\n';
  }
  return out;
}

std::string rate_curve_to_csv(const RateCurve& curve) {
  std::string out = "q,value,argmax_p,boundary\n";
  for (const auto& pt : curve.points) {
    out += fmt17(pt.q) + ',' + fmt17(pt.value) + ',' + fmt17(pt.argmax_p) + ',' +
           (pt.boundary ? "1" : "0") + '\n';
  }
  return out;
}

std::string oracle_summary_to_json(const OracleSummary& s, const std::string& model_id) {
  ordered_json j;
  j["model_id"] = model_id;
  j["mep"] = s.mep;
  j["sigma2"] = s.sigma2;
  j["sigma2_enum"] = s.sigma2_enum;
  j["sigma2_gap_rel"] = s.sigma2_gap_rel;
  j["c_minus"] = s.c_minus;
  j["c_plus"] = s.c_plus;
  j["symmetry_residual_max"] = s.symmetry_residual_max;
  return j.dump(2);
}

}  // namespace irrev
