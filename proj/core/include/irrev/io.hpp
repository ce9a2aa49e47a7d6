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

#include <string>

#include "irrev/estimators.hpp"
#include "irrev/harness.hpp"
#include "irrev/markov_model.hpp"
#include "irrev/matching.hpp"
#include "irrev/oracle.hpp"

namespace irrev {

enum class ReportFormat { Csv, Json };

/// Model file: JSON {alphabet: [tokens], order, transitions: {state: {token:
/// prob}}}. State keys join the last-r tokens directly for single-character
/// alphabets and with "," otherwise; rows are validated on load.
MarkovModel load_model(const std::string& path);
MarkovModel model_from_json_text(const std::string& text);
std::string model_to_json_text(const MarkovModel& model);
void save_model(const MarkovModel& model, const std::string& path);

/// Trajectory file: one token per line, or a compact single line for
/// single-character alphabets (autodetected on ingest). Errors name the
/// line/offset of the first bad token.
Trajectory ingest_trajectory(const std::string& path, const Alphabet& alphabet);
void write_trajectory(const Trajectory& traj, const Alphabet& alphabet,
                      const std::string& path);

/// Report serialization. JSON reports are single objects; CSV reports carry
/// a header row; floats round-trip (17 significant digits).
std::string time_records_to_csv(std::span<const TimeRecord> records);
std::string estimate_to_json(const EstimateReport& report);
std::string estimate_to_csv(const EstimateReport& report);
std::string test_to_json(const TestReport& report);
std::string test_to_csv(const TestReport& report);
std::string suite_to_json(const SuiteReport& report);
/// Bitwise-comparable serialization: identical configs must produce
/// identical bytes, so the wall-clock field is omitted.
std::string suite_to_json_deterministic(const SuiteReport& report);
std::string scgf_curve_to_csv(const ScgfCurve& curve);
std::string rate_curve_to_csv(const RateCurve& curve);
std::string oracle_summary_to_json(const OracleSummary& summary,
                                   const std::string& model_id);

void write_text(const std::string& text, const std::string& path);

const char* to_string(TimeKind kind);
const char* to_string(EstimatorKind kind);
const char* to_string(BoundKind kind);
const char* to_string(TestDecision decision);
const char* to_string(TestMethod method);

}  // namespace irrev
