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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace irrev {

/// Symbols are stored as indices into an Alphabet. Alphabets are capped at
/// 256 tokens, which covers every supported model (m^r <= 256).
using Symbol = std::uint8_t;

/// A finite block x_1..x_n of alphabet indices.
using Word = std::vector<Symbol>;

Word reversed(std::span<const Symbol> word);

/// Ordered set of distinct, non-empty tokens; index() is a bijection onto
/// 0..size()-1.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(Symbol i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<Symbol> index(std::string_view token) const;

  /// True when every token is a single character; enables the compact
  /// one-line trajectory file format.
  bool single_char() const { return single_char_; }

  /// Renders a word using this alphabet (no separator for single-char
  /// alphabets, "," otherwise).
  std::string format(std::span<const Symbol> word) const;

  bool operator==(const Alphabet& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Symbol> index_;
  bool single_char_ = false;
};

}  // namespace irrev
