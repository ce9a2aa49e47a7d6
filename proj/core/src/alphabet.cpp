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

#include "irrev/alphabet.hpp"

#include <algorithm>

#include "irrev/errors.hpp"

namespace irrev {

Word reversed(std::span<const Symbol> word) {
  return Word(word.rbegin(), word.rend());
}

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2) {
    throw ValidationError("alphabet needs at least 2 tokens");
  }
  if (tokens_.size() > 256) {
    throw ValidationError("alphabet is capped at 256 tokens");
  }
  single_char_ = true;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty()) {
      throw ValidationError("alphabet token " + std::to_string(i) + " is empty");
    }
    if (!index_.emplace(t, static_cast<Symbol>(i)).second) {
      throw ValidationError("duplicate alphabet token '" + t + "'");
    }
    if (t.size() != 1) single_char_ = false;
  }
}

std::optional<Symbol> Alphabet::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Alphabet::format(std::span<const Symbol> word) const {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i > 0 && !single_char_) out += ',';
    out += tokens_[word[i]];
  }
  return out;
}

}  // namespace irrev
