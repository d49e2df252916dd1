// Copyright 2026 The DomainHarvester Authors
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

#include "domainharvester/embedder.hpp"

#include <cmath>

#include "domainharvester/digest.hpp"

namespace dh::features {
namespace {

constexpr std::string_view kEmptySentinel = "\x01<empty>";

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

void add_hashed(std::vector<double>& acc, std::string_view prefix, std::string_view token) {
  const auto h = fnv1a64(token, fnv1a64(prefix));
  const auto bucket = static_cast<std::size_t>(h % kEmbeddingDim);
  acc[bucket] += (h >> 63) ? -1.0 : 1.0;
}

}  // namespace

Embedding Embedder::embed(const std::string& text) { return embed_batch({text}).at(0); }

std::vector<std::string> HashingEmbedder::tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_token_byte(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Embedding HashingEmbedder::embed_text(std::string_view text) {
  auto tokens = tokenize(text);
  std::vector<double> acc(kEmbeddingDim, 0.0);
  auto fill = [&] {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      add_hashed(acc, "u:", tokens[i]);
      if (i + 1 < tokens.size()) add_hashed(acc, "b:", tokens[i] + ' ' + tokens[i + 1]);
    }
  };
  fill();
  double norm = 0;
  for (double v : acc) norm += v * v;
  if (norm == 0) {
    // Empty input, or hash collisions that cancelled out exactly.
    tokens.assign(1, std::string(kEmptySentinel));
    std::fill(acc.begin(), acc.end(), 0.0);
    fill();
    norm = 1;
  }
  norm = std::sqrt(norm);
  Embedding out(kEmbeddingDim);
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

std::vector<Embedding> HashingEmbedder::embed_batch(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

}  // namespace dh::features
