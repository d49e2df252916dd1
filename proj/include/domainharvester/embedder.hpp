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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "domainharvester/clock.hpp"

namespace dh::features {

inline constexpr std::size_t kEmbeddingDim = 768;

using Embedding = std::vector<float>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string model_id() const = 0;
  // One kEmbeddingDim vector per text, same order. Throws EmbedderFailure.
  virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) = 0;

  Embedding embed(const std::string& text);
};

// Signed feature hashing of ASCII-lowercased unigrams and bigrams into 768
// buckets, L2-normalized. Bytes >= 0x80 are kept inside tokens, so non-Latin
// titles hash as whole runs.
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::string_view kModelId = "hashing-v1-768";

  std::string model_id() const override { return std::string(kModelId); }
  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override;

  static Embedding embed_text(std::string_view text);
  static std::vector<std::string> tokenize(std::string_view text);
};

struct RemoteEmbedderConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080
  std::size_t batch_size = 64;
  Duration timeout{60000};
};

// Client for the embedding sidecar: POST /embed {"texts": [...]} answered by
// {"vectors": [[768 floats]...], "model_id": "..."}. Chunks transparently.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config);

  // Known after the first successful call; "remote:<url>" before that.
  std::string model_id() const override;
  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override;

 private:
  RemoteEmbedderConfig config_;
  std::string model_id_;
};

}  // namespace dh::features
