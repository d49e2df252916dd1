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

#include <cmath>

#include "domainharvester/embedder.hpp"
#include "domainharvester/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace dh::features {

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
  while (!config_.base_url.empty() && config_.base_url.back() == '/') config_.base_url.pop_back();
  if (config_.base_url.rfind("http://", 0) != 0) {
    throw Error(Errc::ConfigError, "embedder url must start with http://: " + config_.base_url);
  }
  if (config_.batch_size == 0 || config_.batch_size > 64) {
    throw Error(Errc::ConfigError, "embedder batch size must be in [1, 64]");
  }
}

std::string RemoteEmbedder::model_id() const {
  return model_id_.empty() ? "remote:" + config_.base_url : model_id_;
}

std::vector<Embedding> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) {
  httplib::Client client(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);

  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    const auto end = std::min(texts.size(), start + config_.batch_size);
    nlohmann::json req{{"texts", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                          texts.begin() + static_cast<std::ptrdiff_t>(end))}};
    auto res = client.Post("/embed", req.dump(), "application/json");
    if (!res) {
      throw Error(Errc::EmbedderFailure, "POST " + config_.base_url + "/embed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(Errc::EmbedderFailure, "POST /embed returned HTTP " + std::to_string(res->status));
    }
    try {
      const auto doc = nlohmann::json::parse(res->body);
      const auto& vectors = doc.at("vectors");
      if (vectors.size() != end - start) throw Error(Errc::EmbedderFailure, "embedder returned misaligned batch");
      const auto id = doc.at("model_id").get<std::string>();
      if (!model_id_.empty() && id != model_id_) {
        throw Error(Errc::EmbedderFailure, "embedder model changed mid-run: " + model_id_ + " -> " + id);
      }
      model_id_ = id;
      for (const auto& v : vectors) {
        auto e = v.get<Embedding>();
        if (e.size() != kEmbeddingDim) throw Error(Errc::EmbedderFailure, "embedding has wrong dimension");
        for (float x : e) {
          if (!std::isfinite(x)) throw Error(Errc::EmbedderFailure, "embedding has non-finite value");
        }
        out.push_back(std::move(e));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::EmbedderFailure, std::string("malformed embedder response: ") + e.what());
    }
  }
  return out;
}

}  // namespace dh::features
