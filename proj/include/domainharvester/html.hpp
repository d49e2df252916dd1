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

#include <string>
#include <string_view>
#include <vector>

namespace dh::web {

struct Anchor {
  std::string href;
  std::string text;  // visible text, whitespace-collapsed
};

// What the crawler keeps from a page. Only <a href> anchors are links;
// scripts are never executed or scanned for URLs.
struct HtmlSummary {
  std::string title;  // first <title>, whitespace-collapsed, <= 512 chars
  std::vector<Anchor> anchors;
  std::string body_text;  // visible text outside head/script/style, collapsed
  std::size_t word_count = 0;
  std::size_t ad_frame_count = 0;
};

HtmlSummary parse_html(std::string_view html);

std::string collapse_whitespace(std::string_view s);

// Cuts at a UTF-8 code point boundary so the result is never longer than max_bytes.
std::string truncate_utf8(std::string_view s, std::size_t max_bytes);

}  // namespace dh::web
