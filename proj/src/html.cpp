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

#include "domainharvester/html.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace dh::web {
namespace {

constexpr std::size_t kTitleLimit = 512;
constexpr std::size_t kBodyTextLimit = 16384;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, unsigned long, std::less<>> kNamed = {
      {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'}, {"apos", '\''}, {"nbsp", 0xA0}, {"copy", 0xA9},
      {"reg", 0xAE}, {"trade", 0x2122}, {"mdash", 0x2014}, {"ndash", 0x2013}, {"hellip", 0x2026},
      {"laquo", 0xAB}, {"raquo", 0xBB}, {"middot", 0xB7}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    const auto name = s.substr(i + 1, semi - i - 1);
    std::optional<unsigned long> cp;
    if (!name.empty() && name[0] == '#') {
      try {
        std::size_t used = 0;
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        const std::string digits(name.substr(hex ? 2 : 1));
        if (!digits.empty()) {
          cp = std::stoul(digits, &used, hex ? 16 : 10);
          if (used != digits.size()) cp.reset();
        }
      } catch (...) {
        cp.reset();
      }
    } else if (auto it = kNamed.find(name); it != kNamed.end()) {
      cp = it->second;
    }
    if (!cp) {
      out.push_back('&');
      continue;
    }
    append_utf8(out, *cp == 0xA0 ? ' ' : *cp);
    i = semi;
  }
  return out;
}

struct Tag {
  std::string name;  // lowercase, without '/'
  bool closing = false;
  std::map<std::string, std::string> attrs;
};

// Parses the tag starting at html[pos] == '<'; returns the index after '>'.
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_begin = i;
  while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '>' && html[i] != '/') ++i;
  tag.name = lower(html.substr(name_begin, i - name_begin));
  while (i < html.size() && html[i] != '>') {
    if (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/') {
      ++i;
      continue;
    }
    const std::size_t an = i;
    while (i < html.size() && html[i] != '=' && html[i] != '>' && !std::isspace(static_cast<unsigned char>(html[i])) &&
           html[i] != '/')
      ++i;
    std::string attr = lower(html.substr(an, i - an));
    while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
    std::string value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        const char q = html[i++];
        const auto end = html.find(q, i);
        const std::size_t stop = end == std::string_view::npos ? html.size() : end;
        value = html.substr(i, stop - i);
        i = stop == html.size() ? stop : stop + 1;
      } else {
        const std::size_t vb = i;
        while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '>') ++i;
        value = html.substr(vb, i - vb);
      }
    }
    if (!attr.empty() && !tag.attrs.contains(attr)) tag.attrs.emplace(std::move(attr), decode_entities(value));
  }
  return i < html.size() ? i + 1 : html.size();
}

bool has_ad_marker(const Tag& tag) {
  static const char* kMarkers[] = {"ad", "ads", "advert", "advertisement", "sponsored", "adsbygoogle", "ad-slot",
                                   "adunit"};
  for (const char* key : {"class", "id"}) {
    auto it = tag.attrs.find(key);
    if (it == tag.attrs.end()) continue;
    const std::string v = lower(it->second);
    std::size_t b = 0;
    while (b < v.size()) {
      while (b < v.size() && std::isspace(static_cast<unsigned char>(v[b]))) ++b;
      std::size_t e = b;
      while (e < v.size() && !std::isspace(static_cast<unsigned char>(v[e]))) ++e;
      const std::string word = v.substr(b, e - b);
      for (const char* m : kMarkers) {
        if (word == m) return true;
      }
      b = e;
    }
  }
  return false;
}

}  // namespace

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string truncate_utf8(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return std::string(s.substr(0, cut));
}

HtmlSummary parse_html(std::string_view html) {
  HtmlSummary out;
  std::string title_raw;
  bool in_title = false;
  bool title_done = false;
  int anchor_depth = 0;
  std::string anchor_href;
  std::string anchor_text;
  std::string body_raw;
  bool in_head = false;

  auto add_text = [&](std::string_view raw) {
    if (in_title) {
      title_raw.append(raw);
      return;
    }
    if (anchor_depth > 0) anchor_text.append(raw);
    if (!in_head && body_raw.size() < kBodyTextLimit * 2) {
      body_raw.append(raw);
      body_raw.push_back(' ');
    }
  };

  std::size_t i = 0;
  while (i < html.size()) {
    const auto lt = html.find('<', i);
    if (lt == std::string_view::npos) {
      add_text(html.substr(i));
      break;
    }
    if (lt > i) add_text(html.substr(i, lt - i));
    if (html.substr(lt, 4) == "<!--") {
      const auto end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (lt + 1 < html.size() && (html[lt + 1] == '!' || html[lt + 1] == '?')) {
      const auto end = html.find('>', lt);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    if (lt + 1 >= html.size() || !(std::isalpha(static_cast<unsigned char>(html[lt + 1])) || html[lt + 1] == '/')) {
      add_text("<");
      i = lt + 1;
      continue;
    }
    Tag tag;
    i = parse_tag(html, lt, tag);
    if (!tag.closing && (tag.name == "script" || tag.name == "style" || tag.name == "template")) {
      // Raw text elements: skip to the matching close tag without looking inside.
      const std::string close = "</" + tag.name;
      std::size_t search = i;
      while (true) {
        const auto found = html.find('<', search);
        if (found == std::string_view::npos) {
          i = html.size();
          break;
        }
        if (lower(html.substr(found, close.size())) == close) {
          const auto gt = html.find('>', found);
          i = gt == std::string_view::npos ? html.size() : gt + 1;
          break;
        }
        search = found + 1;
      }
      if (tag.name == "script" && has_ad_marker(tag)) ++out.ad_frame_count;
      continue;
    }
    if (tag.name == "head") in_head = !tag.closing;
    if (tag.name == "body" && !tag.closing) in_head = false;
    if (tag.name == "title") {
      if (!tag.closing && !title_done) {
        in_title = true;
      } else if (tag.closing && in_title) {
        in_title = false;
        title_done = true;
      }
      continue;
    }
    if (tag.name == "a") {
      if (!tag.closing) {
        if (anchor_depth > 0 && !anchor_href.empty()) {
          out.anchors.push_back({anchor_href, collapse_whitespace(decode_entities(anchor_text))});
        }
        auto it = tag.attrs.find("href");
        anchor_href = it == tag.attrs.end() ? std::string() : it->second;
        anchor_text.clear();
        anchor_depth = 1;
      } else if (anchor_depth > 0) {
        if (!anchor_href.empty()) {
          out.anchors.push_back({anchor_href, collapse_whitespace(decode_entities(anchor_text))});
        }
        anchor_depth = 0;
        anchor_href.clear();
        anchor_text.clear();
      }
      continue;
    }
    if (!tag.closing) {
      if (tag.name == "iframe" || tag.name == "ins" || has_ad_marker(tag)) ++out.ad_frame_count;
      if (anchor_depth > 0 && tag.name == "img") {
        if (auto alt = tag.attrs.find("alt"); alt != tag.attrs.end()) anchor_text += " " + alt->second + " ";
      }
      if (tag.name == "br" || tag.name == "p" || tag.name == "div" || tag.name == "li") add_text(" ");
    }
  }
  if (anchor_depth > 0 && !anchor_href.empty()) {
    out.anchors.push_back({anchor_href, collapse_whitespace(decode_entities(anchor_text))});
  }
  out.title = truncate_utf8(collapse_whitespace(decode_entities(title_raw)), kTitleLimit);
  out.body_text = truncate_utf8(collapse_whitespace(decode_entities(body_raw)), kBodyTextLimit);
  std::size_t words = 0;
  bool in_word = false;
  for (char c : out.body_text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  out.word_count = words;
  return out;
}

}  // namespace dh::web
