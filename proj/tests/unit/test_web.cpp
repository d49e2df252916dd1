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

#include "doctest.h"
#include "helpers.hpp"

#include <map>

#include "domainharvester/error.hpp"
#include "domainharvester/html.hpp"
#include "domainharvester/politeness.hpp"
#include "domainharvester/robots.hpp"
#include "domainharvester/serialize.hpp"
#include "domainharvester/url.hpp"
#include "domainharvester/webcrawl.hpp"

using namespace dh;
using namespace dh::web;

namespace {

// Serves canned pages keyed by full URL; anything else is a 404.
class MapFetcher final : public Fetcher {
 public:
  FetchResponse fetch(const Url& url, TimePoint) override {
    const auto key = url.to_string();
    requested.push_back(key);
    FetchResponse r;
    if (auto it = redirects.find(key); it != redirects.end()) {
      r.status.http_status = 301;
      r.location = it->second;
      return r;
    }
    if (refused.contains(url.host)) {
      r.status.error = FetchError::ConnectionError;
      return r;
    }
    auto it = pages.find(key);
    if (it == pages.end()) {
      r.status.http_status = 404;
      return r;
    }
    r.status.http_status = 200;
    r.content_type = "text/html";
    r.body = it->second;
    return r;
  }

  std::map<std::string, std::string> pages;
  std::map<std::string, std::string> redirects;
  std::set<std::string> refused;
  std::vector<std::string> requested;
};

std::string page(const std::string& title, const std::vector<std::pair<std::string, std::string>>& links) {
  std::string html = "<html><head><title>" + title + "</title></head><body>";
  for (const auto& [href, text] : links) html += "<a href=\"" + href + "\">" + text + "</a>";
  return html + "</body></html>";
}

}  // namespace

TEST_SUITE("web") {
  TEST_CASE("parse_url canonicalizes and rejects non-http schemes") {
    auto u = parse_url("HTTP://WWW.Example.COM:80/a/b?x=1#frag");
    REQUIRE(u);
    CHECK(u->scheme == "http");
    CHECK(u->host == "www.example.com");
    CHECK(u->path == "/a/b");
    CHECK(u->query == "x=1");
    CHECK(u->effective_port() == 80);
    CHECK(parse_url("https://example.com")->path == "/");
    CHECK(parse_url("https://example.com:8443/")->origin() == "https://example.com:8443");
    CHECK_FALSE(parse_url("ftp://example.com/"));
    CHECK_FALSE(parse_url("/relative/path"));
    CHECK_FALSE(parse_url("http://exa mple.com/"));
  }

  TEST_CASE("resolve_url follows RFC 3986 reference resolution") {
    const auto base = *parse_url("http://a.example/b/c/d;p?q");
    CHECK(resolve_url(base, "g")->to_string() == "http://a.example/b/c/g");
    CHECK(resolve_url(base, "../g")->to_string() == "http://a.example/b/g");
    CHECK(resolve_url(base, "/g")->to_string() == "http://a.example/g");
    CHECK(resolve_url(base, "?y")->to_string() == "http://a.example/b/c/d;p?y");
    CHECK(resolve_url(base, "//other.example/x")->to_string() == "http://other.example/x");
    CHECK(resolve_url(base, "../../../g")->to_string() == "http://a.example/g");
    CHECK_FALSE(resolve_url(base, "mailto:someone@example.com"));
    CHECK_FALSE(resolve_url(base, "javascript:void(0)"));
  }

  TEST_CASE("robots rules: longest match wins, Allow wins ties") {
    const auto r = RobotsRules::parse(
        "User-agent: otherbot\nDisallow: /\n\n"
        "User-agent: *\nDisallow: /private/\nAllow: /private/open\nDisallow: /*.pdf$\n",
        CrawlPolicy{}.user_agent);
    CHECK(r.allowed("/"));
    CHECK_FALSE(r.allowed("/private/x"));
    CHECK(r.allowed("/private/open/page"));
    CHECK_FALSE(r.allowed("/docs/file.pdf"));
    CHECK(r.allowed("/docs/file.pdf?download=1"));
    CHECK_FALSE(r.disallows_everything());

    const auto own = RobotsRules::parse("User-agent: DomainHarvesterBot\nDisallow: /\n", CrawlPolicy{}.user_agent);
    CHECK(own.disallows_everything());
    CHECK(RobotsRules::allow_all().allowed("/anything"));
    CHECK(robots_product_token(CrawlPolicy{}.user_agent) == "domainharvesterbot");
  }

  TEST_CASE("politeness scheduler spaces slots per host") {
    PolitenessScheduler s(Duration{3000});
    const TimePoint t0 = parse_date("2022-11-11");
    CHECK(s.reserve("a.example", t0) == t0);
    CHECK(s.reserve("a.example", t0) == t0 + Duration{3000});
    CHECK(s.reserve("b.example", t0) == t0);
    CHECK(s.next_available("a.example", t0) == t0 + Duration{6000});
    CHECK(s.reserve("a.example", t0 + Duration{10000}) == t0 + Duration{10000});
  }

  TEST_CASE("html summary keeps title, anchors, text and ad frames") {
    const auto s = parse_html(
        "<html><head><title>  Hello \n World </title><style>p{}</style></head><body>"
        "<script>var u='http://x.example/';</script>"
        "<p>Some  visible text</p><a href=\"/x\">Link <b>one</b></a>"
        "<iframe src=\"https://ads.example/1\"></iframe><a name=\"anchor-only\">no href</a></body></html>");
    CHECK(s.title == "Hello World");
    REQUIRE(s.anchors.size() == 1);
    CHECK(s.anchors[0].href == "/x");
    CHECK(s.anchors[0].text == "Link one");
    CHECK(s.body_text.find("var u") == std::string::npos);
    CHECK(s.body_text.find("Some visible text") != std::string::npos);
    CHECK(s.ad_frame_count == 1);
    CHECK(collapse_whitespace("  a \t b\n\nc ") == "a b c");
  }

  TEST_CASE("truncate_utf8 never splits a code point") {
    const std::string s = "ab\xc3\xa9";  // "abé"
    CHECK(truncate_utf8(s, 4) == s);
    CHECK(truncate_utf8(s, 3) == "ab");
    CHECK(truncate_utf8(s, 0).empty());
    CHECK(truncate_utf8("\xe4\xbe\x8b\xe3\x81\x88", 5) == "\xe4\xbe\x8b");
  }

  TEST_CASE("fetch status classification") {
    FetchStatus s;
    s.http_status = 200;
    CHECK(s.ok());
    CHECK_FALSE(s.is_access_failure());
    s.http_status = 503;
    CHECK(s.is_access_failure());
    s = {};
    s.error = FetchError::TlsError;
    CHECK(s.is_access_failure());
    s.error = FetchError::RobotsDisallowed;
    CHECK_FALSE(s.is_access_failure());
    CHECK(fetch_error_from_string(to_string(FetchError::TooManyRedirects)) == FetchError::TooManyRedirects);
  }

  TEST_CASE("seed list parsing") {
    const auto list = SeedList::parse("# seeds\nhttps://www.a.example.com/\n\nhttp://b.example.org/x\n", "s", test::psl());
    CHECK(list.urls.size() == 2);
    CHECK(list.plds == std::vector<std::string>{"example.com", "example.org"});
    CHECK_THROWS_AS(SeedList::parse("https://a.example.com/\nhttps://b.example.com/\n", "s", test::psl()), Error);
    CHECK_THROWS_AS(SeedList::parse("not a url\n", "s", test::psl()), Error);
  }

  TEST_CASE("link classification") {
    CrawlPolicy p;
    const pld::PayLevelDomain seed{"seed.example", "example"}, other{"other.example", "example"};
    CHECK(classify_link(seed, seed, 0, p) == LinkAction::FollowAndExtract);
    CHECK(classify_link(seed, seed, 2, p) == LinkAction::FollowAndExtract);
    CHECK(classify_link(seed, seed, 3, p) == LinkAction::Skip);
    CHECK(classify_link(seed, other, 3, p) == LinkAction::FetchOnce);
    p.politeness = true;
    p.min_host_interval = Duration{1000};
    CHECK_THROWS_AS(p.validate(), Error);
  }

  TEST_CASE("crawl follows same-PLD links, fetches externals once, records backlinks") {
    MapFetcher f;
    f.pages["http://seed-a.com/"] = page("A home", {{"/about", "About"}, {"http://ext.com/", "Ext"},
                                                     {"http://www.ext.com/deep", "Ext again"},
                                                     {"http://moved.com/", "Moved"}});
    f.pages["http://seed-a.com/about"] = page("A about", {{"http://seed-b.com/", "Sibling"}});
    f.pages["http://seed-b.com/"] = page("B home", {{"http://ext.com/", "Ext from B"}, {"/", "self"}});
    f.pages["http://ext.com/"] = page("Ext", {{"http://never.com/", "not followed"}});
    f.redirects["http://moved.com/"] = "http://target.com/";
    f.pages["http://target.com/"] = page("Target", {});

    const auto seeds = SeedList::parse("http://seed-a.com/\nhttp://seed-b.com/\n", "t", test::psl());
    SimulatedClock clock(parse_date("2022-11-11"));
    const auto result = crawl_seed_list(seeds, CrawlPolicy{}, f, clock, test::psl(), 1);

    CHECK(result.iteration_id == 1);
    CHECK(result.discovered.size() == 4);
    CHECK(result.discovered.contains("seed-a.com"));
    CHECK(result.discovered.contains("seed-b.com"));
    CHECK(result.discovered.contains("ext.com"));
    CHECK(result.discovered.contains("target.com"));
    CHECK_FALSE(result.discovered.contains("never.com"));
    CHECK_FALSE(result.discovered.contains("moved.com"));

    const auto& ext = result.discovered.at("ext.com");
    CHECK(ext.backlink_count() == 2);
    CHECK(ext.backlinks.at("seed-a.com") == 2);
    CHECK(ext.titles.size() == 1);
    CHECK(ext.link_texts.size() == 3);
    CHECK(result.discovered.at("target.com").aliases == std::vector<std::string>{"moved.com"});
    CHECK(result.discovered.at("seed-b.com").backlinks.at("seed-a.com") == 1);
    CHECK(result.discovered.at("seed-a.com").titles.size() == 2);
    CHECK(result.discovered.at("seed-a.com").is_seed);
    CHECK(std::count(f.requested.begin(), f.requested.end(), "http://ext.com/") == 1);

    const auto backlinks = record_backlinks(result);
    CHECK(backlinks.at("ext.com") == std::set<std::string>{"seed-a.com", "seed-b.com"});

    const Json j = result;
    CHECK(j.get<WebCrawlResult>() == result);
  }

  TEST_CASE("unreachable seeds are reported") {
    MapFetcher f;
    f.refused.insert("down.com");
    const auto seeds = SeedList::parse("http://down.com/\n", "t", test::psl());
    SimulatedClock clock(parse_date("2022-11-11"));
    const auto result = crawl_seed_list(seeds, CrawlPolicy{}, f, clock, test::psl());
    CHECK(result.unreachable_seeds == std::vector<std::string>{"down.com"});
    CHECK(result.discovered.at("down.com").access.error == FetchError::ConnectionError);
  }

  TEST_CASE("depth limit stops same-PLD expansion") {
    MapFetcher f;
    f.pages["http://deep.com/"] = page("0", {{"/1", ""}});
    f.pages["http://deep.com/1"] = page("1", {{"/2", ""}});
    f.pages["http://deep.com/2"] = page("2", {{"/3", ""}});
    f.pages["http://deep.com/3"] = page("3", {{"/4", ""}});
    f.pages["http://deep.com/4"] = page("4", {});
    const auto seeds = SeedList::parse("http://deep.com/\n", "t", test::psl());
    SimulatedClock clock(parse_date("2022-11-11"));
    CrawlPolicy policy;
    const auto result = crawl_seed_list(seeds, policy, f, clock, test::psl());
    CHECK(result.discovered.at("deep.com").titles.size() == 4);
    CHECK(std::find(f.requested.begin(), f.requested.end(), "http://deep.com/4") == f.requested.end());
  }
}
