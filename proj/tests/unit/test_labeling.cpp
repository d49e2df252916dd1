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

#include "domainharvester/error.hpp"
#include "domainharvester/labeling.hpp"
#include "domainharvester/snapshot_store.hpp"

using namespace dh;
using namespace dh::labeling;

namespace {

const TimePoint kT0 = parse_date("2022-11-11");

dns::DnsSnapshotEntry dns_entry(std::vector<std::string> ns) {
  dns::DnsSnapshotEntry e;
  for (auto t : dns::kCollectedTypes) e.rcodes[std::string(dns::to_string(t))] = dns::Rcode::NoError;
  if (!ns.empty()) e.records["NS"] = std::move(ns);
  return e;
}

web::DomainWebRecord web_record(const std::string& pld, std::size_t backlinks = 1) {
  web::DomainWebRecord r;
  r.pld = pld;
  r.access.http_status = 200;
  r.landing_url = "http://" + pld + "/";
  r.fetched_at = kT0;
  r.landing.word_count = 400;
  r.landing.text_excerpt = "Welcome to our company";
  for (std::size_t i = 0; i < backlinks; ++i) r.backlinks["seed" + std::to_string(i) + ".com"] = 1;
  return r;
}

web::CertificateInfo cert(TimePoint from, TimePoint to) {
  web::CertificateInfo c;
  c.issuer_organization = "CA";
  c.not_before = from;
  c.not_after = to;
  c.chain_valid_at_fetch = true;
  return c;
}

ParkingConfig parking() { return ParkingConfig::parse("# providers\nparking-example.net.\n\nPARKED.test\n"); }

store::IterationSnapshot snap(std::uint64_t id) {
  store::IterationSnapshot s;
  s.iteration_id = id;
  s.seed_list = "unit";
  s.date = format_date(kT0 + std::chrono::days(7 * (id - 1)));
  return s;
}

void put(store::IterationSnapshot& s, const web::DomainWebRecord& w, const dns::DnsSnapshotEntry& d) {
  s.web.discovered[w.pld] = w;
  s.dns[w.pld] = d;
  s.dns[w.pld].pld = w.pld;
}

}  // namespace

TEST_SUITE("labeling") {
  TEST_CASE("parking provider list parsing") {
    const auto p = parking();
    CHECK(p.ns_providers == std::vector<std::string>{"parking-example.net", "parked.test"});
    CHECK_THROWS_AS(ParkingConfig::parse("# nothing\n"), Error);
  }

  TEST_CASE("DNS rule: NS set change or NXDOMAIN on either side") {
    std::string ev;
    CHECK_FALSE(rule_dns_change(dns_entry({"a.ns.net", "b.ns.net"}), dns_entry({"b.ns.net", "a.ns.net"})));
    CHECK(rule_dns_change(dns_entry({"a.ns.net"}), dns_entry({"c.ns.net"}), &ev));
    CHECK(ev.find("c.ns.net") != std::string::npos);
    auto gone = dns_entry({});
    gone.rcodes["NS"] = dns::Rcode::NXDomain;
    CHECK(rule_dns_change(dns_entry({"a.ns.net"}), gone));
    CHECK(rule_dns_change(gone, dns_entry({"a.ns.net"})));
    auto timeout = dns_entry({});
    timeout.rcodes["NS"] = dns::Rcode::Timeout;
    CHECK_FALSE(rule_dns_change(timeout, timeout));
  }

  TEST_CASE("certificate rule: outside validity at fetch time") {
    auto ok = web_record("a.com");
    ok.via_https = true;
    ok.certificate = cert(kT0 - std::chrono::days(30), kT0 + std::chrono::days(30));
    auto expired = ok;
    expired.certificate = cert(kT0 - std::chrono::days(90), kT0 - std::chrono::days(1));
    auto future = ok;
    future.certificate = cert(kT0 + std::chrono::days(1), kT0 + std::chrono::days(90));
    auto plain = web_record("a.com");
    CHECK_FALSE(rule_cert_expired(ok, ok));
    CHECK_FALSE(rule_cert_expired(plain, plain));
    CHECK(rule_cert_expired(ok, expired));
    CHECK(rule_cert_expired(expired, plain));
    CHECK(rule_cert_expired(plain, future));
    auto over_http = expired;
    over_http.via_https = false;
    CHECK_FALSE(rule_cert_expired(over_http, over_http));
    auto edge = ok;
    edge.certificate = cert(kT0 - std::chrono::days(30), kT0);
    CHECK_FALSE(rule_cert_expired(edge, edge));
  }

  TEST_CASE("access rule: connection, TLS, timeout or HTTP error") {
    auto ok = web_record("a.com");
    auto err = ok;
    err.access.http_status = 503;
    CHECK_FALSE(rule_access_failure(ok, ok));
    CHECK(rule_access_failure(ok, err));
    CHECK(rule_access_failure(err, ok));
    auto redirect = ok;
    redirect.access.http_status = 301;
    CHECK_FALSE(rule_access_failure(ok, redirect));
    auto refused = ok;
    refused.access = {0, web::FetchError::ConnectionError};
    std::string ev;
    CHECK(rule_access_failure(ok, refused, &ev));
    CHECK(ev.find("current") != std::string::npos);
  }

  TEST_CASE("backlink rule is a strict reduction above the ratio") {
    CHECK_FALSE(rule_backlink_drop(10, 5));
    CHECK(rule_backlink_drop(10, 4));
    CHECK(rule_backlink_drop(1, 0));
    CHECK_FALSE(rule_backlink_drop(0, 0));
    CHECK_FALSE(rule_backlink_drop(3, 5));
    CHECK(rule_backlink_drop(10, 7, 0.25));
  }

  TEST_CASE("parking: NS provider, ad-heavy page or sale phrase") {
    const auto cfg = parking();
    std::string ev;
    CHECK(is_parked(dns_entry({"ns1.parking-example.net"}), web_record("a.com"), cfg, &ev));
    CHECK(ev.find("parking-example.net") != std::string::npos);
    CHECK_FALSE(is_parked(dns_entry({"ns1.notparking-example.net"}), web_record("a.com"), cfg));
    auto ads = web_record("a.com");
    ads.landing.ad_frame_count = 3;
    ads.landing.word_count = 20;
    CHECK(is_parked(dns_entry({}), ads, cfg));
    ads.landing.word_count = 50;
    CHECK_FALSE(is_parked(dns_entry({}), ads, cfg));
    auto sale = web_record("a.com");
    sale.landing.text_excerpt = "This Domain Is For Sale! Contact us.";
    CHECK(is_parked(dns_entry({}), sale, cfg));
    sale.access.http_status = 404;
    CHECK_FALSE(is_parked(dns_entry({}), sale, cfg));
  }

  TEST_CASE("label_iteration applies rules in order and reports departures") {
    auto prev = snap(1), curr = snap(2);
    const auto ns = dns_entry({"ns.host.net"});
    const auto moved = dns_entry({"ns.other.net"});
    put(prev, web_record("both.com"), ns);
    auto both_curr = web_record("both.com");
    both_curr.access.http_status = 500;
    put(curr, both_curr, moved);  // DNS wins over access

    auto expiring = web_record("cert.com");
    put(prev, expiring, ns);
    expiring.via_https = true;
    expiring.certificate = cert(kT0 - std::chrono::days(90), kT0 - std::chrono::days(1));
    expiring.access.http_status = 500;
    put(curr, expiring, ns);  // cert wins over access

    put(prev, web_record("down.com"), ns);
    auto down = web_record("down.com");
    down.access = {0, web::FetchError::Timeout};
    put(curr, down, ns);

    put(prev, web_record("links.com", 10), ns);
    put(curr, web_record("links.com", 4), ns);
    put(prev, web_record("kept.com", 10), ns);
    put(curr, web_record("kept.com", 5), ns);

    put(prev, web_record("parked.com"), ns);
    put(curr, web_record("parked.com"), dns_entry({"ns2.parked.test"}));  // NS change comes first
    auto sale = web_record("sale.com");
    sale.landing.text_excerpt = "buy this domain";
    put(prev, web_record("sale.com"), ns);
    put(curr, sale, ns);

    put(curr, web_record("new.com"), ns);
    put(prev, web_record("gone.com", 3), ns);

    const auto r = label_iteration(prev, curr, parking());
    CHECK(r.iteration_id == 2);
    CHECK(r.previous_iteration_id == 1);
    CHECK(r.labels.at("both.com").category == Category::DnsChange);
    CHECK(r.labels.at("cert.com").category == Category::CertChange);
    CHECK(r.labels.at("down.com").category == Category::AccessChange);
    CHECK(r.labels.at("links.com").category == Category::BacklinkDrop);
    CHECK_FALSE(r.labels.at("kept.com").category);
    CHECK(r.labels.at("parked.com").category == Category::DnsChange);
    CHECK(r.labels.at("sale.com").category == Category::Parking);
    CHECK_FALSE(r.labels.at("new.com").category);
    CHECK(r.labels.at("new.com").evidence == "first seen this iteration");
    CHECK(r.counts == std::array<std::size_t, 5>{2, 1, 1, 1, 1});
    CHECK(r.subtotal == 6);
    CHECK(r.labeled().size() == 6);
    CHECK(r.unknown() == std::vector<std::string>{"kept.com", "new.com"});
    REQUIRE(r.departed.size() == 1);
    CHECK(r.departed[0].pld == "gone.com");
    CHECK_FALSE(r.labels.contains("gone.com"));

    const Json j = r;
    CHECK(j.get<LabelReport>() == r);
  }

  TEST_CASE("snapshots must share a seed list and be in order") {
    auto a = snap(1), b = snap(2);
    b.seed_list = "other";
    CHECK_THROWS_AS(label_iteration(a, b, parking()), Error);
    CHECK_THROWS_AS(label_iteration(snap(2), snap(1), parking()), Error);
  }

  TEST_CASE("category names and subtotal") {
    for (auto c : kCategories) CHECK(category_from_string(to_string(c)) == c);
    CHECK(aggregate_subtotal({659, 685, 137, 27, 128}) == 1636);
  }
}
