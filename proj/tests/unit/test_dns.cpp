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

#include <atomic>

#include "domainharvester/dns_wire.hpp"
#include "domainharvester/dnscrawl.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/geo.hpp"
#include "domainharvester/resolver.hpp"
#include "domainharvester/serialize.hpp"

using namespace dh;
using namespace dh::dns;

namespace {

Zone sample_zone() {
  Zone z;
  z.add("example.com", RrType::NS, "ns1.provider.net");
  z.add("example.com", RrType::NS, "ns2.provider.net");
  z.add("example.com", RrType::A, "192.0.2.10");
  z.add("example.com", RrType::A, "192.0.2.11");
  z.add("example.com", RrType::AAAA, "2001:db8::10");
  z.add("example.com", RrType::MX, "10 mx.example.com");
  z.add("example.com", RrType::TXT, "v=spf1 -all");
  z.add("example.com", RrType::TXT, "site-verification=abc");
  z.add("example.com", RrType::CAA, "0 issue ca.example");
  z.add("example.com", RrType::DNSKEY, "257 3 13 aabbccdd");
  z.add("selector1._domainkey.example.com", RrType::TXT, "v=DKIM1; k=rsa; p=MIGf");
  z.add("_dmarc.example.com", RrType::TXT, "v=DMARC1; p=reject");
  z.add("_mta-sts.example.com", RrType::TXT, "v=STSv1; id=1");
  z.add("_443._tcp.example.com", RrType::TLSA, "3 1 1 00ff");
  z.set_signed("example.com", true);
  z.add("plain.org", RrType::A, "198.51.100.1");
  return z;
}

// Times out the first `failures` calls, then delegates.
class FlakyResolver final : public Resolver {
 public:
  FlakyResolver(Resolver& inner, int failures) : inner_(inner), failures_(failures) {}
  QueryResult query(const std::string& name, RrType type) override {
    ++calls;
    if (failures_-- > 0) return {Rcode::Timeout, {}, false};
    return inner_.query(name, type);
  }
  std::atomic<int> calls{0};

 private:
  Resolver& inner_;
  std::atomic<int> failures_;
};

class DeadResolver final : public Resolver {
 public:
  QueryResult query(const std::string&, RrType) override { return {Rcode::Timeout, {}, false}; }
};

}  // namespace

TEST_SUITE("dns") {
  TEST_CASE("wire round trip with compression and EDNS") {
    Message m = make_query(0x1234, "www.example.com", RrType::AAAA);
    CHECK(m.edns);
    CHECK(m.dnssec_ok);
    CHECK(decode(encode(m)) == m);

    Message r = m;
    r.response = true;
    r.authoritative = true;
    r.authenticated_data = true;
    r.answers = {{"www.example.com", RrType::AAAA, 1, 60, "2001:db8::1"},
                 {"www.example.com", RrType::CNAME, 1, 60, "web.example.com"},
                 {"example.com", RrType::MX, 1, 300, "10 mx.example.com"},
                 {"example.com", RrType::TXT, 1, 300, "v=spf1 include:_spf.example.net -all"},
                 {"example.com", RrType::CAA, 1, 300, "0 issue ca.example"},
                 {"_443._tcp.example.com", RrType::TLSA, 1, 300, "3 1 1 0a0b0c"},
                 {"example.com", RrType::DNSKEY, 1, 300, "257 3 13 a1b2c3"}};
    r.authority = {{"example.com", RrType::NS, 1, 300, "ns1.example.net"}};
    const auto wire = encode(r);
    CHECK(decode(wire) == r);
  }

  TEST_CASE("long TXT data spans several character-strings") {
    Message r = make_query(1, "example.com", RrType::TXT);
    r.response = true;
    r.answers = {{"example.com", RrType::TXT, 1, 300, std::string(600, 'x')}};
    CHECK(decode(encode(r)).answers.at(0).data == std::string(600, 'x'));
  }

  TEST_CASE("malformed wire data is rejected") {
    const std::vector<std::uint8_t> shortbuf = {0x12, 0x34, 0x01};
    CHECK_THROWS_AS(decode(shortbuf), Error);
    auto wire = encode(make_query(7, "example.com", RrType::A));
    wire.resize(wire.size() - 3);
    CHECK_THROWS_AS(decode(wire), Error);
    // Compression pointer loop.
    std::vector<std::uint8_t> loop = {0, 1, 0x80, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0xc0, 12, 0, 1, 0, 1};
    CHECK_THROWS_AS(decode(loop), Error);
  }

  TEST_CASE("zone lookup, NXDOMAIN, SERVFAIL and signed flags") {
    Zone z = sample_zone();
    auto a = z.lookup("example.com", RrType::A);
    CHECK(a.rcode == Rcode::NoError);
    CHECK(a.answers.size() == 2);
    CHECK(a.authenticated_data);
    CHECK(z.lookup("plain.org", RrType::A).authenticated_data == false);
    CHECK(z.lookup("plain.org", RrType::MX).rcode == Rcode::NoError);
    CHECK(z.lookup("plain.org", RrType::MX).answers.empty());
    CHECK(z.lookup("missing.org", RrType::A).rcode == Rcode::NXDomain);
    z.set_servfail("plain.org", true);
    CHECK(z.lookup("plain.org", RrType::A).rcode == Rcode::ServFail);
    z.set_timeout("plain.org", true);
    CHECK(z.lookup("plain.org", RrType::A).rcode == Rcode::Timeout);

    const auto resp = z.answer(make_query(9, "example.com", RrType::NS));
    CHECK(resp.id == 9);
    CHECK(resp.response);
    CHECK(resp.answers.size() == 2);
    CHECK(z.answer(make_query(10, "missing.org", RrType::A)).rcode == 3);
  }

  TEST_CASE("crawl_domain collects sorted records and every mechanism") {
    ZoneResolver resolver(sample_zone());
    SimulatedClock clock(parse_date("2022-11-11"));
    const auto geo = FileGeoProvider::parse("192.0.2.0/24,JP,Example Net\n2001:db8::/32,US,Doc Net\n");
    const auto e = crawl_domain("example.com", resolver, geo, clock);
    CHECK(e.values(RrType::NS) == std::vector<std::string>{"ns1.provider.net", "ns2.provider.net"});
    CHECK(e.count(RrType::A) == 2);
    CHECK(e.count(RrType::AAAA) == 1);
    CHECK(e.count(RrType::MX) == 1);
    CHECK(e.count(RrType::TXT) == 2);
    CHECK(e.a_geo == std::vector<GeoInfo>(2, GeoInfo{"JP", "Example Net"}));
    CHECK(e.aaaa_geo == std::vector<GeoInfo>{GeoInfo{"US", "Doc Net"}});
    CHECK(e.security.flags() == std::array<bool, 7>{true, true, true, true, true, true, true});
    CHECK_FALSE(e.nxdomain());
    CHECK(e.queried_at == clock.now());

    const auto plain = crawl_domain("plain.org", resolver, NullGeoProvider{}, clock);
    CHECK(plain.security.flags() == std::array<bool, 7>{});
    CHECK(plain.a_geo == std::vector<GeoInfo>{GeoInfo{}});
    CHECK_FALSE(plain.records.contains("MX"));

    const auto gone = crawl_domain("missing.org", resolver, NullGeoProvider{}, clock);
    CHECK(gone.nxdomain());
    CHECK(gone.records.empty());
  }

  TEST_CASE("timeouts are retried up to the configured count") {
    ZoneResolver inner(sample_zone());
    FlakyResolver flaky(inner, 2);
    SimulatedClock clock(parse_date("2022-11-11"));
    DnsCrawlConfig cfg;
    cfg.retries = 2;
    const auto e = crawl_domain("plain.org", flaky, NullGeoProvider{}, clock, cfg);
    CHECK(e.rcodes.at("NS") == Rcode::NoError);

    FlakyResolver worse(inner, 3);
    const auto f = crawl_domain("plain.org", worse, NullGeoProvider{}, clock, cfg);
    CHECK(f.rcodes.at("NS") == Rcode::Timeout);
  }

  TEST_CASE("crawl_dns covers every PLD and fails when nothing answers") {
    ZoneResolver resolver(sample_zone());
    SimulatedClock clock(parse_date("2022-11-11"));
    DnsCrawlConfig cfg;
    cfg.max_in_flight = 4;
    const auto all = crawl_dns({"example.com", "plain.org", "missing.org"}, resolver, NullGeoProvider{}, clock, cfg);
    CHECK(all.size() == 3);
    CHECK(all.at("missing.org").nxdomain());

    DeadResolver dead;
    cfg.retries = 0;
    try {
      crawl_dns({"example.com"}, dead, NullGeoProvider{}, clock, cfg);
      FAIL("expected ResolverUnavailable");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ResolverUnavailable);
    }
  }

  TEST_CASE("geo table uses the longest matching prefix") {
    const auto geo = FileGeoProvider::parse(
        "# cidr,country,org\n10.0.0.0/8,US,Wide\n10.1.0.0/16,JP,Narrow\n2001:db8::/32,DE,Six\n");
    CHECK(geo.size() == 3);
    CHECK(geo.lookup("10.2.3.4") == GeoInfo{"US", "Wide"});
    CHECK(geo.lookup("10.1.3.4") == GeoInfo{"JP", "Narrow"});
    CHECK(geo.lookup("2001:db8:1::5") == GeoInfo{"DE", "Six"});
    CHECK(geo.lookup("192.0.2.1") == GeoInfo{});
    CHECK(geo.lookup("not-an-ip") == GeoInfo{});
  }

  TEST_CASE("snapshot entry JSON round trip") {
    ZoneResolver resolver(sample_zone());
    SimulatedClock clock(parse_date("2022-11-11"));
    const auto e = crawl_domain("example.com", resolver, NullGeoProvider{}, clock);
    const Json j = e;
    CHECK(j.get<DnsSnapshotEntry>() == e);
  }
}
