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

#include "domainharvester/fixtureworld.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <deque>
#include <numeric>
#include <random>
#include <thread>

#include "domainharvester/error.hpp"
#include "domainharvester/io.hpp"
#include "domainharvester/robots.hpp"
#include "domainharvester/serialize.hpp"
#include "domainharvester/url.hpp"
#include "domainharvester/webcrawl.hpp"

namespace dh::fixture {
namespace {

constexpr auto kDay = std::chrono::hours(24);

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidWorldScript, what); }

MutationKind mutation_kind_from_string(std::string_view s) {
  for (auto k : {MutationKind::ChangeNs, MutationKind::Nxdomain, MutationKind::ExpireCert, MutationKind::BreakAccess,
                 MutationKind::RemoveLinks, MutationKind::Park}) {
    if (to_string(k) == s) return k;
  }
  invalid("unknown mutation kind '" + std::string(s) + "'");
}

template <typename T>
T opt(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    invalid(std::string("field '") + key + "': " + e.what());
  }
}

// Host of an absolute link, or the page's own domain for relative links.
std::string link_host(const std::string& href, const std::string& own) {
  if (auto u = web::parse_url(href)) return u->host;
  return own;
}

std::string owning_domain(const WorldScript& s, const std::string& host) {
  for (const auto& d : s.domains) {
    if (host == d.name) return d.name;
    if (host.size() > d.name.size() && host.ends_with("." + d.name)) return d.name;
  }
  return {};
}

// Pages a crawl of the seed actually fetches and extracts: same-domain
// links followed to depth 3, robots-disallowed paths skipped.
std::vector<const PageSpec*> reachable_pages(const DomainSpec& d) {
  const auto robots = d.robots.empty() ? web::RobotsRules::allow_all()
                                       : web::RobotsRules::parse(d.robots, web::CrawlPolicy{}.user_agent);
  auto page_at = [&](const std::string& path) -> const PageSpec* {
    for (const auto& p : d.pages) {
      if (p.path == path) return &p;
    }
    return nullptr;
  };
  std::vector<const PageSpec*> out;
  std::set<std::string> seen{"/"};
  std::deque<std::pair<std::string, int>> queue{{"/", 0}};
  const auto base = web::parse_url(d.origin() + "/");
  while (!queue.empty()) {
    auto [path, depth] = queue.front();
    queue.pop_front();
    if (!robots.allowed(path)) continue;
    const PageSpec* page = page_at(path);
    if (!page) continue;
    out.push_back(page);
    for (const auto& l : page->links) {
      auto target = web::resolve_url(*base, l.href);
      if (!target || target->host != d.name || depth + 1 > 3) continue;
      const auto key = target->path_and_query();
      if (seen.insert(key).second) queue.emplace_back(key, depth + 1);
    }
  }
  return out;
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_page(const PageSpec& p) {
  std::string html = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>" + html_escape(p.title) +
                     "</title></head>\n<body>\n<p>" + html_escape(p.body) + "</p>\n";
  for (const auto& l : p.links) {
    html += "<a href=\"" + html_escape(l.href) + "\">" + html_escape(l.text) + "</a>\n";
  }
  for (int i = 0; i < p.ad_frames; ++i) {
    html += "<iframe class=\"ad\" src=\"about:blank\"></iframe>\n";
  }
  return html + "</body></html>\n";
}

// ---------------------------------------------------------------- TLS material

struct PKeyDeleter {
  void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct X509Deleter {
  void operator()(X509* x) const { X509_free(x); }
};
using PKeyPtr = std::unique_ptr<EVP_PKEY, PKeyDeleter>;
using X509Ptr = std::unique_ptr<X509, X509Deleter>;

PKeyPtr make_key() {
  PKeyPtr key(EVP_EC_gen("P-256"));
  if (!key) throw Error(Errc::IoError, "EC key generation failed");
  return key;
}

void set_name(X509_NAME* name, const std::string& cn, const std::string& org, const std::string& country) {
  auto add = [&](const char* field, const std::string& v) {
    if (!v.empty()) {
      X509_NAME_add_entry_by_txt(name, field, MBSTRING_UTF8, reinterpret_cast<const unsigned char*>(v.c_str()), -1,
                                 -1, 0);
    }
  };
  add("C", country);
  add("O", org);
  add("CN", cn);
}

void add_ext(X509* cert, X509* issuer, int nid, const char* value) {
  X509V3_CTX ctx;
  X509V3_set_ctx_nodb(&ctx);
  X509V3_set_ctx(&ctx, issuer, cert, nullptr, nullptr, 0);
  X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, nid, value);
  if (!ext) throw Error(Errc::IoError, "cannot build certificate extension");
  X509_add_ext(cert, ext, -1);
  X509_EXTENSION_free(ext);
}

X509Ptr make_cert(EVP_PKEY* key, X509* issuer, EVP_PKEY* issuer_key, const std::string& cn, const std::string& org,
                  const std::string& country, TimePoint not_before, TimePoint not_after, long serial, bool ca) {
  X509Ptr cert(X509_new());
  X509_set_version(cert.get(), 2);
  ASN1_INTEGER_set(X509_get_serialNumber(cert.get()), serial);
  ASN1_TIME_set(X509_getm_notBefore(cert.get()),
                static_cast<time_t>(std::chrono::duration_cast<std::chrono::seconds>(not_before.time_since_epoch()).count()));
  ASN1_TIME_set(X509_getm_notAfter(cert.get()),
                static_cast<time_t>(std::chrono::duration_cast<std::chrono::seconds>(not_after.time_since_epoch()).count()));
  X509_set_pubkey(cert.get(), key);
  set_name(X509_get_subject_name(cert.get()), cn, org, country);
  X509_set_issuer_name(cert.get(), issuer ? X509_get_subject_name(issuer) : X509_get_subject_name(cert.get()));
  X509* issuer_cert = issuer ? issuer : cert.get();
  if (ca) {
    add_ext(cert.get(), issuer_cert, NID_basic_constraints, "critical,CA:TRUE");
    add_ext(cert.get(), issuer_cert, NID_key_usage, "critical,keyCertSign,cRLSign");
  } else {
    add_ext(cert.get(), issuer_cert, NID_basic_constraints, "CA:FALSE");
    add_ext(cert.get(), issuer_cert, NID_ext_key_usage, "serverAuth");
    add_ext(cert.get(), issuer_cert, NID_subject_alt_name, ("DNS:" + cn).c_str());
  }
  if (X509_sign(cert.get(), issuer_key ? issuer_key : key, EVP_sha256()) == 0) {
    throw Error(Errc::IoError, "certificate signing failed");
  }
  return cert;
}

std::string to_pem(X509* cert) {
  BIO* bio = BIO_new(BIO_s_mem());
  PEM_write_bio_X509(bio, cert);
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio, &data);
  std::string out(data, static_cast<std::size_t>(len));
  BIO_free(bio);
  return out;
}

// ---------------------------------------------------------------- DNS server

class DnsServer {
 public:
  explicit DnsServer(dns::Zone zone) : zone_(std::move(zone)) {
    for (int attempt = 0; attempt < 20 && port_ == 0; ++attempt) {
      udp_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
      sockaddr_in addr{};
      addr.sin_family = AF_INET;
      addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
      if (::bind(udp_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(udp_);
        continue;
      }
      socklen_t len = sizeof addr;
      ::getsockname(udp_, reinterpret_cast<sockaddr*>(&addr), &len);
      tcp_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
      int one = 1;
      ::setsockopt(tcp_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(tcp_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(tcp_, 16) != 0) {
        ::close(udp_);
        ::close(tcp_);
        continue;
      }
      port_ = ntohs(addr.sin_port);
    }
    if (port_ == 0) throw Error(Errc::PortUnavailable, "cannot bind fixture DNS on loopback");
    thread_ = std::thread([this] { loop(); });
  }

  ~DnsServer() { stop(); }

  void stop() {
    if (stopping_.exchange(true)) return;
    if (thread_.joinable()) thread_.join();
    ::close(udp_);
    ::close(tcp_);
  }

  int port() const { return port_; }

 private:
  std::optional<std::vector<std::uint8_t>> respond(std::span<const std::uint8_t> wire, std::size_t limit) {
    dns::Message q;
    try {
      q = dns::decode(wire);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (q.questions.size() == 1 &&
        zone_.lookup(q.questions[0].name, q.questions[0].type).rcode == dns::Rcode::Timeout) {
      return std::nullopt;
    }
    auto resp = zone_.answer(q);
    auto out = dns::encode(resp);
    if (out.size() > limit) {
      resp.truncated = true;
      resp.answers.clear();
      out = dns::encode(resp);
    }
    return out;
  }

  void loop() {
    std::vector<std::uint8_t> buf(65535);
    while (!stopping_) {
      pollfd fds[2] = {{udp_, POLLIN, 0}, {tcp_, POLLIN, 0}};
      if (::poll(fds, 2, 50) <= 0) continue;
      if (fds[0].revents & POLLIN) {
        sockaddr_in peer{};
        socklen_t len = sizeof peer;
        const auto n = ::recvfrom(udp_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&peer), &len);
        if (n > 0) {
          std::size_t limit = 512;
          try {
            const auto q = dns::decode(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
            if (q.edns) limit = std::max<std::size_t>(512, q.edns_udp_size);
          } catch (const Error&) {
          }
          if (auto out = respond(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)), limit)) {
            ::sendto(udp_, out->data(), out->size(), 0, reinterpret_cast<sockaddr*>(&peer), len);
          }
        }
      }
      if (fds[1].revents & POLLIN) serve_tcp();
    }
  }

  void serve_tcp() {
    const int c = ::accept4(tcp_, nullptr, nullptr, SOCK_CLOEXEC);
    if (c < 0) return;
    std::vector<std::uint8_t> in;
    std::uint8_t chunk[4096];
    while (true) {
      pollfd p{c, POLLIN, 0};
      if (::poll(&p, 1, 1000) <= 0) break;
      const auto n = ::recv(c, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      in.insert(in.end(), chunk, chunk + n);
      if (in.size() >= 2 && in.size() >= 2 + (static_cast<std::size_t>(in[0]) << 8 | in[1])) break;
    }
    if (in.size() >= 2) {
      const std::size_t len = static_cast<std::size_t>(in[0]) << 8 | in[1];
      if (in.size() >= len + 2) {
        if (auto out = respond(std::span<const std::uint8_t>(in.data() + 2, len), 65535)) {
          std::vector<std::uint8_t> framed{static_cast<std::uint8_t>(out->size() >> 8),
                                           static_cast<std::uint8_t>(out->size())};
          framed.insert(framed.end(), out->begin(), out->end());
          ::send(c, framed.data(), framed.size(), MSG_NOSIGNAL);
        }
      }
    }
    ::close(c);
  }

  dns::Zone zone_;
  int udp_ = -1;
  int tcp_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
};

// ---------------------------------------------------------------- world

int dead_port() {
  const int s = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(s, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(s, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(s);
  return ntohs(addr.sin_port);
}

class World final : public RunningWorld {
 public:
  World(const WorldScript& script, int iteration)
      : state_(world_state(script, iteration)), date_(script.date_of(iteration)) {
    build_servers(script);
    dns_ = std::make_unique<DnsServer>(build_zone(script, iteration));
  }

  ~World() override { stop(); }

  int http_port() const override { return http_port_; }
  int dns_port() const override { return dns_->port(); }
  std::map<std::string, web::Endpoint> endpoints() const override { return endpoints_; }
  const std::string& ca_pem() const override { return ca_pem_; }
  std::size_t requests_served() const override { return served_.load(); }

  void stop() override {
    for (auto& s : servers_) s->stop();
    for (auto& t : threads_) {
      if (t.joinable()) t.join();
    }
    servers_.clear();
    threads_.clear();
    if (dns_) dns_->stop();
  }

 private:
  void handle(const std::string& domain, const httplib::Request& req, httplib::Response& res) {
    ++served_;
    auto it = state_.find(domain);
    if (it == state_.end()) {
      res.status = 404;
      return;
    }
    const auto& st = it->second;
    if (st.forced_status) {
      res.status = st.forced_status;
      res.set_content("unavailable", "text/plain");
      return;
    }
    if (req.path == "/robots.txt") {
      if (st.spec.robots.empty()) {
        res.status = 404;
      } else {
        res.set_content(st.spec.robots, "text/plain");
      }
      return;
    }
    for (const auto& p : st.spec.pages) {
      if (p.path == req.path) {
        res.set_content(render_page(p), "text/html; charset=utf-8");
        return;
      }
    }
    res.status = 404;
    res.set_content("not found", "text/plain");
  }

  void attach(httplib::Server& server, std::optional<std::string> fixed_domain) {
    server.new_task_queue = [] { return new httplib::ThreadPool(2); };
    server.set_keep_alive_max_count(1);
    server.Get(".*", [this, fixed_domain](const httplib::Request& req, httplib::Response& res) {
      std::string host = fixed_domain ? *fixed_domain : req.get_header_value("Host");
      if (auto colon = host.find(':'); colon != std::string::npos) host.erase(colon);
      std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return std::tolower(c); });
      // Subdomains (www.) are served by their domain.
      std::string domain = host;
      for (const auto& [name, _] : state_) {
        if (host == name || host.ends_with("." + name)) domain = name;
      }
      handle(domain, req, res);
    });
  }

  int start(std::unique_ptr<httplib::Server> server) {
    const int port = server->bind_to_any_port("127.0.0.1");
    if (port <= 0) throw Error(Errc::PortUnavailable, "cannot bind fixture HTTP server on loopback");
    httplib::Server* raw = server.get();
    threads_.emplace_back([raw] { raw->listen_after_bind(); });
    raw->wait_until_ready();
    servers_.push_back(std::move(server));
    return port;
  }

  void build_servers(const WorldScript& script) {
    auto http = std::make_unique<httplib::Server>();
    attach(*http, std::nullopt);
    http_port_ = start(std::move(http));
    endpoints_["http://*"] = {"127.0.0.1", http_port_};

    const TimePoint valid_from = script.start - 30 * kDay;
    const TimePoint valid_to = script.start + 400 * kDay;
    std::map<std::pair<std::string, std::string>, std::pair<PKeyPtr, X509Ptr>> authorities;
    long serial = 1;
    for (const auto& [name, st] : state_) {
      if (st.refused) {
        const int port = dead_port();
        endpoints_["http://" + name] = {"127.0.0.1", port};
        endpoints_["https://" + name] = {"127.0.0.1", port};
        continue;
      }
      if (!st.spec.https) continue;
      const auto ca_key_id = std::make_pair(st.spec.cert.issuer_org, st.spec.cert.issuer_country);
      auto ca_it = authorities.find(ca_key_id);
      if (ca_it == authorities.end()) {
        auto key = make_key();
        auto cert = make_cert(key.get(), nullptr, nullptr, st.spec.cert.issuer_org + " Root", st.spec.cert.issuer_org,
                              st.spec.cert.issuer_country, valid_from - 365 * kDay, valid_to + 365 * kDay, serial++,
                              true);
        ca_pem_ += to_pem(cert.get());
        ca_it = authorities.emplace(ca_key_id, std::make_pair(std::move(key), std::move(cert))).first;
      }
      TimePoint nb = valid_from, na = valid_to;
      if (st.cert_expired) {
        na = date_ - kDay;
        nb = date_ - 91 * kDay;
      }
      auto key = make_key();
      auto cert = make_cert(key.get(), ca_it->second.second.get(), ca_it->second.first.get(), name,
                            st.spec.cert.subject_org, st.spec.cert.subject_country, nb, na, serial++, false);
      auto server = std::make_unique<httplib::SSLServer>(cert.get(), key.get());
      if (!server->is_valid()) throw Error(Errc::IoError, "cannot set up TLS for " + name);
      attach(*server, name);
      const int port = start(std::move(server));
      endpoints_["https://" + name] = {"127.0.0.1", port};
    }
  }

  std::map<std::string, DomainState> state_;
  TimePoint date_;
  std::vector<std::unique_ptr<httplib::Server>> servers_;
  std::vector<std::thread> threads_;
  std::unique_ptr<DnsServer> dns_;
  std::map<std::string, web::Endpoint> endpoints_;
  std::string ca_pem_;
  int http_port_ = 0;
  std::atomic<std::size_t> served_{0};
};

Json domain_to_json(const DomainSpec& d) {
  Json pages = Json::array();
  for (const auto& p : d.pages) {
    Json links = Json::array();
    for (const auto& l : p.links) links.push_back({{"href", l.href}, {"text", l.text}});
    Json page{{"path", p.path}, {"title", p.title}, {"body", p.body}, {"links", links}};
    if (p.ad_frames) page["ad_frames"] = p.ad_frames;
    pages.push_back(page);
  }
  Json j{{"name", d.name}, {"pages", pages}, {"dns", d.dns}};
  if (d.seed) j["seed"] = true;
  if (d.https) {
    j["https"] = true;
    j["cert"] = {{"issuer_org", d.cert.issuer_org},
                 {"issuer_country", d.cert.issuer_country},
                 {"subject_org", d.cert.subject_org},
                 {"subject_country", d.cert.subject_country}};
  }
  if (!d.robots.empty()) j["robots"] = d.robots;
  if (d.dnssec) j["dnssec"] = true;
  if (!d.extra.empty()) {
    Json extra = Json::array();
    for (const auto& e : d.extra) extra.push_back({{"name", e.name}, {"type", dns::to_string(e.type)}, {"data", e.data}});
    j["extra"] = extra;
  }
  return j;
}

}  // namespace

std::string_view to_string(MutationKind k) {
  switch (k) {
    case MutationKind::ChangeNs: return "change_ns";
    case MutationKind::Nxdomain: return "nxdomain";
    case MutationKind::ExpireCert: return "expire_cert";
    case MutationKind::BreakAccess: return "break_access";
    case MutationKind::RemoveLinks: return "remove_links";
    case MutationKind::Park: return "park";
  }
  return "change_ns";
}

WorldScript WorldScript::parse(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  WorldScript s;
  s.name = opt<std::string>(j, "name", "world");
  s.seed_list = opt<std::string>(j, "seed_list", "fixture");
  try {
    s.start = parse_date(opt<std::string>(j, "start_date", "2022-11-11"));
  } catch (const Error& e) {
    invalid(e.what());
  }
  s.iterations = opt<int>(j, "iterations", 1);
  s.geo = opt<std::vector<std::string>>(j, "geo", {});
  s.parking_provider = opt<std::string>(j, "parking_provider", s.parking_provider);
  for (const auto& d : opt<Json>(j, "domains", Json::array())) {
    DomainSpec spec;
    spec.name = opt<std::string>(d, "name", "");
    spec.seed = opt<bool>(d, "seed", false);
    spec.https = opt<bool>(d, "https", false);
    spec.robots = opt<std::string>(d, "robots", "");
    spec.dnssec = opt<bool>(d, "dnssec", false);
    spec.dns = opt<std::map<std::string, std::vector<std::string>>>(d, "dns", {});
    if (auto c = d.find("cert"); c != d.end()) {
      spec.cert.issuer_org = opt<std::string>(*c, "issuer_org", spec.cert.issuer_org);
      spec.cert.issuer_country = opt<std::string>(*c, "issuer_country", spec.cert.issuer_country);
      spec.cert.subject_org = opt<std::string>(*c, "subject_org", "");
      spec.cert.subject_country = opt<std::string>(*c, "subject_country", "");
    }
    for (const auto& p : opt<Json>(d, "pages", Json::array())) {
      PageSpec page;
      page.path = opt<std::string>(p, "path", "/");
      page.title = opt<std::string>(p, "title", "");
      page.body = opt<std::string>(p, "body", "");
      page.ad_frames = opt<int>(p, "ad_frames", 0);
      for (const auto& l : opt<Json>(p, "links", Json::array())) {
        page.links.push_back({opt<std::string>(l, "href", ""), opt<std::string>(l, "text", "")});
      }
      spec.pages.push_back(std::move(page));
    }
    for (const auto& e : opt<Json>(d, "extra", Json::array())) {
      try {
        spec.extra.push_back({opt<std::string>(e, "name", "@"),
                              dns::rr_type_from_string(opt<std::string>(e, "type", "TXT")),
                              opt<std::string>(e, "data", "")});
      } catch (const Error& err) {
        invalid(err.what());
      }
    }
    s.domains.push_back(std::move(spec));
  }
  for (const auto& m : opt<Json>(j, "mutations", Json::array())) {
    Mutation mu;
    mu.iteration = opt<int>(m, "iteration", 2);
    mu.kind = mutation_kind_from_string(opt<std::string>(m, "kind", ""));
    mu.domain = opt<std::string>(m, "domain", "");
    mu.ns = opt<std::vector<std::string>>(m, "ns", {});
    mu.status = opt<int>(m, "status", 503);
    mu.refuse = opt<bool>(m, "refuse", false);
    mu.from = opt<std::vector<std::string>>(m, "from", {});
    mu.mode = opt<std::string>(m, "mode", "content");
    s.mutations.push_back(std::move(mu));
  }
  s.validate();
  return s;
}

WorldScript WorldScript::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void WorldScript::validate() const {
  if (iterations < 1) invalid("iterations must be >= 1");
  std::set<std::string> names;
  bool any_seed = false;
  for (const auto& d : domains) {
    if (d.name.empty()) invalid("domain without a name");
    if (!names.insert(d.name).second) invalid("duplicate domain " + d.name);
    any_seed = any_seed || d.seed;
    for (const auto& [type, _] : d.dns) {
      if (type != "NS" && type != "A" && type != "AAAA" && type != "MX" && type != "TXT") {
        invalid(d.name + ": unsupported apex record type " + type);
      }
    }
    for (const auto& p : d.pages) {
      for (const auto& l : p.links) {
        if (owning_domain(*this, link_host(l.href, d.name)).empty()) {
          invalid(d.name + p.path + " links outside the world: " + l.href);
        }
      }
    }
  }
  if (!any_seed) invalid("world has no seed domain");
  for (const auto& m : mutations) {
    if (!names.count(m.domain)) invalid("mutation references unknown domain " + m.domain);
    if (m.iteration < 2 || m.iteration > iterations) {
      invalid("mutation iteration " + std::to_string(m.iteration) + " outside 2.." + std::to_string(iterations));
    }
    if (m.kind == MutationKind::ChangeNs && m.ns.empty()) invalid("change_ns needs a new NS set");
    if (m.kind == MutationKind::Park && m.mode != "content" && m.mode != "ns") invalid("park mode must be content|ns");
    for (const auto& f : m.from) {
      if (!names.count(f)) invalid("remove_links references unknown domain " + f);
    }
  }
}

TimePoint WorldScript::date_of(int iteration) const { return start + (iteration - 1) * 7 * kDay; }

const DomainSpec* WorldScript::find(const std::string& domain) const {
  for (const auto& d : domains) {
    if (d.name == domain) return &d;
  }
  return nullptr;
}

std::vector<std::string> WorldScript::seed_urls() const {
  std::vector<std::string> out;
  for (const auto& d : domains) {
    if (d.seed) out.push_back(d.origin() + "/");
  }
  return out;
}

std::string WorldScript::geo_csv() const {
  std::string out;
  for (const auto& g : geo) out += g + "\n";
  return out;
}

std::map<std::string, DomainState> world_state(const WorldScript& script, int iteration) {
  std::map<std::string, DomainState> out;
  for (const auto& d : script.domains) out[d.name].spec = d;
  for (const auto& m : script.mutations) {
    if (m.iteration > iteration) continue;
    auto& st = out.at(m.domain);
    switch (m.kind) {
      case MutationKind::ChangeNs: st.spec.dns["NS"] = m.ns; break;
      case MutationKind::Nxdomain: st.nxdomain = true; break;
      case MutationKind::ExpireCert: st.cert_expired = true; break;
      case MutationKind::BreakAccess:
        if (m.refuse) st.refused = true;
        else st.forced_status = m.status;
        break;
      case MutationKind::RemoveLinks:
        for (const auto& from : m.from) {
          for (auto& page : out.at(from).spec.pages) {
            std::erase_if(page.links,
                          [&](const Link& l) { return owning_domain(script, link_host(l.href, from)) == m.domain; });
          }
        }
        break;
      case MutationKind::Park:
        if (m.mode == "ns") {
          st.parked_ns = true;
          st.spec.dns["NS"] = {"ns1." + script.parking_provider, "ns2." + script.parking_provider};
        } else {
          st.parked_content = true;
          for (auto& page : st.spec.pages) {
            if (page.path != "/") continue;
            page.title = m.domain;
            page.body = "This domain is for sale. Make an offer on this domain today.";
            page.ad_frames = 4;
          }
        }
        break;
    }
  }
  return out;
}

std::set<std::string> discovered(const WorldScript& script, int iteration) {
  std::set<std::string> out;
  const auto state = world_state(script, iteration);
  for (const auto& [name, st] : state) {
    if (!st.spec.seed) continue;
    out.insert(name);
    for (const auto* page : reachable_pages(st.spec)) {
      for (const auto& l : page->links) out.insert(owning_domain(script, link_host(l.href, name)));
    }
  }
  return out;
}

std::map<std::string, std::size_t> backlink_counts(const WorldScript& script, int iteration) {
  std::map<std::string, std::set<std::string>> sources;
  const auto state = world_state(script, iteration);
  for (const auto& [name, st] : state) {
    if (!st.spec.seed) continue;
    for (const auto* page : reachable_pages(st.spec)) {
      for (const auto& l : page->links) {
        const auto target = owning_domain(script, link_host(l.href, name));
        if (target != name) sources[target].insert(name);
      }
    }
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [t, s] : sources) out[t] = s.size();
  return out;
}

std::map<std::string, labeling::Category> mutation_manifest(const WorldScript& script, int iteration) {
  std::map<std::string, labeling::Category> out;
  for (const auto& m : script.mutations) {
    if (m.iteration != iteration) continue;
    labeling::Category c{};
    switch (m.kind) {
      case MutationKind::ChangeNs:
      case MutationKind::Nxdomain: c = labeling::Category::DnsChange; break;
      case MutationKind::ExpireCert: c = labeling::Category::CertChange; break;
      case MutationKind::BreakAccess: c = labeling::Category::AccessChange; break;
      case MutationKind::RemoveLinks: c = labeling::Category::BacklinkDrop; break;
      case MutationKind::Park:
        // NS-mode parking also changes the NS set.
        c = m.mode == "ns" ? labeling::Category::DnsChange : labeling::Category::Parking;
        break;
    }
    out.emplace(m.domain, c);
  }
  return out;
}

std::map<std::string, labeling::Category> expected_labels(const WorldScript& script, int iteration,
                                                          double drop_ratio) {
  if (iteration < 2) throw Error(Errc::InvalidArgument, "labels need two iterations");
  const auto prev = world_state(script, iteration - 1);
  const auto curr = world_state(script, iteration);
  const auto prev_found = discovered(script, iteration - 1);
  const auto curr_found = discovered(script, iteration);
  const auto prev_links = backlink_counts(script, iteration - 1);
  const auto curr_links = backlink_counts(script, iteration);
  auto links = [](const std::map<std::string, std::size_t>& m, const std::string& d) {
    auto it = m.find(d);
    return it == m.end() ? std::size_t{0} : it->second;
  };
  auto ns = [](const DomainState& s) {
    auto it = s.spec.dns.find("NS");
    std::set<std::string> out;
    if (it != s.spec.dns.end()) out.insert(it->second.begin(), it->second.end());
    return out;
  };
  auto broken = [](const DomainState& s) { return s.refused || s.forced_status >= 400; };
  auto parked = [](const DomainState& s) { return s.parked_ns || (s.parked_content && !s.refused && !s.forced_status); };

  std::map<std::string, labeling::Category> out;
  for (const auto& d : curr_found) {
    if (!prev_found.count(d)) continue;
    const auto& a = prev.at(d);
    const auto& b = curr.at(d);
    const double p = static_cast<double>(links(prev_links, d));
    const double c = static_cast<double>(links(curr_links, d));
    if (a.nxdomain || b.nxdomain || ns(a) != ns(b)) {
      out[d] = labeling::Category::DnsChange;
    } else if (b.spec.https && !b.refused && (a.cert_expired || b.cert_expired)) {
      out[d] = labeling::Category::CertChange;
    } else if (broken(a) || broken(b)) {
      out[d] = labeling::Category::AccessChange;
    } else if (p > 0 && (p - c) / p > drop_ratio) {
      out[d] = labeling::Category::BacklinkDrop;
    } else if (parked(a) || parked(b)) {
      out[d] = labeling::Category::Parking;
    }
  }
  return out;
}

dns::Zone build_zone(const WorldScript& script, int iteration) {
  dns::Zone zone;
  for (const auto& [name, st] : world_state(script, iteration)) {
    if (st.nxdomain) continue;
    for (const auto& [type, values] : st.spec.dns) {
      for (const auto& v : values) zone.add(name, dns::rr_type_from_string(type), v);
    }
    for (const auto& e : st.spec.extra) {
      zone.add(e.name == "@" ? name : e.name + "." + name, e.type, e.data);
    }
    if (st.spec.dnssec) {
      zone.add(name, dns::RrType::DNSKEY, "257 3 13 " + std::string(64, 'a'));
      zone.set_signed(name, true);
    }
    if (!zone.exists(name)) {
      // Keep the apex resolvable even with no scripted records.
      zone.add(name, dns::RrType::TXT, "fixture");
    }
  }
  return zone;
}

std::unique_ptr<RunningWorld> serve_world(const WorldScript& script, int iteration) {
  if (iteration < 1 || iteration > script.iterations) {
    throw Error(Errc::InvalidArgument, "iteration " + std::to_string(iteration) + " outside the script");
  }
  return std::make_unique<World>(script, iteration);
}

std::string to_json_text(const WorldScript& script) {
  Json domains = Json::array();
  for (const auto& d : script.domains) domains.push_back(domain_to_json(d));
  Json mutations = Json::array();
  for (const auto& m : script.mutations) {
    Json j{{"iteration", m.iteration}, {"kind", to_string(m.kind)}, {"domain", m.domain}};
    switch (m.kind) {
      case MutationKind::ChangeNs: j["ns"] = m.ns; break;
      case MutationKind::BreakAccess:
        if (m.refuse) j["refuse"] = true;
        else j["status"] = m.status;
        break;
      case MutationKind::RemoveLinks: j["from"] = m.from; break;
      case MutationKind::Park: j["mode"] = m.mode; break;
      default: break;
    }
    mutations.push_back(j);
  }
  Json j{{"name", script.name},
         {"seed_list", script.seed_list},
         {"start_date", format_date(script.start)},
         {"iterations", script.iterations},
         {"parking_provider", script.parking_provider},
         {"geo", script.geo},
         {"domains", domains},
         {"mutations", mutations}};
  return j.dump(2) + "\n";
}

Json pipeline_config(const WorldScript& script, const RunningWorld& world, int iteration,
                     const std::filesystem::path& dir) {
  std::string seeds;
  for (const auto& u : script.seed_urls()) seeds += u + "\n";
  write_file_atomic(dir / "seeds.txt", seeds);
  write_file_atomic(dir / "geo.csv", script.geo_csv());
  write_file_atomic(dir / "parking_providers.txt", script.parking_providers());
  write_file_atomic(dir / "ca.pem", world.ca_pem());
  Json overrides = Json::object();
  for (const auto& [key, ep] : world.endpoints()) overrides[key] = ep.address + ":" + std::to_string(ep.port);
  return Json{{"seed_list", script.seed_list},
              {"seed_file", "seeds.txt"},
              {"store", "store"},
              {"geo", "geo.csv"},
              {"now", format_date(script.date_of(iteration))},
              {"http", {{"overrides", overrides}, {"ca_file", "ca.pem"}, {"system_trust", false}}},
              {"dns", {{"resolver", "127.0.0.1:" + std::to_string(world.dns_port())}, {"timeout_ms", 500}}},
              {"labeling", {{"parking_providers", "parking_providers.txt"}}}};
}

WorldScript generate_world(const GeneratedWorldOptions& o) {
  std::mt19937_64 rng(o.seed);
  WorldScript s;
  s.name = "generated";
  s.seed_list = "generated";
  s.start = parse_date(o.start_date);
  s.iterations = o.iterations;
  s.geo = {"198.51.100.0/24,US,ExampleCloud", "203.0.113.0/24,JP,FixtureNet", "2001:db8::/32,DE,DocNet"};
  const std::vector<std::string> words = {"alpha", "delta", "harbor", "maple", "orbit", "quartz", "river",
                                          "summit", "tidal", "vector", "willow", "zenith"};
  const std::vector<std::string> issuers = {"ExampleCert", "ExampleSign"};

  std::vector<std::string> externals;
  for (std::size_t i = 0; i < o.externals; ++i) {
    externals.push_back(words[i % words.size()] + "-" + std::to_string(i) + ".example");
  }
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> octet(1, 254);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Risky domains share a budget host profile; mutations are drawn from them first.
  std::vector<bool> risky(o.externals);
  for (std::size_t i = 0; i < o.externals; ++i) risky[i] = unit(rng) < o.risky_fraction;
  auto dns_for = [&](const std::string& name, bool budget) {
    std::map<std::string, std::vector<std::string>> d;
    if (budget) {
      d["NS"] = {"ns1.budget-host.example", "ns2.budget-host.example"};
      d["A"] = {"203.0.113." + std::to_string(octet(rng))};
      d["TXT"] = {"site-verification=" + std::to_string(octet(rng))};
      return d;
    }
    d["NS"] = {"ns1.host-" + std::to_string(coin(rng)) + ".example", "ns2.host-" + std::to_string(coin(rng)) + ".example"};
    d["A"] = {"198.51.100." + std::to_string(octet(rng))};
    if (coin(rng)) d["AAAA"] = {"2001:db8::" + std::to_string(octet(rng))};
    d["MX"] = {"10 mx." + name};
    d["TXT"] = {"v=spf1 -all"};
    return d;
  };

  std::vector<std::vector<std::string>> linked_by(o.externals);
  for (std::size_t si = 0; si < o.seeds; ++si) {
    DomainSpec seed;
    seed.name = "seed-" + words[si % words.size()] + "-" + std::to_string(si) + ".example";
    seed.seed = true;
    seed.https = false;
    seed.dns = dns_for(seed.name, false);
    PageSpec home{"/", "Seed " + std::to_string(si) + " home", "Corporate portal for partners and news.", {}, 0};
    home.links.push_back({"/partners", "Partners"});
    PageSpec partners{"/partners", "Seed " + std::to_string(si) + " partners", "Our partner organizations.", {}, 0};
    s.domains.push_back(seed);
    s.domains.back().pages = {home, partners};
  }
  // Every external is linked by two or three seeds.
  for (std::size_t i = 0; i < o.externals; ++i) {
    const std::size_t n_links = 2 + static_cast<std::size_t>(coin(rng));
    std::vector<std::size_t> order(o.seeds);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < n_links && k < o.seeds; ++k) {
      auto& seed = s.domains[order[k]];
      auto& page = seed.pages[1];
      const auto* ext_spec = externals[i].c_str();
      page.links.push_back({"http://" + std::string(ext_spec) + "/", "Visit " + words[i % words.size()]});
      linked_by[i].push_back(seed.name);
    }
  }
  for (std::size_t i = 0; i < o.externals; ++i) {
    DomainSpec d;
    d.name = externals[i];
    d.https = false;
    d.dns = dns_for(d.name, risky[i]);
    d.pages.push_back({"/", words[i % words.size()] + " services " + std::to_string(i),
                       "Welcome to the " + words[i % words.size()] + " company website with product information.",
                       {},
                       0});
    s.domains.push_back(std::move(d));
  }
  // HTTPS externals need links with the https scheme.
  std::vector<std::size_t> https_ids;
  for (std::size_t i = 0; i < o.externals; i += 4) https_ids.push_back(i);
  for (auto i : https_ids) {
    auto& d = s.domains[o.seeds + i];
    d.https = true;
    d.cert = {issuers[i % 2], i % 3 ? "US" : "JP", words[i % words.size()] + " Inc", "JP"};
    for (std::size_t si = 0; si < o.seeds; ++si) {
      for (auto& l : s.domains[si].pages[1].links) {
        if (l.href == "http://" + d.name + "/") l.href = "https://" + d.name + "/";
      }
    }
  }

  // Mutations at iteration 2, one domain per mutation, kinds round-robin.
  std::vector<std::size_t> pool(o.externals);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t next = 0;
  auto mutation = [](MutationKind kind, const std::string& domain) {
    Mutation m;
    m.iteration = 2;
    m.kind = kind;
    m.domain = domain;
    return m;
  };
  auto take = [&](bool need_https, std::size_t min_linkers = 0) -> std::optional<std::size_t> {
    for (bool want_risky : {true, false}) {
      for (std::size_t k = next; k < pool.size(); ++k) {
        const auto i = pool[k];
        if (risky[i] == want_risky && s.domains[o.seeds + i].https == need_https &&
            linked_by[i].size() >= min_linkers) {
          std::swap(pool[k], pool[next]);
          return pool[next++];
        }
      }
    }
    return std::nullopt;
  };
  for (std::size_t r = 0; r < o.mutations_per_kind; ++r) {
    if (auto i = take(false)) {
      Mutation m = mutation(MutationKind::ChangeNs, externals[*i]);
      m.ns = {"ns1.moved.example", "ns2.moved.example"};
      s.mutations.push_back(m);
    }
    if (auto i = take(true)) s.mutations.push_back(mutation(MutationKind::ExpireCert, externals[*i]));
    if (auto i = take(false)) {
      Mutation m = mutation(MutationKind::BreakAccess, externals[*i]);
      m.status = r % 2 ? 404 : 503;
      s.mutations.push_back(m);
    }
    if (auto i = take(false, 3)) {
      Mutation m = mutation(MutationKind::RemoveLinks, externals[*i]);
      const auto& src = linked_by[*i];
      m.from.assign(src.begin(), src.end() - 1);  // keep one linking seed
      s.mutations.push_back(m);
    }
    if (auto i = take(false)) {
      Mutation m = mutation(MutationKind::Park, externals[*i]);
      m.mode = "content";
      s.mutations.push_back(m);
    }
  }
  s.validate();
  return s;
}

}  // namespace dh::fixture
