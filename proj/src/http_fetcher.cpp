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

#include "domainharvester/http_fetcher.hpp"

#include <openssl/pem.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <httplib.h>

#include <ctime>
#include <memory>

namespace dh::web {
namespace {

struct CertCapture {
  X509* leaf = nullptr;
  bool chain_ok = true;
  bool saw_verify = false;
  ~CertCapture() {
    if (leaf) X509_free(leaf);
  }
};

int capture_index() {
  static const int idx = SSL_CTX_get_ex_new_index(0, nullptr, nullptr, nullptr, nullptr);
  return idx;
}

CertCapture* capture_of(const SSL* ssl) {
  return static_cast<CertCapture*>(SSL_CTX_get_ex_data(SSL_get_SSL_CTX(ssl), capture_index()));
}

// Never fails the handshake: validity is recorded, content is still fetched.
int verify_callback(int preverify_ok, X509_STORE_CTX* store) {
  auto* ssl = static_cast<SSL*>(X509_STORE_CTX_get_ex_data(store, SSL_get_ex_data_X509_STORE_CTX_idx()));
  if (auto* cap = ssl ? capture_of(ssl) : nullptr) {
    cap->saw_verify = true;
    if (!preverify_ok) cap->chain_ok = false;
  }
  return 1;
}

void info_callback(const SSL* ssl, int where, int) {
  if (!(where & SSL_CB_HANDSHAKE_DONE)) return;
  auto* cap = capture_of(ssl);
  if (!cap || cap->leaf) return;
  cap->leaf = SSL_get1_peer_certificate(ssl);
}

std::string name_entry(X509_NAME* name, int nid) {
  if (!name) return {};
  const int idx = X509_NAME_get_index_by_NID(name, nid, -1);
  if (idx < 0) return {};
  ASN1_STRING* data = X509_NAME_ENTRY_get_data(X509_NAME_get_entry(name, idx));
  unsigned char* utf8 = nullptr;
  const int len = ASN1_STRING_to_UTF8(&utf8, data);
  if (len < 0) return {};
  std::string out(reinterpret_cast<char*>(utf8), static_cast<std::size_t>(len));
  OPENSSL_free(utf8);
  return out;
}

TimePoint asn1_time_point(const ASN1_TIME* t) {
  std::tm tm{};
  if (!t || ASN1_TIME_to_tm(t, &tm) != 1) return TimePoint{};
  return TimePoint{std::chrono::seconds{timegm(&tm)}};
}

CertificateInfo certificate_info(X509* cert, bool chain_ok) {
  CertificateInfo info;
  info.issuer_organization = name_entry(X509_get_issuer_name(cert), NID_organizationName);
  info.issuer_country = name_entry(X509_get_issuer_name(cert), NID_countryName);
  info.subject_organization = name_entry(X509_get_subject_name(cert), NID_organizationName);
  info.subject_country = name_entry(X509_get_subject_name(cert), NID_countryName);
  info.not_before = asn1_time_point(X509_get0_notBefore(cert));
  info.not_after = asn1_time_point(X509_get0_notAfter(cert));
  info.chain_valid_at_fetch = chain_ok;
  return info;
}

void add_pem_to_store(X509_STORE* store, const std::string& pem) {
  std::unique_ptr<BIO, decltype(&BIO_free)> bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())), BIO_free);
  while (X509* cert = PEM_read_bio_X509(bio.get(), nullptr, nullptr, nullptr)) {
    X509_STORE_add_cert(store, cert);
    X509_free(cert);
  }
  ERR_clear_error();
}

FetchError classify(httplib::Error err) {
  switch (err) {
    case httplib::Error::SSLConnection:
    case httplib::Error::SSLLoadingCerts:
    case httplib::Error::SSLServerVerification:
      return FetchError::TlsError;
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
      return FetchError::Timeout;
    default:
      return FetchError::ConnectionError;
  }
}

}  // namespace

HttpFetcher::HttpFetcher(HttpFetcherConfig config) : config_(std::move(config)) {}

FetchResponse HttpFetcher::fetch(const Url& url, TimePoint at) {
  FetchResponse out;
  const bool https = url.scheme == "https";
  int port = url.effective_port();
  std::string connect_addr;
  for (const std::string& key : {url.scheme + "://" + url.host, url.scheme + "://*"}) {
    if (auto it = config_.overrides.find(key); it != config_.overrides.end()) {
      connect_addr = it->second.address;
      port = it->second.port;
      break;
    }
  }

  std::unique_ptr<httplib::ClientImpl> client;
  CertCapture capture;
  if (https) {
    auto ssl = std::make_unique<httplib::SSLClient>(url.host, port);
    ssl->enable_server_certificate_verification(false);
    SSL_CTX* ctx = ssl->ssl_context();
    if (config_.use_system_trust) SSL_CTX_set_default_verify_paths(ctx);
    if (!config_.extra_ca_pem.empty()) add_pem_to_store(SSL_CTX_get_cert_store(ctx), config_.extra_ca_pem);
    X509_VERIFY_PARAM_set_time(SSL_CTX_get0_param(ctx), std::chrono::system_clock::to_time_t(at));
    X509_VERIFY_PARAM_set1_host(SSL_CTX_get0_param(ctx), url.host.c_str(), url.host.size());
    SSL_CTX_set_ex_data(ctx, capture_index(), &capture);
    SSL_CTX_set_verify(ctx, SSL_VERIFY_PEER, verify_callback);
    SSL_CTX_set_info_callback(ctx, info_callback);
    client = std::move(ssl);
  } else {
    client = std::make_unique<httplib::ClientImpl>(url.host, port);
  }
  if (!connect_addr.empty()) client->set_hostname_addr_map({{url.host, connect_addr}});
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  client->set_follow_location(false);
  client->set_keep_alive(false);

  httplib::Headers headers{{"User-Agent", config_.user_agent}, {"Accept", "text/html,*/*;q=0.5"}};
  std::string body;
  bool truncated = false;
  auto res = client->Get(url.path_and_query(), headers, [&](const char* data, std::size_t len) {
    const std::size_t room = config_.max_body_bytes > body.size() ? config_.max_body_bytes - body.size() : 0;
    body.append(data, std::min(room, len));
    if (len > room) truncated = true;
    return !truncated;
  });

  if (https && capture.leaf) {
    out.certificate = certificate_info(capture.leaf, capture.chain_ok && capture.saw_verify);
  }
  if (!res) {
    if (truncated && res.error() == httplib::Error::Canceled) {
      // Size cap reached; keep what we have.
      out.status.http_status = 200;
    } else {
      out.status.error = classify(res.error());
      return out;
    }
  } else {
    out.status.http_status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.location = res->get_header_value("Location");
  }
  out.body = std::move(body);
  return out;
}

}  // namespace dh::web
