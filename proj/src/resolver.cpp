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

#include "domainharvester/resolver.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <random>

#include "domainharvester/error.hpp"

namespace dh::dns {
namespace {

std::string normalize(std::string_view name) {
  std::string out(name);
  if (!out.empty() && out.back() == '.') out.pop_back();
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

bool wait_fd(int fd, short events, TimePoint deadline) {
  const auto now = std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
  const auto left = (deadline - now).count();
  if (left <= 0) return false;
  pollfd p{fd, events, 0};
  return ::poll(&p, 1, static_cast<int>(left)) > 0;
}

QueryResult to_result(const Message& msg, const std::string& name, RrType type) {
  QueryResult out;
  switch (msg.rcode) {
    case 0: out.rcode = Rcode::NoError; break;
    case 3: out.rcode = Rcode::NXDomain; break;
    default: out.rcode = Rcode::ServFail; break;
  }
  out.authenticated_data = msg.authenticated_data;
  // Follow the CNAME chain the recursive resolver already expanded.
  std::string target = normalize(name);
  for (int hop = 0; hop < 8; ++hop) {
    bool moved = false;
    for (const auto& rr : msg.answers) {
      if (rr.name == target && rr.type == RrType::CNAME && type != RrType::CNAME) {
        target = rr.data;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  for (const auto& rr : msg.answers) {
    if (rr.type == type && rr.name == target) out.answers.push_back(rr);
  }
  return out;
}

}  // namespace

std::string_view to_string(Rcode r) {
  switch (r) {
    case Rcode::NoError: return "NoError";
    case Rcode::NXDomain: return "NXDomain";
    case Rcode::ServFail: return "ServFail";
    case Rcode::Timeout: return "Timeout";
  }
  return "ServFail";
}

Rcode rcode_from_string(std::string_view s) {
  for (auto r : {Rcode::NoError, Rcode::NXDomain, Rcode::ServFail, Rcode::Timeout}) {
    if (to_string(r) == s) return r;
  }
  throw Error(Errc::CorruptArtifact, "unknown rcode '" + std::string(s) + "'");
}

UdpResolver::UdpResolver(UdpResolverConfig config)
    : config_(std::move(config)), next_id_(static_cast<std::uint16_t>(std::random_device{}())) {}

QueryResult UdpResolver::query(const std::string& name, RrType type) {
  std::uint16_t id;
  {
    std::lock_guard lk(mu_);
    id = next_id_++;
  }
  const auto wire = encode(make_query(id, normalize(name), type));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(config_.port));
  if (inet_pton(AF_INET, config_.address.c_str(), &addr.sin_addr) != 1) {
    throw Error(Errc::ConfigError, "resolver address must be an IPv4 literal: " + config_.address);
  }
  Socket sock(::socket(AF_INET, SOCK_DGRAM, 0));
  if (sock.get() < 0) return {Rcode::Timeout, {}, false};
  if (::connect(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::send(sock.get(), wire.data(), wire.size(), 0) < 0) {
    return {Rcode::Timeout, {}, false};
  }
  const auto deadline = std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()) + config_.timeout;
  std::vector<std::uint8_t> buf(4096);
  while (wait_fd(sock.get(), POLLIN, deadline)) {
    const auto n = ::recv(sock.get(), buf.data(), buf.size(), 0);
    if (n <= 0) break;
    Message msg;
    try {
      msg = decode(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
    } catch (const Error&) {
      continue;
    }
    if (msg.id != id || !msg.response) continue;
    if (msg.truncated) return query_tcp(wire, id);
    return to_result(msg, name, type);
  }
  return {Rcode::Timeout, {}, false};
}

QueryResult UdpResolver::query_tcp(const std::vector<std::uint8_t>& wire, std::uint16_t id) {
  const auto q = decode(wire);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(config_.port));
  inet_pton(AF_INET, config_.address.c_str(), &addr.sin_addr);
  Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
  if (sock.get() < 0 || ::connect(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    return {Rcode::Timeout, {}, false};
  }
  std::vector<std::uint8_t> framed;
  framed.push_back(static_cast<std::uint8_t>(wire.size() >> 8));
  framed.push_back(static_cast<std::uint8_t>(wire.size()));
  framed.insert(framed.end(), wire.begin(), wire.end());
  if (::send(sock.get(), framed.data(), framed.size(), MSG_NOSIGNAL) != static_cast<ssize_t>(framed.size())) {
    return {Rcode::Timeout, {}, false};
  }
  const auto deadline = std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()) + config_.timeout;
  std::vector<std::uint8_t> in;
  while (true) {
    if (in.size() >= 2) {
      const std::size_t len = static_cast<std::size_t>(in[0]) << 8 | in[1];
      if (in.size() >= len + 2) {
        try {
          auto msg = decode(std::span<const std::uint8_t>(in.data() + 2, len));
          if (msg.id != id) break;
          return to_result(msg, q.questions.at(0).name, q.questions.at(0).type);
        } catch (const Error&) {
          break;
        }
      }
    }
    if (!wait_fd(sock.get(), POLLIN, deadline)) break;
    std::uint8_t chunk[4096];
    const auto n = ::recv(sock.get(), chunk, sizeof chunk, 0);
    if (n <= 0) break;
    in.insert(in.end(), chunk, chunk + n);
  }
  return {Rcode::Timeout, {}, false};
}

void Zone::add(ResourceRecord rr) {
  rr.name = normalize(rr.name);
  if (rr.type == RrType::NS || rr.type == RrType::CNAME) rr.data = normalize(rr.data);
  auto& list = records_[rr.name];
  if (std::find(list.begin(), list.end(), rr) == list.end()) list.push_back(std::move(rr));
}

void Zone::add(const std::string& name, RrType type, const std::string& data, std::uint32_t ttl) {
  add(ResourceRecord{name, type, 1, ttl, data});
}

void Zone::remove(const std::string& name, RrType type) {
  auto it = records_.find(normalize(name));
  if (it == records_.end()) return;
  std::erase_if(it->second, [&](const ResourceRecord& rr) { return rr.type == type; });
  if (it->second.empty()) records_.erase(it);
}

void Zone::set_signed(const std::string& apex, bool on) {
  if (on) signed_.insert(normalize(apex));
  else signed_.erase(normalize(apex));
}

void Zone::set_servfail(const std::string& name, bool on) {
  if (on) servfail_.insert(normalize(name));
  else servfail_.erase(normalize(name));
}

void Zone::set_timeout(const std::string& name, bool on) {
  if (on) timeout_.insert(normalize(name));
  else timeout_.erase(normalize(name));
}

bool Zone::exists(const std::string& name) const {
  const auto n = normalize(name);
  auto it = records_.lower_bound(n);
  if (it != records_.end() && it->first == n) return true;
  // Empty non-terminals exist too.
  const std::string suffix = "." + n;
  for (const auto& [owner, _] : records_) {
    if (owner.size() > suffix.size() && owner.compare(owner.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return true;
    }
  }
  return false;
}

bool Zone::is_signed(const std::string& name) const {
  std::string_view n = name;
  while (true) {
    if (signed_.count(std::string(n))) return true;
    const auto dot = n.find('.');
    if (dot == std::string_view::npos) return false;
    n.remove_prefix(dot + 1);
  }
}

QueryResult Zone::lookup(const std::string& name, RrType type) const {
  std::string n = normalize(name);
  if (timeout_.count(n)) return {Rcode::Timeout, {}, false};
  if (servfail_.count(n)) return {Rcode::ServFail, {}, false};
  QueryResult out;
  if (!exists(n)) {
    out.rcode = Rcode::NXDomain;
    out.authenticated_data = is_signed(n);
    return out;
  }
  bool ad = true;
  for (int hop = 0; hop < 8; ++hop) {
    auto it = records_.find(n);
    if (it == records_.end()) break;
    ad = ad && is_signed(n);
    bool followed = false;
    for (const auto& rr : it->second) {
      if (rr.type == RrType::CNAME && type != RrType::CNAME) {
        out.answers.push_back(rr);
        n = rr.data;
        followed = true;
        break;
      }
    }
    if (followed) continue;
    for (const auto& rr : it->second) {
      if (rr.type == type) out.answers.push_back(rr);
    }
    break;
  }
  out.authenticated_data = ad;
  return out;
}

Message Zone::answer(const Message& query) const {
  Message resp;
  resp.id = query.id;
  resp.response = true;
  resp.opcode = query.opcode;
  resp.recursion_desired = query.recursion_desired;
  resp.recursion_available = true;
  resp.questions = query.questions;
  resp.edns = query.edns;
  resp.dnssec_ok = query.dnssec_ok;
  if (query.questions.size() != 1) {
    resp.rcode = 1;
    return resp;
  }
  const auto& q = query.questions.front();
  const auto result = lookup(q.name, q.type);
  switch (result.rcode) {
    case Rcode::NoError: resp.rcode = 0; break;
    case Rcode::NXDomain: resp.rcode = 3; break;
    default: resp.rcode = 2; break;
  }
  resp.answers = result.answers;
  resp.authenticated_data = result.authenticated_data && query.dnssec_ok;
  return resp;
}

QueryResult ZoneResolver::query(const std::string& name, RrType type) {
  {
    std::lock_guard lk(mu_);
    ++queries_;
  }
  auto result = zone_.lookup(name, type);
  // Match the wire path: only records of the asked type are returned.
  std::erase_if(result.answers, [&](const ResourceRecord& rr) { return rr.type != type; });
  return result;
}

std::size_t ZoneResolver::query_count() const {
  std::lock_guard lk(mu_);
  return queries_;
}

}  // namespace dh::dns
