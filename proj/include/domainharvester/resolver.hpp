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

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domainharvester/clock.hpp"
#include "domainharvester/dns_wire.hpp"

namespace dh::dns {

enum class Rcode { NoError, NXDomain, ServFail, Timeout };

std::string_view to_string(Rcode r);
Rcode rcode_from_string(std::string_view s);

struct QueryResult {
  Rcode rcode = Rcode::NoError;
  std::vector<ResourceRecord> answers;  // records of the asked type only
  bool authenticated_data = false;
};

// A recursive resolver. Implementations must be safe to call from several
// threads at once.
class Resolver {
 public:
  virtual ~Resolver() = default;
  virtual QueryResult query(const std::string& name, RrType type) = 0;
};

struct UdpResolverConfig {
  std::string address = "127.0.0.1";
  int port = 53;
  Duration timeout{2000};
};

// Stub resolver over UDP with EDNS0 and the DO bit; retries over TCP when
// the answer comes back truncated. One attempt per call, retry policy lives
// with the caller.
class UdpResolver final : public Resolver {
 public:
  explicit UdpResolver(UdpResolverConfig config);
  QueryResult query(const std::string& name, RrType type) override;

 private:
  QueryResult query_tcp(const std::vector<std::uint8_t>& wire, std::uint16_t id);

  UdpResolverConfig config_;
  std::mutex mu_;
  std::uint16_t next_id_;
};

// In-memory authoritative data. Names are lowercase without trailing dot.
class Zone {
 public:
  void add(ResourceRecord rr);
  void add(const std::string& name, RrType type, const std::string& data, std::uint32_t ttl = 300);
  void remove(const std::string& name, RrType type);
  // Answers at or under a signed apex carry the authenticated-data flag.
  void set_signed(const std::string& apex, bool on);
  // Queries for this name fail with SERVFAIL / are dropped.
  void set_servfail(const std::string& name, bool on);
  void set_timeout(const std::string& name, bool on);

  bool exists(const std::string& name) const;
  bool is_signed(const std::string& name) const;
  QueryResult lookup(const std::string& name, RrType type) const;

  // Builds a full response for a wire query (used by the fixture server).
  Message answer(const Message& query) const;

  const std::map<std::string, std::vector<ResourceRecord>>& records() const { return records_; }

 private:
  std::map<std::string, std::vector<ResourceRecord>> records_;
  std::set<std::string> signed_;
  std::set<std::string> servfail_;
  std::set<std::string> timeout_;
};

class ZoneResolver final : public Resolver {
 public:
  explicit ZoneResolver(Zone zone) : zone_(std::move(zone)) {}
  QueryResult query(const std::string& name, RrType type) override;

  std::size_t query_count() const;

 private:
  Zone zone_;
  mutable std::mutex mu_;
  std::size_t queries_ = 0;
};

}  // namespace dh::dns
