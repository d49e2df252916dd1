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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dh::dns {

enum class RrType : std::uint16_t {
  A = 1,
  NS = 2,
  CNAME = 5,
  SOA = 6,
  MX = 15,
  TXT = 16,
  AAAA = 28,
  OPT = 41,
  DS = 43,
  RRSIG = 46,
  DNSKEY = 48,
  TLSA = 52,
  CAA = 257,
};

std::string_view to_string(RrType t);
RrType rr_type_from_string(std::string_view s);

// Record data is carried in a canonical presentation form:
//   A/AAAA  address text        NS/CNAME  lowercase name, no trailing dot
//   MX      "10 mx.example.com" TXT       character-strings concatenated
//   CAA     "0 issue ca.example" TLSA     "3 1 1 <hex>"
//   DNSKEY  "257 3 13 <hex>"    other     "<hex>"
struct ResourceRecord {
  std::string name;
  RrType type = RrType::A;
  std::uint16_t klass = 1;
  std::uint32_t ttl = 300;
  std::string data;

  friend bool operator==(const ResourceRecord&, const ResourceRecord&) = default;
};

struct Question {
  std::string name;
  RrType type = RrType::A;
  std::uint16_t klass = 1;

  friend bool operator==(const Question&, const Question&) = default;
};

struct Message {
  std::uint16_t id = 0;
  bool response = false;
  std::uint8_t opcode = 0;
  bool authoritative = false;
  bool truncated = false;
  bool recursion_desired = true;
  bool recursion_available = false;
  bool authenticated_data = false;
  bool checking_disabled = false;
  std::uint8_t rcode = 0;
  std::vector<Question> questions;
  std::vector<ResourceRecord> answers;
  std::vector<ResourceRecord> authority;
  std::vector<ResourceRecord> additional;  // excluding OPT
  bool edns = false;
  std::uint16_t edns_udp_size = 1232;
  bool dnssec_ok = false;

  friend bool operator==(const Message&, const Message&) = default;
};

// Throws dh::Error(InvalidArgument) for data that cannot be encoded.
std::vector<std::uint8_t> encode(const Message& msg);

// Throws dh::Error(CorruptArtifact) for malformed wire data.
Message decode(std::span<const std::uint8_t> wire);

Message make_query(std::uint16_t id, std::string_view name, RrType type, bool dnssec_ok = true);

}  // namespace dh::dns
