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

#include "domainharvester/dns_wire.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <sstream>

#include "domainharvester/error.hpp"

namespace dh::dns {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::CorruptArtifact, "dns: " + what); }
[[noreturn]] void unencodable(const std::string& what) { throw Error(Errc::InvalidArgument, "dns: " + what); }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2) unencodable("odd hex length");
  std::vector<std::uint8_t> out;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    unencodable("bad hex digit");
  };
  for (std::size_t i = 0; i < hex.size(); i += 2) out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
  return out;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void name(std::string_view n) {
    if (!n.empty() && n.back() == '.') n.remove_suffix(1);
    std::size_t total = 1;
    while (!n.empty()) {
      const auto dot = n.find('.');
      const auto label = n.substr(0, dot);
      if (label.empty() || label.size() > 63) unencodable("bad label in '" + std::string(n) + "'");
      total += label.size() + 1;
      u8(static_cast<std::uint8_t>(label.size()));
      bytes(label);
      if (dot == std::string_view::npos) break;
      n.remove_prefix(dot + 1);
    }
    if (total > 255) unencodable("name too long");
    u8(0);
  }
  std::size_t size() const { return buf_.size(); }
  void patch_u16(std::size_t at, std::uint16_t v) {
    buf_[at] = static_cast<std::uint8_t>(v >> 8);
    buf_[at + 1] = static_cast<std::uint8_t>(v);
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> wire) : wire_(wire) {}

  std::uint8_t u8() {
    need(1);
    return wire_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(wire_[pos_] << 8 | wire_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return hi << 16 | u16();
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = wire_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::string name() { return name_at(pos_, true); }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > wire_.size()) malformed("truncated message");
  }

  std::string name_at(std::size_t& cursor, bool advance) {
    std::string out;
    std::size_t p = cursor;
    bool jumped = false;
    int hops = 0;
    while (true) {
      if (p >= wire_.size()) malformed("name runs past end");
      const std::uint8_t len = wire_[p];
      if ((len & 0xC0) == 0xC0) {
        if (p + 1 >= wire_.size()) malformed("bad pointer");
        if (++hops > 64) malformed("compression loop");
        const std::size_t target = static_cast<std::size_t>(len & 0x3F) << 8 | wire_[p + 1];
        if (!jumped && advance) cursor = p + 2;
        jumped = true;
        p = target;
        continue;
      }
      if (len & 0xC0) malformed("bad label type");
      if (len == 0) {
        if (!jumped && advance) cursor = p + 1;
        break;
      }
      if (p + 1 + len > wire_.size()) malformed("label runs past end");
      if (!out.empty()) out.push_back('.');
      out.append(reinterpret_cast<const char*>(&wire_[p + 1]), len);
      if (out.size() > 255) malformed("name too long");
      p += 1 + len;
    }
    return lower(out);
  }

  std::span<const std::uint8_t> wire_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void write_rdata(Writer& w, const ResourceRecord& rr) {
  const std::size_t len_at = w.size();
  w.u16(0);
  const std::size_t start = w.size();
  switch (rr.type) {
    case RrType::A: {
      std::uint8_t b[4];
      if (inet_pton(AF_INET, rr.data.c_str(), b) != 1) unencodable("bad A " + rr.data);
      w.bytes(std::span<const std::uint8_t>(b, 4));
      break;
    }
    case RrType::AAAA: {
      std::uint8_t b[16];
      if (inet_pton(AF_INET6, rr.data.c_str(), b) != 1) unencodable("bad AAAA " + rr.data);
      w.bytes(std::span<const std::uint8_t>(b, 16));
      break;
    }
    case RrType::NS:
    case RrType::CNAME:
      w.name(rr.data);
      break;
    case RrType::MX: {
      auto parts = split_ws(rr.data);
      if (parts.size() != 2) unencodable("bad MX " + rr.data);
      w.u16(static_cast<std::uint16_t>(std::stoul(parts[0])));
      w.name(parts[1]);
      break;
    }
    case RrType::TXT: {
      std::string_view rest = rr.data;
      do {
        const auto chunk = rest.substr(0, 255);
        w.u8(static_cast<std::uint8_t>(chunk.size()));
        w.bytes(chunk);
        rest.remove_prefix(chunk.size());
      } while (!rest.empty());
      break;
    }
    case RrType::CAA: {
      auto parts = split_ws(rr.data);
      if (parts.size() < 2) unencodable("bad CAA " + rr.data);
      w.u8(static_cast<std::uint8_t>(std::stoul(parts[0])));
      w.u8(static_cast<std::uint8_t>(parts[1].size()));
      w.bytes(parts[1]);
      const auto vpos = rr.data.find(parts[1]) + parts[1].size();
      std::string value = rr.data.substr(vpos);
      value.erase(0, value.find_first_not_of(' '));
      w.bytes(value);
      break;
    }
    case RrType::TLSA:
    case RrType::DNSKEY: {
      auto parts = split_ws(rr.data);
      if (parts.size() != 4) unencodable("bad " + std::string(to_string(rr.type)) + " " + rr.data);
      if (rr.type == RrType::TLSA) {
        for (int i = 0; i < 3; ++i) w.u8(static_cast<std::uint8_t>(std::stoul(parts[static_cast<std::size_t>(i)])));
      } else {
        w.u16(static_cast<std::uint16_t>(std::stoul(parts[0])));
        w.u8(static_cast<std::uint8_t>(std::stoul(parts[1])));
        w.u8(static_cast<std::uint8_t>(std::stoul(parts[2])));
      }
      w.bytes(from_hex(parts[3]));
      break;
    }
    default:
      w.bytes(from_hex(rr.data));
  }
  w.patch_u16(len_at, static_cast<std::uint16_t>(w.size() - start));
}

std::string read_rdata(Reader& r, RrType type, std::uint16_t rdlen) {
  const std::size_t start = r.pos();
  const std::size_t end = start + rdlen;
  std::string out;
  switch (type) {
    case RrType::A: {
      if (rdlen != 4) malformed("bad A length");
      auto b = r.take(4);
      char buf[INET_ADDRSTRLEN];
      inet_ntop(AF_INET, b.data(), buf, sizeof buf);
      out = buf;
      break;
    }
    case RrType::AAAA: {
      if (rdlen != 16) malformed("bad AAAA length");
      auto b = r.take(16);
      char buf[INET6_ADDRSTRLEN];
      inet_ntop(AF_INET6, b.data(), buf, sizeof buf);
      out = buf;
      break;
    }
    case RrType::NS:
    case RrType::CNAME:
      out = r.name();
      break;
    case RrType::MX: {
      const auto pref = r.u16();
      out = std::to_string(pref) + " " + r.name();
      break;
    }
    case RrType::TXT:
      while (r.pos() < end) {
        const auto len = r.u8();
        auto b = r.take(len);
        out.append(reinterpret_cast<const char*>(b.data()), b.size());
      }
      break;
    case RrType::CAA: {
      const auto flags = r.u8();
      const auto tag_len = r.u8();
      auto tag = r.take(tag_len);
      if (r.pos() > end) malformed("bad CAA");
      auto value = r.take(end - r.pos());
      out = std::to_string(flags) + " " + std::string(tag.begin(), tag.end()) + " " +
            std::string(value.begin(), value.end());
      break;
    }
    case RrType::TLSA: {
      const auto usage = r.u8();
      const auto selector = r.u8();
      const auto mtype = r.u8();
      if (r.pos() > end) malformed("bad TLSA");
      out = std::to_string(usage) + " " + std::to_string(selector) + " " + std::to_string(mtype) + " " +
            to_hex(r.take(end - r.pos()));
      break;
    }
    case RrType::DNSKEY: {
      const auto flags = r.u16();
      const auto proto = r.u8();
      const auto alg = r.u8();
      if (r.pos() > end) malformed("bad DNSKEY");
      out = std::to_string(flags) + " " + std::to_string(proto) + " " + std::to_string(alg) + " " +
            to_hex(r.take(end - r.pos()));
      break;
    }
    default:
      out = to_hex(r.take(rdlen));
  }
  if (r.pos() != end) malformed("rdata length mismatch");
  return out;
}

void write_rr(Writer& w, const ResourceRecord& rr) {
  w.name(rr.name);
  w.u16(static_cast<std::uint16_t>(rr.type));
  w.u16(rr.klass);
  w.u32(rr.ttl);
  write_rdata(w, rr);
}

}  // namespace

std::string_view to_string(RrType t) {
  switch (t) {
    case RrType::A: return "A";
    case RrType::NS: return "NS";
    case RrType::CNAME: return "CNAME";
    case RrType::SOA: return "SOA";
    case RrType::MX: return "MX";
    case RrType::TXT: return "TXT";
    case RrType::AAAA: return "AAAA";
    case RrType::OPT: return "OPT";
    case RrType::DS: return "DS";
    case RrType::RRSIG: return "RRSIG";
    case RrType::DNSKEY: return "DNSKEY";
    case RrType::TLSA: return "TLSA";
    case RrType::CAA: return "CAA";
  }
  return "UNKNOWN";
}

RrType rr_type_from_string(std::string_view s) {
  for (auto t : {RrType::A, RrType::NS, RrType::CNAME, RrType::SOA, RrType::MX, RrType::TXT, RrType::AAAA, RrType::OPT,
                 RrType::DS, RrType::RRSIG, RrType::DNSKEY, RrType::TLSA, RrType::CAA}) {
    if (to_string(t) == s) return t;
  }
  throw Error(Errc::InvalidArgument, "unknown record type '" + std::string(s) + "'");
}

std::vector<std::uint8_t> encode(const Message& msg) {
  Writer w;
  w.u16(msg.id);
  std::uint16_t flags = 0;
  if (msg.response) flags |= 0x8000;
  flags |= static_cast<std::uint16_t>((msg.opcode & 0xF) << 11);
  if (msg.authoritative) flags |= 0x0400;
  if (msg.truncated) flags |= 0x0200;
  if (msg.recursion_desired) flags |= 0x0100;
  if (msg.recursion_available) flags |= 0x0080;
  if (msg.authenticated_data) flags |= 0x0020;
  if (msg.checking_disabled) flags |= 0x0010;
  flags |= msg.rcode & 0xF;
  w.u16(flags);
  w.u16(static_cast<std::uint16_t>(msg.questions.size()));
  w.u16(static_cast<std::uint16_t>(msg.answers.size()));
  w.u16(static_cast<std::uint16_t>(msg.authority.size()));
  w.u16(static_cast<std::uint16_t>(msg.additional.size() + (msg.edns ? 1 : 0)));
  for (const auto& q : msg.questions) {
    w.name(q.name);
    w.u16(static_cast<std::uint16_t>(q.type));
    w.u16(q.klass);
  }
  for (const auto& rr : msg.answers) write_rr(w, rr);
  for (const auto& rr : msg.authority) write_rr(w, rr);
  for (const auto& rr : msg.additional) write_rr(w, rr);
  if (msg.edns) {
    w.u8(0);
    w.u16(static_cast<std::uint16_t>(RrType::OPT));
    w.u16(msg.edns_udp_size);
    w.u32(msg.dnssec_ok ? 0x00008000u : 0u);
    w.u16(0);
  }
  return w.take();
}

Message decode(std::span<const std::uint8_t> wire) {
  Reader r(wire);
  Message msg;
  msg.id = r.u16();
  const std::uint16_t flags = r.u16();
  msg.response = flags & 0x8000;
  msg.opcode = static_cast<std::uint8_t>((flags >> 11) & 0xF);
  msg.authoritative = flags & 0x0400;
  msg.truncated = flags & 0x0200;
  msg.recursion_desired = flags & 0x0100;
  msg.recursion_available = flags & 0x0080;
  msg.authenticated_data = flags & 0x0020;
  msg.checking_disabled = flags & 0x0010;
  msg.rcode = static_cast<std::uint8_t>(flags & 0xF);
  const auto qd = r.u16();
  const auto an = r.u16();
  const auto ns = r.u16();
  const auto ar = r.u16();
  for (int i = 0; i < qd; ++i) {
    Question q;
    q.name = r.name();
    q.type = static_cast<RrType>(r.u16());
    q.klass = r.u16();
    msg.questions.push_back(std::move(q));
  }
  auto read_section = [&](int count, std::vector<ResourceRecord>& into, bool additional) {
    for (int i = 0; i < count; ++i) {
      ResourceRecord rr;
      rr.name = r.name();
      rr.type = static_cast<RrType>(r.u16());
      rr.klass = r.u16();
      rr.ttl = r.u32();
      const auto rdlen = r.u16();
      if (additional && rr.type == RrType::OPT) {
        msg.edns = true;
        msg.edns_udp_size = rr.klass;
        msg.dnssec_ok = rr.ttl & 0x8000;
        msg.rcode = static_cast<std::uint8_t>(msg.rcode | ((rr.ttl >> 24) << 4));
        r.take(rdlen);
        continue;
      }
      rr.data = read_rdata(r, rr.type, rdlen);
      into.push_back(std::move(rr));
    }
  };
  read_section(an, msg.answers, false);
  read_section(ns, msg.authority, false);
  read_section(ar, msg.additional, true);
  return msg;
}

Message make_query(std::uint16_t id, std::string_view name, RrType type, bool dnssec_ok) {
  Message q;
  q.id = id;
  q.recursion_desired = true;
  q.authenticated_data = dnssec_ok;
  q.questions.push_back({std::string(name), type, 1});
  q.edns = true;
  q.dnssec_ok = dnssec_ok;
  return q;
}

}  // namespace dh::dns
