#include "censorsearch/dns/codec.h"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <cstring>

namespace censorsearch::dns {
namespace {

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v =
        static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  // Reads a possibly compressed name into dotted form, case preserved.
  std::string name() {
    std::string out;
    std::size_t cursor = pos_;
    bool jumped = false;
    std::size_t wire_len = 0;
    for (int hops = 0;; ) {
      if (cursor >= bytes_.size()) throw DecodeError("name runs past end of packet");
      const std::uint8_t len = bytes_[cursor];
      if ((len & 0xC0) == 0xC0) {
        if (cursor + 1 >= bytes_.size()) throw DecodeError("truncated name pointer");
        const std::size_t target = static_cast<std::size_t>((len & 0x3F) << 8) |
                                   bytes_[cursor + 1];
        if (!jumped) pos_ = cursor + 2;
        jumped = true;
        if (++hops > 32 || target >= bytes_.size()) throw DecodeError("bad name pointer");
        cursor = target;
        continue;
      }
      if ((len & 0xC0) != 0) throw DecodeError("unsupported label type");
      if (len == 0) {
        if (!jumped) pos_ = cursor + 1;
        break;
      }
      if (cursor + 1 + len > bytes_.size()) throw DecodeError("truncated label");
      wire_len += len + 1;
      if (wire_len + 1 > kMaxWireName) throw DecodeError("name too long");
      if (!out.empty()) out.push_back('.');
      for (std::size_t i = 0; i < len; ++i) {
        out.push_back(static_cast<char>(bytes_[cursor + 1 + i]));
      }
      cursor += 1 + len;
    }
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DecodeError("truncated packet");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  std::uint16_t id, flags, qdcount, ancount, nscount, arcount;
};

Header read_header(Reader& r) {
  Header h{};
  h.id = r.u16();
  h.flags = r.u16();
  h.qdcount = r.u16();
  h.ancount = r.u16();
  h.nscount = r.u16();
  h.arcount = r.u16();
  return h;
}

std::string canonical(std::string name) {
  if (!name.empty() && name.back() == '.') name.pop_back();
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return name;
}

}  // namespace

Bytes encode_name(const std::string& qname) {
  std::string name = qname;
  if (!name.empty() && name.back() == '.') name.pop_back();
  if (name.empty()) throw EncodeError("empty name");
  Bytes out;
  {
    std::size_t start = 0;
    while (true) {
      const auto dot = name.find('.', start);
      const std::size_t len = (dot == std::string::npos ? name.size() : dot) - start;
      if (len == 0) throw EncodeError("empty label in '" + qname + "'");
      if (len > kMaxLabel) {
        throw EncodeError("label longer than 63 bytes in '" + qname + "'");
      }
      out.push_back(static_cast<std::uint8_t>(len));
      out.insert(out.end(), name.begin() + static_cast<std::ptrdiff_t>(start),
                 name.begin() + static_cast<std::ptrdiff_t>(start + len));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
  }
  out.push_back(0);
  if (out.size() > kMaxWireName) throw EncodeError("name longer than 255 bytes");
  return out;
}

Bytes encode_query(const DnsQuestion& q) {
  Bytes out;
  out.reserve(kHeaderSize + q.qname.size() + 6);
  put16(out, q.txid);
  put16(out, 0x0000);  // QR=0, opcode QUERY, RD=0
  put16(out, 1);
  put16(out, 0);
  put16(out, 0);
  put16(out, 0);
  const Bytes name = encode_name(q.qname);
  out.insert(out.end(), name.begin(), name.end());
  put16(out, q.qtype);
  put16(out, q.qclass);
  return out;
}

Bytes encode_response(const DnsQuestion& q, const std::vector<Ipv4>& answers,
                      std::uint8_t rcode) {
  Bytes out;
  put16(out, q.txid);
  put16(out, static_cast<std::uint16_t>(0x8080 | (rcode & 0x0F)));  // QR=1, RA=1
  put16(out, 1);
  put16(out, static_cast<std::uint16_t>(answers.size()));
  put16(out, 0);
  put16(out, 0);
  const Bytes name = encode_name(q.qname);
  out.insert(out.end(), name.begin(), name.end());
  put16(out, q.qtype);
  put16(out, q.qclass);
  for (const auto& ip : answers) {
    put16(out, 0xC00C);  // pointer to the question name
    put16(out, kTypeA);
    put16(out, kClassIn);
    put16(out, 0);
    put16(out, 300);  // TTL
    put16(out, 4);
    out.insert(out.end(), ip.begin(), ip.end());
  }
  return out;
}

DnsQuestion decode_query(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const Header h = read_header(r);
  if (h.flags & 0x8000) throw DecodeError("not a query");
  if (h.qdcount != 1) throw DecodeError("expected exactly one question");
  DnsQuestion q;
  q.txid = h.id;
  q.qname = r.name();
  q.qtype = r.u16();
  q.qclass = r.u16();
  return q;
}

DecodedResponse decode_response(std::span<const std::uint8_t> bytes,
                                const DnsQuestion& expected) {
  Reader r(bytes);
  const Header h = read_header(r);
  DecodedResponse out;
  out.response.txid = h.id;
  out.response.rcode = static_cast<std::uint8_t>(h.flags & 0x0F);

  bool question_matches = h.qdcount == 1;
  const std::string want = canonical(expected.qname);
  for (std::uint16_t i = 0; i < h.qdcount; ++i) {
    const std::string name = r.name();
    const std::uint16_t qtype = r.u16();
    const std::uint16_t qclass = r.u16();
    if (canonical(name) != want || qtype != expected.qtype || qclass != expected.qclass) {
      question_matches = false;
    }
  }
  for (std::uint16_t i = 0; i < h.ancount; ++i) {
    r.name();
    const std::uint16_t type = r.u16();
    const std::uint16_t klass = r.u16();
    r.u32();
    const std::uint16_t rdlength = r.u16();
    const auto rdata = r.take(rdlength);
    if (type == kTypeA && klass == kClassIn && rdlength == 4) {
      out.response.answers.push_back(format_ipv4({rdata[0], rdata[1], rdata[2], rdata[3]}));
    }
  }
  const bool is_response = (h.flags & 0x8000) != 0;
  if (is_response && h.id == expected.txid && question_matches) {
    out.kind = ResponseKind::kMatching;
  }
  return out;
}

std::string format_ipv4(const Ipv4& ip) {
  return std::to_string(ip[0]) + "." + std::to_string(ip[1]) + "." +
         std::to_string(ip[2]) + "." + std::to_string(ip[3]);
}

Ipv4 parse_ipv4(const std::string& text) {
  in_addr addr{};
  if (inet_pton(AF_INET, text.c_str(), &addr) != 1) {
    throw std::invalid_argument("not an IPv4 address: " + text);
  }
  Ipv4 out{};
  std::memcpy(out.data(), &addr.s_addr, 4);
  return out;
}

}  // namespace censorsearch::dns
