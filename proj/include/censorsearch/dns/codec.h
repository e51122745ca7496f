#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace censorsearch::dns {

inline constexpr std::uint16_t kTypeA = 1;
inline constexpr std::uint16_t kClassIn = 1;
inline constexpr std::size_t kHeaderSize = 12;
inline constexpr std::size_t kMaxLabel = 63;
inline constexpr std::size_t kMaxWireName = 255;

struct DnsQuestion {
  std::string qname;  // dotted hostname; a trailing dot is ignored
  std::uint16_t qtype = kTypeA;
  std::uint16_t qclass = kClassIn;
  std::uint16_t txid = 0;

  bool operator==(const DnsQuestion&) const = default;
};

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;
using Ipv4 = std::array<std::uint8_t, 4>;

// Wire name of `qname`: length-prefixed labels ending in a zero byte.
// Throws EncodeError on an empty label, a label over 63 bytes or a name over
// 255 bytes.
Bytes encode_name(const std::string& qname);

// 12-byte header (QR=0, opcode 0, RD=0, QDCOUNT=1) followed by the question.
Bytes encode_query(const DnsQuestion& q);

// A response to `q` with flags QR=1 RA=1 carrying one A record per address.
// Answers use a compression pointer back to the question name.
Bytes encode_response(const DnsQuestion& q, const std::vector<Ipv4>& answers,
                      std::uint8_t rcode = 0);

// Parses a query datagram (QR=0, exactly one question). Throws DecodeError.
DnsQuestion decode_query(std::span<const std::uint8_t> bytes);

struct ParsedResponse {
  std::uint16_t txid = 0;
  std::uint8_t rcode = 0;
  std::vector<std::string> answers;  // dotted-quad A records
};

enum class ResponseKind {
  kMatching,   // QR=1, txid and question equal to the probe's
  kUnrelated,  // well-formed but not an answer to this probe
};

struct DecodedResponse {
  ResponseKind kind = ResponseKind::kUnrelated;
  ParsedResponse response;
};

// Throws DecodeError on truncated or garbled packets. Name comparison is
// ASCII case-insensitive.
DecodedResponse decode_response(std::span<const std::uint8_t> bytes,
                                const DnsQuestion& expected);

std::string format_ipv4(const Ipv4& ip);
// Throws std::invalid_argument.
Ipv4 parse_ipv4(const std::string& text);

}  // namespace censorsearch::dns
