#include <gtest/gtest.h>

#include <random>

#include "censorsearch/dns/codec.h"
#include "censorsearch/dns/prober.h"
#include "censorsearch/dns/simulated_censor.h"

namespace censorsearch::dns {
namespace {

Bytes with_qr(Bytes b) {
  b[2] |= 0x80;
  return b;
}

TEST(CodecTest, ExampleComWireBytes) {
  const Bytes expected = {0x12, 0x34, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00,
                          0x00, 0x00, 0x07, 'e',  'x',  'a',  'm',  'p',  'l',  'e',
                          0x03, 'c',  'o',  'm',  0x00, 0x00, 0x01, 0x00, 0x01};
  EXPECT_EQ(encode_query({"example.com", kTypeA, kClassIn, 0x1234}), expected);
  EXPECT_EQ(encode_query({"example.com.", kTypeA, kClassIn, 0x1234}), expected);
}

TEST(CodecTest, NameLimits) {
  EXPECT_THROW(encode_name(std::string(64, 'a') + ".com"), EncodeError);
  EXPECT_NO_THROW(encode_name(std::string(63, 'a') + ".com"));
  EXPECT_THROW(encode_name("a..b"), EncodeError);
  EXPECT_THROW(encode_name(""), EncodeError);
  std::string long_name;
  for (int i = 0; i < 5; ++i) long_name += std::string(60, 'x') + ".";
  EXPECT_THROW(encode_name(long_name), EncodeError);
}

TEST(CodecTest, FlippedQueryDecodesAsMatchingResponse) {
  const DnsQuestion q{"Example.COM", kTypeA, kClassIn, 0xbeef};
  const auto decoded = decode_response(with_qr(encode_query(q)), {"example.com", 1, 1, 0xbeef});
  EXPECT_EQ(decoded.kind, ResponseKind::kMatching);
  EXPECT_EQ(decoded.response.txid, 0xbeef);
  EXPECT_TRUE(decoded.response.answers.empty());
}

TEST(CodecTest, InjectedAnswerExtracted) {
  const DnsQuestion q{"www.boxun.com", kTypeA, kClassIn, 77};
  const auto decoded = decode_response(encode_response(q, {{203, 0, 113, 7}}), q);
  EXPECT_EQ(decoded.kind, ResponseKind::kMatching);
  EXPECT_EQ(decoded.response.answers, std::vector<std::string>{"203.0.113.7"});
}

TEST(CodecTest, WrongTxidOrQuestionIsUnrelated) {
  const DnsQuestion q{"a.test", kTypeA, kClassIn, 1};
  EXPECT_EQ(decode_response(encode_response({"a.test", 1, 1, 2}, {}), q).kind,
            ResponseKind::kUnrelated);
  EXPECT_EQ(decode_response(encode_response({"b.test", 1, 1, 1}, {}), q).kind,
            ResponseKind::kUnrelated);
  EXPECT_EQ(decode_response(encode_response({"a.test", 28, 1, 1}, {}), q).kind,
            ResponseKind::kUnrelated);
  // A query (QR=0) with everything matching is not a response.
  EXPECT_EQ(decode_response(encode_query(q), q).kind, ResponseKind::kUnrelated);
}

TEST(CodecTest, TruncationIsDecodeError) {
  const DnsQuestion q{"a.test", kTypeA, kClassIn, 1};
  EXPECT_THROW(decode_response(Bytes(5, 0), q), DecodeError);
  const auto full = encode_response(q, {{1, 2, 3, 4}});
  for (std::size_t len = 0; len < full.size(); ++len) {
    EXPECT_THROW(decode_response(Bytes(full.begin(), full.begin() + len), q), DecodeError)
        << len;
  }
}

TEST(CodecTest, CompressionLoopRejected) {
  Bytes b = {0, 1, 0x80, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0xC0, 0x0C, 0, 1, 0, 1};
  EXPECT_THROW(decode_response(b, {"a.test", 1, 1, 1}), DecodeError);
}

TEST(CodecTest, RandomRoundTrip) {
  std::mt19937 rng(99);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-";
  for (int i = 0; i < 500; ++i) {
    std::string name;
    const int labels = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int l = 0; l < labels; ++l) {
      if (l) name += '.';
      const int len = std::uniform_int_distribution<int>(1, 20)(rng);
      for (int c = 0; c < len; ++c) {
        name += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
      }
    }
    const DnsQuestion q{name, kTypeA, kClassIn,
                        static_cast<std::uint16_t>(rng() & 0xffff)};
    EXPECT_EQ(decode_query(encode_query(q)), q);
  }
}

TEST(CodecTest, Ipv4Formatting) {
  EXPECT_EQ(format_ipv4({10, 0, 0, 255}), "10.0.0.255");
  EXPECT_EQ(parse_ipv4("203.0.113.7"), (Ipv4{203, 0, 113, 7}));
  EXPECT_THROW(parse_ipv4("300.1.1.1"), std::invalid_argument);
}

TEST(VerdictTest, StreamJudgement) {
  const DnsQuestion q{"a.test", kTypeA, kClassIn, 5};
  const auto match = encode_response(q, {{1, 1, 1, 1}});
  const auto wrong_txid = encode_response({"a.test", 1, 1, 6}, {{1, 1, 1, 1}});
  const auto wrong_name = encode_response({"decoy.a.test", 1, 1, 5}, {{1, 1, 1, 1}});
  EXPECT_EQ(judge_stream({}, q), Verdict::kNotCensored);
  EXPECT_EQ(judge_stream({wrong_txid, wrong_name, encode_query(q)}, q), Verdict::kNotCensored);
  EXPECT_EQ(judge_stream({wrong_txid, match}, q), Verdict::kCensored);
  EXPECT_EQ(judge_stream({Bytes{1, 2, 3}, match}, q), Verdict::kCensored);
  EXPECT_FALSE(is_injected_response(Bytes{1, 2, 3}, q));
}

TEST(VerdictTest, NamesAndTargets) {
  EXPECT_EQ(to_string(Verdict::kNotCensored), "NotCensored");
  EXPECT_EQ(parse_verdict("Inconclusive"), Verdict::kInconclusive);
  EXPECT_EQ(parse_target("192.0.2.1").port, 53);
  EXPECT_EQ(parse_target("192.0.2.1:5353").port, 5353);
  const auto v6 = parse_target("[2001:db8::1]:54");
  EXPECT_EQ(v6.address, "2001:db8::1");
  EXPECT_EQ(v6.endpoint(), "[2001:db8::1]:54");
  EXPECT_THROW(parse_target("nonsense"), std::invalid_argument);
  EXPECT_THROW(parse_target("1.2.3.4:0"), std::invalid_argument);
}

ProbeSettings fast() {
  ProbeSettings s;
  s.trials = 3;
  s.wait = std::chrono::milliseconds(150);
  s.validation_trials = 1;
  return s;
}

TEST(ProberTest, InjectorCensorsOnlyItsSet) {
  SimulatedCensor::Options o;
  o.censored_hosts = {"www.boxun.com", "*.falundafa.org"};
  SimulatedCensor censor(o);
  DnsProber prober(fast());
  auto target = censor.target();
  ASSERT_TRUE(prober.validate_target(target, "control.example"));

  const std::vector<ProbeTarget> targets = {target};
  const auto hit = prober.probe_host("www.boxun.com", targets);
  EXPECT_EQ(hit.verdict, Verdict::kCensored);
  EXPECT_GE(hit.responses_seen, 1u);
  ASSERT_FALSE(hit.evidence.empty());
  EXPECT_TRUE(hit.evidence[0].txid_matched);
  EXPECT_EQ(hit.evidence[0].answer_ips, std::vector<std::string>{"203.0.113.7"});

  EXPECT_EQ(prober.probe_host("news.falundafa.org", targets).verdict, Verdict::kCensored);

  const auto before = prober.datagrams_sent();
  const auto miss = prober.probe_host("example.org", targets);
  EXPECT_EQ(miss.verdict, Verdict::kNotCensored);
  EXPECT_EQ(miss.trials, 3u);
  EXPECT_EQ(miss.responses_seen, 0u);
  EXPECT_LE(prober.datagrams_sent() - before, 3u);
}

TEST(ProberTest, NoiseNeverCounts) {
  SimulatedCensor::Options o;
  o.censored_hosts = {"blocked.test"};
  o.emit_noise = true;
  SimulatedCensor censor(o);
  DnsProber prober(fast());
  auto target = censor.target();
  target.validated = true;
  const std::vector<ProbeTarget> targets = {target};
  EXPECT_EQ(prober.probe_host("open.test", targets).verdict, Verdict::kNotCensored);
  EXPECT_EQ(prober.probe_host("blocked.test", targets).verdict, Verdict::kCensored);
}

TEST(ProberTest, ResolverTargetFailsValidation) {
  SimulatedCensor::Options o;
  o.mode = SimulatedCensor::Mode::kResolver;
  SimulatedCensor resolver(o);
  DnsProber prober(fast());
  auto target = resolver.target();
  EXPECT_FALSE(prober.validate_target(target, "control.example"));
  EXPECT_FALSE(target.validated);
  const std::vector<ProbeTarget> targets = {target};
  const auto outcome = prober.probe_host("anything.test", targets);
  EXPECT_EQ(outcome.verdict, Verdict::kInconclusive);
  EXPECT_EQ(outcome.trials, 0u);
}

TEST(ProberTest, BlackholeIsNotCensored) {
  SimulatedCensor::Options o;
  o.mode = SimulatedCensor::Mode::kBlackhole;
  o.censored_hosts = {"blocked.test"};
  SimulatedCensor censor(o);
  DnsProber prober(fast());
  auto target = censor.target();
  ASSERT_TRUE(prober.validate_target(target, "control.example"));
  const std::vector<ProbeTarget> targets = {target};
  const auto outcome = prober.probe_host("blocked.test", targets);
  EXPECT_EQ(outcome.verdict, Verdict::kNotCensored);
  EXPECT_EQ(outcome.trials, 3u);
}

TEST(ProberTest, LatencyWithinWaitStillDetected) {
  SimulatedCensor::Options o;
  o.censored_hosts = {"slow.test"};
  o.latency = std::chrono::milliseconds(60);
  SimulatedCensor censor(o);
  DnsProber prober(fast());
  auto target = censor.target();
  target.validated = true;
  const std::vector<ProbeTarget> targets = {target};
  EXPECT_EQ(prober.probe_host("slow.test", targets).verdict, Verdict::kCensored);
}

TEST(ProberTest, UnencodableHostIsInconclusive) {
  SimulatedCensor censor({});
  DnsProber prober(fast());
  auto target = censor.target();
  target.validated = true;
  const std::vector<ProbeTarget> targets = {target};
  EXPECT_EQ(prober.probe_host(std::string(70, 'a') + ".test", targets).verdict,
            Verdict::kInconclusive);
}

TEST(ProberTest, ConcurrentProbesKeepOrderAndAreRepeatable) {
  SimulatedCensor::Options o;
  std::vector<std::string> hosts;
  for (int i = 0; i < 40; ++i) {
    hosts.push_back("h" + std::to_string(i) + ".test");
    if (i % 3 == 0) o.censored_hosts.insert(hosts.back());
  }
  SimulatedCensor censor(o);
  DnsProber prober(fast());
  auto target = censor.target();
  target.validated = true;
  const std::vector<ProbeTarget> targets = {target};
  const auto first = prober.probe_hosts(hosts, targets);
  const auto second = prober.probe_hosts(hosts, targets);
  ASSERT_EQ(first.size(), hosts.size());
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    EXPECT_EQ(first[i].host, hosts[i]);
    EXPECT_EQ(first[i].verdict, i % 3 == 0 ? Verdict::kCensored : Verdict::kNotCensored);
    EXPECT_EQ(second[i].verdict, first[i].verdict);
  }
}

}  // namespace
}  // namespace censorsearch::dns
