#include "dumbbell/packet.hpp"

#include <gtest/gtest.h>

namespace dumbbell {
namespace {

WireContext tcp_context() {
  WireContext ctx;
  ctx.transport = Transport::tcp;
  ctx.src_addr = 0x0a000001;
  ctx.dst_addr = 0x0a00000d;
  ctx.src_port = 40000;
  ctx.dst_port = 5201;
  ctx.data_isn = 1000;
  ctx.ack_isn = 2000;
  ctx.payload_seed = 17;
  return ctx;
}

TEST(PacketSize, HeaderArithmetic) {
  EXPECT_EQ(packet_size(Transport::tcp, false), kMtu);
  EXPECT_EQ(data_payload_bytes(Transport::tcp) + kIpHeaderBytes + kTcpHeaderBytes, kMtu);
  EXPECT_EQ(packet_size(Transport::tcp, true), kIpHeaderBytes + kTcpHeaderBytes);
  EXPECT_EQ(packet_size(Transport::tcp, true, 1), kIpHeaderBytes + kTcpHeaderBytes + 12);
  EXPECT_EQ(packet_size(Transport::tcp, true, 3), kIpHeaderBytes + kTcpHeaderBytes + 28);
  EXPECT_EQ(packet_size(Transport::udp, false), kMtu);
  EXPECT_EQ(data_payload_bytes(Transport::udp) + kIpHeaderBytes + kUdpHeaderBytes, kMtu);
  EXPECT_LE(packet_size(Transport::udp, true, 3), kMtu);
}

TEST(Serialize, TcpDataIsValidIpv4) {
  SimPacket p;
  p.seq = 5;
  p.ip_id = 0xbeef;
  p.tsval = 123;
  p.size = packet_size(Transport::tcp, false);
  std::vector<std::uint8_t> bytes;
  serialize(p, tcp_context(), bytes);
  ASSERT_EQ(bytes.size(), kMtu);
  EXPECT_TRUE(checksums_valid(bytes));
  const auto v = parse_ipv4(bytes);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->total_length, kMtu);
  EXPECT_EQ(v->ip_id, 0xbeef);
  EXPECT_EQ(v->protocol, 6);
  EXPECT_EQ(v->src, 0x0a000001u);
  EXPECT_EQ(v->dst, 0x0a00000du);
  EXPECT_EQ(v->payload.size(), kMtu - kIpHeaderBytes);
  // sequence number in bytes
  const std::uint32_t seq = (v->payload[4] << 24) | (v->payload[5] << 16) | (v->payload[6] << 8) | v->payload[7];
  EXPECT_EQ(seq, 1000u + 5u * kTcpMss);
}

TEST(Serialize, DistinctSequenceNumbersGiveDistinctPayloads) {
  SimPacket a, b;
  a.size = b.size = kMtu;
  a.seq = 1;
  b.seq = 2;
  std::vector<std::uint8_t> x, y;
  serialize(a, tcp_context(), x);
  serialize(b, tcp_context(), y);
  EXPECT_NE(std::vector<std::uint8_t>(x.begin() + 52, x.end()), std::vector<std::uint8_t>(y.begin() + 52, y.end()));
}

TEST(Serialize, AcksWithSackAndUdp) {
  SimPacket ack;
  ack.is_ack = true;
  ack.ack = 10;
  ack.sack_count = 2;
  ack.sacks[0] = {12, 14};
  ack.sacks[1] = {16, 20};
  ack.size = packet_size(Transport::tcp, true, 2);
  std::vector<std::uint8_t> bytes;
  serialize(ack, tcp_context(), bytes);
  EXPECT_EQ(bytes.size(), ack.size);
  EXPECT_TRUE(checksums_valid(bytes));

  WireContext udp = tcp_context();
  udp.transport = Transport::udp;
  SimPacket data;
  data.seq = 3;
  data.size = packet_size(Transport::udp, false);
  serialize(data, udp, bytes);
  EXPECT_TRUE(checksums_valid(bytes));
  EXPECT_EQ(parse_ipv4(bytes)->protocol, 17);
  ack.size = packet_size(Transport::udp, true, 2);
  serialize(ack, udp, bytes);
  EXPECT_TRUE(checksums_valid(bytes));
}

TEST(Serialize, CorruptionBreaksChecksum) {
  SimPacket p;
  p.size = kMtu;
  std::vector<std::uint8_t> bytes;
  serialize(p, tcp_context(), bytes);
  bytes[700] ^= 0x5a;
  EXPECT_FALSE(checksums_valid(bytes));
}

TEST(ParseIpv4, RejectsNonIpv4) {
  const std::vector<std::uint8_t> short_buf(10, 0x45);
  EXPECT_FALSE(parse_ipv4(short_buf));
  std::vector<std::uint8_t> v6(40, 0);
  v6[0] = 0x60;
  EXPECT_FALSE(parse_ipv4(v6));
}

TEST(InternetChecksum, KnownVector) {
  // RFC 1071 example words
  const std::vector<std::uint8_t> data{0x00, 0x01, 0xf2, 0x03, 0xf4, 0xf5, 0xf6, 0xf7};
  EXPECT_EQ(internet_checksum(data), static_cast<std::uint16_t>(~0xddf2 & 0xffff));
}

TEST(FormatIpv4, DottedQuad) {
  EXPECT_EQ(format_ipv4(0x0a000105), "10.0.1.5");
  EXPECT_EQ(protocol_of(Transport::tcp), IpProtocol::tcp);
  EXPECT_EQ(protocol_of(Transport::udp), IpProtocol::udp);
}

}  // namespace
}  // namespace dumbbell
