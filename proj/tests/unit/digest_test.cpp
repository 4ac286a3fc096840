#include "dumbbell/digest.hpp"

#include <gtest/gtest.h>

#include "dumbbell/packet.hpp"

namespace dumbbell {
namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

TEST(Sha1, KnownVectors) {
  Sha1Hasher h;
  EXPECT_EQ(to_hex(h.hash(bytes_of("abc"))), "a9993e364706816aba3e25717850c26c9cd0d89d");
  EXPECT_EQ(to_hex(h.hash({})), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  // split input hashes like the concatenation
  EXPECT_EQ(h.hash(bytes_of("ab"), bytes_of("c")), h.hash(bytes_of("abc")));
}

TEST(PacketDigest, CoversIpIdAndPayloadOnly) {
  SimPacket p;
  p.size = kMtu;
  p.seq = 4;
  p.ip_id = 77;
  WireContext ctx;
  ctx.src_addr = 0x0a000001;
  ctx.dst_addr = 0x0a000009;
  std::vector<std::uint8_t> a;
  serialize(p, ctx, a);

  Sha1Hasher h;
  const auto view = parse_ipv4(a);
  ASSERT_TRUE(view);
  const std::uint8_t id[2] = {0, 77};
  EXPECT_EQ(packet_digest(a), h.hash(id, view->payload));
  EXPECT_EQ(packet_digest(a), h.packet_digest(77, view->payload));

  // TTL and header checksum are not covered
  auto b = a;
  b[8] = 3;
  EXPECT_EQ(packet_digest(a), packet_digest(b));
  // the IP Identification is
  auto c = a;
  c[5] ^= 1;
  EXPECT_NE(packet_digest(a), packet_digest(c));
  // and so is the payload
  auto d = a;
  d[1000] ^= 1;
  EXPECT_NE(packet_digest(a), packet_digest(d));
}

TEST(PacketDigest, RejectsNonIpv4) {
  const std::vector<std::uint8_t> junk(8, 0);
  EXPECT_THROW(packet_digest(junk), std::invalid_argument);
}

}  // namespace
}  // namespace dumbbell
