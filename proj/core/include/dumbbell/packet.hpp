#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dumbbell/duration.hpp"
#include "dumbbell/schemes.hpp"

namespace dumbbell {

inline constexpr std::uint32_t kMtu = 1500;
inline constexpr std::uint32_t kIpHeaderBytes = 20;
/// TCP header with NOP, NOP, timestamps.
inline constexpr std::uint32_t kTcpHeaderBytes = 32;
inline constexpr std::uint32_t kUdpHeaderBytes = 8;
inline constexpr std::uint32_t kTcpMss = kMtu - kIpHeaderBytes - kTcpHeaderBytes;    // 1448
inline constexpr std::uint32_t kUdpPayload = kMtu - kIpHeaderBytes - kUdpHeaderBytes;  // 1472
inline constexpr std::uint32_t kUdpAckPayload = 64;
inline constexpr std::size_t kMaxSackBlocks = 3;

enum class IpProtocol : std::uint8_t { tcp = 6, udp = 17 };

IpProtocol protocol_of(Transport t);

/// Half-open range of packet sequence numbers held by the receiver.
struct SackBlock {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  friend bool operator==(const SackBlock&, const SackBlock&) = default;
};

/// A simulated data packet or acknowledgment. Sequence numbers count whole
/// packets; the wire form scales them to bytes.
struct SimPacket {
  std::uint32_t flow = 0;  // position in the flow table (0-based)
  bool is_ack = false;
  std::uint64_t seq = 0;  // data: packet number
  std::uint64_t ack = 0;  // ack: next expected packet number
  std::array<SackBlock, kMaxSackBlocks> sacks{};
  std::uint8_t sack_count = 0;
  std::uint32_t tsval = 0;
  std::uint32_t tsecr = 0;
  std::uint16_t ip_id = 0;
  std::uint32_t size = 0;  // IPv4 total length
  Duration sent{0};        // host send time
};

/// Addressing and numbering of one direction of a flow.
struct WireContext {
  Transport transport = Transport::tcp;
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint32_t data_isn = 0;  // initial sequence number of the data direction
  std::uint32_t ack_isn = 0;   // initial sequence number of the acknowledging side
  std::uint64_t payload_seed = 0;
};

/// IPv4 total length of a data packet or an acknowledgment.
std::uint32_t packet_size(Transport t, bool is_ack, std::uint8_t sack_count = 0);

/// Application bytes carried by one data packet.
std::uint32_t data_payload_bytes(Transport t);

/// Writes the raw IPv4 datagram (header checksums included) into `out`.
void serialize(const SimPacket& p, const WireContext& ctx, std::vector<std::uint8_t>& out);

std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes, std::uint32_t initial = 0);

/// Fields of an IPv4 datagram needed by capture filtering and analysis.
struct Ipv4View {
  std::uint16_t total_length = 0;
  std::uint16_t ip_id = 0;
  std::uint8_t protocol = 0;
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::span<const std::uint8_t> payload;  // bytes after the IP header
};

/// nullopt unless `bytes` starts with a well-formed IPv4 header.
std::optional<Ipv4View> parse_ipv4(std::span<const std::uint8_t> bytes);

/// True when the IPv4 header checksum and the TCP/UDP checksum both verify.
bool checksums_valid(std::span<const std::uint8_t> bytes);

std::string format_ipv4(std::uint32_t addr);

}  // namespace dumbbell
