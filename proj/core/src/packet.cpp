#include "dumbbell/packet.hpp"

#include <stdexcept>

#include "dumbbell/rng.hpp"

namespace dumbbell {

namespace {

void put16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v);
}

void put32(std::uint8_t* p, std::uint32_t v) {
  put16(p, static_cast<std::uint16_t>(v >> 16));
  put16(p + 2, static_cast<std::uint16_t>(v));
}

void put64(std::uint8_t* p, std::uint64_t v) {
  put32(p, static_cast<std::uint32_t>(v >> 32));
  put32(p + 4, static_cast<std::uint32_t>(v));
}

std::uint16_t get16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

std::uint32_t get32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(get16(p)) << 16) | get16(p + 2);
}

std::uint32_t checksum_sum(std::span<const std::uint8_t> bytes, std::uint32_t sum) {
  std::size_t i = 0;
  for (; i + 1 < bytes.size(); i += 2) sum += get16(bytes.data() + i);
  if (i < bytes.size()) sum += static_cast<std::uint32_t>(bytes[i]) << 8;
  return sum;
}

std::uint16_t fold(std::uint32_t sum) {
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

std::uint32_t pseudo_header_sum(std::uint32_t src, std::uint32_t dst, std::uint8_t proto, std::uint32_t length) {
  std::uint32_t sum = 0;
  sum += src >> 16;
  sum += src & 0xffff;
  sum += dst >> 16;
  sum += dst & 0xffff;
  sum += proto;
  sum += length;
  return sum;
}

// Deterministic application bytes: word k of the stream is a hash of (seed, k).
void fill_payload(std::uint8_t* out, std::size_t len, std::uint64_t seed, std::uint64_t stream_offset) {
  std::size_t i = 0;
  while (i < len) {
    const std::uint64_t pos = stream_offset + i;
    if (pos % 8 == 0 && i + 8 <= len) {
      put64(out + i, derive_seed(seed, pos / 8));
      i += 8;
      continue;
    }
    const std::uint64_t word = derive_seed(seed, pos / 8);
    out[i++] = static_cast<std::uint8_t>(word >> ((7 - pos % 8) * 8));
  }
}

}  // namespace

IpProtocol protocol_of(Transport t) { return t == Transport::tcp ? IpProtocol::tcp : IpProtocol::udp; }

std::uint32_t packet_size(Transport t, bool is_ack, std::uint8_t sack_count) {
  if (t == Transport::udp) return kIpHeaderBytes + kUdpHeaderBytes + (is_ack ? kUdpAckPayload : kUdpPayload);
  if (!is_ack) return kMtu;
  const std::uint32_t sack_option = sack_count == 0 ? 0 : 4 + 8u * sack_count;
  return kIpHeaderBytes + kTcpHeaderBytes + sack_option;
}

std::uint32_t data_payload_bytes(Transport t) { return t == Transport::tcp ? kTcpMss : kUdpPayload; }

std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes, std::uint32_t initial) {
  return fold(checksum_sum(bytes, initial));
}

void serialize(const SimPacket& p, const WireContext& ctx, std::vector<std::uint8_t>& out) {
  const std::uint32_t total = p.size;
  out.assign(total, 0);
  std::uint8_t* ip = out.data();
  const IpProtocol proto = protocol_of(ctx.transport);

  ip[0] = 0x45;
  put16(ip + 2, static_cast<std::uint16_t>(total));
  put16(ip + 4, p.ip_id);
  put16(ip + 6, 0x4000);  // don't fragment
  ip[8] = 64;
  ip[9] = static_cast<std::uint8_t>(proto);
  put32(ip + 12, ctx.src_addr);
  put32(ip + 16, ctx.dst_addr);
  put16(ip + 10, internet_checksum({ip, kIpHeaderBytes}));

  std::uint8_t* l4 = ip + kIpHeaderBytes;
  const std::uint32_t l4_len = total - kIpHeaderBytes;

  if (ctx.transport == Transport::tcp) {
    const std::uint32_t header = p.is_ack ? total - kIpHeaderBytes : kTcpHeaderBytes;
    put16(l4, ctx.src_port);
    put16(l4 + 2, ctx.dst_port);
    if (p.is_ack) {
      put32(l4 + 4, ctx.ack_isn + 1);
      put32(l4 + 8, static_cast<std::uint32_t>(ctx.data_isn + p.ack * kTcpMss));
    } else {
      put32(l4 + 4, static_cast<std::uint32_t>(ctx.data_isn + p.seq * kTcpMss));
      put32(l4 + 8, ctx.ack_isn + 1);
    }
    l4[12] = static_cast<std::uint8_t>((header / 4) << 4);
    l4[13] = p.is_ack ? 0x10 : 0x18;  // ACK, or PSH|ACK
    put16(l4 + 14, 0xffff);
    std::uint8_t* opt = l4 + 20;
    opt[0] = 1;
    opt[1] = 1;
    opt[2] = 8;
    opt[3] = 10;
    put32(opt + 4, p.tsval);
    put32(opt + 8, p.tsecr);
    if (p.is_ack && p.sack_count > 0) {
      std::uint8_t* sack = opt + 12;
      sack[0] = 1;
      sack[1] = 1;
      sack[2] = 5;
      sack[3] = static_cast<std::uint8_t>(2 + 8 * p.sack_count);
      for (std::size_t b = 0; b < p.sack_count; ++b) {
        put32(sack + 4 + 8 * b, static_cast<std::uint32_t>(ctx.data_isn + p.sacks[b].start * kTcpMss));
        put32(sack + 8 + 8 * b, static_cast<std::uint32_t>(ctx.data_isn + p.sacks[b].end * kTcpMss));
      }
    }
    if (!p.is_ack) fill_payload(l4 + kTcpHeaderBytes, kTcpMss, ctx.payload_seed, p.seq * kTcpMss);
    const std::uint32_t sum = checksum_sum({l4, l4_len}, pseudo_header_sum(ctx.src_addr, ctx.dst_addr, 6, l4_len));
    put16(l4 + 16, fold(sum));
  } else {
    put16(l4, ctx.src_port);
    put16(l4 + 2, ctx.dst_port);
    put16(l4 + 4, static_cast<std::uint16_t>(l4_len));
    std::uint8_t* body = l4 + kUdpHeaderBytes;
    if (p.is_ack) {
      body[0] = 0xac;
      body[1] = p.sack_count;
      put32(body + 4, p.tsecr);
      put64(body + 8, p.ack);
      for (std::size_t b = 0; b < p.sack_count; ++b) {
        put64(body + 16 + 16 * b, p.sacks[b].start);
        put64(body + 24 + 16 * b, p.sacks[b].end);
      }
    } else {
      body[0] = 0xda;
      put32(body + 4, p.tsval);
      put64(body + 8, p.seq);
      fill_payload(body + 16, kUdpPayload - 16, ctx.payload_seed, p.seq * kUdpPayload);
    }
    std::uint16_t c = fold(checksum_sum({l4, l4_len}, pseudo_header_sum(ctx.src_addr, ctx.dst_addr, 17, l4_len)));
    if (c == 0) c = 0xffff;
    put16(l4 + 6, c);
  }
}

std::optional<Ipv4View> parse_ipv4(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kIpHeaderBytes) return std::nullopt;
  if ((bytes[0] >> 4) != 4) return std::nullopt;
  const std::size_t ihl = (bytes[0] & 0x0f) * 4u;
  if (ihl < kIpHeaderBytes || bytes.size() < ihl) return std::nullopt;
  Ipv4View v;
  v.total_length = get16(bytes.data() + 2);
  if (v.total_length < ihl) return std::nullopt;
  v.ip_id = get16(bytes.data() + 4);
  v.protocol = bytes[9];
  v.src = get32(bytes.data() + 12);
  v.dst = get32(bytes.data() + 16);
  const std::size_t end = std::min<std::size_t>(bytes.size(), v.total_length);
  v.payload = bytes.subspan(ihl, end - ihl);
  return v;
}

bool checksums_valid(std::span<const std::uint8_t> bytes) {
  const auto v = parse_ipv4(bytes);
  if (!v) return false;
  const std::size_t ihl = (bytes[0] & 0x0f) * 4u;
  if (internet_checksum(bytes.first(ihl)) != 0) return false;
  if (v->protocol != 6 && v->protocol != 17) return true;
  const auto len = static_cast<std::uint32_t>(v->payload.size());
  return fold(checksum_sum(v->payload, pseudo_header_sum(v->src, v->dst, v->protocol, len))) == 0;
}

std::string format_ipv4(std::uint32_t addr) {
  return std::to_string(addr >> 24) + "." + std::to_string((addr >> 16) & 0xff) + "." +
         std::to_string((addr >> 8) & 0xff) + "." + std::to_string(addr & 0xff);
}

}  // namespace dumbbell
