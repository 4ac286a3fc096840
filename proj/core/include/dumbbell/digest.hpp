#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace dumbbell {

/// SHA-1 over the IP Identification field (network byte order) followed by
/// the IP payload.
using Digest = std::array<std::uint8_t, 20>;

class Sha1Hasher {
 public:
  Sha1Hasher();
  ~Sha1Hasher();
  Sha1Hasher(const Sha1Hasher&) = delete;
  Sha1Hasher& operator=(const Sha1Hasher&) = delete;

  Digest hash(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b = {});
  Digest packet_digest(std::uint16_t ip_id, std::span<const std::uint8_t> ip_payload);

 private:
  struct Impl;
  Impl* impl_;
};

/// Digest of a raw IPv4 datagram; throws std::invalid_argument for non-IPv4 data.
Digest packet_digest(std::span<const std::uint8_t> ip_datagram);

std::string to_hex(const Digest& d);

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h;
    std::memcpy(&h, d.data(), sizeof h);
    return h;
  }
};

}  // namespace dumbbell
