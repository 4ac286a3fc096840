#include "dumbbell/digest.hpp"

#include <stdexcept>

#include <openssl/evp.h>

#include "dumbbell/packet.hpp"

namespace dumbbell {

struct Sha1Hasher::Impl {
  EVP_MD_CTX* ctx = nullptr;
  EVP_MD* md = nullptr;
};

Sha1Hasher::Sha1Hasher() : impl_(new Impl) {
  impl_->ctx = EVP_MD_CTX_new();
  impl_->md = EVP_MD_fetch(nullptr, "SHA1", nullptr);
  if (!impl_->ctx || !impl_->md) {
    EVP_MD_CTX_free(impl_->ctx);
    EVP_MD_free(impl_->md);
    delete impl_;
    throw std::runtime_error("SHA-1 is not available from the crypto library");
  }
}

Sha1Hasher::~Sha1Hasher() {
  EVP_MD_CTX_free(impl_->ctx);
  EVP_MD_free(impl_->md);
  delete impl_;
}

Digest Sha1Hasher::hash(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  Digest d{};
  unsigned int len = 0;
  if (EVP_DigestInit_ex(impl_->ctx, impl_->md, nullptr) != 1 ||
      EVP_DigestUpdate(impl_->ctx, a.data(), a.size()) != 1 ||
      (!b.empty() && EVP_DigestUpdate(impl_->ctx, b.data(), b.size()) != 1) ||
      EVP_DigestFinal_ex(impl_->ctx, d.data(), &len) != 1 || len != d.size()) {
    throw std::runtime_error("SHA-1 computation failed");
  }
  return d;
}

Digest Sha1Hasher::packet_digest(std::uint16_t ip_id, std::span<const std::uint8_t> ip_payload) {
  const std::uint8_t id[2] = {static_cast<std::uint8_t>(ip_id >> 8), static_cast<std::uint8_t>(ip_id)};
  return hash(id, ip_payload);
}

Digest packet_digest(std::span<const std::uint8_t> ip_datagram) {
  const auto v = parse_ipv4(ip_datagram);
  if (!v) throw std::invalid_argument("not an IPv4 datagram");
  thread_local Sha1Hasher hasher;
  return hasher.packet_digest(v->ip_id, v->payload);
}

std::string to_hex(const Digest& d) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(40);
  for (const std::uint8_t b : d) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0x0f]);
  }
  return s;
}

}  // namespace dumbbell
