#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dumbbell/digest.hpp"
#include "dumbbell/emulator.hpp"
#include "dumbbell/pcap.hpp"

namespace dumbbell {

/// `<flow#>-<scheme>-<sender|receiver>.pcap`
std::string capture_file_name(std::uint32_t flow_index, std::string_view scheme, CaptureSide side);

/// What the analysis needs from one captured packet.
struct CapturedPacket {
  std::int64_t ts_us = 0;
  std::uint32_t size = 0;  // original length
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint16_t ip_id = 0;
  std::uint8_t protocol = 0;
  Digest digest{};
  std::uint64_t record = 0;  // 1-based position in its capture

  friend bool operator==(const CapturedPacket&, const CapturedPacket&) = default;
};

/// nullopt when the record is not an IPv4 datagram.
std::optional<CapturedPacket> summarize(std::int64_t ts_us, std::uint32_t orig_len, std::span<const std::uint8_t> data,
                                        std::uint64_t record, Sha1Hasher& hasher);

/// A capture read front to back.
class PacketSource {
 public:
  virtual ~PacketSource() = default;
  /// Next IPv4 record; false at the end.
  virtual bool next(CapturedPacket& out) = 0;
  virtual std::string describe() const = 0;
  /// Bytes consumed so far (for progress reporting); 0 when unknown.
  virtual std::uint64_t position() const { return 0; }
};

class PcapPacketSource final : public PacketSource {
 public:
  explicit PcapPacketSource(const std::filesystem::path& path);
  bool next(CapturedPacket& out) override;
  std::string describe() const override { return path_.string(); }
  std::uint64_t position() const override { return reader_.offset(); }

 private:
  std::filesystem::path path_;
  PcapReader reader_;
  PcapRecord record_;
  Sha1Hasher hasher_;
  std::uint64_t count_ = 0;
};

class VectorPacketSource final : public PacketSource {
 public:
  VectorPacketSource(const std::vector<CapturedPacket>& packets, std::string name)
      : packets_(packets), name_(std::move(name)) {}
  bool next(CapturedPacket& out) override;
  std::string describe() const override { return name_; }

 private:
  const std::vector<CapturedPacket>& packets_;
  std::string name_;
  std::size_t pos_ = 0;
};

/// First record's timestamp, or nullopt for an empty capture.
std::optional<std::int64_t> first_timestamp(const std::filesystem::path& path);

/// Writes the two capture files of every flow into a directory.
class PcapDirectorySink final : public CaptureSink {
 public:
  explicit PcapDirectorySink(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void begin(const Topology& topology) override;
  void record(std::size_t flow, CaptureSide side, std::int64_t ts_us, std::span<const std::uint8_t> ip) override;
  void finish() override;

  std::vector<std::filesystem::path> files() const;

 private:
  std::filesystem::path dir_;
  std::vector<PcapWriter> writers_;  // 2 per flow: sender, receiver
};

/// Keeps every record in memory (small runs and tests).
class MemoryCaptureSink final : public CaptureSink {
 public:
  void begin(const Topology& topology) override;
  void record(std::size_t flow, CaptureSide side, std::int64_t ts_us, std::span<const std::uint8_t> ip) override;

  const std::vector<PcapRecord>& records(std::size_t flow, CaptureSide side) const {
    return records_[2 * flow + (side == CaptureSide::sender ? 0 : 1)];
  }

 private:
  std::vector<std::vector<PcapRecord>> records_;
};

/// Keeps only the analysis summary of each record, hashing as packets are
/// captured; suitable for long runs analysed in-process.
class DigestCaptureSink final : public CaptureSink {
 public:
  void begin(const Topology& topology) override;
  void record(std::size_t flow, CaptureSide side, std::int64_t ts_us, std::span<const std::uint8_t> ip) override;

  const std::vector<CapturedPacket>& packets(std::size_t flow, CaptureSide side) const {
    return packets_[2 * flow + (side == CaptureSide::sender ? 0 : 1)];
  }

 private:
  std::vector<std::vector<CapturedPacket>> packets_;
  Sha1Hasher hasher_;
};

}  // namespace dumbbell
