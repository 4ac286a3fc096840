#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dumbbell {

inline constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapMagicNanos = 0xa1b23c4d;
inline constexpr std::uint32_t kPcapSnaplen = 65535;
/// LINKTYPE_RAW: each record is a bare IPv4/IPv6 datagram.
inline constexpr std::uint32_t kLinktypeRaw = 101;
/// LINKTYPE_IPV4
inline constexpr std::uint32_t kLinktypeIpv4 = 228;
inline constexpr std::size_t kPcapGlobalHeaderBytes = 24;
inline constexpr std::size_t kPcapRecordHeaderBytes = 16;

class PcapError : public std::runtime_error {
 public:
  PcapError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

struct PcapRecord {
  std::int64_t ts_us = 0;  // microseconds since the UNIX epoch
  std::uint32_t orig_len = 0;
  std::vector<std::uint8_t> data;  // captured bytes

  friend bool operator==(const PcapRecord&, const PcapRecord&) = default;
};

/// Writes a little-endian, microsecond-resolution raw-IP capture. Records
/// must be written in non-decreasing timestamp order.
class PcapWriter {
 public:
  explicit PcapWriter(const std::filesystem::path& path);
  ~PcapWriter();
  PcapWriter(const PcapWriter&) = delete;
  PcapWriter& operator=(const PcapWriter&) = delete;
  PcapWriter(PcapWriter&& other) noexcept;
  PcapWriter& operator=(PcapWriter&& other) noexcept;

  void write(std::int64_t ts_us, std::span<const std::uint8_t> datagram);
  void write(const PcapRecord& record);
  /// Flushes and closes; throws on I/O failure. Called by the destructor
  /// (which swallows errors) if not called explicitly.
  void close();

  std::uint64_t records() const { return records_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void put(const void* data, std::size_t len);

  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::vector<char> buffer_;
  std::int64_t last_ts_ = 0;
  std::uint64_t records_ = 0;
};

/// Streaming reader. Accepts both byte orders and both timestamp
/// resolutions; only raw-IP link types are supported.
class PcapReader {
 public:
  explicit PcapReader(const std::filesystem::path& path);
  ~PcapReader();
  PcapReader(const PcapReader&) = delete;
  PcapReader& operator=(const PcapReader&) = delete;

  /// Reads the next record into `out`, reusing its buffer. False at end of file.
  bool next(PcapRecord& out);

  bool swapped() const { return swapped_; }
  bool nanosecond() const { return nanos_; }
  std::uint32_t linktype() const { return linktype_; }
  std::uint32_t snaplen() const { return snaplen_; }
  std::uint16_t version_major() const { return major_; }
  std::uint16_t version_minor() const { return minor_; }
  /// Bytes consumed so far, headers included.
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint32_t u32(const std::uint8_t* p) const;
  std::uint16_t u16(const std::uint8_t* p) const;

  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::uint64_t offset_ = 0;
  bool swapped_ = false;
  bool nanos_ = false;
  std::uint32_t linktype_ = 0;
  std::uint32_t snaplen_ = 0;
  std::uint16_t major_ = 0;
  std::uint16_t minor_ = 0;
};

/// Reads a whole capture (tests and small files).
std::vector<PcapRecord> read_capture(const std::filesystem::path& path);
void write_capture(const std::filesystem::path& path, const std::vector<PcapRecord>& records);

}  // namespace dumbbell
