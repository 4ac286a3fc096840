#include "dumbbell/pcap.hpp"

#include <cstring>
#include <utility>

namespace dumbbell {

namespace {

void le32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void le16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

constexpr std::int64_t kMicros = 1'000'000;

}  // namespace

// ---------------------------------------------------------------- writer

PcapWriter::PcapWriter(const std::filesystem::path& path) : path_(path), buffer_(1 << 20) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot create capture file " + path.string());
  std::setvbuf(file_, buffer_.data(), _IOFBF, buffer_.size());
  std::uint8_t h[kPcapGlobalHeaderBytes] = {};
  le32(h, kPcapMagic);
  le16(h + 4, 2);
  le16(h + 6, 4);
  le32(h + 16, kPcapSnaplen);
  le32(h + 20, kLinktypeRaw);
  put(h, sizeof h);
}

PcapWriter::~PcapWriter() {
  try {
    close();
  } catch (...) {
  }
}

PcapWriter::PcapWriter(PcapWriter&& other) noexcept
    : path_(std::move(other.path_)),
      file_(std::exchange(other.file_, nullptr)),
      buffer_(std::move(other.buffer_)),
      last_ts_(other.last_ts_),
      records_(other.records_) {}

PcapWriter& PcapWriter::operator=(PcapWriter&& other) noexcept {
  if (this != &other) {
    try {
      close();
    } catch (...) {
    }
    path_ = std::move(other.path_);
    file_ = std::exchange(other.file_, nullptr);
    buffer_ = std::move(other.buffer_);
    last_ts_ = other.last_ts_;
    records_ = other.records_;
  }
  return *this;
}

void PcapWriter::put(const void* data, std::size_t len) {
  if (std::fwrite(data, 1, len, file_) != len) throw std::runtime_error("write failed: " + path_.string());
}

void PcapWriter::write(std::int64_t ts_us, std::span<const std::uint8_t> datagram) {
  if (!file_) throw std::logic_error("write to a closed capture file");
  if (ts_us < 0) throw std::invalid_argument("negative capture timestamp");
  if (records_ > 0 && ts_us < last_ts_) throw std::invalid_argument("capture timestamps must not decrease");
  if (datagram.size() > kPcapSnaplen) throw std::invalid_argument("datagram larger than the snapshot length");
  std::uint8_t h[kPcapRecordHeaderBytes];
  le32(h, static_cast<std::uint32_t>(ts_us / kMicros));
  le32(h + 4, static_cast<std::uint32_t>(ts_us % kMicros));
  le32(h + 8, static_cast<std::uint32_t>(datagram.size()));
  le32(h + 12, static_cast<std::uint32_t>(datagram.size()));
  put(h, sizeof h);
  put(datagram.data(), datagram.size());
  last_ts_ = ts_us;
  ++records_;
}

void PcapWriter::write(const PcapRecord& record) {
  if (record.orig_len != record.data.size()) throw std::invalid_argument("truncated records cannot be written");
  write(record.ts_us, record.data);
}

void PcapWriter::close() {
  if (!file_) return;
  std::FILE* f = std::exchange(file_, nullptr);
  const bool ok = std::fflush(f) == 0;
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) throw std::runtime_error("cannot finish capture file " + path_.string());
}

// ---------------------------------------------------------------- reader

PcapReader::PcapReader(const std::filesystem::path& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw std::runtime_error("cannot open capture file " + path.string());
  std::uint8_t h[kPcapGlobalHeaderBytes];
  const std::size_t got = std::fread(h, 1, sizeof h, file_);
  if (got != sizeof h) {
    std::fclose(file_);
    file_ = nullptr;
    throw PcapError(path.string() + ": truncated global header", 0);
  }
  const std::uint32_t magic = static_cast<std::uint32_t>(h[0]) | (static_cast<std::uint32_t>(h[1]) << 8) |
                              (static_cast<std::uint32_t>(h[2]) << 16) | (static_cast<std::uint32_t>(h[3]) << 24);
  auto bswap32 = [](std::uint32_t v) {
    return ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) | (v >> 24);
  };
  if (magic == kPcapMagic || magic == kPcapMagicNanos) {
    swapped_ = false;
    nanos_ = magic == kPcapMagicNanos;
  } else if (bswap32(magic) == kPcapMagic || bswap32(magic) == kPcapMagicNanos) {
    swapped_ = true;
    nanos_ = bswap32(magic) == kPcapMagicNanos;
  } else {
    std::fclose(file_);
    file_ = nullptr;
    throw PcapError(path.string() + ": not a pcap file (bad magic)", 0);
  }
  major_ = u16(h + 4);
  minor_ = u16(h + 6);
  snaplen_ = u32(h + 16);
  linktype_ = u32(h + 20) & 0x0fffffff;
  offset_ = sizeof h;
  if (major_ != 2) {
    std::fclose(file_);
    file_ = nullptr;
    throw PcapError(path.string() + ": unsupported pcap version " + std::to_string(major_), 4);
  }
  if (linktype_ != kLinktypeRaw && linktype_ != kLinktypeIpv4) {
    std::fclose(file_);
    file_ = nullptr;
    throw PcapError(path.string() + ": unsupported link type " + std::to_string(linktype_), 20);
  }
}

PcapReader::~PcapReader() {
  if (file_) std::fclose(file_);
}

std::uint32_t PcapReader::u32(const std::uint8_t* p) const {
  if (swapped_) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
  }
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t PcapReader::u16(const std::uint8_t* p) const {
  if (swapped_) return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

bool PcapReader::next(PcapRecord& out) {
  std::uint8_t h[kPcapRecordHeaderBytes];
  const std::size_t got = std::fread(h, 1, sizeof h, file_);
  if (got == 0) return false;
  if (got != sizeof h) throw PcapError(path_.string() + ": truncated record header", offset_);
  const std::uint32_t sec = u32(h);
  const std::uint32_t frac = u32(h + 4);
  const std::uint32_t incl = u32(h + 8);
  const std::uint32_t orig = u32(h + 12);
  if (incl > std::max<std::uint32_t>(snaplen_, kPcapSnaplen) || incl > orig) {
    throw PcapError(path_.string() + ": malformed record lengths", offset_);
  }
  out.ts_us = static_cast<std::int64_t>(sec) * kMicros + (nanos_ ? frac / 1000 : frac);
  out.orig_len = orig;
  out.data.resize(incl);
  if (incl > 0 && std::fread(out.data.data(), 1, incl, file_) != incl) {
    throw PcapError(path_.string() + ": truncated record data", offset_);
  }
  offset_ += sizeof h + incl;
  return true;
}

std::vector<PcapRecord> read_capture(const std::filesystem::path& path) {
  PcapReader reader(path);
  std::vector<PcapRecord> records;
  PcapRecord r;
  while (reader.next(r)) records.push_back(r);
  return records;
}

void write_capture(const std::filesystem::path& path, const std::vector<PcapRecord>& records) {
  PcapWriter w(path);
  for (const auto& r : records) w.write(r);
  w.close();
}

}  // namespace dumbbell
