#include "dumbbell/capture_sink.hpp"

#include "dumbbell/packet.hpp"

namespace dumbbell {

std::string capture_file_name(std::uint32_t flow_index, std::string_view scheme, CaptureSide side) {
  return std::to_string(flow_index) + "-" + std::string(scheme) +
         (side == CaptureSide::sender ? "-sender.pcap" : "-receiver.pcap");
}

std::optional<CapturedPacket> summarize(std::int64_t ts_us, std::uint32_t orig_len, std::span<const std::uint8_t> data,
                                        std::uint64_t record, Sha1Hasher& hasher) {
  const auto v = parse_ipv4(data);
  if (!v) return std::nullopt;
  CapturedPacket p;
  p.ts_us = ts_us;
  p.size = orig_len;
  p.src = v->src;
  p.dst = v->dst;
  p.ip_id = v->ip_id;
  p.protocol = v->protocol;
  p.digest = hasher.packet_digest(v->ip_id, v->payload);
  p.record = record;
  return p;
}

PcapPacketSource::PcapPacketSource(const std::filesystem::path& path) : path_(path), reader_(path) {}

bool PcapPacketSource::next(CapturedPacket& out) {
  while (reader_.next(record_)) {
    ++count_;
    if (auto p = summarize(record_.ts_us, record_.orig_len, record_.data, count_, hasher_)) {
      out = *p;
      return true;
    }
  }
  return false;
}

bool VectorPacketSource::next(CapturedPacket& out) {
  if (pos_ >= packets_.size()) return false;
  out = packets_[pos_++];
  return true;
}

std::optional<std::int64_t> first_timestamp(const std::filesystem::path& path) {
  PcapReader reader(path);
  PcapRecord r;
  if (!reader.next(r)) return std::nullopt;
  return r.ts_us;
}

void PcapDirectorySink::begin(const Topology& topology) {
  std::filesystem::create_directories(dir_);
  writers_.clear();
  writers_.reserve(2 * topology.flow_count());
  for (const auto& f : topology.flows) {
    writers_.emplace_back(dir_ / capture_file_name(f.index, f.scheme, CaptureSide::sender));
    writers_.emplace_back(dir_ / capture_file_name(f.index, f.scheme, CaptureSide::receiver));
  }
}

void PcapDirectorySink::record(std::size_t flow, CaptureSide side, std::int64_t ts_us,
                               std::span<const std::uint8_t> ip) {
  writers_[2 * flow + (side == CaptureSide::sender ? 0 : 1)].write(ts_us, ip);
}

void PcapDirectorySink::finish() {
  for (auto& w : writers_) w.close();
}

std::vector<std::filesystem::path> PcapDirectorySink::files() const {
  std::vector<std::filesystem::path> out;
  for (const auto& w : writers_) out.push_back(w.path());
  return out;
}

void MemoryCaptureSink::begin(const Topology& topology) { records_.assign(2 * topology.flow_count(), {}); }

void MemoryCaptureSink::record(std::size_t flow, CaptureSide side, std::int64_t ts_us,
                               std::span<const std::uint8_t> ip) {
  records_[2 * flow + (side == CaptureSide::sender ? 0 : 1)].push_back(
      PcapRecord{ts_us, static_cast<std::uint32_t>(ip.size()), {ip.begin(), ip.end()}});
}

void DigestCaptureSink::begin(const Topology& topology) { packets_.assign(2 * topology.flow_count(), {}); }

void DigestCaptureSink::record(std::size_t flow, CaptureSide side, std::int64_t ts_us,
                               std::span<const std::uint8_t> ip) {
  auto& list = packets_[2 * flow + (side == CaptureSide::sender ? 0 : 1)];
  if (auto p = summarize(ts_us, static_cast<std::uint32_t>(ip.size()), ip, list.size() + 1, hasher_)) {
    list.push_back(*p);
  }
}

}  // namespace dumbbell
