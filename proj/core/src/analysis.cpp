#include "dumbbell/analysis.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "dumbbell/metadata.hpp"
#include "dumbbell/packet.hpp"

namespace dumbbell {

namespace {

struct Departure {
  std::int64_t ts_us;
  std::uint32_t size;
  std::uint64_t record;
};

double seconds_since(std::int64_t ts_us, std::int64_t base_us) {
  return static_cast<double>(ts_us - base_us) / 1e6;
}

std::string describe_packet(const PacketSource& src, const CapturedPacket& p) {
  return src.describe() + " record " + std::to_string(p.record) + " (ip id " + std::to_string(p.ip_id) + ")";
}

constexpr std::uint64_t kTickPackets = 4096;

FlowAnalysis analyze(PacketSource& sender, PacketSource& receiver, std::optional<std::uint32_t> sender_addr,
                     Direction direction, std::int64_t base_us, const std::function<void()>& tick = {}) {
  FlowAnalysis out;
  std::unordered_map<Digest, Departure, DigestHash> departures;
  auto resolve = [&](const CapturedPacket& p) {
    if (!sender_addr) sender_addr = sender_address(p.src, p.dst, direction);
  };

  CapturedPacket p;
  std::uint64_t sender_bytes = 0;
  while (sender.next(p)) {
    resolve(p);
    ++out.sender.packets;
    out.sender.bytes += p.size;
    if (tick && out.sender.packets % kTickPackets == 0) tick();
    if (p.src != *sender_addr) continue;
    ++out.sender.forward_packets;
    out.sender.forward_bytes += p.size;
    sender_bytes += p.size;
    const auto [it, inserted] = departures.try_emplace(p.digest, Departure{p.ts_us, p.size, p.record});
    if (!inserted) {
      throw DigestCollision("digest collision between " + sender.describe() + " record " +
                            std::to_string(it->second.record) + " and " + describe_packet(sender, p) + ": " +
                            to_hex(p.digest));
    }
    out.peak_map_size = std::max(out.peak_map_size, departures.size());
  }

  FlowLog& log = out.log;
  while (receiver.next(p)) {
    resolve(p);
    ++out.receiver.packets;
    out.receiver.bytes += p.size;
    if (tick && out.receiver.packets % kTickPackets == 0) tick();
    if (p.src != *sender_addr) continue;
    ++out.receiver.forward_packets;
    out.receiver.forward_bytes += p.size;
    const auto it = departures.find(p.digest);
    if (it == departures.end()) {
      ++out.phantom_packets;
      out.phantom_bytes += p.size;
      continue;
    }
    ++out.matched_packets;
    log.arrivals.push_back(seconds_since(p.ts_us, base_us));
    log.delays.push_back(static_cast<double>(p.ts_us - it->second.ts_us) / 1e6);
    log.sizes.push_back(p.size);
    departures.erase(it);
  }

  for (const auto& [digest, d] : departures) log.bytes_lost += d.size;
  out.lost_packets = departures.size();
  log.bytes_sent = sender_bytes + out.phantom_bytes;
  if (!log.arrivals.empty()) {
    log.first_arrival = log.arrivals.front();
    log.last_arrival = log.arrivals.back();
  }
  return out;
}

}  // namespace

std::int64_t base_time(const std::vector<std::optional<std::int64_t>>& first_timestamps) {
  std::optional<std::int64_t> best;
  for (const auto& t : first_timestamps) {
    if (t && (!best || *t < *best)) best = t;
  }
  return best.value_or(0);
}

std::uint32_t sender_address(std::uint32_t a, std::uint32_t b, Direction direction) {
  return direction == Direction::rightward ? std::min(a, b) : std::max(a, b);
}

FlowAnalysis analyze_flow(PacketSource& sender, PacketSource& receiver, Direction direction, std::int64_t base_us) {
  return analyze(sender, receiver, std::nullopt, direction, base_us);
}

FlowAnalysis analyze_flow_from(PacketSource& sender, PacketSource& receiver, std::uint32_t sender_addr,
                               std::int64_t base_us) {
  return analyze(sender, receiver, sender_addr, Direction::rightward, base_us);
}

DirectoryAnalysis analyze_directory(const std::filesystem::path& input, const std::filesystem::path& output,
                                    const std::function<void(const FlowSpec&, const FlowAnalysis&)>& on_flow,
                                    const ProgressCallback& progress) {
  const auto meta_path = input / kMetadataFileName;
  if (!std::filesystem::exists(meta_path)) {
    throw std::runtime_error("no " + std::string(kMetadataFileName) + " in " + input.string());
  }
  const Metadata meta = load_metadata(meta_path);

  DirectoryAnalysis result;
  result.flows = expand_flows(meta.groups);

  std::vector<std::filesystem::path> files;
  for (const auto& f : result.flows) {
    for (const auto side : {CaptureSide::sender, CaptureSide::receiver}) {
      const auto path = input / capture_file_name(f.index, f.scheme, side);
      if (!std::filesystem::exists(path)) {
        throw std::runtime_error("flow " + std::to_string(f.index) + " (" + f.scheme + "): missing capture " +
                                 path.string());
      }
      files.push_back(path);
    }
  }

  std::vector<std::optional<std::int64_t>> firsts;
  firsts.reserve(files.size());
  for (const auto& path : files) firsts.push_back(first_timestamp(path));
  result.base_us = base_time(firsts);

  std::uint64_t total_bytes = 0;
  for (const auto& path : files) total_bytes += std::filesystem::file_size(path);
  std::uint64_t done_bytes = 0;
  int reported_percent = -1;
  auto report = [&](std::uint64_t bytes) {
    if (!progress || total_bytes == 0) return;
    const int percent = static_cast<int>(std::min<std::uint64_t>(100, bytes * 100 / total_bytes));
    if (percent > reported_percent) {
      reported_percent = percent;
      progress(static_cast<double>(percent) / 100.0);
    }
  };

  std::filesystem::create_directories(output);
  for (std::size_t i = 0; i < result.flows.size(); ++i) {
    const FlowSpec& f = result.flows[i];
    PcapPacketSource sender(files[2 * i]);
    PcapPacketSource receiver(files[2 * i + 1]);
    FlowAnalysis a = analyze(sender, receiver, std::nullopt, f.direction, result.base_us,
                             [&] { report(done_bytes + sender.position() + receiver.position()); });
    done_bytes += std::filesystem::file_size(files[2 * i]) + std::filesystem::file_size(files[2 * i + 1]);
    report(done_bytes);
    write_flow_log(a.log, output, f.index);
    if (on_flow) on_flow(f, a);
    result.results.push_back(std::move(a));
  }
  std::filesystem::copy_file(meta_path, output / kMetadataFileName,
                             std::filesystem::copy_options::overwrite_existing);
  return result;
}

std::vector<FlowAnalysis> analyze_captures(const DigestCaptureSink& sink, const std::vector<FlowSpec>& flows) {
  std::vector<std::optional<std::int64_t>> firsts;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    for (const auto side : {CaptureSide::sender, CaptureSide::receiver}) {
      const auto& list = sink.packets(i, side);
      firsts.push_back(list.empty() ? std::nullopt : std::optional<std::int64_t>(list.front().ts_us));
    }
  }
  const std::int64_t base = base_time(firsts);
  std::vector<FlowAnalysis> out;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    VectorPacketSource sender(sink.packets(i, CaptureSide::sender), capture_file_name(flows[i].index, flows[i].scheme,
                                                                                        CaptureSide::sender));
    VectorPacketSource receiver(sink.packets(i, CaptureSide::receiver),
                                capture_file_name(flows[i].index, flows[i].scheme, CaptureSide::receiver));
    out.push_back(analyze_flow(sender, receiver, flows[i].direction, base));
  }
  return out;
}

std::string format_flow_summary(const FlowSpec& flow, const FlowAnalysis& r) {
  std::ostringstream out;
  out << "Flow " << flow.index << " (" << flow.scheme << ", " << direction_symbol(flow.direction) << ")\n";
  out << "  sender dump:   " << r.sender.packets << " packets / " << r.sender.bytes << " bytes in total, "
      << r.sender.forward_packets << " packets / " << r.sender.forward_bytes << " bytes from the sender\n";
  out << "  receiver dump: " << r.receiver.packets << " packets / " << r.receiver.bytes << " bytes in total, "
      << r.receiver.forward_packets << " packets / " << r.receiver.forward_bytes << " bytes from the sender\n";
  out << "  matched " << r.matched_packets << " packets, phantom " << r.phantom_packets << " packets / "
      << r.phantom_bytes << " bytes\n";
  out << "  bytes_sent " << r.log.bytes_sent << ", bytes_lost " << r.log.bytes_lost;
  if (const auto loss = loss_percent(r.log)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ", loss %.6f%%", *loss);
    out << buf;
  } else {
    out << ", loss not computed (nothing sent)";
  }
  out << '\n';
  return out.str();
}

}  // namespace dumbbell
