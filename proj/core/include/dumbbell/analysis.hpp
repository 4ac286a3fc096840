#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dumbbell/capture_sink.hpp"
#include "dumbbell/flow_log.hpp"
#include "dumbbell/layout.hpp"

namespace dumbbell {

/// Two distinct sender packets with the same digest.
class DigestCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counters printed for one capture of a flow.
struct CaptureCounts {
  std::uint64_t packets = 0;  // every IPv4 record
  std::uint64_t bytes = 0;
  std::uint64_t forward_packets = 0;  // sourced by the sender host
  std::uint64_t forward_bytes = 0;
};

struct FlowAnalysis {
  FlowLog log;
  CaptureCounts sender;
  CaptureCounts receiver;
  std::uint64_t matched_packets = 0;
  std::uint64_t phantom_packets = 0;
  std::uint64_t phantom_bytes = 0;
  std::uint64_t lost_packets = 0;
  std::size_t peak_map_size = 0;
};

/// Minimum of the first-record timestamps; 0 when every capture is empty.
std::int64_t base_time(const std::vector<std::optional<std::int64_t>>& first_timestamps);

/// The sender host is the lower of the flow's two addresses iff the flow is
/// rightward.
std::uint32_t sender_address(std::uint32_t a, std::uint32_t b, Direction direction);

using ProgressCallback = std::function<void(double fraction)>;

/// Two passes: the sender capture builds digest -> departure, then every
/// sender-sourced receiver packet is matched (and removed) or counted as a
/// phantom. The sender address is inferred from the first packet of either
/// capture using the direction rule.
FlowAnalysis analyze_flow(PacketSource& sender, PacketSource& receiver, Direction direction, std::int64_t base_us);

/// Variant with a known sender address.
FlowAnalysis analyze_flow_from(PacketSource& sender, PacketSource& receiver, std::uint32_t sender_addr,
                               std::int64_t base_us);

struct DirectoryAnalysis {
  std::vector<FlowSpec> flows;
  std::vector<FlowAnalysis> results;
  std::int64_t base_us = 0;
};

/// Reads metadata.json and the capture pairs from `input`, writes
/// data-<flow#>.log files and a copy of metadata.json to `output`.
/// `on_flow` is called after each flow; `progress` receives the fraction of
/// capture bytes processed each time it grows by at least 1%.
DirectoryAnalysis analyze_directory(const std::filesystem::path& input, const std::filesystem::path& output,
                                    const std::function<void(const FlowSpec&, const FlowAnalysis&)>& on_flow = {},
                                    const ProgressCallback& progress = {});

/// In-process analysis of a run captured with DigestCaptureSink.
std::vector<FlowAnalysis> analyze_captures(const DigestCaptureSink& sink, const std::vector<FlowSpec>& flows);

/// Human-readable per-flow counters.
std::string format_flow_summary(const FlowSpec& flow, const FlowAnalysis& result);

}  // namespace dumbbell
