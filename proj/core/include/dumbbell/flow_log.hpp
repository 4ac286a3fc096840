#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dumbbell {

/// Per-flow analysis result. Times are seconds since the base time.
struct FlowLog {
  std::optional<double> first_arrival;
  std::optional<double> last_arrival;
  std::uint64_t bytes_lost = 0;
  std::uint64_t bytes_sent = 0;
  std::vector<double> arrivals;
  std::vector<double> delays;
  std::vector<std::uint64_t> sizes;

  friend bool operator==(const FlowLog&, const FlowLog&) = default;
};

/// Percentage of sent bytes lost, or nullopt when nothing was sent.
std::optional<double> loss_percent(const FlowLog& log);

/// Shortest round-trip decimal form, written the way Python's repr writes
/// floats (e.g. 0.5, 2.0, 1e-06, 1.25e+16).
std::string format_double(double value);

/// Five lines:
///   [first_arrival, last_arrival]
///   [bytes_lost, bytes_sent]
///   [arrival_1, ..., arrival_N]
///   [delay_1, ..., delay_N]
///   [size_1, ..., size_N]
/// Absent arrivals are `null`; empty lists are `[]`.
std::string format_flow_log(const FlowLog& log);

/// Throws std::runtime_error on malformed input.
FlowLog parse_flow_log(std::string_view text);

/// `data-<flow#>.log`
std::string flow_log_file_name(std::uint32_t flow_index);

std::filesystem::path write_flow_log(const FlowLog& log, const std::filesystem::path& dir, std::uint32_t flow_index);
FlowLog load_flow_log(const std::filesystem::path& path);

}  // namespace dumbbell
