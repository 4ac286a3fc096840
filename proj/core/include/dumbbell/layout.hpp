#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dumbbell/duration.hpp"

namespace dumbbell {

/// Rightward flows send from the left half to the right half ("->").
enum class Direction { leftward, rightward };

std::string_view direction_symbol(Direction d);  // "<-" or "->"
Direction parse_direction(std::string_view symbol);

inline constexpr std::uint32_t kDefaultQueuePackets = 1000;

/// Shaping of one side link. Zero rate or delay means "unset".
struct SideLink {
  Duration delay{0};
  double rate_mbps = 0.0;
  std::uint32_t queue_packets = kDefaultQueuePackets;

  friend bool operator==(const SideLink&, const SideLink&) = default;
};

/// One entry of the layout file: `flows` identical flows of one scheme.
struct FlowGroup {
  std::string scheme;
  std::uint32_t flows = 1;
  std::uint32_t start = 0;  // whole second of runtime
  Direction direction = Direction::rightward;
  SideLink left;
  SideLink right;

  friend bool operator==(const FlowGroup&, const FlowGroup&) = default;
};

/// Parses the layout document (a YAML sequence of flat mappings). Missing or
/// null delay/rate keys become 0, missing or null queue keys become 1000.
/// Throws ConfigError on unknown keys, unknown schemes, bad values.
std::vector<FlowGroup> parse_layout(std::string_view text);

/// Emits a layout document that parse_layout() reads back to the same groups.
std::string format_layout(const std::vector<FlowGroup>& groups);

/// Two cubic flows at second 0 and two vegas flows at runtime/2.
std::vector<FlowGroup> default_layout_groups(std::uint32_t runtime_seconds);
std::string default_layout(std::uint32_t runtime_seconds);

std::uint32_t total_flows(const std::vector<FlowGroup>& groups);

/// Stable sort by start second, file order kept among equal starts.
std::vector<FlowGroup> sorted_by_start(std::vector<FlowGroup> groups);

/// A single flow after expanding groups; `index` is 1-based in start order.
struct FlowSpec {
  std::uint32_t index = 0;
  std::string scheme;
  std::uint32_t start = 0;
  Direction direction = Direction::rightward;
  SideLink left;
  SideLink right;
};

/// Expands groups (sorted by start first) into numbered flows.
std::vector<FlowSpec> expand_flows(const std::vector<FlowGroup>& groups);

}  // namespace dumbbell
