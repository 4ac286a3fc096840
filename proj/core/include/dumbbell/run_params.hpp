#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dumbbell/duration.hpp"
#include "dumbbell/layout.hpp"

namespace dumbbell {

using namespace std::chrono_literals;

inline constexpr Duration kMinDelta = 10ms;
inline constexpr std::uint32_t kMaxRuntimeSeconds = 60;

/// Knobs of the simulated testbed that have no command-line counterpart in
/// the original tool set. They are persisted in the metadata file so that a
/// rerun reproduces identical captures.
struct SimulationKnobs {
  /// Time for one end of the central link to pick up a new delay.
  Duration delay_change_lag = 4ms;
  bool delayed_ack = true;
  /// Line rate of every sending host in Mbit/s. It spaces a sender's
  /// transmissions before they are captured, so it adds no one-way delay,
  /// and it keeps simulated time moving on a completely unshaped path.
  double host_rate_mbps = 10'000.0;
  Duration delayed_ack_timeout = 40ms;
  /// Capture timestamp of simulated time zero, in microseconds since the UNIX epoch.
  std::int64_t capture_epoch_us = 1'600'000'000'000'000;
  /// Probability of a sender-side capture miss (produces phantom packets).
  double capture_loss = 0.0;
  bool trace = false;
  Duration trace_period = 50ms;

  friend bool operator==(const SimulationKnobs&, const SimulationKnobs&) = default;
};

struct RunParams {
  Duration base{0};
  Duration delta{0};
  Duration step{0};
  Duration jitter{0};
  std::uint32_t runtime = 30;  // seconds
  double central_rate_mbps = 100.0;
  Duration max_delay = 100s;
  std::uint64_t seed = 0;
  std::uint32_t q1 = kDefaultQueuePackets;  // left router's end of the central link
  std::uint32_t q2 = kDefaultQueuePackets;  // right router's end
  std::string output_dir = "dumps";
  SimulationKnobs sim;

  friend bool operator==(const RunParams&, const RunParams&) = default;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const RunParams& params);
void validate(const RunParams& params, const std::vector<FlowGroup>& groups);

}  // namespace dumbbell
