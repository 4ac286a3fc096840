#pragma once

#include <cstdint>
#include <vector>

#include "dumbbell/duration.hpp"
#include "dumbbell/run_params.hpp"

namespace dumbbell {

/// Central-link delays for every delta interval of the run, computed before
/// the run starts. values[k] is installed at k * delta.
struct VariableDelaySchedule {
  Duration base{0};
  Duration delta{0};
  Duration step{0};
  std::uint64_t seed = 0;
  Duration max_delay{0};
  std::vector<Duration> values;

  /// Delay in force during [t, next boundary) ignoring installation lag.
  Duration at(Duration t) const;
};

/// Random walk from `base`: each interval a coin from SplitMix64(seed) picks
/// +step or -step; a move leaving [0, max_delay] takes the other sign, and if
/// both signs leave the range the value saturates at the bound the coin's
/// choice violated. One coin is drawn per interval regardless.
/// If delta exceeds the runtime the schedule is the single value `base`.
VariableDelaySchedule generate_delay_schedule(const RunParams& params);

}  // namespace dumbbell
