#include "dumbbell/run_params.hpp"

#include <cmath>

namespace dumbbell {

void validate(const RunParams& p) {
  if (p.runtime < 1 || p.runtime > kMaxRuntimeSeconds) {
    throw ConfigError("runtime must be in [1, 60] seconds, got " + std::to_string(p.runtime));
  }
  if (p.delta < kMinDelta) {
    throw ConfigError("delta must be at least 10ms, got " + format_duration(p.delta));
  }
  if (p.base < Duration::zero() || p.step < Duration::zero() || p.jitter < Duration::zero()) {
    throw ConfigError("delays must be non-negative");
  }
  if (p.base > p.max_delay) throw ConfigError("base delay exceeds max delay");
  if (p.step > p.max_delay) throw ConfigError("step exceeds max delay");
  if (p.jitter > p.max_delay) throw ConfigError("jitter exceeds max delay");
  if (!std::isfinite(p.central_rate_mbps) || p.central_rate_mbps < 0) {
    throw ConfigError("central rate must be a non-negative number");
  }
  if (p.q1 == 0 || p.q2 == 0) throw ConfigError("central queue sizes must be positive");
  if (p.sim.delay_change_lag < Duration::zero() || p.sim.delay_change_lag * 2 >= p.delta) {
    throw ConfigError("delay change lag must be non-negative and below delta/2");
  }
  if (!(p.sim.capture_loss >= 0.0 && p.sim.capture_loss < 1.0)) {
    throw ConfigError("capture loss probability must be in [0, 1)");
  }
  if (p.sim.trace_period <= Duration::zero()) throw ConfigError("trace period must be positive");
  if (!(p.sim.host_rate_mbps > 0.0) || !std::isfinite(p.sim.host_rate_mbps)) {
    throw ConfigError("host rate must be positive");
  }
  if (p.sim.delayed_ack_timeout <= Duration::zero()) throw ConfigError("delayed ack timeout must be positive");
}

void validate(const RunParams& p, const std::vector<FlowGroup>& groups) {
  validate(p);
  for (const auto& g : groups) {
    if (g.start >= p.runtime) {
      throw ConfigError("group of " + g.scheme + " flows starts at second " + std::to_string(g.start) +
                        ", which is not before the runtime of " + std::to_string(p.runtime) + " s");
    }
    for (const SideLink* side : {&g.left, &g.right}) {
      if (side->delay > p.max_delay) {
        throw ConfigError("side link delay " + format_duration(side->delay) + " exceeds max delay");
      }
    }
  }
}

}  // namespace dumbbell
