#include "dumbbell/delay_schedule.hpp"

#include <algorithm>

#include "dumbbell/rng.hpp"

namespace dumbbell {

Duration VariableDelaySchedule::at(Duration t) const {
  if (values.empty()) return base;
  if (t < Duration::zero() || delta <= Duration::zero()) return values.front();
  const auto k = static_cast<std::size_t>(t / delta);
  return values[std::min(k, values.size() - 1)];
}

VariableDelaySchedule generate_delay_schedule(const RunParams& params) {
  VariableDelaySchedule s{params.base, params.delta, params.step, params.seed, params.max_delay, {}};
  const Duration runtime = std::chrono::seconds(params.runtime);

  if (params.delta > runtime || params.delta <= Duration::zero()) {
    s.values.push_back(params.base);
    return s;
  }

  const auto intervals = static_cast<std::size_t>((runtime + params.delta - Duration{1}) / params.delta);
  s.values.reserve(intervals);
  s.values.push_back(params.base);

  SplitMix64 rng(params.seed);
  const Duration lo = Duration::zero();
  const Duration hi = params.max_delay;
  for (std::size_t k = 1; k < intervals; ++k) {
    const Duration prev = s.values.back();
    const bool up = rng.coin();
    const Duration first = up ? prev + params.step : prev - params.step;
    const Duration second = up ? prev - params.step : prev + params.step;
    Duration next;
    if (first >= lo && first <= hi) {
      next = first;
    } else if (second >= lo && second <= hi) {
      next = second;
    } else {
      next = up ? hi : lo;
    }
    s.values.push_back(next);
  }
  return s;
}

}  // namespace dumbbell
