#include "dumbbell/link_discipline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dumbbell {

Duration transmission_time(std::uint32_t bytes, double rate_mbps) {
  if (rate_mbps <= 0.0) return Duration::zero();
  // bits / (Mbit/s) = microseconds; scaled to nanoseconds
  return Duration{std::llround(static_cast<double>(bytes) * 8000.0 / rate_mbps)};
}

std::optional<Duration> LinkDiscipline::enqueue(Duration now, std::uint32_t bytes, std::uint32_t handle) {
  if (held_.size() >= params_.limit) {
    ++drops_;
    return std::nullopt;
  }

  Duration delay = params_.delay;
  if (params_.jitter > Duration::zero()) {
    const double u = jitter_rng_.uniform() * 2.0 - 1.0;
    const auto offset = Duration{std::llround(u * static_cast<double>(params_.jitter.count()))};
    delay = std::max(Duration::zero(), delay + offset);
  }

  const Duration ready = std::max(now + delay, last_departure_);
  const Duration departure = ready + transmission_time(bytes, params_.rate_mbps);
  last_departure_ = departure;

  held_.push_back(handle);
  ++accepted_;
  peak_ = std::max(peak_, held_.size());
  if (held_.size() == params_.limit) ++capacity_hits_;
  return departure;
}

std::uint32_t LinkDiscipline::pop() {
  if (held_.empty()) throw std::logic_error("pop from an empty link discipline");
  const std::uint32_t h = held_.front();
  held_.pop_front();
  return h;
}

}  // namespace dumbbell
