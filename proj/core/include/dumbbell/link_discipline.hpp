#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "dumbbell/duration.hpp"
#include "dumbbell/rng.hpp"

namespace dumbbell {

struct DisciplineParams {
  double rate_mbps = 0.0;  // 0 = unshaped
  Duration delay{0};
  Duration jitter{0};
  std::uint32_t limit = 1000;  // packets held by the discipline, delayed ones included

  friend bool operator==(const DisciplineParams&, const DisciplineParams&) = default;
};

/// Serialization time of `bytes` at `rate_mbps`; zero when unshaped.
Duration transmission_time(std::uint32_t bytes, double rate_mbps);

/// NetEm-style egress discipline of one interface.
///
/// A packet accepted at `now` leaves at max(now + delay', previous departure)
/// + bytes/rate, where delay' is the delay plus a uniform jitter sample in
/// [-jitter, +jitter] clamped at zero. Departures are therefore FIFO, and a
/// packet keeps the delay it sampled when it was enqueued. Tail drop applies
/// once `limit` packets are held.
class LinkDiscipline {
 public:
  LinkDiscipline() = default;
  LinkDiscipline(DisciplineParams params, std::uint64_t jitter_seed)
      : params_(params), jitter_rng_(jitter_seed) {}

  /// Departure time, or nullopt when tail-dropped. `handle` identifies the
  /// packet to the owner and comes back from pop().
  std::optional<Duration> enqueue(Duration now, std::uint32_t bytes, std::uint32_t handle);

  /// Removes the head packet (the earliest departure) and returns its handle.
  std::uint32_t pop();

  void set_delay(Duration delay) { params_.delay = delay; }
  const DisciplineParams& params() const { return params_; }

  std::size_t occupancy() const { return held_.size(); }
  std::size_t peak_occupancy() const { return peak_; }
  std::uint64_t drops() const { return drops_; }
  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t capacity_hits() const { return capacity_hits_; }

 private:
  DisciplineParams params_;
  SplitMix64 jitter_rng_{0};
  std::deque<std::uint32_t> held_;
  Duration last_departure_{Duration::min()};
  std::size_t peak_ = 0;
  std::uint64_t drops_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t capacity_hits_ = 0;
};

}  // namespace dumbbell
