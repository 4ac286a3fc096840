#include "dumbbell/transport.hpp"

#include <algorithm>
#include <cmath>

namespace dumbbell {

namespace {

double seconds_of(Duration d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

std::uint32_t timestamp_clock(Duration now) {
  return static_cast<std::uint32_t>(std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
}

// ---------------------------------------------------------------- Sender

Sender::Sender(std::unique_ptr<CongestionControl> control, SenderConfig config)
    : control_(std::move(control)), config_(config), rto_(config.initial_rto) {}

void Sender::start(Duration now, PacketEmitter& out) {
  delivered_time_ = now;
  first_sent_time_ = now;
  next_send_ = now;
  try_send(now, out);
}

std::optional<Duration> Sender::next_deadline() const {
  std::optional<Duration> d = rto_deadline_;
  if (pacing_blocked_) {
    const Duration ready = control_->pacing_rate_bps() ? std::max(next_send_, host_free_) : host_free_;
    if (!d || ready < *d) d = ready;
  }
  return d;
}

void Sender::update_rto(Duration sample) {
  if (!have_rtt_) {
    srtt_ = sample;
    rttvar_ = sample / 2;
    have_rtt_ = true;
  } else {
    const Duration err = srtt_ > sample ? srtt_ - sample : sample - srtt_;
    rttvar_ = (3 * rttvar_ + err) / 4;
    srtt_ = (7 * srtt_ + sample) / 8;
  }
  rto_ = std::clamp(srtt_ + 4 * rttvar_, config_.min_rto, config_.max_rto);
}

void Sender::transmit(std::uint64_t seq, bool retransmission, Duration now, PacketEmitter& out) {
  if (pipe_ == 0) {
    first_sent_time_ = now;
    delivered_time_ = now;
  }
  Segment& g = segment(seq);
  g.sent = now;
  g.first_sent_ref = first_sent_time_;
  g.delivered_time_ref = delivered_time_;
  g.delivered_ref = delivered_;
  g.in_flight = true;
  g.lost = false;
  if (retransmission) {
    g.retransmitted = true;
    ++stats_.retransmissions;
  }
  ++pipe_;
  ++stats_.transmissions;

  SimPacket p;
  p.is_ack = false;
  p.seq = seq;
  p.tsval = timestamp_clock(now);
  p.tsecr = ts_recent_;
  p.size = packet_size(config_.transport, false);
  p.sent = now;
  out.emit(p);

  if (const auto rate = control_->pacing_rate_bps(); rate && *rate > 0.0) {
    const auto gap = Duration{std::llround(p.size * 8.0 / *rate * 1e9)};
    next_send_ = std::max(next_send_, now) + gap;
  }
  if (config_.host_rate_bps > 0.0) host_free_ = now + Duration{std::llround(p.size * 8.0 / config_.host_rate_bps * 1e9)};
  if (!rto_deadline_) rto_deadline_ = now + rto_;
}

void Sender::try_send(Duration now, PacketEmitter& out) {
  pacing_blocked_ = false;
  const auto window = static_cast<std::uint32_t>(std::max(1.0, std::floor(control_->cwnd())));
  const bool paced = control_->pacing_rate_bps().has_value();
  while (pipe_ < window) {
    if ((paced && next_send_ > now) || host_free_ > now) {
      pacing_blocked_ = true;
      break;
    }
    // drop queue entries that were acknowledged meanwhile
    while (!lost_.empty()) {
      const std::uint64_t s = *lost_.begin();
      if (s >= snd_una_ && !segment(s).sacked && !segment(s).in_flight) break;
      lost_.erase(lost_.begin());
    }
    if (!lost_.empty()) {
      const std::uint64_t s = *lost_.begin();
      lost_.erase(lost_.begin());
      transmit(s, true, now, out);
    } else {
      segs_.emplace_back();
      transmit(next_seq_++, false, now, out);
    }
  }
}

void Sender::on_ack(const SimPacket& ack, Duration now, PacketEmitter& out) {
  ts_recent_ = ack.tsval;
  const std::uint64_t cum = std::min(ack.ack, next_seq_);

  std::uint32_t newly = 0;
  std::optional<Segment> newest;
  std::optional<Duration> rtt_sample;
  Duration rtt_sent{Duration::min()};

  auto deliver = [&](Segment& g) {
    ++newly;
    ++delivered_;
    if (g.in_flight) {
      g.in_flight = false;
      --pipe_;
    }
    if (!newest || g.sent >= newest->sent) newest = g;
    if (!g.retransmitted && g.sent >= rtt_sent) {
      rtt_sent = g.sent;
      rtt_sample = now - g.sent;
    }
  };

  for (std::size_t b = 0; b < ack.sack_count; ++b) {
    const std::uint64_t lo = std::max(ack.sacks[b].start, snd_una_);
    const std::uint64_t hi = std::min(ack.sacks[b].end, next_seq_);
    for (std::uint64_t s = lo; s < hi; ++s) {
      Segment& g = segment(s);
      if (g.sacked) continue;
      g.sacked = true;
      deliver(g);
    }
    if (hi > lo) sacked_end_ = std::max(sacked_end_, hi);
  }

  if (cum > snd_una_) {
    for (std::uint64_t s = snd_una_; s < cum; ++s) {
      Segment& g = segs_.front();
      if (!g.sacked) deliver(g);
      segs_.pop_front();
    }
    snd_una_ = cum;
    // a fresh acknowledgment restarts the retransmission timer
    rto_deadline_.reset();
  }

  if (newly > 0) delivered_time_ = now;

  double rate_pps = 0.0;
  bool round_start = false;
  if (newest) {
    const Duration send_elapsed = newest->sent - newest->first_sent_ref;
    const Duration ack_elapsed = now - newest->delivered_time_ref;
    const Duration interval = std::max(send_elapsed, ack_elapsed);
    if (interval > Duration::zero() && (min_rtt_ == Duration::max() || interval >= min_rtt_)) {
      rate_pps = static_cast<double>(delivered_ - newest->delivered_ref) / seconds_of(interval);
    }
    first_sent_time_ = newest->sent;
    if (newest->delivered_ref >= next_round_delivered_) {
      round_start = true;
      next_round_delivered_ = delivered_;
    }
  }
  if (rtt_sample) {
    min_rtt_ = std::min(min_rtt_, *rtt_sample);
    update_rto(*rtt_sample);
  }

  // loss detection
  bool marked = false;
  if (sacked_end_ > snd_una_) {
    const std::uint64_t highest = sacked_end_ - 1;
    std::uint64_t s = std::max(loss_scan_, snd_una_);
    for (; s + config_.dup_threshold <= highest; ++s) {
      Segment& g = segment(s);
      if (g.sacked || g.lost || !g.in_flight) continue;
      g.lost = true;
      g.in_flight = false;
      --pipe_;
      lost_.insert(s);
      marked = true;
    }
    loss_scan_ = std::max(loss_scan_, s);
  }

  if (in_recovery_ && snd_una_ >= recovery_point_) {
    in_recovery_ = false;
    fast_recovery_ = false;
  }
  if (marked && !in_recovery_) {
    in_recovery_ = true;
    fast_recovery_ = true;
    recovery_point_ = next_seq_;
    ++stats_.recoveries;
    control_->on_loss(now, pipe_);
  }

  stats_.delivered = delivered_;
  control_->on_ack(AckInfo{now, newly, rtt_sample, pipe_, round_start, delivered_, rate_pps,
                           in_recovery_ && fast_recovery_});

  if (pipe_ > 0 && !rto_deadline_) rto_deadline_ = now + rto_;
  try_send(now, out);
}

void Sender::on_timer(Duration now, PacketEmitter& out) {
  if (rto_deadline_ && now >= *rto_deadline_) {
    ++stats_.timeouts;
    control_->on_rto(now);
    for (std::uint64_t s = snd_una_; s < next_seq_; ++s) {
      Segment& g = segment(s);
      if (g.sacked) continue;
      if (g.in_flight) {
        g.in_flight = false;
        g.lost = true;
        lost_.insert(s);
      }
    }
    pipe_ = 0;
    loss_scan_ = std::max(loss_scan_, next_seq_);
    in_recovery_ = true;
    fast_recovery_ = false;
    recovery_point_ = next_seq_;
    rto_ = std::min(rto_ * 2, config_.max_rto);
    rto_deadline_.reset();
    next_send_ = std::min(next_send_, now);
  }
  try_send(now, out);
}

// ---------------------------------------------------------------- Receiver

Receiver::Receiver(Transport transport, bool delayed_ack, Duration delayed_ack_timeout)
    : transport_(transport), delayed_ack_(delayed_ack), timeout_(delayed_ack_timeout) {}

void Receiver::send_ack(Duration now, PacketEmitter& out) {
  SimPacket a;
  a.is_ack = true;
  a.ack = rcv_next_;
  a.tsval = timestamp_clock(now);
  a.tsecr = ts_recent_;

  // the block holding the latest arrival first, then the highest others
  auto latest = out_of_order_.upper_bound(last_received_);
  if (latest != out_of_order_.begin()) {
    --latest;
    if (last_received_ >= latest->second) latest = out_of_order_.end();
  } else {
    latest = out_of_order_.end();
  }
  if (latest != out_of_order_.end()) a.sacks[a.sack_count++] = SackBlock{latest->first, latest->second};
  for (auto it = out_of_order_.rbegin(); it != out_of_order_.rend() && a.sack_count < kMaxSackBlocks; ++it) {
    if (latest != out_of_order_.end() && it->first == latest->first) continue;
    a.sacks[a.sack_count++] = SackBlock{it->first, it->second};
  }
  if (transport_ == Transport::udp) {
    a.size = packet_size(transport_, true);
  } else {
    a.size = packet_size(transport_, true, a.sack_count);
  }
  a.sent = now;
  pending_ = false;
  ack_deadline_.reset();
  ++stats_.acks;
  out.emit(a);
}

void Receiver::on_data(const SimPacket& data, Duration now, PacketEmitter& out) {
  ++stats_.data_packets;
  ts_recent_ = data.tsval;
  const std::uint64_t s = data.seq;

  bool duplicate = s < rcv_next_;
  if (!duplicate) {
    auto it = out_of_order_.upper_bound(s);
    if (it != out_of_order_.begin() && s < std::prev(it)->second) duplicate = true;
  }
  if (duplicate) {
    ++stats_.duplicates;
    send_ack(now, out);
    return;
  }

  ++stats_.unique_packets;
  last_received_ = s;
  const bool had_gap = !out_of_order_.empty();
  const bool in_order = s == rcv_next_;
  if (in_order) {
    ++rcv_next_;
    while (!out_of_order_.empty() && out_of_order_.begin()->first == rcv_next_) {
      rcv_next_ = out_of_order_.begin()->second;
      out_of_order_.erase(out_of_order_.begin());
    }
  } else {
    // insert [s, s+1) and merge with neighbours
    std::uint64_t lo = s;
    std::uint64_t hi = s + 1;
    auto next = out_of_order_.find(hi);
    if (next != out_of_order_.end()) {
      hi = next->second;
      out_of_order_.erase(next);
    }
    auto prev = out_of_order_.lower_bound(lo);
    if (prev != out_of_order_.begin()) {
      --prev;
      if (prev->second == lo) {
        lo = prev->first;
        out_of_order_.erase(prev);
      }
    }
    out_of_order_[lo] = hi;
  }

  if (!delayed_ack_ || !in_order || had_gap || pending_) {
    send_ack(now, out);
  } else {
    pending_ = true;
    ack_deadline_ = now + timeout_;
  }
}

void Receiver::on_timer(Duration now, PacketEmitter& out) {
  if (pending_ && ack_deadline_ && now >= *ack_deadline_) send_ack(now, out);
}

}  // namespace dumbbell
