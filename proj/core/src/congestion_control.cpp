#include "dumbbell/congestion_control.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dumbbell {

namespace {

constexpr double kInfiniteSsthresh = 1e9;
constexpr double kMinCwnd = 1.0;

double seconds_of(Duration d) { return std::chrono::duration<double>(d).count(); }

Duration smooth(Duration srtt, Duration sample) {
  if (srtt == Duration::zero()) return sample;
  return srtt + (sample - srtt) / 8;
}

}  // namespace

// ---------------------------------------------------------------- Reno

RenoControl::RenoControl(const ControlParams& p) : cwnd_(p.initial_cwnd), ssthresh_(kInfiniteSsthresh) {}

void RenoControl::note_rtt(const AckInfo& ack) {
  if (!ack.rtt_sample) return;
  srtt_ = smooth(srtt_, *ack.rtt_sample);
  min_rtt_ = std::min(min_rtt_, *ack.rtt_sample);
}

std::uint32_t RenoControl::slow_start(std::uint32_t acked) {
  if (cwnd_ >= ssthresh_) return acked;
  const double grown = std::min(cwnd_ + acked, std::max(ssthresh_, cwnd_));
  const auto used = static_cast<std::uint32_t>(std::lround(grown - cwnd_));
  cwnd_ = grown;
  return acked > used ? acked - used : 0;
}

void RenoControl::additive_increase(double per_window, std::uint32_t acked) {
  // One packet per `per_window` acknowledged packets, as an integer counter.
  per_window = std::max(1.0, std::floor(per_window));
  if (ai_count_ >= per_window) {
    ai_count_ = 0;
    cwnd_ += 1;
  }
  ai_count_ += acked;
  if (ai_count_ >= per_window) {
    const double delta = std::floor(ai_count_ / per_window);
    ai_count_ -= delta * per_window;
    cwnd_ += delta;
  }
}

void RenoControl::on_ack(const AckInfo& ack) {
  note_rtt(ack);
  if (ack.in_recovery || ack.newly_acked == 0) return;
  const std::uint32_t left = slow_start(ack.newly_acked);
  if (left > 0) additive_increase(cwnd_, left);
}

void RenoControl::on_loss(Duration, std::uint32_t) {
  ssthresh_ = std::max(std::floor(cwnd_ / 2), 2.0);
  cwnd_ = ssthresh_;
  ai_count_ = 0;
}

void RenoControl::on_rto(Duration) {
  ssthresh_ = std::max(std::floor(cwnd_ / 2), 2.0);
  cwnd_ = kMinCwnd;
  ai_count_ = 0;
}

SchemeState RenoControl::state() const {
  return SchemeState{cwnd_, ssthresh_, srtt_, min_rtt_ == Duration::max() ? Duration::zero() : min_rtt_, 0.0,
                     cwnd_ < ssthresh_ ? "slow_start" : "congestion_avoidance"};
}

// ---------------------------------------------------------------- Cubic

CubicControl::CubicControl(const ControlParams& p) : RenoControl(p), p_(p) {}

void CubicControl::hystart(const AckInfo& ack) {
  constexpr std::uint32_t kSamples = 8;
  constexpr double kLowWindow = 16.0;
  if (ack.round_start) {
    if (round_samples_ >= kSamples) last_round_min_ = round_min_;
    round_min_ = Duration::max();
    round_samples_ = 0;
  }
  if (!ack.rtt_sample || round_samples_ >= kSamples) return;
  round_min_ = std::min(round_min_, *ack.rtt_sample);
  if (++round_samples_ < kSamples) return;
  if (last_round_min_ == Duration::max() || cwnd_ < kLowWindow) return;
  const Duration eta = std::clamp(last_round_min_ / 8, Duration{std::chrono::milliseconds(4)},
                                  Duration{std::chrono::milliseconds(16)});
  if (round_min_ >= last_round_min_ + eta) ssthresh_ = cwnd_;
}

void CubicControl::on_ack(const AckInfo& ack) {
  note_rtt(ack);
  if (ack.in_recovery || ack.newly_acked == 0) return;

  if (cwnd_ < ssthresh_) {
    if (p_.cubic_hystart) hystart(ack);
    const std::uint32_t left = slow_start(ack.newly_acked);
    if (left == 0) return;
  }

  if (!epoch_start_) {
    epoch_start_ = ack.now;
    if (cwnd_ < w_max_) {
      k_ = std::cbrt((w_max_ - cwnd_) / p_.cubic_c);
      origin_ = w_max_;
    } else {
      k_ = 0.0;
      origin_ = cwnd_;
    }
    w_est_ = cwnd_;
  }

  const Duration rtt_offset = min_rtt_ == Duration::max() ? Duration::zero() : min_rtt_;
  const double t = seconds_of(ack.now - *epoch_start_ + rtt_offset);
  const double target = origin_ + p_.cubic_c * std::pow(t - k_, 3.0);
  const double acked = ack.newly_acked;

  double inc = 0.0;
  if (target > cwnd_) {
    // at most +0.5 packet per acknowledged packet (window grows ≤ 1.5x per round)
    inc = std::min((target - cwnd_) / cwnd_, 0.5) * acked;
  } else {
    inc = 0.01 * acked / cwnd_;
  }

  // TCP-friendly region: never grow slower than an AIMD flow with the same beta
  const double beta = p_.cubic_beta;
  w_est_ += 3.0 * (1.0 - beta) / (1.0 + beta) * acked / cwnd_;
  if (w_est_ > cwnd_ && w_est_ > target) inc = std::max(inc, (w_est_ - cwnd_) / cwnd_ * acked);

  cwnd_ += inc;
}

void CubicControl::on_loss(Duration, std::uint32_t) {
  const double beta = p_.cubic_beta;
  if (p_.cubic_fast_convergence && cwnd_ < w_max_) {
    w_max_ = cwnd_ * (1.0 + beta) / 2.0;
  } else {
    w_max_ = cwnd_;
  }
  epoch_start_.reset();
  cwnd_ = std::max(cwnd_ * beta, 2.0);
  ssthresh_ = cwnd_;
}

void CubicControl::on_rto(Duration now) {
  on_loss(now, 0);
  cwnd_ = kMinCwnd;
  epoch_start_.reset();
}

SchemeState CubicControl::state() const {
  SchemeState s = RenoControl::state();
  return s;
}

// ---------------------------------------------------------------- Vegas

VegasControl::VegasControl(const ControlParams& p) : RenoControl(p), p_(p) {}

void VegasControl::on_ack(const AckInfo& ack) {
  note_rtt(ack);
  if (ack.rtt_sample) {
    base_rtt_ = std::min(base_rtt_, *ack.rtt_sample);
    round_min_rtt_ = std::min(round_min_rtt_, *ack.rtt_sample);
    ++round_samples_;
  }
  if (ack.in_recovery) return;

  if (ack.round_start) {
    if (round_samples_ <= 2) {
      // Too few samples to trust a delay estimate; behave like AIMD.
      RenoControl::on_ack(AckInfo{ack.now, ack.newly_acked, std::nullopt, ack.inflight, false, ack.delivered,
                                  ack.delivery_rate_pps, false});
    } else {
      const double rtt = seconds_of(round_min_rtt_);
      const double base = seconds_of(base_rtt_);
      const double target = cwnd_ * base / rtt;
      const double diff = cwnd_ * (rtt - base) / rtt;
      last_diff_ = diff;
      if (diff > p_.vegas_gamma && cwnd_ < ssthresh_) {
        // leave slow start: too much data is queued already
        cwnd_ = std::min(cwnd_, std::floor(target) + 1);
        ssthresh_ = std::min(ssthresh_, std::max(cwnd_ - 1, 2.0));
      } else if (cwnd_ < ssthresh_) {
        slow_start(ack.newly_acked);
      } else if (diff > p_.vegas_beta) {
        cwnd_ -= 1;
        ssthresh_ = std::min(ssthresh_, std::max(cwnd_ - 1, 2.0));
      } else if (diff < p_.vegas_alpha) {
        cwnd_ += 1;
      }
      cwnd_ = std::max(cwnd_, 2.0);
    }
    round_min_rtt_ = Duration::max();
    round_samples_ = 0;
  } else if (cwnd_ < ssthresh_) {
    slow_start(ack.newly_acked);
  }
}

void VegasControl::on_loss(Duration now, std::uint32_t inflight) {
  RenoControl::on_loss(now, inflight);
  round_min_rtt_ = Duration::max();
  round_samples_ = 0;
}

void VegasControl::on_rto(Duration now) {
  RenoControl::on_rto(now);
  round_min_rtt_ = Duration::max();
  round_samples_ = 0;
}

SchemeState VegasControl::state() const {
  SchemeState s = RenoControl::state();
  if (base_rtt_ != Duration::max()) s.min_rtt = base_rtt_;
  return s;
}

// ---------------------------------------------------------------- BBR-like

namespace {
constexpr double kHighGain = 2.885;
constexpr std::array<double, 8> kCycleGains{1.25, 0.75, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
constexpr double kMinBbrCwnd = 4.0;
}  // namespace

BbrControl::BbrControl(const ControlParams& p)
    : p_(p), cwnd_(p.initial_cwnd), pacing_bps_(0.0), pacing_gain_(kHighGain) {
  // Until the first RTT sample, pace the initial window over one millisecond.
  pacing_bps_ = kHighGain * p.initial_cwnd * p.packet_bytes * 8.0 / 1e-3;
}

double BbrControl::bottleneck_bw_pps() const {
  double best = 0.0;
  for (const auto& [round, rate] : bw_samples_) best = std::max(best, rate);
  return best;
}

double BbrControl::bdp_packets(double gain) const {
  const double bw = bottleneck_bw_pps();
  if (bw <= 0.0 || min_rtt_ == Duration::max()) return p_.initial_cwnd;
  return gain * bw * seconds_of(min_rtt_);
}

void BbrControl::update_pacing() {
  const double bw = bottleneck_bw_pps();
  if (bw <= 0.0) return;
  const double rate = pacing_gain_ * bw * p_.packet_bytes * 8.0;
  // While the pipe is not yet full the pacing rate only grows.
  if (filled_pipe_ || rate > pacing_bps_) pacing_bps_ = rate;
}

void BbrControl::on_ack(const AckInfo& ack) {
  if (ack.rtt_sample) {
    srtt_ = smooth(srtt_, *ack.rtt_sample);
    if (*ack.rtt_sample <= min_rtt_) {
      min_rtt_ = *ack.rtt_sample;
      min_rtt_stamp_ = ack.now;
    }
  }
  if (ack.round_start) ++round_;

  if (ack.delivery_rate_pps > 0.0) {
    bw_samples_.emplace_back(round_, ack.delivery_rate_pps);
  }
  while (!bw_samples_.empty() && bw_samples_.front().first + p_.bbr_bw_window_rounds <= round_) {
    bw_samples_.pop_front();
  }
  // keep the deque compact: drop samples dominated by a newer larger one
  if (bw_samples_.size() > 64) {
    const double best = bottleneck_bw_pps();
    std::deque<std::pair<std::uint64_t, double>> kept;
    for (const auto& s : bw_samples_) {
      if (s.second >= best * 0.5) kept.push_back(s);
    }
    bw_samples_.swap(kept);
  }

  // startup: the pipe is full once bandwidth stops growing by 25% for three rounds
  if (ack.round_start && !filled_pipe_) {
    const double bw = bottleneck_bw_pps();
    if (bw >= full_bw_ * 1.25) {
      full_bw_ = bw;
      full_bw_rounds_ = 0;
    } else if (++full_bw_rounds_ >= 3) {
      filled_pipe_ = true;
    }
  }

  switch (mode_) {
    case Mode::startup:
      if (filled_pipe_) {
        mode_ = Mode::drain;
        pacing_gain_ = 1.0 / kHighGain;
      }
      break;
    case Mode::drain:
      if (ack.inflight <= bdp_packets(1.0)) {
        mode_ = Mode::probe_bw;
        cycle_index_ = 2;
        cycle_stamp_ = ack.now;
        pacing_gain_ = kCycleGains[cycle_index_];
      }
      break;
    case Mode::probe_bw:
      if (min_rtt_ != Duration::max() && ack.now - cycle_stamp_ > min_rtt_) {
        cycle_index_ = (cycle_index_ + 1) % kCycleGains.size();
        cycle_stamp_ = ack.now;
        pacing_gain_ = kCycleGains[cycle_index_];
      }
      break;
    case Mode::probe_rtt:
      break;
  }

  // periodic min-RTT refresh
  if (mode_ != Mode::probe_rtt && min_rtt_ != Duration::max() &&
      ack.now - min_rtt_stamp_ > p_.bbr_min_rtt_window) {
    mode_ = Mode::probe_rtt;
    pacing_gain_ = 1.0;
    prior_cwnd_ = std::max(prior_cwnd_, cwnd_);
    probe_rtt_done_ = Duration::zero();
    probe_rtt_round_done_ = false;
  }
  if (mode_ == Mode::probe_rtt) {
    if (probe_rtt_done_ == Duration::zero() && ack.inflight <= kMinBbrCwnd) {
      probe_rtt_done_ = ack.now + p_.bbr_probe_rtt_duration;
      probe_rtt_round_done_ = false;
    } else if (probe_rtt_done_ != Duration::zero()) {
      if (ack.round_start) probe_rtt_round_done_ = true;
      if (probe_rtt_round_done_ && ack.now >= probe_rtt_done_) {
        min_rtt_stamp_ = ack.now;
        cwnd_ = std::max(cwnd_, prior_cwnd_);
        prior_cwnd_ = 0.0;
        if (filled_pipe_) {
          mode_ = Mode::probe_bw;
          cycle_index_ = 2;
          cycle_stamp_ = ack.now;
          pacing_gain_ = kCycleGains[cycle_index_];
        } else {
          mode_ = Mode::startup;
          pacing_gain_ = kHighGain;
        }
      }
    }
  }

  update_pacing();

  // congestion window
  const double gain = mode_ == Mode::startup ? kHighGain : p_.bbr_cwnd_gain;
  const double target = bdp_packets(gain) + 3.0;
  if (filled_pipe_) {
    cwnd_ = std::min(cwnd_ + ack.newly_acked, target);
  } else if (cwnd_ < target || ack.delivered < p_.initial_cwnd) {
    cwnd_ += ack.newly_acked;
  }
  cwnd_ = std::max(cwnd_, kMinBbrCwnd);
  if (mode_ == Mode::probe_rtt) cwnd_ = std::min(cwnd_, kMinBbrCwnd);
}

void BbrControl::on_loss(Duration, std::uint32_t inflight) {
  // packet conservation for the first round of recovery
  prior_cwnd_ = std::max(prior_cwnd_, cwnd_);
  cwnd_ = std::max(static_cast<double>(inflight) + 1.0, kMinBbrCwnd);
}

void BbrControl::on_rto(Duration) {
  prior_cwnd_ = std::max(prior_cwnd_, cwnd_);
  cwnd_ = kMinBbrCwnd;
}

SchemeState BbrControl::state() const {
  static constexpr std::array<const char*, 4> names{"startup", "drain", "probe_bw", "probe_rtt"};
  return SchemeState{cwnd_,
                     0.0,
                     srtt_,
                     min_rtt_ == Duration::max() ? Duration::zero() : min_rtt_,
                     pacing_bps_ / 1e6,
                     names[static_cast<std::size_t>(mode_)]};
}

}  // namespace dumbbell
