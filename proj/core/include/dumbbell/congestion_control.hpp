#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "dumbbell/duration.hpp"

namespace dumbbell {

/// Snapshot of a controller, in packets and durations.
struct SchemeState {
  double cwnd = 0.0;
  double ssthresh = 0.0;
  Duration rtt_estimate{0};
  Duration min_rtt{0};
  double pacing_rate_mbps = 0.0;  // 0 when the model does not pace
  std::string mode;
};

/// What the transport learned from one acknowledgment.
struct AckInfo {
  Duration now{0};
  std::uint32_t newly_acked = 0;       // packets newly delivered (cumulative or selective)
  std::optional<Duration> rtt_sample;  // from the newest newly delivered, never-retransmitted packet
  std::uint32_t inflight = 0;          // packets still in the network after this ack
  bool round_start = false;            // a packet-timed round trip just ended
  std::uint64_t delivered = 0;         // total packets delivered so far
  double delivery_rate_pps = 0.0;      // rate sample, 0 when unavailable
  bool in_recovery = false;
};

/// Model parameters; defaults are the documented model constants.
struct ControlParams {
  double initial_cwnd = 10.0;
  double cubic_c = 0.4;
  double cubic_beta = 0.7;
  bool cubic_fast_convergence = true;
  bool cubic_hystart = true;
  double vegas_alpha = 2.0;
  double vegas_beta = 4.0;
  double vegas_gamma = 1.0;
  std::uint32_t bbr_bw_window_rounds = 8;
  Duration bbr_min_rtt_window = std::chrono::seconds(10);
  Duration bbr_probe_rtt_duration = std::chrono::milliseconds(200);
  double bbr_cwnd_gain = 2.0;
  std::uint32_t packet_bytes = 1500;  // for pacing-rate conversion
};

class CongestionControl {
 public:
  virtual ~CongestionControl() = default;

  virtual void on_ack(const AckInfo& ack) = 0;
  /// Start of a loss-recovery episode (called once per episode).
  virtual void on_loss(Duration now, std::uint32_t inflight) = 0;
  virtual void on_rto(Duration now) = 0;

  /// Congestion window in packets, never below 1.
  virtual double cwnd() const = 0;
  /// Pacing rate in bits per second for paced models.
  virtual std::optional<double> pacing_rate_bps() const { return std::nullopt; }

  virtual SchemeState state() const = 0;
};

/// Loss-based AIMD: +1 packet per window of acks, halve on loss.
class RenoControl : public CongestionControl {
 public:
  explicit RenoControl(const ControlParams& p = {});
  void on_ack(const AckInfo& ack) override;
  void on_loss(Duration now, std::uint32_t inflight) override;
  void on_rto(Duration now) override;
  double cwnd() const override { return cwnd_; }
  SchemeState state() const override;

  void set_cwnd(double cwnd) { cwnd_ = cwnd; }
  void set_ssthresh(double ssthresh) { ssthresh_ = ssthresh; }

 protected:
  void note_rtt(const AckInfo& ack);
  /// Slow start; returns the acked count left over once ssthresh is reached.
  std::uint32_t slow_start(std::uint32_t acked);
  void additive_increase(double per_window, std::uint32_t acked);

  double cwnd_;
  double ssthresh_;
  double ai_count_ = 0.0;
  Duration srtt_{0};
  Duration min_rtt_{Duration::max()};
};

/// Loss-based cubic window growth W(t) = C (t - K)^3 + W_max with
/// multiplicative decrease beta, TCP-friendly region and delay-based
/// slow-start exit.
class CubicControl : public RenoControl {
 public:
  explicit CubicControl(const ControlParams& p = {});
  void on_ack(const AckInfo& ack) override;
  void on_loss(Duration now, std::uint32_t inflight) override;
  void on_rto(Duration now) override;
  SchemeState state() const override;

  double w_max() const { return w_max_; }

 private:
  void hystart(const AckInfo& ack);

  ControlParams p_;
  double w_max_ = 0.0;
  double k_ = 0.0;
  double origin_ = 0.0;
  std::optional<Duration> epoch_start_;
  double w_est_ = 0.0;
  // slow-start exit detection
  Duration round_min_{Duration::max()};
  Duration last_round_min_{Duration::max()};
  std::uint32_t round_samples_ = 0;
};

/// Delay-based: compares expected and actual rate once per round trip and
/// keeps between alpha and beta packets queued in the network.
class VegasControl : public RenoControl {
 public:
  explicit VegasControl(const ControlParams& p = {});
  void on_ack(const AckInfo& ack) override;
  void on_loss(Duration now, std::uint32_t inflight) override;
  void on_rto(Duration now) override;
  SchemeState state() const override;

  /// Queued-packet estimate cwnd * (rtt - base_rtt) / rtt from the last round.
  double last_diff() const { return last_diff_; }

 private:
  ControlParams p_;
  Duration base_rtt_{Duration::max()};
  Duration round_min_rtt_{Duration::max()};
  std::uint32_t round_samples_ = 0;
  double last_diff_ = 0.0;
};

/// Hybrid model in the spirit of BBR: paces at the windowed-max delivery
/// rate, caps inflight at a multiple of the estimated BDP, and periodically
/// drains the queue to refresh the minimum RTT.
class BbrControl : public CongestionControl {
 public:
  enum class Mode { startup, drain, probe_bw, probe_rtt };

  explicit BbrControl(const ControlParams& p = {});
  void on_ack(const AckInfo& ack) override;
  void on_loss(Duration now, std::uint32_t inflight) override;
  void on_rto(Duration now) override;
  double cwnd() const override { return cwnd_; }
  std::optional<double> pacing_rate_bps() const override { return pacing_bps_; }
  SchemeState state() const override;

  Mode mode() const { return mode_; }
  double bottleneck_bw_pps() const;

 private:
  double bdp_packets(double gain) const;
  void update_pacing();

  ControlParams p_;
  Mode mode_ = Mode::startup;
  double cwnd_;
  double pacing_bps_;
  double pacing_gain_;
  // (round, rate) samples for the windowed max filter
  std::deque<std::pair<std::uint64_t, double>> bw_samples_;
  std::uint64_t round_ = 0;
  Duration min_rtt_{Duration::max()};
  Duration min_rtt_stamp_{0};
  Duration srtt_{0};
  double full_bw_ = 0.0;
  std::uint32_t full_bw_rounds_ = 0;
  bool filled_pipe_ = false;
  std::uint32_t cycle_index_ = 0;
  Duration cycle_stamp_{0};
  Duration probe_rtt_done_{0};
  bool probe_rtt_round_done_ = false;
  double prior_cwnd_ = 0.0;
};

}  // namespace dumbbell
