#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "dumbbell/congestion_control.hpp"
#include "dumbbell/packet.hpp"

namespace dumbbell {

/// Receives the packets an endpoint sends. The endpoint fills the transport
/// fields; addressing and the IP Identification are left to the owner.
class PacketEmitter {
 public:
  virtual ~PacketEmitter() = default;
  virtual void emit(SimPacket& packet) = 0;
};

struct SenderConfig {
  Transport transport = Transport::tcp;
  Duration initial_rto = std::chrono::seconds(1);
  Duration min_rto = std::chrono::milliseconds(200);
  Duration max_rto = std::chrono::seconds(60);
  std::uint32_t dup_threshold = 3;
  /// Line rate of the sending host in bit/s; consecutive transmissions are at
  /// least one packet time apart. 0 removes the limit.
  double host_rate_bps = 0.0;
};

struct SenderStats {
  std::uint64_t transmissions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t delivered = 0;  // packets acknowledged (cumulatively or selectively)
  std::uint64_t recoveries = 0;
  std::uint64_t timeouts = 0;
};

/// Greedy sender: always has data, limited only by the congestion window
/// and, for paced models, the pacing rate.
///
/// Keeps a selective-acknowledgment scoreboard. A packet is deemed lost once
/// `dup_threshold` packets above it are selectively acknowledged; the window
/// is reduced once per recovery episode, which lasts until everything sent
/// before it started is acknowledged. Retransmission timeouts follow
/// RFC 6298 with exponential backoff.
class Sender {
 public:
  Sender(std::unique_ptr<CongestionControl> control, SenderConfig config);

  void start(Duration now, PacketEmitter& out);
  void on_ack(const SimPacket& ack, Duration now, PacketEmitter& out);
  void on_timer(Duration now, PacketEmitter& out);

  /// Earliest time on_timer has work to do.
  std::optional<Duration> next_deadline() const;

  const CongestionControl& control() const { return *control_; }
  const SenderStats& stats() const { return stats_; }
  std::uint32_t pipe() const { return pipe_; }
  std::uint64_t snd_una() const { return snd_una_; }
  std::uint64_t next_seq() const { return next_seq_; }
  bool in_recovery() const { return in_recovery_; }
  Duration rto() const { return rto_; }

 private:
  struct Segment {
    Duration sent{0};
    Duration first_sent_ref{0};
    Duration delivered_time_ref{0};
    std::uint64_t delivered_ref = 0;
    bool sacked = false;
    bool lost = false;
    bool in_flight = false;
    bool retransmitted = false;
  };

  Segment& segment(std::uint64_t seq) { return segs_[seq - snd_una_]; }
  void try_send(Duration now, PacketEmitter& out);
  void transmit(std::uint64_t seq, bool retransmission, Duration now, PacketEmitter& out);
  void update_rto(Duration sample);

  std::unique_ptr<CongestionControl> control_;
  SenderConfig config_;
  SenderStats stats_;

  std::deque<Segment> segs_;  // segs_[0] is snd_una_
  std::uint64_t snd_una_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t sacked_end_ = 0;  // one past the highest selectively acknowledged packet
  std::uint64_t loss_scan_ = 0;
  std::set<std::uint64_t> lost_;  // waiting for retransmission
  std::uint32_t pipe_ = 0;

  bool in_recovery_ = false;
  bool fast_recovery_ = false;  // false after a timeout: the window may grow
  std::uint64_t recovery_point_ = 0;

  // delivery-rate estimation
  std::uint64_t delivered_ = 0;
  Duration delivered_time_{0};
  Duration first_sent_time_{0};
  std::uint64_t next_round_delivered_ = 0;
  Duration min_rtt_{Duration::max()};

  // retransmission timer
  Duration srtt_{0};
  Duration rttvar_{0};
  bool have_rtt_ = false;
  Duration rto_;
  std::optional<Duration> rto_deadline_;

  // pacing
  Duration next_send_{0};
  Duration host_free_{0};  // the host's line is busy until then
  bool pacing_blocked_ = false;

  std::uint32_t ts_recent_ = 0;
};

struct ReceiverStats {
  std::uint64_t data_packets = 0;  // arrivals, duplicates included
  std::uint64_t unique_packets = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t acks = 0;
};

/// Acknowledges data. With delayed acknowledgment on, the second in-order
/// packet of a pair is acknowledged at once and a lone packet after the
/// timeout; out-of-order data and duplicates are acknowledged at once.
class Receiver {
 public:
  Receiver(Transport transport, bool delayed_ack, Duration delayed_ack_timeout);

  void on_data(const SimPacket& data, Duration now, PacketEmitter& out);
  void on_timer(Duration now, PacketEmitter& out);
  std::optional<Duration> next_deadline() const { return ack_deadline_; }

  std::uint64_t rcv_next() const { return rcv_next_; }
  const ReceiverStats& stats() const { return stats_; }

 private:
  void send_ack(Duration now, PacketEmitter& out);

  Transport transport_;
  bool delayed_ack_;
  Duration timeout_;
  ReceiverStats stats_;
  std::uint64_t rcv_next_ = 0;
  std::map<std::uint64_t, std::uint64_t> out_of_order_;  // start -> end
  std::uint64_t last_received_ = 0;
  std::uint32_t ts_recent_ = 0;
  bool pending_ = false;
  std::optional<Duration> ack_deadline_;
};

/// Timestamp option clock: milliseconds of simulated time.
std::uint32_t timestamp_clock(Duration now);

}  // namespace dumbbell
