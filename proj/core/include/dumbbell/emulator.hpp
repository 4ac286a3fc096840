#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dumbbell/delay_schedule.hpp"
#include "dumbbell/schemes.hpp"
#include "dumbbell/topology.hpp"
#include "dumbbell/transport.hpp"

namespace dumbbell {

enum class CaptureSide { sender, receiver };

/// Per-host packet tap. Each flow has a sender-host and a receiver-host
/// capture; each sees the flow's packets in both directions, outgoing ones
/// when the host hands them to its interface and incoming ones when they
/// reach the host.
class CaptureSink {
 public:
  virtual ~CaptureSink() = default;
  virtual void begin(const Topology& topology) { (void)topology; }
  /// `flow` is the position in the topology's flow table; `ts_us` is the
  /// capture timestamp in microseconds since the UNIX epoch.
  virtual void record(std::size_t flow, CaptureSide side, std::int64_t ts_us, std::span<const std::uint8_t> ip) = 0;
  virtual void finish() {}
};

/// Kinds in tie-break order for events at the same instant.
enum class EventKind : std::uint8_t { delay_change, flow_start, service_complete, packet_arrival, scheme_tick };

struct InterfaceReport {
  std::string name;
  DisciplineParams params;
  std::uint64_t accepted = 0;
  std::uint64_t drops = 0;
  std::uint64_t capacity_hits = 0;
  std::size_t peak_occupancy = 0;
};

struct FlowReport {
  FlowSpec spec;
  SenderStats sender;
  ReceiverStats receiver;
  std::uint64_t injected = 0;   // packets emitted by both endpoints
  std::uint64_t delivered = 0;  // packets that reached the other endpoint
  std::uint64_t dropped = 0;    // tail drops on any interface
  std::uint64_t in_flight_at_end = 0;
  std::uint64_t data_bytes_delivered = 0;
  std::uint64_t capture_misses = 0;  // sender records withheld by the capture-loss knob
};

struct DelayChange {
  Duration time{0};
  CentralSide side = CentralSide::left;
  Duration delay{0};
};

struct RunReport {
  std::vector<InterfaceReport> interfaces;
  std::vector<FlowReport> flows;
  std::vector<DelayChange> delay_changes;
  std::vector<SchemeTrace> traces;
  std::uint64_t events = 0;
  /// Hash over every processed event (time, kind, subject); equal for equal inputs.
  std::uint64_t event_digest = 0;
};

/// Runs the event loop for params.runtime seconds of simulated time.
///
/// Central-link delays change at each delta boundary: the left router's end
/// at boundary + lag, the right router's end at boundary + 2 * lag. Flows
/// start at their start second; all flows stop when the runtime ends. A
/// throwing sink aborts the run.
RunReport run(Topology& topology, const VariableDelaySchedule& schedule, const RunParams& params,
              CaptureSink* sink, const ControlParams& control = {});

/// build_topology + generate_delay_schedule + run.
RunReport run_experiment(const std::vector<FlowGroup>& groups, const RunParams& params, CaptureSink* sink,
                         const ControlParams& control = {});

/// Capture timestamp of a simulated instant.
std::int64_t capture_timestamp_us(const RunParams& params, Duration t);

}  // namespace dumbbell
