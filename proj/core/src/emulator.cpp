#include "dumbbell/emulator.hpp"

#include <algorithm>
#include <memory>
#include <queue>

#include "dumbbell/rng.hpp"

namespace dumbbell {

namespace {

constexpr std::uint64_t kIpIdStream = 0x1d00;
constexpr std::uint64_t kIsnStream = 0x15e0;
constexpr std::uint64_t kPayloadStream = 0xda7a;
constexpr std::uint64_t kCaptureLossStream = 0xc1055;
constexpr std::uint16_t kReceiverPort = 5201;
constexpr std::size_t kHops = 3;

enum Endpoint : std::uint32_t { kSender = 0, kReceiver = 1, kTrace = 2 };

struct Event {
  Duration time;
  EventKind kind;
  std::uint64_t seq;
  std::uint32_t a;
  std::uint32_t b;
  std::uint64_t c;
};

struct EventLater {
  bool operator()(const Event& x, const Event& y) const {
    if (x.time != y.time) return x.time > y.time;
    if (x.kind != y.kind) return x.kind > y.kind;
    return x.seq > y.seq;
  }
};

struct InFlight {
  SimPacket packet;
  std::vector<std::uint8_t> bytes;
  bool from_sender = true;  // travels sender -> receiver (data) or back (acks)
  std::uint8_t hop = 0;
};

struct TimerSlot {
  std::optional<Duration> scheduled;
  std::uint64_t generation = 0;
};

class Emulation;

class FlowEmitter final : public PacketEmitter {
 public:
  FlowEmitter(Emulation& em, std::uint32_t flow, bool from_sender) : em_(em), flow_(flow), from_sender_(from_sender) {}
  void emit(SimPacket& packet) override;

 private:
  Emulation& em_;
  std::uint32_t flow_;
  bool from_sender_;
};

struct FlowState {
  const SchemeDescriptor* scheme = nullptr;
  std::unique_ptr<Sender> sender;
  std::unique_ptr<Receiver> receiver;
  std::unique_ptr<FlowEmitter> sender_out;
  std::unique_ptr<FlowEmitter> receiver_out;
  WireContext data_wire;
  WireContext ack_wire;
  std::uint16_t data_ip_id = 0;
  std::uint16_t ack_ip_id = 0;
  bool l2r = true;  // data travels left to right
  bool started = false;
  std::array<TimerSlot, 3> timers;
  FlowReport report;
};

class Emulation {
 public:
  Emulation(Topology& topology, const VariableDelaySchedule& schedule, const RunParams& params, CaptureSink* sink,
            const ControlParams& control)
      : topo_(topology),
        schedule_(schedule),
        params_(params),
        sink_(sink),
        control_(control),
        end_(std::chrono::seconds(params.runtime)),
        capture_rng_(derive_seed(params.seed, kCaptureLossStream)) {}

  RunReport execute();
  void inject(std::uint32_t flow, bool from_sender, SimPacket& packet);

 private:
  void push(Duration time, EventKind kind, std::uint32_t a = 0, std::uint32_t b = 0, std::uint64_t c = 0) {
    queue_.push(Event{time, kind, next_seq_++, a, b, c});
  }
  void setup_flows();
  void enqueue(std::uint32_t handle, std::size_t iface);
  std::size_t hop_interface(const InFlight& f) const;
  void on_service_complete(std::uint32_t iface);
  void on_arrival(std::uint32_t handle);
  void on_tick(std::uint32_t flow, std::uint32_t endpoint, std::uint64_t generation);
  void start_flow(std::uint32_t flow);
  void reschedule(std::uint32_t flow, std::uint32_t endpoint);
  void capture(std::uint32_t flow, CaptureSide side, const InFlight& f);
  std::uint32_t allocate();
  void release(std::uint32_t handle);
  void mix(const Event& e);

  Topology& topo_;
  const VariableDelaySchedule& schedule_;
  const RunParams& params_;
  CaptureSink* sink_;
  ControlParams control_;
  Duration end_;
  Duration now_{0};
  SplitMix64 capture_rng_;

  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t next_seq_ = 0;
  std::vector<FlowState> flows_;
  std::vector<InFlight> pool_;
  std::vector<std::uint32_t> free_;
  RunReport report_;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
};

void FlowEmitter::emit(SimPacket& packet) { em_.inject(flow_, from_sender_, packet); }

void Emulation::mix(const Event& e) {
  auto add = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      digest_ ^= (v >> (8 * i)) & 0xff;
      digest_ *= 0x100000001b3ULL;
    }
  };
  add(static_cast<std::uint64_t>(e.time.count()));
  add(static_cast<std::uint64_t>(e.kind));
  add(e.a);
  add(e.b);
}

std::uint32_t Emulation::allocate() {
  if (!free_.empty()) {
    const std::uint32_t h = free_.back();
    free_.pop_back();
    return h;
  }
  pool_.emplace_back();
  return static_cast<std::uint32_t>(pool_.size() - 1);
}

void Emulation::release(std::uint32_t handle) { free_.push_back(handle); }

void Emulation::setup_flows() {
  const std::size_t n = topo_.flow_count();
  flows_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    FlowState& f = flows_[i];
    const FlowSpec& spec = topo_.flows[i];
    f.scheme = &require_scheme(spec.scheme);
    f.l2r = spec.direction == Direction::rightward;
    f.report.spec = spec;

    ControlParams cp = control_;
    cp.packet_bytes = packet_size(f.scheme->transport, false);
    SenderConfig sc;
    sc.transport = f.scheme->transport;
    sc.host_rate_bps = params_.sim.host_rate_mbps * 1e6;
    f.sender = std::make_unique<Sender>(f.scheme->make(cp), sc);
    f.receiver =
        std::make_unique<Receiver>(f.scheme->transport, params_.sim.delayed_ack, params_.sim.delayed_ack_timeout);
    f.sender_out = std::make_unique<FlowEmitter>(*this, i, true);
    f.receiver_out = std::make_unique<FlowEmitter>(*this, i, false);

    const auto data_isn = static_cast<std::uint32_t>(derive_seed(params_.seed, kIsnStream + 2 * i));
    const auto ack_isn = static_cast<std::uint32_t>(derive_seed(params_.seed, kIsnStream + 2 * i + 1));
    const auto sender_port = static_cast<std::uint16_t>(40000 + i % 20000);
    f.data_wire = WireContext{f.scheme->transport,
                              topo_.sender_address(i),
                              topo_.receiver_address(i),
                              sender_port,
                              kReceiverPort,
                              data_isn,
                              ack_isn,
                              derive_seed(params_.seed, kPayloadStream + i)};
    f.ack_wire = WireContext{f.scheme->transport, topo_.receiver_address(i), topo_.sender_address(i),
                             kReceiverPort,       sender_port,               data_isn,
                             ack_isn,             0};
    f.data_ip_id = static_cast<std::uint16_t>(derive_seed(params_.seed, kIpIdStream + 2 * i));
    f.ack_ip_id = static_cast<std::uint16_t>(derive_seed(params_.seed, kIpIdStream + 2 * i + 1));
    if (params_.sim.trace) report_.traces.emplace_back(spec.index, spec.scheme);
  }
}

std::size_t Emulation::hop_interface(const InFlight& f) const {
  const std::size_t flow = f.packet.flow;
  const bool l2r = flows_[flow].l2r == f.from_sender;
  switch (f.hop) {
    case 0:
      return l2r ? topo_.left_host_iface(flow) : topo_.right_host_iface(flow);
    case 1:
      return topo_.central_iface(l2r ? CentralSide::left : CentralSide::right);
    default:
      return l2r ? topo_.right_router_iface(flow) : topo_.left_router_iface(flow);
  }
}

void Emulation::capture(std::uint32_t flow, CaptureSide side, const InFlight& f) {
  if (!sink_) return;
  sink_->record(flow, side, capture_timestamp_us(params_, now_), f.bytes);
}

void Emulation::inject(std::uint32_t flow, bool from_sender, SimPacket& packet) {
  FlowState& fs = flows_[flow];
  packet.flow = flow;
  packet.ip_id = from_sender ? fs.data_ip_id++ : fs.ack_ip_id++;
  ++fs.report.injected;

  const std::uint32_t h = allocate();
  InFlight& f = pool_[h];
  f.packet = packet;
  f.from_sender = from_sender;
  f.hop = 0;
  if (sink_) serialize(packet, from_sender ? fs.data_wire : fs.ack_wire, f.bytes);

  if (from_sender) {
    const bool miss = params_.sim.capture_loss > 0.0 && capture_rng_.uniform() < params_.sim.capture_loss;
    if (miss) {
      ++fs.report.capture_misses;
    } else {
      capture(flow, CaptureSide::sender, f);
    }
  } else {
    capture(flow, CaptureSide::receiver, f);
  }
  enqueue(h, hop_interface(f));
}

void Emulation::enqueue(std::uint32_t handle, std::size_t iface) {
  InFlight& f = pool_[handle];
  const auto departure = topo_.interfaces[iface].enqueue(now_, f.packet.size, handle);
  if (!departure) {
    ++flows_[f.packet.flow].report.dropped;
    release(handle);
    return;
  }
  push(*departure, EventKind::service_complete, static_cast<std::uint32_t>(iface));
}

void Emulation::on_service_complete(std::uint32_t iface) {
  const std::uint32_t h = topo_.interfaces[iface].pop();
  ++pool_[h].hop;
  push(now_, EventKind::packet_arrival, h);
}

void Emulation::on_arrival(std::uint32_t handle) {
  InFlight& f = pool_[handle];
  if (f.hop < kHops) {
    enqueue(handle, hop_interface(f));
    return;
  }
  const std::uint32_t flow = f.packet.flow;
  FlowState& fs = flows_[flow];
  ++fs.report.delivered;
  const SimPacket packet = f.packet;
  if (f.from_sender) {
    capture(flow, CaptureSide::receiver, f);
    fs.report.data_bytes_delivered += packet.size;
    release(handle);
    fs.receiver->on_data(packet, now_, *fs.receiver_out);
    reschedule(flow, kReceiver);
    reschedule(flow, kSender);
  } else {
    capture(flow, CaptureSide::sender, f);
    release(handle);
    fs.sender->on_ack(packet, now_, *fs.sender_out);
    reschedule(flow, kSender);
  }
}

void Emulation::reschedule(std::uint32_t flow, std::uint32_t endpoint) {
  FlowState& fs = flows_[flow];
  TimerSlot& slot = fs.timers[endpoint];
  const std::optional<Duration> due = endpoint == kSender ? fs.sender->next_deadline() : fs.receiver->next_deadline();
  if (due == slot.scheduled) return;
  ++slot.generation;
  slot.scheduled = due;
  if (due) push(std::max(*due, now_), EventKind::scheme_tick, flow, endpoint, slot.generation);
}

void Emulation::on_tick(std::uint32_t flow, std::uint32_t endpoint, std::uint64_t generation) {
  FlowState& fs = flows_[flow];
  if (endpoint == kTrace) {
    for (auto& t : report_.traces) {
      if (t.flow_index() == fs.report.spec.index) t.add(now_, fs.sender->control().state());
    }
    push(now_ + params_.sim.trace_period, EventKind::scheme_tick, flow, kTrace, 0);
    return;
  }
  TimerSlot& slot = fs.timers[endpoint];
  if (generation != slot.generation) return;  // superseded
  slot.scheduled.reset();
  if (endpoint == kSender) {
    fs.sender->on_timer(now_, *fs.sender_out);
  } else {
    fs.receiver->on_timer(now_, *fs.receiver_out);
    reschedule(flow, kSender);
  }
  reschedule(flow, endpoint);
}

void Emulation::start_flow(std::uint32_t flow) {
  FlowState& fs = flows_[flow];
  fs.started = true;
  fs.sender->start(now_, *fs.sender_out);
  reschedule(flow, kSender);
  if (params_.sim.trace) push(now_, EventKind::scheme_tick, flow, kTrace, 0);
}

RunReport Emulation::execute() {
  setup_flows();
  if (sink_) sink_->begin(topo_);

  for (std::size_t k = 1; k < schedule_.values.size(); ++k) {
    const Duration boundary = schedule_.delta * static_cast<std::int64_t>(k);
    const auto delay = static_cast<std::uint64_t>(schedule_.values[k].count());
    push(boundary + params_.sim.delay_change_lag, EventKind::delay_change, 0, 0, delay);
    push(boundary + 2 * params_.sim.delay_change_lag, EventKind::delay_change, 1, 0, delay);
  }
  for (std::uint32_t i = 0; i < flows_.size(); ++i) {
    push(std::chrono::seconds(topo_.flows[i].start), EventKind::flow_start, i);
  }

  while (!queue_.empty() && queue_.top().time < end_) {
    const Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    ++report_.events;
    mix(e);
    switch (e.kind) {
      case EventKind::delay_change: {
        const auto side = e.a == 0 ? CentralSide::left : CentralSide::right;
        const Duration delay{static_cast<Duration::rep>(e.c)};
        install_central_delay(topo_, delay, side);
        report_.delay_changes.push_back(DelayChange{now_, side, delay});
        break;
      }
      case EventKind::flow_start:
        start_flow(e.a);
        break;
      case EventKind::service_complete:
        on_service_complete(e.a);
        break;
      case EventKind::packet_arrival:
        on_arrival(e.a);
        break;
      case EventKind::scheme_tick:
        on_tick(e.a, e.b, e.c);
        break;
    }
  }

  // Whatever is still held by an interface or between hops is flushed.
  std::vector<bool> live(pool_.size(), true);
  for (const std::uint32_t h : free_) live[h] = false;
  for (std::size_t h = 0; h < pool_.size(); ++h) {
    if (live[h]) ++flows_[pool_[h].packet.flow].report.in_flight_at_end;
  }

  for (std::size_t i = 0; i < topo_.interfaces.size(); ++i) {
    const auto& d = topo_.interfaces[i];
    report_.interfaces.push_back(
        InterfaceReport{topo_.names[i], d.params(), d.accepted(), d.drops(), d.capacity_hits(), d.peak_occupancy()});
  }
  for (auto& f : flows_) {
    f.report.sender = f.sender->stats();
    f.report.receiver = f.receiver->stats();
    report_.flows.push_back(f.report);
  }
  report_.event_digest = digest_;
  if (sink_) sink_->finish();
  return std::move(report_);
}

}  // namespace

std::int64_t capture_timestamp_us(const RunParams& params, Duration t) {
  return params.sim.capture_epoch_us + std::chrono::duration_cast<std::chrono::microseconds>(t).count();
}

RunReport run(Topology& topology, const VariableDelaySchedule& schedule, const RunParams& params, CaptureSink* sink,
              const ControlParams& control) {
  Emulation em(topology, schedule, params, sink, control);
  return em.execute();
}

RunReport run_experiment(const std::vector<FlowGroup>& groups, const RunParams& params, CaptureSink* sink,
                         const ControlParams& control) {
  Topology topology = build_topology(groups, params);
  const VariableDelaySchedule schedule = generate_delay_schedule(params);
  return run(topology, schedule, params, sink, control);
}

}  // namespace dumbbell
