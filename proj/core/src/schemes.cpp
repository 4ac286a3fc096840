#include "dumbbell/schemes.hpp"

#include <stdexcept>

#include "json.hpp"

namespace dumbbell {

namespace {

template <class Control>
std::unique_ptr<CongestionControl> make_control(const ControlParams& p) {
  return std::make_unique<Control>(p);
}

double millis(Duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

}  // namespace

std::string_view to_string(SchemeClass c) {
  switch (c) {
    case SchemeClass::loss_based:
      return "loss-based";
    case SchemeClass::delay_based:
      return "delay-based";
    case SchemeClass::hybrid:
      return "hybrid";
  }
  return "?";
}

std::string_view to_string(Transport t) { return t == Transport::tcp ? "tcp" : "udp"; }

const std::vector<SchemeDescriptor>& registry() {
  static const std::vector<SchemeDescriptor> schemes{
      {"cubic", SchemeClass::loss_based, Transport::tcp, "cubic window growth, beta 0.7, delay-based slow-start exit",
       &make_control<CubicControl>},
      {"reno", SchemeClass::loss_based, Transport::tcp, "additive increase, multiplicative decrease by half",
       &make_control<RenoControl>},
      {"vegas", SchemeClass::delay_based, Transport::tcp, "keeps alpha..beta packets queued, alpha 2, beta 4",
       &make_control<VegasControl>},
      {"bbr", SchemeClass::hybrid, Transport::tcp,
       "paces at the max delivery rate, inflight capped near 2 BDP, periodic min-RTT probing",
       &make_control<BbrControl>},
      {"quic_cubic", SchemeClass::loss_based, Transport::udp, "cubic window growth over a datagram transport",
       &make_control<CubicControl>},
  };
  return schemes;
}

const SchemeDescriptor* find_scheme(std::string_view name) {
  for (const auto& d : registry()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const SchemeDescriptor& require_scheme(std::string_view name) {
  if (const auto* d = find_scheme(name)) return *d;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

void SchemeTrace::add(Duration time, const SchemeState& state) {
  if (!samples_.empty() && time <= samples_.back().time) {
    throw std::logic_error("scheme trace samples must have increasing times");
  }
  samples_.push_back(TraceSample{time, state});
}

void SchemeTrace::write_jsonl(std::ostream& out) const {
  for (const auto& s : samples_) {
    nlohmann::ordered_json j;
    j["time_s"] = std::chrono::duration<double>(s.time).count();
    j["cwnd"] = s.state.cwnd;
    j["ssthresh"] = s.state.ssthresh;
    j["rtt_ms"] = millis(s.state.rtt_estimate);
    j["min_rtt_ms"] = millis(s.state.min_rtt);
    j["pacing_mbps"] = s.state.pacing_rate_mbps;
    j["mode"] = s.state.mode;
    out << j.dump() << '\n';
  }
}

std::string trace_file_name(std::size_t flow_index, std::string_view scheme) {
  return "trace-" + std::to_string(flow_index) + "-" + std::string(scheme) + ".log";
}

}  // namespace dumbbell
