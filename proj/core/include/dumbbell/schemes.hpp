#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dumbbell/congestion_control.hpp"
#include "dumbbell/duration.hpp"

namespace dumbbell {

enum class SchemeClass { loss_based, delay_based, hybrid };
enum class Transport { tcp, udp };

std::string_view to_string(SchemeClass c);
std::string_view to_string(Transport t);

struct SchemeDescriptor {
  std::string_view name;
  SchemeClass scheme_class;
  Transport transport;
  std::string_view summary;
  std::unique_ptr<CongestionControl> (*make)(const ControlParams&);
};

/// All built-in schemes, in a fixed order.
const std::vector<SchemeDescriptor>& registry();

/// nullptr when the name is not registered.
const SchemeDescriptor* find_scheme(std::string_view name);

/// Throws ConfigError("unknown scheme ...") when the name is not registered.
const SchemeDescriptor& require_scheme(std::string_view name);

struct TraceSample {
  Duration time{0};  // since run start
  SchemeState state;
};

/// Periodic samples of one flow's controller.
class SchemeTrace {
 public:
  SchemeTrace() = default;
  SchemeTrace(std::size_t flow_index, std::string scheme) : flow_index_(flow_index), scheme_(std::move(scheme)) {}

  /// Throws std::logic_error unless sample times strictly increase.
  void add(Duration time, const SchemeState& state);

  std::size_t flow_index() const { return flow_index_; }
  const std::string& scheme() const { return scheme_; }
  const std::vector<TraceSample>& samples() const { return samples_; }

  /// One JSON object per line: time_s, cwnd, ssthresh, rtt_ms, min_rtt_ms, pacing_mbps, mode.
  void write_jsonl(std::ostream& out) const;

 private:
  std::size_t flow_index_ = 0;
  std::string scheme_;
  std::vector<TraceSample> samples_;
};

/// `trace-<flow#>-<scheme>.log`
std::string trace_file_name(std::size_t flow_index, std::string_view scheme);

}  // namespace dumbbell
