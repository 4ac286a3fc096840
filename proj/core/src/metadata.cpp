#include "dumbbell/metadata.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dumbbell {
namespace {

using nlohmann::ordered_json;

ordered_json side_to_json(const SideLink& s) {
  return ordered_json{{"delay", format_duration(s.delay)},
                      {"rate", s.rate_mbps},
                      {"queues", s.queue_packets}};
}

SideLink side_from_json(const ordered_json& j) {
  SideLink s;
  s.delay = parse_duration(j.at("delay").get<std::string>());
  s.rate_mbps = j.at("rate").get<double>();
  s.queue_packets = j.at("queues").get<std::uint32_t>();
  return s;
}

Duration duration_at(const ordered_json& j, const char* key) {
  return parse_duration(j.at(key).get<std::string>());
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> requested) {
  if (requested) return *requested;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::seconds>(now).count());
}

std::string metadata_to_json(const Metadata& m) {
  const RunParams& p = m.params;
  ordered_json groups = ordered_json::array();
  for (const auto& g : m.groups) {
    groups.push_back(ordered_json{{"scheme", g.scheme},
                                  {"flows", g.flows},
                                  {"start", g.start},
                                  {"direction", std::string(direction_symbol(g.direction))},
                                  {"left", side_to_json(g.left)},
                                  {"right", side_to_json(g.right)}});
  }
  const ordered_json doc{
      {"format_version", m.format_version},
      {"base", format_duration(p.base)},
      {"delta", format_duration(p.delta)},
      {"step", format_duration(p.step)},
      {"jitter", format_duration(p.jitter)},
      {"runtime", p.runtime},
      {"rate", p.central_rate_mbps},
      {"max_delay", format_duration(p.max_delay)},
      {"seed", p.seed},
      {"q1", p.q1},
      {"q2", p.q2},
      {"output_dir", p.output_dir},
      {"simulation",
       {{"delay_change_lag", format_duration(p.sim.delay_change_lag)},
        {"delayed_ack", p.sim.delayed_ack},
        {"host_rate", p.sim.host_rate_mbps},
        {"delayed_ack_timeout", format_duration(p.sim.delayed_ack_timeout)},
        {"capture_epoch_us", p.sim.capture_epoch_us},
        {"capture_loss", p.sim.capture_loss},
        {"trace", p.sim.trace},
        {"trace_period", format_duration(p.sim.trace_period)}}},
      {"groups", groups}};
  return doc.dump(2) + "\n";
}

Metadata metadata_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("metadata is not valid JSON: ") + e.what());
  }
  try {
    Metadata m;
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kMetadataFormatVersion) {
      throw ConfigError("unsupported metadata format version " + std::to_string(m.format_version));
    }
    RunParams& p = m.params;
    p.base = duration_at(doc, "base");
    p.delta = duration_at(doc, "delta");
    p.step = duration_at(doc, "step");
    p.jitter = duration_at(doc, "jitter");
    p.runtime = doc.at("runtime").get<std::uint32_t>();
    p.central_rate_mbps = doc.at("rate").get<double>();
    p.max_delay = duration_at(doc, "max_delay");
    p.seed = doc.at("seed").get<std::uint64_t>();
    p.q1 = doc.at("q1").get<std::uint32_t>();
    p.q2 = doc.at("q2").get<std::uint32_t>();
    p.output_dir = doc.at("output_dir").get<std::string>();
    const auto& sim = doc.at("simulation");
    p.sim.delay_change_lag = duration_at(sim, "delay_change_lag");
    p.sim.delayed_ack = sim.at("delayed_ack").get<bool>();
    p.sim.host_rate_mbps = sim.at("host_rate").get<double>();
    p.sim.delayed_ack_timeout = duration_at(sim, "delayed_ack_timeout");
    p.sim.capture_epoch_us = sim.at("capture_epoch_us").get<std::int64_t>();
    p.sim.capture_loss = sim.at("capture_loss").get<double>();
    p.sim.trace = sim.at("trace").get<bool>();
    p.sim.trace_period = duration_at(sim, "trace_period");
    for (const auto& jg : doc.at("groups")) {
      FlowGroup g;
      g.scheme = jg.at("scheme").get<std::string>();
      g.flows = jg.at("flows").get<std::uint32_t>();
      g.start = jg.at("start").get<std::uint32_t>();
      g.direction = parse_direction(jg.at("direction").get<std::string>());
      g.left = side_from_json(jg.at("left"));
      g.right = side_from_json(jg.at("right"));
      m.groups.push_back(std::move(g));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("metadata is missing or has a mistyped field: ") + e.what());
  }
}

Metadata save_metadata(const RunParams& params, const std::vector<FlowGroup>& groups) {
  Metadata m{kMetadataFormatVersion, params, sorted_by_start(groups)};
  std::filesystem::create_directories(params.output_dir);
  const auto path = std::filesystem::path(params.output_dir) / kMetadataFileName;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << metadata_to_json(m);
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return m;
}

Metadata load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open metadata file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return metadata_from_json(buf.str());
}

}  // namespace dumbbell
