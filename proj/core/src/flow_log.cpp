#include "dumbbell/flow_log.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dumbbell {

std::optional<double> loss_percent(const FlowLog& log) {
  if (log.bytes_sent == 0) return std::nullopt;
  return static_cast<double>(log.bytes_lost) / static_cast<double>(log.bytes_sent) * 100.0;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "Infinity" : "-Infinity";
  if (value == 0.0) return std::signbit(value) ? "-0.0" : "0.0";

  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  const std::string sci(buf, res.ptr);
  const auto e = sci.find('e');
  std::string mantissa = sci.substr(0, e);
  const int exponent = std::stoi(sci.substr(e + 1));
  std::string sign;
  if (mantissa[0] == '-') {
    sign = "-";
    mantissa.erase(0, 1);
  }
  std::string digits;
  for (const char c : mantissa) {
    if (c != '.') digits.push_back(c);
  }

  if (exponent >= -4 && exponent < 16) {
    std::string out;
    if (exponent >= 0) {
      const auto int_len = static_cast<std::size_t>(exponent) + 1;
      if (digits.size() <= int_len) {
        out = digits + std::string(int_len - digits.size(), '0') + ".0";
      } else {
        out = digits.substr(0, int_len) + "." + digits.substr(int_len);
      }
    } else {
      out = "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
    }
    return sign + out;
  }
  std::string out = digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  const int mag = std::abs(exponent);
  out += exponent < 0 ? "e-" : "e+";
  if (mag < 10) out += "0";
  out += std::to_string(mag);
  return sign + out;
}

namespace {

template <class T, class F>
void write_list(std::ostringstream& out, const std::vector<T>& values, F format) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ", ";
    out << format(values[i]);
  }
  out << "]\n";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : "null"; }

}  // namespace

std::string format_flow_log(const FlowLog& log) {
  std::ostringstream out;
  out << '[' << optional_number(log.first_arrival) << ", " << optional_number(log.last_arrival) << "]\n";
  out << '[' << log.bytes_lost << ", " << log.bytes_sent << "]\n";
  write_list(out, log.arrivals, format_double);
  write_list(out, log.delays, format_double);
  write_list(out, log.sizes, [](std::uint64_t v) { return std::to_string(v); });
  return out.str();
}

FlowLog parse_flow_log(std::string_view text) {
  std::vector<nlohmann::json> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      lines.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("malformed data log line " + std::to_string(lines.size() + 1) + ": " + e.what());
    }
  }
  if (lines.size() != 5) throw std::runtime_error("a data log has five lines, found " + std::to_string(lines.size()));
  for (const auto& l : lines) {
    if (!l.is_array()) throw std::runtime_error("data log lines must be JSON arrays");
  }
  if (lines[0].size() != 2 || lines[1].size() != 2) throw std::runtime_error("malformed data log header lines");

  FlowLog log;
  try {
    if (!lines[0][0].is_null()) log.first_arrival = lines[0][0].get<double>();
    if (!lines[0][1].is_null()) log.last_arrival = lines[0][1].get<double>();
    log.bytes_lost = lines[1][0].get<std::uint64_t>();
    log.bytes_sent = lines[1][1].get<std::uint64_t>();
    log.arrivals = lines[2].get<std::vector<double>>();
    log.delays = lines[3].get<std::vector<double>>();
    log.sizes = lines[4].get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed data log: ") + e.what());
  }
  if (log.arrivals.size() != log.delays.size() || log.arrivals.size() != log.sizes.size()) {
    throw std::runtime_error("data log lists differ in length");
  }
  return log;
}

std::string flow_log_file_name(std::uint32_t flow_index) { return "data-" + std::to_string(flow_index) + ".log"; }

std::filesystem::path write_flow_log(const FlowLog& log, const std::filesystem::path& dir, std::uint32_t flow_index) {
  std::filesystem::create_directories(dir);
  const auto path = dir / flow_log_file_name(flow_index);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_flow_log(log);
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return path;
}

FlowLog load_flow_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_flow_log(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace dumbbell
