#include "dumbbell/layout.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "dumbbell/schemes.hpp"

namespace dumbbell {
namespace {

constexpr std::string_view kKeys[] = {"direction",   "flows",      "left-delay", "left-queues",
                                      "left-rate",   "right-delay", "right-queues", "right-rate",
                                      "scheme",      "start"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ConfigError("layout line " + std::to_string(line_no) + ": " + what);
}

using RawEntry = std::map<std::string, std::optional<std::string>, std::less<>>;

std::optional<std::string> scalar(std::string_view raw) {
  raw = trim(raw);
  if (raw.empty() || raw == "null" || raw == "~" || raw == "Null" || raw == "NULL") return std::nullopt;
  if (raw.size() >= 2 && (raw.front() == '"' || raw.front() == '\'') && raw.back() == raw.front()) {
    return std::string(raw.substr(1, raw.size() - 2));
  }
  return std::string(raw);
}

void add_pair(RawEntry& entry, std::string_view body, std::size_t line_no) {
  const auto colon = body.find(':');
  if (colon == std::string_view::npos) fail(line_no, "expected 'key: value'");
  const std::string key{trim(body.substr(0, colon))};
  const std::string_view rest = body.substr(colon + 1);
  if (!rest.empty() && rest.front() != ' ') fail(line_no, "expected a space after ':'");
  if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
    fail(line_no, "unknown key '" + key + "'");
  }
  if (entry.contains(key)) fail(line_no, "duplicate key '" + key + "'");
  entry.emplace(key, scalar(rest));
}

// Splits the inside of "{a: 1, b: '2'}" on commas outside quotes.
std::vector<std::string_view> split_flow_items(std::string_view inner, std::size_t line_no) {
  std::vector<std::string_view> items;
  char quote = 0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const char c = inner[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ',') {
      items.push_back(inner.substr(begin, i - begin));
      begin = i + 1;
    } else if (c == '{' || c == '}' || c == '[' || c == ']') {
      fail(line_no, "nested collections are not supported");
    }
  }
  if (quote != 0) fail(line_no, "unterminated quote");
  items.push_back(inner.substr(begin));
  return items;
}

std::vector<std::pair<std::size_t, RawEntry>> tokenize(std::string_view text) {
  std::vector<std::pair<std::size_t, RawEntry>> entries;
  std::size_t line_no = 0;
  std::size_t entry_indent = 0;
  std::optional<std::size_t> key_indent;

  std::istringstream in{std::string(text)};
  std::string line_buf;
  while (std::getline(in, line_buf)) {
    ++line_no;
    std::string_view line = strip_comment(line_buf);
    if (trim(line).empty()) continue;
    if (line.find('\t') != std::string_view::npos) fail(line_no, "tabs are not allowed for indentation");
    if (trim(line) == "---") continue;
    if (trim(line) == "[]" && entries.empty()) continue;

    const std::size_t indent = line.find_first_not_of(' ');
    std::string_view body = line.substr(indent);

    if (body.front() == '-' && (body.size() == 1 || body[1] == ' ')) {
      if (!entries.empty() && indent != entry_indent) fail(line_no, "inconsistent sequence indentation");
      entry_indent = indent;
      entries.emplace_back(line_no, RawEntry{});
      body = trim(body.substr(1));
      key_indent.reset();
      if (body.empty()) continue;
      key_indent = indent + static_cast<std::size_t>(line.substr(indent + 1).find_first_not_of(' ')) + 1;
    } else {
      if (entries.empty()) fail(line_no, "expected a sequence entry starting with '-'");
      if (indent <= entry_indent) fail(line_no, "mapping key must be indented under its '-' entry");
      if (!key_indent) key_indent = indent;
      if (indent != *key_indent) fail(line_no, "inconsistent mapping indentation");
    }

    auto& entry = entries.back().second;
    if (body.front() == '{') {
      if (body.back() != '}') fail(line_no, "unterminated flow mapping");
      for (const auto item : split_flow_items(body.substr(1, body.size() - 2), line_no)) {
        if (!trim(item).empty()) add_pair(entry, trim(item), line_no);
      }
      key_indent.reset();
      continue;
    }
    add_pair(entry, body, line_no);
  }
  return entries;
}

std::uint32_t parse_uint(std::string_view s, std::size_t line_no, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v > 0xffffffffu) {
    fail(line_no, key + " must be a non-negative integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::uint32_t>(v);
}

double parse_rate(std::string_view s, std::size_t line_no, const std::string& key) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v) || v < 0) {
    fail(line_no, key + " must be a non-negative number, got '" + std::string(s) + "'");
  }
  return v;
}

const std::optional<std::string>& lookup(const RawEntry& e, std::string_view key) {
  static const std::optional<std::string> absent;
  const auto it = e.find(key);
  return it == e.end() ? absent : it->second;
}

SideLink parse_side(const RawEntry& e, std::size_t line_no, const std::string& side) {
  SideLink link;
  if (const auto& v = lookup(e, side + "-delay")) {
    try {
      link.delay = parse_duration(*v);
    } catch (const ConfigError& err) {
      fail(line_no, side + "-delay: " + err.what());
    }
  }
  if (const auto& v = lookup(e, side + "-rate")) link.rate_mbps = parse_rate(*v, line_no, side + "-rate");
  if (const auto& v = lookup(e, side + "-queues")) {
    link.queue_packets = parse_uint(*v, line_no, side + "-queues");
    if (link.queue_packets == 0) fail(line_no, side + "-queues must be positive");
  }
  return link;
}

std::string format_rate(double r) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string_view direction_symbol(Direction d) { return d == Direction::rightward ? "->" : "<-"; }

Direction parse_direction(std::string_view symbol) {
  if (symbol == "->") return Direction::rightward;
  if (symbol == "<-") return Direction::leftward;
  throw ConfigError("direction must be '->' or '<-', got '" + std::string(symbol) + "'");
}

std::vector<FlowGroup> parse_layout(std::string_view text) {
  std::vector<FlowGroup> groups;
  for (const auto& [line_no, e] : tokenize(text)) {
    FlowGroup g;
    for (const char* required : {"scheme", "flows", "start", "direction"}) {
      if (!lookup(e, required)) fail(line_no, std::string("missing required key '") + required + "'");
    }
    g.scheme = *lookup(e, "scheme");
    if (!find_scheme(g.scheme)) fail(line_no, "unknown scheme '" + g.scheme + "'");
    g.flows = parse_uint(*lookup(e, "flows"), line_no, "flows");
    if (g.flows == 0) fail(line_no, "flows must be positive");
    g.start = parse_uint(*lookup(e, "start"), line_no, "start");
    try {
      g.direction = parse_direction(*lookup(e, "direction"));
    } catch (const ConfigError& err) {
      fail(line_no, err.what());
    }
    g.left = parse_side(e, line_no, "left");
    g.right = parse_side(e, line_no, "right");
    groups.push_back(std::move(g));
  }
  return groups;
}

std::string format_layout(const std::vector<FlowGroup>& groups) {
  std::ostringstream out;
  out << "# Delays/rates are optional: if lacking or null, they are set to 0us/0.0,\n"
         "# which leaves the parameter unshaped.\n"
         "# Sizes of queues are optional: if lacking or null, they are set to 1000.\n";
  if (groups.empty()) {
    out << "[]\n";
    return out.str();
  }
  for (const auto& g : groups) {
    out << "- direction: " << direction_symbol(g.direction) << '\n'
        << "  flows: " << g.flows << '\n'
        << "  left-delay: " << format_duration(g.left.delay) << '\n'
        << "  left-queues: " << g.left.queue_packets << '\n'
        << "  left-rate: " << format_rate(g.left.rate_mbps) << '\n'
        << "  right-delay: " << format_duration(g.right.delay) << '\n'
        << "  right-queues: " << g.right.queue_packets << '\n'
        << "  right-rate: " << format_rate(g.right.rate_mbps) << '\n'
        << "  scheme: " << g.scheme << '\n'
        << "  start: " << g.start << '\n';
  }
  return out.str();
}

std::vector<FlowGroup> default_layout_groups(std::uint32_t runtime_seconds) {
  FlowGroup cubic;
  cubic.scheme = "cubic";
  cubic.flows = 2;
  cubic.start = 0;
  cubic.direction = Direction::rightward;

  FlowGroup vegas = cubic;
  vegas.scheme = "vegas";
  vegas.start = runtime_seconds / 2;
  return {cubic, vegas};
}

std::string default_layout(std::uint32_t runtime_seconds) {
  return format_layout(default_layout_groups(runtime_seconds));
}

std::uint32_t total_flows(const std::vector<FlowGroup>& groups) {
  std::uint32_t n = 0;
  for (const auto& g : groups) n += g.flows;
  return n;
}

std::vector<FlowGroup> sorted_by_start(std::vector<FlowGroup> groups) {
  std::stable_sort(groups.begin(), groups.end(),
                   [](const FlowGroup& a, const FlowGroup& b) { return a.start < b.start; });
  return groups;
}

std::vector<FlowSpec> expand_flows(const std::vector<FlowGroup>& groups) {
  std::vector<FlowSpec> flows;
  std::uint32_t index = 1;
  for (const auto& g : sorted_by_start(groups)) {
    for (std::uint32_t k = 0; k < g.flows; ++k) {
      flows.push_back(FlowSpec{index++, g.scheme, g.start, g.direction, g.left, g.right});
    }
  }
  return flows;
}

}  // namespace dumbbell
