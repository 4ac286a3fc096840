#include "dumbbell/duration.hpp"

#include <cctype>
#include <cstdint>
#include <limits>

namespace dumbbell {
namespace {

__extension__ using u128 = unsigned __int128;

[[noreturn]] void malformed(std::string_view text, const char* why) {
  throw ConfigError("malformed duration '" + std::string(text) + "': " + why);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Duration parse_duration(std::string_view text, BareUnit bare) {
  const std::string_view s = trim(text);
  if (s.empty()) malformed(text, "empty");

  std::size_t pos = 0;
  if (s[pos] == '+') ++pos;
  if (pos < s.size() && s[pos] == '-') malformed(text, "negative");

  u128 mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      any_digit = true;
      // Digits beyond 30 significant places cannot influence a nanosecond value.
      if (mantissa > (u128{1} << 100)) {
        if (!seen_point) malformed(text, "too large");
        continue;
      }
      mantissa = mantissa * 10 + static_cast<unsigned>(c - '0');
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) malformed(text, "no digits");

  const std::string_view unit = s.substr(pos);
  u128 scale = 0;
  if (unit.empty()) {
    scale = bare == BareUnit::milliseconds ? 1'000'000 : 1'000;
  } else if (unit == "us") {
    scale = 1'000;
  } else if (unit == "ms") {
    scale = 1'000'000;
  } else if (unit == "s") {
    scale = 1'000'000'000;
  } else {
    malformed(text, "unknown unit (expected us, ms or s)");
  }

  u128 divisor = 1;
  for (int i = 0; i < frac_digits; ++i) divisor *= 10;

  const u128 scaled = mantissa * scale;
  u128 q = scaled / divisor;
  const u128 r = scaled % divisor;
  // round half to even
  if (r * 2 > divisor || (r * 2 == divisor && (q & 1) != 0)) ++q;

  if (q > static_cast<u128>(std::numeric_limits<std::int64_t>::max())) malformed(text, "too large");
  return Duration{static_cast<std::int64_t>(q)};
}

std::string format_duration(Duration d) {
  std::int64_t ns = d.count();
  std::string sign;
  if (ns < 0) {
    sign = "-";
    ns = -ns;
  }
  std::string out = sign + std::to_string(ns / 1000);
  if (const std::int64_t rem = ns % 1000; rem != 0) {
    std::string frac = std::to_string(rem);
    frac.insert(0, 3 - frac.size(), '0');
    while (frac.back() == '0') frac.pop_back();
    out += "." + frac;
  }
  return out + "us";
}

}  // namespace dumbbell
