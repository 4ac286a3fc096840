#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dumbbell {

/// Canonical time quantity. Always non-negative when produced by parse_duration().
using Duration = std::chrono::nanoseconds;

/// Raised for any malformed or out-of-range experiment description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BareUnit { milliseconds, microseconds };

/// Parses "N", "Nus", "Nms" or "Ns" where N is a non-negative decimal
/// (integer or fraction). A bare number is read in `bare` units.
/// Fractions finer than a nanosecond round half-to-even.
Duration parse_duration(std::string_view text, BareUnit bare = BareUnit::milliseconds);

/// Exact textual form accepted back by parse_duration(): "<int>us" when the
/// value is a whole number of microseconds, "<int>.<frac>us" otherwise.
std::string format_duration(Duration d);

inline double to_seconds(Duration d) { return std::chrono::duration<double>(d).count(); }
inline double to_millis(Duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

}  // namespace dumbbell
