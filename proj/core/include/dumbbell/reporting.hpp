#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dumbbell/flow_log.hpp"
#include "dumbbell/layout.hpp"

namespace dumbbell {

/// Curves shorter than this have no average rate.
inline constexpr double kMinCurveDurationSeconds = 0.005;
inline constexpr double kDefaultInterval = 0.5;

enum class ReportType { per_flow, total, per_subset };
enum class SubsetField { scheme, direction };

/// Parses "scheme direction" style lists; only scheme and direction are
/// allowed, each at most once. Throws ConfigError.
std::vector<SubsetField> parse_subset_fields(std::string_view text);

/// per-flow, total, per-scheme, per-direction, per-scheme-direction, ...
std::string report_type_name(ReportType type, const std::vector<SubsetField>& fields = {});

/// Jain's fairness index (sum x)^2 / (m * sum x^2), clamped to [1/m, 1];
/// nullopt when every rate is zero. Throws std::invalid_argument when empty.
std::optional<double> jains_index(std::span<const double> rates);

/// Nearest-rank percentile of sorted values (p in (0, 100]).
double nearest_rank(std::span<const double> sorted, double p);

struct LoadedFlow {
  FlowSpec spec;
  FlowLog log;
};

/// metadata.json plus one data-<flow#>.log per flow.
std::vector<LoadedFlow> load_flow_data(const std::filesystem::path& dir);

struct Curve {
  std::string label;
  std::vector<std::uint32_t> members;    // flow indices
  std::vector<const FlowLog*> logs;      // owned by the LoadedFlow list
  std::optional<double> start;           // min first arrival
  std::optional<double> end;             // max last arrival

  std::optional<double> duration() const {
    if (!start || !end) return std::nullopt;
    return *end - *start;
  }
};

/// per-flow: one curve per flow; total: one curve; per-subset: one curve per
/// distinct value combination, in order of first appearance.
std::vector<Curve> build_curves(const std::vector<LoadedFlow>& flows, ReportType type,
                                const std::vector<SubsetField>& fields = {});

struct CurveStats {
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_lost = 0;
  std::optional<double> avg_rate_mbps;  // over the curve's duration
  std::optional<double> avg_delay_ms;   // over all packets, accumulated flow by flow
  std::optional<double> loss_percent;
  std::optional<double> median_delay_ms;
  std::optional<double> mean_delay_ms;  // over the merged, sorted delays
  std::optional<double> p95_delay_ms;
  std::string rate_notice;  // why avg_rate_mbps is absent
};

CurveStats average_stats(const Curve& curve);
/// Fills the per-packet fields of `stats` (memory: all delays of the curve).
void per_packet_stats(const Curve& curve, CurveStats& stats);

/// Values over slots [k*interval, (k+1)*interval), k = 0 .. floor(horizon/interval).
struct AggregatedSeries {
  double interval = kDefaultInterval;
  std::vector<std::optional<double>> values;
};

/// Latest last arrival among the curves (0 without packets).
double report_horizon(const std::vector<Curve>& curves);
std::size_t slot_count(double horizon, double interval);

/// Mbit/s per slot; slots outside the curve's [start, end] are absent.
AggregatedSeries rate_series(const Curve& curve, double interval, double horizon);
/// Mean delay in ms per slot; absent without packets.
AggregatedSeries delay_series(const Curve& curve, double interval, double horizon);
/// Jain's index per slot over the rates of the curves whose [start, end]
/// encompasses the slot.
AggregatedSeries jain_series(const std::vector<Curve>& curves, double interval);

/// Overall Jain's index over the curves' average rates.
std::optional<double> overall_jain(const std::vector<CurveStats>& stats);

std::string format_average_section(const std::vector<Curve>& curves, const std::vector<CurveStats>& stats);
std::string format_per_packet_section(const std::vector<Curve>& curves, const std::vector<CurveStats>& stats);

struct ReportOptions {
  double interval = kDefaultInterval;
  std::vector<std::string> colors;  // empty: default cycle
  std::optional<std::string> jain_color;  // unset: first color of the cycle
};

struct ReportOutput {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notices;
};

/// Writes <type>-avg-rate.svg, <type>-avg-delay.svg, <type>-avg-jain.svg,
/// the average section of <type>-stats.log, then <type>-ppt-delay.svg and
/// the per-packet section. `stage` receives progress lines.
ReportOutput emit_reports(const std::vector<Curve>& curves, const std::string& type_name,
                          const std::filesystem::path& out_dir, const ReportOptions& options,
                          const std::function<void(std::string_view)>& stage = {});

}  // namespace dumbbell
