#include "dumbbell/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dumbbell/duration.hpp"
#include "dumbbell/metadata.hpp"
#include "dumbbell/svg_plot.hpp"

namespace dumbbell {

namespace {

/// Compensated (Neumaier) summation.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const Accumulator& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::string six(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string flows_phrase(std::size_t n) { return std::to_string(n) + (n == 1 ? " flow" : " flows"); }

std::string field_value(const FlowSpec& f, SubsetField field) {
  return field == SubsetField::scheme ? f.scheme : std::string(direction_symbol(f.direction));
}

void write_text(const std::filesystem::path& path, const std::string& text, bool append) {
  std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::size_t slot_of(double t, double interval, std::size_t n) {
  if (t <= 0.0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(t / interval));
  return std::min(k, n - 1);
}

}  // namespace

std::vector<SubsetField> parse_subset_fields(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<SubsetField> out;
  std::string word;
  while (in >> word) {
    SubsetField f;
    if (word == "scheme") {
      f = SubsetField::scheme;
    } else if (word == "direction") {
      f = SubsetField::direction;
    } else {
      throw ConfigError("unsupported subset property '" + word + "' (allowed: scheme, direction)");
    }
    if (std::find(out.begin(), out.end(), f) != out.end()) {
      throw ConfigError("subset property '" + word + "' given twice");
    }
    out.push_back(f);
  }
  if (out.empty()) throw ConfigError("no subset properties given (allowed: scheme, direction)");
  return out;
}

std::string report_type_name(ReportType type, const std::vector<SubsetField>& fields) {
  switch (type) {
    case ReportType::per_flow:
      return "per-flow";
    case ReportType::total:
      return "total";
    case ReportType::per_subset: {
      std::string name = "per";
      for (const auto f : fields) name += f == SubsetField::scheme ? "-scheme" : "-direction";
      return name;
    }
  }
  return "?";
}

std::optional<double> jains_index(std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("Jain's index of an empty set");
  Accumulator sum, squares;
  for (const double x : rates) {
    if (x < 0.0 || !std::isfinite(x)) throw std::invalid_argument("Jain's index needs finite non-negative rates");
    sum.add(x);
    squares.add(x * x);
  }
  if (squares.value() == 0.0) return std::nullopt;
  const double m = static_cast<double>(rates.size());
  const double j = sum.value() * sum.value() / (m * squares.value());
  return std::clamp(j, 1.0 / m, 1.0);
}

double nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile outside (0, 100]");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<LoadedFlow> load_flow_data(const std::filesystem::path& dir) {
  const auto meta_path = dir / kMetadataFileName;
  if (!std::filesystem::exists(meta_path)) {
    throw std::runtime_error("no " + std::string(kMetadataFileName) + " in " + dir.string());
  }
  const Metadata meta = load_metadata(meta_path);
  std::vector<LoadedFlow> out;
  for (const auto& spec : expand_flows(meta.groups)) {
    const auto path = dir / flow_log_file_name(spec.index);
    if (!std::filesystem::exists(path)) {
      throw std::runtime_error("flow " + std::to_string(spec.index) + ": missing " + path.string());
    }
    out.push_back(LoadedFlow{spec, load_flow_log(path)});
  }
  return out;
}

std::vector<Curve> build_curves(const std::vector<LoadedFlow>& flows, ReportType type,
                                const std::vector<SubsetField>& fields) {
  std::vector<Curve> curves;
  auto add_member = [](Curve& c, const LoadedFlow& f) {
    c.members.push_back(f.spec.index);
    c.logs.push_back(&f.log);
    if (f.log.first_arrival && (!c.start || *f.log.first_arrival < *c.start)) c.start = f.log.first_arrival;
    if (f.log.last_arrival && (!c.end || *f.log.last_arrival > *c.end)) c.end = f.log.last_arrival;
  };

  switch (type) {
    case ReportType::per_flow:
      for (const auto& f : flows) {
        Curve c;
        c.label = "Flow " + std::to_string(f.spec.index) + ": " + f.spec.scheme + " " +
                  std::string(direction_symbol(f.spec.direction));
        add_member(c, f);
        curves.push_back(std::move(c));
      }
      break;
    case ReportType::total: {
      Curve c;
      for (const auto& f : flows) add_member(c, f);
      c.label = "Total: " + flows_phrase(flows.size());
      curves.push_back(std::move(c));
      break;
    }
    case ReportType::per_subset: {
      if (fields.empty()) throw ConfigError("a per-subset report needs at least one property");
      std::vector<std::string> keys;
      for (const auto& f : flows) {
        std::string key;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (i > 0) key += ' ';
          key += field_value(f.spec, fields[i]);
        }
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
          keys.push_back(key);
          curves.emplace_back();
          it = keys.end() - 1;
        }
        add_member(curves[static_cast<std::size_t>(it - keys.begin())], f);
      }
      for (std::size_t i = 0; i < curves.size(); ++i) {
        curves[i].label = keys[i] + " : " + flows_phrase(curves[i].members.size());
      }
      break;
    }
  }
  return curves;
}

CurveStats average_stats(const Curve& curve) {
  CurveStats s;
  Accumulator delay_sum;
  for (const FlowLog* log : curve.logs) {
    Accumulator flow_sum;
    for (const double d : log->delays) flow_sum.add(d);
    delay_sum.add(flow_sum);
    for (const auto size : log->sizes) s.bytes += size;
    s.packets += log->sizes.size();
    s.bytes_sent += log->bytes_sent;
    s.bytes_lost += log->bytes_lost;
  }
  if (s.packets == 0) {
    s.rate_notice = "no packets";
  } else if (const auto d = curve.duration(); !d || *d < kMinCurveDurationSeconds) {
    s.rate_notice = "duration is less than 5 ms";
  } else {
    s.avg_rate_mbps = static_cast<double>(s.bytes) * 8.0 / *d / 1e6;
  }
  if (s.packets > 0) s.avg_delay_ms = delay_sum.value() / static_cast<double>(s.packets) * 1000.0;
  if (s.bytes_sent > 0) {
    s.loss_percent = static_cast<double>(s.bytes_lost) / static_cast<double>(s.bytes_sent) * 100.0;
  }
  return s;
}

void per_packet_stats(const Curve& curve, CurveStats& stats) {
  std::vector<double> delays;
  for (const FlowLog* log : curve.logs) delays.insert(delays.end(), log->delays.begin(), log->delays.end());
  if (delays.empty()) return;
  std::sort(delays.begin(), delays.end());
  Accumulator sum;
  for (const double d : delays) sum.add(d);
  stats.median_delay_ms = nearest_rank(delays, 50.0) * 1000.0;
  stats.mean_delay_ms = sum.value() / static_cast<double>(delays.size()) * 1000.0;
  stats.p95_delay_ms = nearest_rank(delays, 95.0) * 1000.0;
}

double report_horizon(const std::vector<Curve>& curves) {
  double h = 0.0;
  for (const auto& c : curves) {
    if (c.end) h = std::max(h, *c.end);
  }
  return h;
}

std::size_t slot_count(double horizon, double interval) {
  if (!(interval > 0.0)) throw std::invalid_argument("the aggregation interval must be positive");
  return static_cast<std::size_t>(std::floor(std::max(horizon, 0.0) / interval)) + 1;
}

AggregatedSeries rate_series(const Curve& curve, double interval, double horizon) {
  AggregatedSeries s{interval, {}};
  const std::size_t n = slot_count(horizon, interval);
  s.values.assign(n, std::nullopt);
  if (!curve.start || !curve.end) return s;
  std::vector<std::uint64_t> bytes(n, 0);
  for (const FlowLog* log : curve.logs) {
    for (std::size_t i = 0; i < log->arrivals.size(); ++i) bytes[slot_of(log->arrivals[i], interval, n)] += log->sizes[i];
  }
  const std::size_t first = slot_of(*curve.start, interval, n);
  const std::size_t last = slot_of(*curve.end, interval, n);
  for (std::size_t k = first; k <= last; ++k) s.values[k] = static_cast<double>(bytes[k]) * 8.0 / interval / 1e6;
  return s;
}

AggregatedSeries delay_series(const Curve& curve, double interval, double horizon) {
  AggregatedSeries s{interval, {}};
  const std::size_t n = slot_count(horizon, interval);
  s.values.assign(n, std::nullopt);
  std::vector<Accumulator> sums(n);
  std::vector<std::uint64_t> counts(n, 0);
  for (const FlowLog* log : curve.logs) {
    for (std::size_t i = 0; i < log->arrivals.size(); ++i) {
      const std::size_t k = slot_of(log->arrivals[i], interval, n);
      sums[k].add(log->delays[i]);
      ++counts[k];
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (counts[k] > 0) s.values[k] = sums[k].value() / static_cast<double>(counts[k]) * 1000.0;
  }
  return s;
}

AggregatedSeries jain_series(const std::vector<Curve>& curves, double interval) {
  const double horizon = report_horizon(curves);
  AggregatedSeries s{interval, {}};
  const std::size_t n = slot_count(horizon, interval);
  s.values.assign(n, std::nullopt);
  std::vector<AggregatedSeries> rates;
  rates.reserve(curves.size());
  for (const auto& c : curves) rates.push_back(rate_series(c, interval, horizon));
  std::vector<double> eligible;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = static_cast<double>(k) * interval;
    const double hi = static_cast<double>(k + 1) * interval;
    eligible.clear();
    for (std::size_t c = 0; c < curves.size(); ++c) {
      if (!curves[c].start || !curves[c].end) continue;
      if (*curves[c].start <= lo && hi <= *curves[c].end && rates[c].values[k]) eligible.push_back(*rates[c].values[k]);
    }
    if (!eligible.empty()) s.values[k] = jains_index(eligible);
  }
  return s;
}

std::optional<double> overall_jain(const std::vector<CurveStats>& stats) {
  std::vector<double> rates;
  for (const auto& s : stats) {
    if (s.avg_rate_mbps) rates.push_back(*s.avg_rate_mbps);
  }
  if (rates.empty()) return std::nullopt;
  return jains_index(rates);
}

std::string format_average_section(const std::vector<Curve>& curves, const std::vector<CurveStats>& stats) {
  std::ostringstream o;
  o << "== Average and loss statistics ==\n\n";
  const auto jain = overall_jain(stats);
  o << "Average Jain's index  : " << (jain ? six(*jain) : std::string("unavailable (no curve has an average rate)"))
    << '\n';
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const CurveStats& s = stats[i];
    o << "\n-- Curve \"" << curves[i].label << "\":\n";
    o << "Average throughput    : "
      << (s.avg_rate_mbps ? six(*s.avg_rate_mbps) + " Mbps" : "unavailable (" + s.rate_notice + ")") << '\n';
    o << "Average one-way delay : " << (s.avg_delay_ms ? six(*s.avg_delay_ms) + " ms" : "unavailable (no packets)")
      << '\n';
    o << "Loss                  : "
      << (s.loss_percent ? six(*s.loss_percent) + " %" : std::string("unavailable (no bytes were sent)")) << '\n';
  }
  o << '\n';
  return o.str();
}

std::string format_per_packet_section(const std::vector<Curve>& curves, const std::vector<CurveStats>& stats) {
  std::ostringstream o;
  o << "===== Per-packet statistics =====\n";
  const std::string none = "unavailable (no packets)";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const CurveStats& s = stats[i];
    o << "\n-- Curve \"" << curves[i].label << "\":\n";
    o << "Median per-packet one-way delay          : "
      << (s.median_delay_ms ? six(*s.median_delay_ms) + " ms" : none) << '\n';
    o << "Average per-packet one-way delay         : " << (s.mean_delay_ms ? six(*s.mean_delay_ms) + " ms" : none)
      << '\n';
    o << "95th percentile per-packet one-way delay : " << (s.p95_delay_ms ? six(*s.p95_delay_ms) + " ms" : none)
      << '\n';
  }
  return o.str();
}

ReportOutput emit_reports(const std::vector<Curve>& curves, const std::string& type_name,
                          const std::filesystem::path& out_dir, const ReportOptions& options,
                          const std::function<void(std::string_view)>& stage) {
  auto say = [&](std::string_view s) {
    if (stage) stage(s);
  };
  std::filesystem::create_directories(out_dir);
  ReportOutput out;
  const auto& colors = options.colors.empty() ? default_color_cycle() : options.colors;
  auto color = [&](std::size_t i) { return colors[i % colors.size()]; };
  const double interval = options.interval;
  const double horizon = report_horizon(curves);
  const std::string note = "Aggregation interval: " + format_double(interval) + " s";
  auto slot_x = [&](std::size_t k) { return (static_cast<double>(k) + 0.5) * interval; };

  std::vector<CurveStats> stats;
  stats.reserve(curves.size());
  for (const auto& c : curves) stats.push_back(average_stats(c));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (!stats[i].avg_rate_mbps) {
      out.notices.push_back("Curve \"" + curves[i].label + "\" has no average rate: " + stats[i].rate_notice);
    }
    if (!stats[i].loss_percent) {
      out.notices.push_back("Curve \"" + curves[i].label + "\": loss cannot be computed, no bytes were sent");
    }
  }

  auto save = [&](const std::string& suffix, const std::string& text) {
    const auto path = out_dir / (type_name + suffix);
    write_text(path, text, false);
    out.files.push_back(path);
  };

  say("Plotting average throughput...");
  {
    PlotSpec plot{"Average throughput", "Time (s)", "Throughput (Mbit/s)", note, {}, std::nullopt};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (!stats[i].avg_rate_mbps) continue;
      PlotSeries s{curves[i].label + " (" + six(*stats[i].avg_rate_mbps) + " Mbps)", color(i), {}, false};
      const auto series = rate_series(curves[i], interval, horizon);
      for (std::size_t k = 0; k < series.values.size(); ++k) {
        s.points.emplace_back(slot_x(k), series.values[k].value_or(std::numeric_limits<double>::quiet_NaN()));
      }
      plot.series.push_back(std::move(s));
    }
    save("-avg-rate.svg", render_svg(plot));
  }

  say("Plotting average one-way delay...");
  {
    PlotSpec plot{"Average one-way delay", "Time (s)", "One-way delay (ms)", note, {}, std::nullopt};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (!stats[i].avg_delay_ms) continue;
      PlotSeries s{curves[i].label + " (" + six(*stats[i].avg_delay_ms) + " ms)", color(i), {}, false};
      const auto series = delay_series(curves[i], interval, horizon);
      for (std::size_t k = 0; k < series.values.size(); ++k) {
        s.points.emplace_back(slot_x(k), series.values[k].value_or(std::numeric_limits<double>::quiet_NaN()));
      }
      plot.series.push_back(std::move(s));
    }
    save("-avg-delay.svg", render_svg(plot));
  }

  say("Plotting average Jain's index...");
  {
    const auto jain = overall_jain(stats);
    PlotSpec plot{"Average Jain's index", "Time (s)", "Jain's index", note, {}, std::make_pair(0.0, 1.05)};
    if (!curves.empty()) {
      PlotSeries s{"Jain's index" + (jain ? " (" + six(*jain) + ")" : std::string()), options.jain_color.value_or(colors.front()), {}, false};
      const auto series = jain_series(curves, interval);
      for (std::size_t k = 0; k < series.values.size(); ++k) {
        s.points.emplace_back(slot_x(k), series.values[k].value_or(std::numeric_limits<double>::quiet_NaN()));
      }
      plot.series.push_back(std::move(s));
    }
    save("-avg-jain.svg", render_svg(plot));
  }

  say("Saving average statistics...");
  const auto stats_path = out_dir / (type_name + "-stats.log");
  write_text(stats_path, format_average_section(curves, stats), false);

  say("Plotting per packet one-way delay...");
  {
    PlotSpec plot{"Per-packet one-way delay", "Time (s)", "One-way delay (ms)", std::nullopt, {}, std::nullopt};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (!stats[i].avg_delay_ms) continue;
      PlotSeries s{curves[i].label + " (" + six(*stats[i].avg_delay_ms) + " ms)", color(i), {}, true};
      for (const FlowLog* log : curves[i].logs) {
        for (std::size_t k = 0; k < log->arrivals.size(); ++k) s.points.emplace_back(log->arrivals[k], log->delays[k] * 1000.0);
      }
      plot.series.push_back(std::move(s));
    }
    save("-ppt-delay.svg", render_svg(plot));
  }

  say("Saving per-packet statistics...");
  for (std::size_t i = 0; i < curves.size(); ++i) per_packet_stats(curves[i], stats[i]);
  write_text(stats_path, format_per_packet_section(curves, stats), true);
  out.files.push_back(stats_path);
  return out;
}

}  // namespace dumbbell
