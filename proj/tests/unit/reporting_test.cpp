#include "dumbbell/reporting.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "dumbbell/metadata.hpp"
#include "dumbbell/svg_plot.hpp"
#include "test_util.hpp"

namespace dumbbell {
namespace {

using testing::read_file;
using testing::TempDir;

FlowLog make_log(double start, std::size_t n, double dt, std::uint64_t size = 1500, double delay = 0.01) {
  FlowLog log;
  for (std::size_t i = 0; i < n; ++i) {
    log.arrivals.push_back(start + static_cast<double>(i) * dt);
    log.delays.push_back(delay + 0.001 * static_cast<double>(i % 7));
    log.sizes.push_back(size);
  }
  if (n > 0) {
    log.first_arrival = log.arrivals.front();
    log.last_arrival = log.arrivals.back();
  }
  log.bytes_sent = n * size + 3000;
  log.bytes_lost = 3000;
  return log;
}

LoadedFlow flow(std::uint32_t index, const std::string& scheme, Direction dir, FlowLog log) {
  FlowSpec spec;
  spec.index = index;
  spec.scheme = scheme;
  spec.direction = dir;
  return LoadedFlow{spec, std::move(log)};
}

TEST(JainsIndex, Extremes) {
  const std::vector<double> equal{5, 5, 5, 5};
  EXPECT_NEAR(*jains_index(equal), 1.0, 1e-12);
  const std::vector<double> single{1, 0, 0, 0};
  EXPECT_EQ(*jains_index(single), 0.25);
  const std::vector<double> table{49.59, 50.25};
  const double expected = (49.59 + 50.25) * (49.59 + 50.25) / (2 * (49.59 * 49.59 + 50.25 * 50.25));
  EXPECT_NEAR(*jains_index(table), expected, 1e-12);
  EXPECT_GE(*jains_index(table), 0.999);
  const std::vector<double> zeros{0, 0};
  EXPECT_FALSE(jains_index(zeros));
  EXPECT_THROW(jains_index(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(jains_index(std::vector<double>{1, -1}), std::invalid_argument);
}

TEST(JainsIndex, StaysInRange) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(1 + gen() % 20);
    for (auto& x : v) x = u(gen);
    const double j = *jains_index(v);
    EXPECT_GE(j, 1.0 / static_cast<double>(v.size()));
    EXPECT_LE(j, 1.0);
  }
}

TEST(NearestRank, Percentiles) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearest_rank(v, 50), 5);
  EXPECT_EQ(nearest_rank(v, 95), 10);
  EXPECT_EQ(nearest_rank(v, 10), 1);
  EXPECT_EQ(nearest_rank(v, 100), 10);
  EXPECT_EQ(nearest_rank(std::vector<double>{7}, 50), 7);
  EXPECT_THROW(nearest_rank(std::vector<double>{}, 50), std::invalid_argument);
  EXPECT_THROW(nearest_rank(v, 0), std::invalid_argument);
}

TEST(SubsetFields, ParsingAndNames) {
  EXPECT_EQ(parse_subset_fields("scheme direction"),
            (std::vector<SubsetField>{SubsetField::scheme, SubsetField::direction}));
  EXPECT_EQ(parse_subset_fields("direction"), (std::vector<SubsetField>{SubsetField::direction}));
  EXPECT_THROW(parse_subset_fields(""), ConfigError);
  EXPECT_THROW(parse_subset_fields("scheme scheme"), ConfigError);
  EXPECT_THROW(parse_subset_fields("rate"), ConfigError);
  EXPECT_EQ(report_type_name(ReportType::per_flow), "per-flow");
  EXPECT_EQ(report_type_name(ReportType::total), "total");
  EXPECT_EQ(report_type_name(ReportType::per_subset, {SubsetField::scheme}), "per-scheme");
  EXPECT_EQ(report_type_name(ReportType::per_subset, {SubsetField::scheme, SubsetField::direction}),
            "per-scheme-direction");
}

std::vector<LoadedFlow> ten_flows() {
  std::vector<LoadedFlow> flows;
  const Direction dirs[] = {Direction::leftward, Direction::leftward, Direction::leftward, Direction::rightward,
                            Direction::rightward, Direction::rightward};
  for (std::uint32_t i = 0; i < 6; ++i) flows.push_back(flow(i + 1, "bbr", dirs[i], make_log(0.1, 100, 0.01)));
  for (std::uint32_t i = 6; i < 10; ++i) {
    flows.push_back(flow(i + 1, "copa", i < 8 ? Direction::leftward : Direction::rightward, make_log(10.0, 50, 0.02)));
  }
  return flows;
}

TEST(BuildCurves, GroupingRules) {
  const auto flows = ten_flows();
  const auto per_flow = build_curves(flows, ReportType::per_flow);
  ASSERT_EQ(per_flow.size(), 10u);
  EXPECT_EQ(per_flow[0].label, "Flow 1: bbr <-");
  EXPECT_EQ(per_flow[9].label, "Flow 10: copa ->");

  const auto total = build_curves(flows, ReportType::total);
  ASSERT_EQ(total.size(), 1u);
  EXPECT_EQ(total[0].label, "Total: 10 flows");
  EXPECT_EQ(total[0].members.size(), 10u);
  EXPECT_DOUBLE_EQ(*total[0].start, 0.1);
  EXPECT_DOUBLE_EQ(*total[0].end, 10.0 + 49 * 0.02);

  const auto subsets =
      build_curves(flows, ReportType::per_subset, {SubsetField::scheme, SubsetField::direction});
  ASSERT_EQ(subsets.size(), 4u);
  EXPECT_EQ(subsets[0].label, "bbr <- : 3 flows");
  EXPECT_EQ(subsets[1].label, "bbr -> : 3 flows");
  EXPECT_EQ(subsets[2].label, "copa <- : 2 flows");
  EXPECT_EQ(subsets[3].label, "copa -> : 2 flows");

  std::vector<LoadedFlow> right;
  right.push_back(flow(1, "cubic", Direction::rightward, make_log(0, 10, 0.1)));
  right.push_back(flow(2, "vegas", Direction::rightward, make_log(0, 10, 0.1)));
  const auto one = build_curves(right, ReportType::per_subset, {SubsetField::direction});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].label, "-> : 2 flows");
}

TEST(AverageStats, RateDelayAndLoss) {
  std::vector<LoadedFlow> flows{flow(1, "cubic", Direction::rightward, make_log(1.0, 101, 0.01))};
  const auto curves = build_curves(flows, ReportType::per_flow);
  const CurveStats s = average_stats(curves[0]);
  ASSERT_TRUE(s.avg_rate_mbps);
  EXPECT_NEAR(*s.avg_rate_mbps, 101 * 1500 * 8 / 1.0 / 1e6, 1e-9);
  const auto& d = flows[0].log.delays;
  EXPECT_NEAR(*s.avg_delay_ms, std::accumulate(d.begin(), d.end(), 0.0) / d.size() * 1000, 1e-9);
  EXPECT_NEAR(*s.loss_percent, 3000.0 / (101 * 1500 + 3000) * 100, 1e-9);

  CurveStats p = s;
  per_packet_stats(curves[0], p);
  EXPECT_NEAR(*p.mean_delay_ms, *s.avg_delay_ms, 1e-9 * *s.avg_delay_ms);
  EXPECT_LE(*p.median_delay_ms, *p.p95_delay_ms);
}

TEST(AverageStats, EmptyAndShortCurves) {
  FlowLog empty;
  empty.bytes_sent = 1500;
  empty.bytes_lost = 1500;
  std::vector<LoadedFlow> flows{flow(1, "cubic", Direction::rightward, empty),
                                flow(2, "cubic", Direction::rightward, make_log(2.0, 4, 0.001))};
  const auto curves = build_curves(flows, ReportType::per_flow);
  const CurveStats none = average_stats(curves[0]);
  EXPECT_FALSE(none.avg_rate_mbps);
  EXPECT_FALSE(none.avg_delay_ms);
  EXPECT_EQ(none.rate_notice, "no packets");
  EXPECT_DOUBLE_EQ(*none.loss_percent, 100.0);
  const CurveStats brief = average_stats(curves[1]);  // 3 ms long
  EXPECT_FALSE(brief.avg_rate_mbps);
  EXPECT_TRUE(brief.avg_delay_ms);
  EXPECT_EQ(brief.rate_notice, "duration is less than 5 ms");
}

TEST(Series, SlotSumsMatchDeliveredBytes) {
  std::mt19937_64 gen(3);
  std::vector<LoadedFlow> flows;
  for (std::uint32_t f = 0; f < 3; ++f) {
    FlowLog log;
    double t = 0.2 * f;
    for (int i = 0; i < 2000; ++i) {
      t += static_cast<double>(gen() % 10000) / 1e6;
      log.arrivals.push_back(t);
      log.delays.push_back(static_cast<double>(gen() % 50) / 1000);
      log.sizes.push_back(40 + gen() % 1461);
    }
    log.first_arrival = log.arrivals.front();
    log.last_arrival = log.arrivals.back();
    flows.push_back(flow(f + 1, "cubic", Direction::rightward, log));
  }
  const auto curves = build_curves(flows, ReportType::per_flow);
  const double horizon = report_horizon(curves);
  for (const double interval : {0.1, 0.5, 1.0}) {
    const std::size_t n = slot_count(horizon, interval);
    EXPECT_EQ(n, static_cast<std::size_t>(std::floor(horizon / interval)) + 1);
    for (std::size_t c = 0; c < curves.size(); ++c) {
      const auto rates = rate_series(curves[c], interval, horizon);
      ASSERT_EQ(rates.values.size(), n);
      double bytes = 0;
      std::size_t present = 0;
      for (const auto& v : rates.values) {
        if (v) {
          bytes += *v * 1e6 / 8 * interval;
          ++present;
        }
      }
      const auto& sizes = flows[c].log.sizes;
      const double truth = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0}));
      EXPECT_NEAR(bytes, truth, static_cast<double>(present)) << interval;

      const auto delays = delay_series(curves[c], interval, horizon);
      for (std::size_t k = 0; k < n; ++k) {
        if (rates.values[k] && *rates.values[k] > 0) EXPECT_TRUE(delays.values[k]);
      }
    }
  }
}

TEST(Series, RateAbsentOutsideCurveSpan) {
  std::vector<LoadedFlow> flows{flow(1, "cubic", Direction::rightward, make_log(2.0, 100, 0.01))};
  const auto curves = build_curves(flows, ReportType::per_flow);
  const auto rates = rate_series(curves[0], 0.5, 5.0);
  ASSERT_EQ(rates.values.size(), 11u);
  EXPECT_FALSE(rates.values[3]);
  EXPECT_TRUE(rates.values[4]);
  EXPECT_TRUE(rates.values[5]);
  EXPECT_FALSE(rates.values[6]);
  EXPECT_THROW(slot_count(1.0, 0.0), std::invalid_argument);
}

TEST(JainSeries, EncompassmentRule) {
  // one curve: every eligible slot is 1
  std::vector<LoadedFlow> single{flow(1, "cubic", Direction::rightward, make_log(0.0, 2001, 0.01))};
  const auto one = jain_series(build_curves(single, ReportType::per_flow), 0.5);
  for (const auto& v : one.values) {
    if (v) EXPECT_DOUBLE_EQ(*v, 1.0);
  }

  // disjoint curves never share a slot
  std::vector<LoadedFlow> disjoint{flow(1, "cubic", Direction::rightward, make_log(0.0, 301, 0.01)),
                                   flow(2, "cubic", Direction::rightward, make_log(5.0, 301, 0.01))};
  const auto dj = jain_series(build_curves(disjoint, ReportType::per_flow), 0.5);
  std::size_t eligible = 0;
  for (const auto& v : dj.values) {
    if (v) {
      EXPECT_DOUBLE_EQ(*v, 1.0);
      ++eligible;
    }
  }
  EXPECT_GT(eligible, 8u);

  // B joins at 10 s inside A's span, at a quarter of A's rate
  std::vector<LoadedFlow> late{flow(1, "cubic", Direction::rightward, make_log(0.0, 2001, 0.01)),
                               flow(2, "cubic", Direction::rightward, make_log(10.0, 251, 0.04))};
  const auto lj = jain_series(build_curves(late, ReportType::per_flow), 0.5);
  for (std::size_t k = 0; k < 20; ++k) {
    ASSERT_TRUE(lj.values[k]) << k;
    EXPECT_DOUBLE_EQ(*lj.values[k], 1.0) << k;
  }
  ASSERT_TRUE(lj.values[25]);
  EXPECT_NEAR(*lj.values[25], (1 + 0.25) * (1 + 0.25) / (2 * (1 + 0.0625)), 0.02);
}

class EmitReportsTest : public ::testing::Test {
 protected:
  std::vector<LoadedFlow> flows_ = ten_flows();
  TempDir out_;
};

TEST_F(EmitReportsTest, WritesAllArtifactsInOrder) {
  const auto curves = build_curves(flows_, ReportType::per_subset, {SubsetField::scheme});
  std::vector<std::string> stages;
  const auto result = emit_reports(curves, "per-scheme", out_.path(), ReportOptions{},
                                   [&](std::string_view s) { stages.emplace_back(s); });
  EXPECT_EQ(stages, (std::vector<std::string>{"Plotting average throughput...", "Plotting average one-way delay...",
                                              "Plotting average Jain's index...", "Saving average statistics...",
                                              "Plotting per packet one-way delay...",
                                              "Saving per-packet statistics..."}));
  for (const char* name : {"per-scheme-avg-rate.svg", "per-scheme-avg-delay.svg", "per-scheme-avg-jain.svg",
                           "per-scheme-ppt-delay.svg", "per-scheme-stats.log"}) {
    EXPECT_TRUE(std::filesystem::exists(out_ / name)) << name;
  }
  EXPECT_TRUE(result.notices.empty());
  const std::string stats = read_file(out_ / "per-scheme-stats.log");
  EXPECT_EQ(stats.find("== Average and loss statistics =="), 0u);
  EXPECT_NE(stats.find("Average Jain's index  : "), std::string::npos);
  EXPECT_NE(stats.find("-- Curve \"bbr : 6 flows\":"), std::string::npos);
  EXPECT_NE(stats.find("===== Per-packet statistics ====="), std::string::npos);
  EXPECT_NE(stats.find("95th percentile per-packet one-way delay : "), std::string::npos);
  EXPECT_LT(stats.find("Average and loss"), stats.find("Per-packet"));
}

TEST_F(EmitReportsTest, StatsDoNotDependOnInterval) {
  const auto curves = build_curves(flows_, ReportType::per_flow);
  std::string first;
  for (const double interval : {0.1, 0.5, 1.0}) {
    ReportOptions opts;
    opts.interval = interval;
    emit_reports(curves, "per-flow", out_.path(), opts);
    const std::string stats = read_file(out_ / "per-flow-stats.log");
    if (first.empty()) first = stats;
    EXPECT_EQ(stats, first) << interval;
  }
}

TEST_F(EmitReportsTest, ColorsCycle) {
  const auto curves = build_curves(flows_, ReportType::per_flow);
  ReportOptions opts;
  opts.colors = {"#111111", "#222222", "#333333"};
  emit_reports(curves, "per-flow", out_.path(), opts);
  const std::string svg = read_file(out_ / "per-flow-avg-rate.svg");
  for (const auto& c : opts.colors) EXPECT_NE(svg.find(c), std::string::npos);
  EXPECT_EQ(svg.find(default_color_cycle()[3]), std::string::npos);
  const std::string jain = read_file(out_ / "per-flow-avg-jain.svg");
  EXPECT_NE(jain.find("#111111"), std::string::npos);
  opts.jain_color = "#abcdef";
  emit_reports(curves, "per-flow", out_.path(), opts);
  EXPECT_NE(read_file(out_ / "per-flow-avg-jain.svg").find("#abcdef"), std::string::npos);
}

TEST_F(EmitReportsTest, EmptyAndShortCurvesAreReportedNotFatal) {
  FlowLog empty;
  std::vector<LoadedFlow> flows{flow(1, "cubic", Direction::rightward, empty),
                                flow(2, "vegas", Direction::rightward, make_log(1.0, 4, 0.001)),
                                flow(3, "bbr", Direction::rightward, make_log(0.0, 100, 0.01))};
  const auto curves = build_curves(flows, ReportType::per_flow);
  const auto result = emit_reports(curves, "per-flow", out_.path(), ReportOptions{});
  ASSERT_GE(result.notices.size(), 2u);
  EXPECT_NE(result.notices[0].find("no packets"), std::string::npos);
  bool short_notice = false;
  for (const auto& n : result.notices) short_notice |= n.find("duration is less than 5 ms") != std::string::npos;
  EXPECT_TRUE(short_notice);
  const std::string stats = read_file(out_ / "per-flow-stats.log");
  EXPECT_NE(stats.find("unavailable (no packets)"), std::string::npos);
  EXPECT_NE(stats.find("unavailable (duration is less than 5 ms)"), std::string::npos);
  const std::string rate_svg = read_file(out_ / "per-flow-avg-rate.svg");
  EXPECT_EQ(rate_svg.find("Flow 2: vegas"), std::string::npos);
  EXPECT_NE(rate_svg.find("Flow 3: bbr"), std::string::npos);
}

TEST(LoadFlowData, ReadsMetadataAndLogs) {
  TempDir dir;
  RunParams p;
  p.output_dir = dir.path().string();
  const auto groups = default_layout_groups(10);
  save_metadata(p, groups);
  for (std::uint32_t i = 1; i <= 4; ++i) write_flow_log(make_log(i, 10, 0.1), dir.path(), i);
  const auto flows = load_flow_data(dir.path());
  ASSERT_EQ(flows.size(), 4u);
  EXPECT_EQ(flows[3].spec.scheme, "vegas");
  EXPECT_EQ(flows[3].log, make_log(4, 10, 0.1));
  std::filesystem::remove(dir / "data-2.log");
  try {
    load_flow_data(dir.path());
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("flow 2"), std::string::npos);
  }
}

}  // namespace
}  // namespace dumbbell
