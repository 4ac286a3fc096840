#include "dumbbell/congestion_control.hpp"

#include <gtest/gtest.h>

#include "dumbbell/schemes.hpp"

namespace dumbbell {
namespace {

using namespace std::chrono_literals;

AckInfo ack_at(Duration now, std::optional<Duration> rtt = std::nullopt, bool round_start = false) {
  AckInfo a;
  a.now = now;
  a.newly_acked = 1;
  a.rtt_sample = rtt;
  a.round_start = round_start;
  return a;
}

TEST(Registry, LooksUpSchemes) {
  const SchemeDescriptor* vegas = find_scheme("vegas");
  ASSERT_NE(vegas, nullptr);
  EXPECT_EQ(vegas->scheme_class, SchemeClass::delay_based);
  EXPECT_EQ(find_scheme("pantheon_sprout"), nullptr);
  EXPECT_THROW(require_scheme("pantheon_sprout"), ConfigError);
  for (const char* name : {"cubic", "vegas", "bbr", "reno"}) {
    const auto& d = require_scheme(name);
    EXPECT_EQ(d.name, name);
    EXPECT_EQ(d.transport, Transport::tcp);
    ASSERT_NE(d.make, nullptr);
    EXPECT_GE(d.make(ControlParams{})->cwnd(), 1.0);
  }
  EXPECT_EQ(require_scheme("cubic").scheme_class, SchemeClass::loss_based);
  EXPECT_EQ(require_scheme("bbr").scheme_class, SchemeClass::hybrid);
  EXPECT_EQ(to_string(SchemeClass::delay_based), "delay-based");
}

TEST(Reno, GrowsOnePacketPerWindowOfAcks) {
  RenoControl reno;
  reno.set_cwnd(10);
  reno.set_ssthresh(5);
  for (int i = 0; i < 10; ++i) reno.on_ack(ack_at(Duration{i * 1ms}, 20ms));
  EXPECT_DOUBLE_EQ(reno.cwnd(), 11.0);
}

TEST(Reno, HalvesOnLoss) {
  RenoControl reno;
  reno.set_cwnd(10);
  reno.on_loss(0ms, 10);
  EXPECT_DOUBLE_EQ(reno.cwnd(), 5.0);
  reno.on_rto(1ms);
  EXPECT_DOUBLE_EQ(reno.cwnd(), 1.0);
}

TEST(Reno, SlowStartDoublesPerRound) {
  RenoControl reno;
  const double start = reno.cwnd();
  for (int i = 0; i < static_cast<int>(start); ++i) reno.on_ack(ack_at(Duration{i * 1ms}, 20ms));
  EXPECT_DOUBLE_EQ(reno.cwnd(), 2 * start);
}

TEST(Vegas, HoldsWindowInsideAlphaBetaBand) {
  VegasControl vegas;
  vegas.set_cwnd(20);
  vegas.set_ssthresh(10);
  Duration now{};
  auto round = [&](Duration rtt) {
    for (int i = 0; i < 3; ++i) vegas.on_ack(ack_at(now += 1ms, rtt));
    vegas.on_ack(ack_at(now += 1ms, rtt, true));
  };
  round(10ms);  // no queueing: diff 0 < alpha, grows by one
  EXPECT_DOUBLE_EQ(vegas.cwnd(), 21.0);
  round(11500us);  // diff = 21 * 1.5 / 11.5 ~ 2.74, inside [2, 4]
  EXPECT_NEAR(vegas.last_diff(), 21.0 * 1.5 / 11.5, 1e-9);
  EXPECT_DOUBLE_EQ(vegas.cwnd(), 21.0);
  round(20ms);  // diff = 10.5 > beta, shrinks by one
  EXPECT_DOUBLE_EQ(vegas.cwnd(), 20.0);
}

TEST(Cubic, MultiplicativeDecreaseAndRecovery) {
  ControlParams p;
  p.cubic_hystart = false;
  CubicControl cubic(p);
  cubic.set_cwnd(100);
  cubic.set_ssthresh(50);
  cubic.on_loss(0ms, 100);
  EXPECT_DOUBLE_EQ(cubic.cwnd(), 70.0);
  EXPECT_DOUBLE_EQ(cubic.w_max(), 100.0);
  // K = cbrt(30 / 0.4) ~ 4.2 s: the window reaches w_max again around then.
  // A long round trip keeps the TCP-friendly estimate below the cubic curve.
  Duration now{};
  double at_k = 0;
  while (now < 6s) {
    now += 200ms;
    const int window = static_cast<int>(cubic.cwnd());
    for (int i = 0; i < window; ++i) cubic.on_ack(ack_at(now, 200ms));
    if (now == 4200ms) at_k = cubic.cwnd();
  }
  EXPECT_NEAR(at_k, 100.0, 3.0);
  EXPECT_GT(cubic.cwnd(), 100.0);
}

TEST(Bbr, StartupEstimatesBandwidth) {
  BbrControl bbr;
  EXPECT_EQ(bbr.mode(), BbrControl::Mode::startup);
  Duration now{};
  for (std::uint64_t i = 1; i <= 400; ++i) {
    AckInfo a = ack_at(now += 1ms, 20ms, i % 10 == 0);
    a.delivered = i;
    a.delivery_rate_pps = 1000.0;  // 12 Mbit/s of 1500-byte packets
    bbr.on_ack(a);
  }
  EXPECT_NE(bbr.mode(), BbrControl::Mode::startup);
  EXPECT_NEAR(bbr.bottleneck_bw_pps(), 1000.0, 1e-9);
  ASSERT_TRUE(bbr.pacing_rate_bps());
  EXPECT_GT(*bbr.pacing_rate_bps(), 0.0);
  EXPECT_GE(bbr.cwnd(), 1.0);
}

TEST(SchemeTrace, RequiresIncreasingTimesAndWritesJsonLines) {
  SchemeTrace trace(1, "cubic");
  SchemeState s;
  s.cwnd = 10;
  s.mode = "slow_start";
  trace.add(50ms, s);
  trace.add(100ms, s);
  EXPECT_THROW(trace.add(100ms, s), std::logic_error);
  std::ostringstream out;
  trace.write_jsonl(out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_NE(text.find("\"cwnd\""), std::string::npos);
  EXPECT_EQ(trace_file_name(1, "cubic"), "trace-1-cubic.log");
}

}  // namespace
}  // namespace dumbbell
