#include "dumbbell/topology.hpp"

#include <set>

#include <gtest/gtest.h>

#include "dumbbell/packet.hpp"

namespace dumbbell {
namespace {

using namespace std::chrono_literals;

TEST(Topology, SingleFlowSetup) {
  const auto groups = parse_layout(R"(- direction: <-
  flows: 1
  left-delay: 1ms
  left-queues: 1000
  left-rate: 100
  right-delay: 1ms
  right-queues: 1000
  right-rate: 100
  scheme: cubic
  start: 0
)");
  RunParams p;
  p.base = 8ms;
  p.delta = 100s;
  p.step = 0ms;
  p.runtime = 10;
  p.central_rate_mbps = 100;
  p.q1 = p.q2 = 1000;
  const Topology t = build_topology(groups, p);
  EXPECT_EQ(t.flow_count(), 1u);
  EXPECT_EQ(t.link_count(), 3u);
  ASSERT_EQ(t.interfaces.size(), 6u);
  for (const std::size_t iface : {t.left_host_iface(0), t.left_router_iface(0), t.right_router_iface(0),
                                  t.right_host_iface(0)}) {
    EXPECT_EQ(t.interfaces[iface].params(), (DisciplineParams{100.0, 1ms, Duration::zero(), 1000}));
  }
  for (const auto side : {CentralSide::left, CentralSide::right}) {
    EXPECT_EQ(t.central(side).params(), (DisciplineParams{100.0, 8ms, Duration::zero(), 1000}));
  }
}

TEST(Topology, NoFlowsLeavesCentralLinkOnly) {
  RunParams p;
  const Topology t = build_topology({}, p);
  EXPECT_EQ(t.flow_count(), 0u);
  EXPECT_EQ(t.link_count(), 1u);
  EXPECT_EQ(t.interfaces.size(), 2u);
}

TEST(Topology, TenFlowsWithCentralRateAndQueues) {
  const auto groups = parse_layout(
      "- {scheme: bbr, flows: 3, start: 0, direction: <-, left-rate: 20, right-delay: 50ms}\n"
      "- {scheme: bbr, flows: 3, start: 0, direction: ->, left-rate: 20, left-delay: 5ms, right-delay: 5ms}\n"
      "- {scheme: cubic, flows: 2, start: 10, direction: <-, left-delay: 50ms, right-rate: 10}\n"
      "- {scheme: cubic, flows: 2, start: 10, direction: ->, left-delay: 5ms, right-rate: 10, right-delay: 5ms}\n");
  RunParams p;
  p.central_rate_mbps = 70;
  p.q1 = 300;
  p.q2 = 400;
  const Topology t = build_topology(groups, p);
  EXPECT_EQ(t.flow_count(), 10u);
  EXPECT_EQ(t.central(CentralSide::left).params().rate_mbps, 70.0);
  EXPECT_EQ(t.central(CentralSide::left).params().limit, 300u);
  EXPECT_EQ(t.central(CentralSide::right).params().limit, 400u);
  EXPECT_EQ(t.interfaces[t.right_host_iface(0)].params().delay, 50ms);
  EXPECT_EQ(t.interfaces[t.left_host_iface(3)].params().rate_mbps, 20.0);
}

TEST(Topology, LeftHostsHaveLowerAddresses) {
  const auto groups = parse_layout(
      "- {scheme: cubic, flows: 3, start: 0, direction: ->}\n"
      "- {scheme: vegas, flows: 2, start: 0, direction: <-}\n");
  const Topology t = build_topology(groups, RunParams{});
  std::set<std::uint32_t> seen;
  std::uint32_t max_left = 0;
  std::uint32_t min_right = ~0u;
  for (std::size_t i = 0; i < t.flow_count(); ++i) {
    max_left = std::max(max_left, t.left_host_address(i));
    min_right = std::min(min_right, t.right_host_address(i));
    EXPECT_TRUE(seen.insert(t.left_host_address(i)).second);
    EXPECT_TRUE(seen.insert(t.right_host_address(i)).second);
    // each host sits in its own /30
    EXPECT_EQ(t.left_host_address(i) & 3u, 1u);
    EXPECT_EQ(t.right_host_address(i) & 3u, 1u);
  }
  EXPECT_LT(max_left, min_right);
  EXPECT_EQ(format_ipv4(t.left_host_address(0)), "10.0.0.1");
  EXPECT_EQ(t.sender_address(0), t.left_host_address(0));
  EXPECT_EQ(t.sender_address(4), t.right_host_address(4));
  EXPECT_EQ(t.receiver_address(4), t.left_host_address(4));
}

TEST(Topology, InstallCentralDelayTouchesOneSide) {
  RunParams p;
  p.base = 5ms;
  Topology t = build_topology(default_layout_groups(10), p);
  install_central_delay(t, 40ms, CentralSide::left);
  EXPECT_EQ(t.central(CentralSide::left).params().delay, 40ms);
  EXPECT_EQ(t.central(CentralSide::right).params().delay, 5ms);
}

}  // namespace
}  // namespace dumbbell
