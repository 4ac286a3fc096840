#include "dumbbell/topology.hpp"

#include "dumbbell/rng.hpp"

namespace dumbbell {

namespace {

constexpr std::uint64_t kJitterStream = 0x6a17;

DisciplineParams side_params(const SideLink& link) { return DisciplineParams{link.rate_mbps, link.delay, {}, link.queue_packets}; }

}  // namespace

std::uint32_t Topology::left_host_address(std::size_t i) const {
  return kAddressBase + static_cast<std::uint32_t>(4 * i + 1);
}

std::uint32_t Topology::right_host_address(std::size_t i) const {
  return kAddressBase + static_cast<std::uint32_t>(4 * (flows.size() + 1 + i) + 1);
}

std::uint32_t Topology::sender_address(std::size_t i) const {
  return flows[i].direction == Direction::rightward ? left_host_address(i) : right_host_address(i);
}

std::uint32_t Topology::receiver_address(std::size_t i) const {
  return flows[i].direction == Direction::rightward ? right_host_address(i) : left_host_address(i);
}

Topology build_topology(const std::vector<FlowGroup>& groups, const RunParams& params) {
  Topology t;
  t.flows = expand_flows(groups);
  const std::size_t n = t.flows.size();
  t.interfaces.resize(4 * n + 2);
  t.names.resize(4 * n + 2);

  auto jitter_seed = [&](std::size_t iface) { return derive_seed(params.seed, kJitterStream + iface); };

  for (std::size_t i = 0; i < n; ++i) {
    const auto p = side_params(t.flows[i].left);
    t.interfaces[t.left_host_iface(i)] = LinkDiscipline(p, jitter_seed(t.left_host_iface(i)));
    t.interfaces[t.left_router_iface(i)] = LinkDiscipline(p, jitter_seed(t.left_router_iface(i)));
    t.names[t.left_host_iface(i)] = "left" + std::to_string(i + 1) + "-host";
    t.names[t.left_router_iface(i)] = "left" + std::to_string(i + 1) + "-router";
  }

  const DisciplineParams q1{params.central_rate_mbps, params.base, params.jitter, params.q1};
  const DisciplineParams q2{params.central_rate_mbps, params.base, params.jitter, params.q2};
  t.interfaces[t.central_iface(CentralSide::left)] = LinkDiscipline(q1, jitter_seed(t.central_iface(CentralSide::left)));
  t.interfaces[t.central_iface(CentralSide::right)] =
      LinkDiscipline(q2, jitter_seed(t.central_iface(CentralSide::right)));
  t.names[t.central_iface(CentralSide::left)] = "central-left";
  t.names[t.central_iface(CentralSide::right)] = "central-right";

  for (std::size_t i = 0; i < n; ++i) {
    const auto p = side_params(t.flows[i].right);
    t.interfaces[t.right_router_iface(i)] = LinkDiscipline(p, jitter_seed(t.right_router_iface(i)));
    t.interfaces[t.right_host_iface(i)] = LinkDiscipline(p, jitter_seed(t.right_host_iface(i)));
    t.names[t.right_router_iface(i)] = "right" + std::to_string(i + 1) + "-router";
    t.names[t.right_host_iface(i)] = "right" + std::to_string(i + 1) + "-host";
  }
  return t;
}

void install_central_delay(Topology& topology, Duration delay, CentralSide side) {
  topology.central(side).set_delay(delay);
}

}  // namespace dumbbell
