#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dumbbell/layout.hpp"
#include "dumbbell/link_discipline.hpp"
#include "dumbbell/run_params.hpp"

namespace dumbbell {

enum class CentralSide { left, right };

/// Dumbbell of n flows: left host i -- left router -- right router -- right
/// host i. Every link has one egress discipline at each end.
///
/// Interface numbering: left link i uses 2i (host end) and 2i+1 (router end);
/// the central link uses 2n (left router end, q1) and 2n+1 (right router end,
/// q2); right link i uses 2n+2+2i (router end) and 2n+3+2i (host end).
///
/// Addresses: link k gets the /30 10.0.0.0 + 4k, with the host (or the left
/// router on the central link) at .1 and the other end at .2. Left links are
/// numbered 0..n-1, the central link n and right links n+1..2n, so every
/// left host has a lower address than every right host.
struct Topology {
  std::vector<FlowSpec> flows;
  std::vector<LinkDiscipline> interfaces;
  std::vector<std::string> names;

  std::size_t flow_count() const { return flows.size(); }
  std::size_t link_count() const { return 2 * flows.size() + 1; }

  std::size_t left_host_iface(std::size_t i) const { return 2 * i; }
  std::size_t left_router_iface(std::size_t i) const { return 2 * i + 1; }
  std::size_t central_iface(CentralSide side) const {
    return 2 * flows.size() + (side == CentralSide::left ? 0 : 1);
  }
  std::size_t right_router_iface(std::size_t i) const { return 2 * flows.size() + 2 + 2 * i; }
  std::size_t right_host_iface(std::size_t i) const { return 2 * flows.size() + 3 + 2 * i; }

  std::uint32_t left_host_address(std::size_t i) const;
  std::uint32_t right_host_address(std::size_t i) const;
  std::uint32_t sender_address(std::size_t i) const;
  std::uint32_t receiver_address(std::size_t i) const;

  LinkDiscipline& central(CentralSide side) { return interfaces[central_iface(side)]; }
  const LinkDiscipline& central(CentralSide side) const { return interfaces[central_iface(side)]; }
};

inline constexpr std::uint32_t kAddressBase = 0x0a000000;  // 10.0.0.0

/// Side links take each flow's left/right parameters at both ends; the
/// central link takes the central rate, the schedule's base delay, the
/// jitter, and q1/q2. The left half is built first.
Topology build_topology(const std::vector<FlowGroup>& groups, const RunParams& params);

/// Sets the delay of one router's central-link interface. Packets already
/// held keep the delay they were given.
void install_central_delay(Topology& topology, Duration delay, CentralSide side);

}  // namespace dumbbell
