#pragma once

#include "c3h/config.hpp"

#include <cstdint>
#include <vector>

namespace c3h::desk
{

// Four static clusters on a 2 x 2 grid, 30 nodes.
//
//   H2 ---- B23 ---- H3        heads 0..3 sit 190 m apart, out of each other's range
//    |                |        bridges 4..7 sit halfway, in range of both heads
//   B02              B13
//    |                |
//   H0 ---- B01 ---- H1        8 and 9 are extra members of clusters 2 and 3
inline constexpr NodeId kHead[4] = {0, 1, 2, 3};
inline constexpr NodeId kBridge01 = 4;
inline constexpr NodeId kBridge23 = 5;
inline constexpr NodeId kBridge02 = 6;
inline constexpr NodeId kBridge13 = 7;
inline constexpr NodeId kExtra2 = 8;
inline constexpr NodeId kExtra3 = 9;
inline constexpr std::size_t kNodes = 30;

/// Ordinary member `i` (0..4) of cluster `c`.
NodeId member(int c, int i);

/// All honest, three sessions from cluster 0 to cluster 1 and one from 2 to 3.
SimConfig config(std::uint64_t seed);

/// Members that neither send, receive nor relay any session traffic.
std::vector<NodeId> bystanders();

} // namespace c3h::desk
