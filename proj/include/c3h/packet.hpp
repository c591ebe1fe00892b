#pragma once

#include "c3h/types.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace c3h
{

enum class PacketKind : std::uint8_t
{
    Hello,
    Rreq,
    Rrep,
    Data,
    Ack,
    TrustReport,
    RouteAdvert,
    Blacklist,
};

std::string_view to_string(PacketKind kind);

inline bool is_control(PacketKind kind)
{
    return kind != PacketKind::Data;
}

/// Role a node held when it put the packet on the air.
enum class HopRole : std::uint8_t
{
    Member,
    Gateway,
    ClusterHead,
};

struct TraceEntry
{
    NodeId node = kNoNode;
    HopRole role = HopRole::Member;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// One physical transfer, radio or out-of-band.
struct RealizedHop
{
    NodeId from = kNoNode;
    NodeId to = kNoNode;
    bool tunneled = false;
};

struct Packet
{
    PacketId id = 0;
    PacketKind kind = PacketKind::Data;
    /// Claimed originator. May differ from `link` under impersonation.
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    /// Physical transmitter of the current hop.
    NodeId link = kNoNode;
    SessionId session = 0;
    std::uint32_t payload_size = 0;
    std::vector<TraceEntry> path_trace;
    std::vector<RealizedHop> hops;
    double created_at = 0.0;

    /// TRUST_REPORT: accused node. RREQ/RREP: sought destination.
    NodeId subject = kNoNode;
    /// ACK: acknowledged DATA packet.
    PacketId ref = 0;
    /// ROUTE_ADVERT: advertised destinations.
    std::vector<NodeId> advertised;
    /// ROUTE_ADVERT/RREP originated by a cluster head.
    bool from_ch = false;
};

} // namespace c3h
