#pragma once

#include "c3h/packet.hpp"
#include "c3h/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace c3h
{

enum class BehaviorKind : std::uint8_t
{
    Honest,
    BlackHole,
    GreyHole,
    Wormhole,
    Spoof,
    Slander,
    TableOverflow,
};

std::string_view to_string(BehaviorKind kind);
std::optional<BehaviorKind> parse_behavior(std::string_view name);

/// Planted per-node behavior. Only the fields of the active kind matter.
struct BehaviorPolicy
{
    BehaviorKind kind = BehaviorKind::Honest;
    NodeId peer = kNoNode;
    NodeId victim = kNoNode;
    std::vector<NodeId> targets;
    double rate = 0.0;
    double drop_probability = 1.0;

    static BehaviorPolicy honest() { return {}; }
    static BehaviorPolicy black_hole();
    static BehaviorPolicy grey_hole(double drop_probability = 1.0);
    static BehaviorPolicy wormhole(NodeId peer);
    static BehaviorPolicy spoof(NodeId victim);
    static BehaviorPolicy slander(std::vector<NodeId> targets);
    static BehaviorPolicy table_overflow(double rate);

    bool is_honest() const { return kind == BehaviorKind::Honest; }
};

enum class ActionKind : std::uint8_t
{
    Forward,
    Drop,
    Fabricate,
    Tunnel,
};

struct Action
{
    ActionKind kind = ActionKind::Forward;
    std::optional<Packet> fabricated;
    NodeId peer = kNoNode;
};

struct InterceptContext
{
    NodeId self = kNoNode;
    std::uint64_t seed = 0;
    double now = 0.0;
};

/// What a forwarding node does with a packet it holds or overhears.
/// Deterministic in (policy, packet, context).
Action intercept(const BehaviorPolicy& policy, const Packet& packet, const InterceptContext& ctx);

/// Rewrites the claimed source of a HELLO or request; the physical link is kept.
Packet spoof_identity(const BehaviorPolicy& policy, Packet packet);

/// One TRUST_REPORT per target, addressed to the reporter's head.
std::vector<Packet> emit_slander(const BehaviorPolicy& policy, NodeId self, NodeId ch, double now);

/// Fabricated ROUTE_ADVERTs for the interval [t_begin, t_end): floor(rate*t_end) - floor(rate*t_begin)
/// adverts, each naming destinations at or beyond `node_count` (which therefore do not exist).
std::vector<Packet> emit_table_flood(const BehaviorPolicy& policy, NodeId self, NodeId ch, double t_begin, double t_end,
                                     std::size_t node_count);

} // namespace c3h
