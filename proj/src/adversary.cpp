#include "c3h/adversary.hpp"

#include "c3h/rng.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace c3h
{

namespace
{

constexpr std::array<std::pair<BehaviorKind, std::string_view>, 7> kBehaviorNames{{
    {BehaviorKind::Honest, "honest"},
    {BehaviorKind::BlackHole, "black_hole"},
    {BehaviorKind::GreyHole, "grey_hole"},
    {BehaviorKind::Wormhole, "wormhole"},
    {BehaviorKind::Spoof, "spoof"},
    {BehaviorKind::Slander, "slander"},
    {BehaviorKind::TableOverflow, "table_overflow"},
}};

} // namespace

std::string_view to_string(BehaviorKind kind)
{
    for (const auto& [k, name] : kBehaviorNames)
    {
        if (k == kind)
        {
            return name;
        }
    }
    return "unknown";
}

std::optional<BehaviorKind> parse_behavior(std::string_view name)
{
    for (const auto& [k, n] : kBehaviorNames)
    {
        if (n == name)
        {
            return k;
        }
    }
    return std::nullopt;
}

BehaviorPolicy BehaviorPolicy::black_hole()
{
    BehaviorPolicy p;
    p.kind = BehaviorKind::BlackHole;
    return p;
}

BehaviorPolicy BehaviorPolicy::grey_hole(double drop_probability)
{
    BehaviorPolicy p;
    p.kind = BehaviorKind::GreyHole;
    p.drop_probability = drop_probability;
    return p;
}

BehaviorPolicy BehaviorPolicy::wormhole(NodeId peer)
{
    BehaviorPolicy p;
    p.kind = BehaviorKind::Wormhole;
    p.peer = peer;
    return p;
}

BehaviorPolicy BehaviorPolicy::spoof(NodeId victim)
{
    BehaviorPolicy p;
    p.kind = BehaviorKind::Spoof;
    p.victim = victim;
    return p;
}

BehaviorPolicy BehaviorPolicy::slander(std::vector<NodeId> targets)
{
    BehaviorPolicy p;
    p.kind = BehaviorKind::Slander;
    p.targets = std::move(targets);
    return p;
}

BehaviorPolicy BehaviorPolicy::table_overflow(double rate)
{
    BehaviorPolicy p;
    p.kind = BehaviorKind::TableOverflow;
    p.rate = rate;
    return p;
}

Action intercept(const BehaviorPolicy& policy, const Packet& packet, const InterceptContext& ctx)
{
    switch (policy.kind)
    {
    case BehaviorKind::BlackHole:
        if (packet.kind == PacketKind::Rreq)
        {
            // Claims a one-hop route to whatever was asked for.
            Packet rrep;
            rrep.kind = PacketKind::Rrep;
            rrep.src = ctx.self;
            rrep.link = ctx.self;
            rrep.dst = packet.src;
            rrep.subject = packet.subject;
            rrep.session = packet.session;
            rrep.created_at = ctx.now;
            rrep.path_trace.push_back({ctx.self, HopRole::Member});
            return Action{ActionKind::Fabricate, std::move(rrep), kNoNode};
        }
        if (packet.kind == PacketKind::Data)
        {
            return Action{ActionKind::Drop, std::nullopt, kNoNode};
        }
        return {};
    case BehaviorKind::GreyHole:
        if (packet.kind == PacketKind::Data)
        {
            const std::uint64_t bits = mix64(ctx.seed ^ mix64(ctx.self) ^ mix64(packet.id * 0x2545f4914f6cdd1dULL));
            if (unit_interval(bits) < policy.drop_probability)
            {
                return Action{ActionKind::Drop, std::nullopt, kNoNode};
            }
        }
        return {};
    case BehaviorKind::Wormhole:
        if (policy.peer != kNoNode && policy.peer != ctx.self &&
            (packet.kind == PacketKind::Data || packet.kind == PacketKind::Rreq))
        {
            return Action{ActionKind::Tunnel, std::nullopt, policy.peer};
        }
        return {};
    case BehaviorKind::Honest:
    case BehaviorKind::Spoof:
    case BehaviorKind::Slander:
    case BehaviorKind::TableOverflow:
        return {};
    }
    return {};
}

Packet spoof_identity(const BehaviorPolicy& policy, Packet packet)
{
    if (policy.kind != BehaviorKind::Spoof || policy.victim == kNoNode)
    {
        return packet;
    }
    if (packet.link == kNoNode)
    {
        packet.link = packet.src;
    }
    packet.src = policy.victim;
    return packet;
}

std::vector<Packet> emit_slander(const BehaviorPolicy& policy, NodeId self, NodeId ch, double now)
{
    std::vector<Packet> reports;
    if (policy.kind != BehaviorKind::Slander)
    {
        return reports;
    }
    reports.reserve(policy.targets.size());
    for (NodeId target : policy.targets)
    {
        Packet p;
        p.kind = PacketKind::TrustReport;
        p.src = self;
        p.link = self;
        p.dst = ch;
        p.subject = target;
        p.created_at = now;
        reports.push_back(std::move(p));
    }
    return reports;
}

std::vector<Packet> emit_table_flood(const BehaviorPolicy& policy, NodeId self, NodeId ch, double t_begin, double t_end,
                                     std::size_t node_count)
{
    std::vector<Packet> adverts;
    if (policy.kind != BehaviorKind::TableOverflow || !(policy.rate > 0.0) || !(t_end > t_begin))
    {
        return adverts;
    }
    const auto first = static_cast<std::uint64_t>(std::floor(policy.rate * t_begin));
    const auto last = static_cast<std::uint64_t>(std::floor(policy.rate * t_end));
    adverts.reserve(last - first);
    for (std::uint64_t k = first; k < last; ++k)
    {
        Packet p;
        p.kind = PacketKind::RouteAdvert;
        p.src = self;
        p.link = self;
        p.dst = ch;
        p.created_at = t_begin;
        p.from_ch = false;
        p.advertised.push_back(static_cast<NodeId>(node_count + k));
        adverts.push_back(std::move(p));
    }
    return adverts;
}

} // namespace c3h
