#include "c3h/config.hpp"

#include <cmath>
#include <set>
#include <string>

namespace c3h
{

namespace
{

void require(bool ok, const char* field, const char* what)
{
    if (!ok)
    {
        throw ConfigError(field, what);
    }
}

void require_positive(double v, const char* field)
{
    require(std::isfinite(v) && v > 0.0, field, "must be a positive number");
}

void require_interval(const Interval& r, const char* field, bool allow_zero = false)
{
    const bool lo_ok = std::isfinite(r.lo) && (allow_zero ? r.lo >= 0.0 : r.lo > 0.0);
    require(lo_ok && std::isfinite(r.hi) && r.lo <= r.hi, field, "must be an ordered pair of positive numbers");
}

} // namespace

void SimConfig::validate() const
{
    require_positive(area.width, "area.width");
    require_positive(area.height, "area.height");
    require(node_count >= 2, "node_count", "at least two nodes are required");
    require(node_count < 1'000'000, "node_count", "too many nodes");
    require_positive(sim_duration, "sim_duration");
    require(packet_size > 0, "packet_size", "must be positive");
    require(hello_size > 0, "hello.size", "must be positive");
    require(control_size > 0, "control_size", "must be positive");
    require_positive(channel_capacity, "channel_capacity");
    require_positive(hello_interval, "hello.interval");
    require_positive(mobility_step, "mobility.step");
    require_positive(topology_interval, "topology_interval");
    require(std::isfinite(waypoint.v_min) && waypoint.v_min >= 0.0 && waypoint.v_min <= waypoint.v_max,
            "mobility.speed", "must be an ordered non-negative pair");
    require(std::isfinite(waypoint.pause) && waypoint.pause >= 0.0, "mobility.pause", "must be non-negative");

    RadioParams probe = radio;
    probe.trans_power = tx_power.lo > 0.0 ? tx_power.lo : 1.0;
    probe.validate();
    require_interval(tx_power, "power.tx");
    require_interval(rx_power, "power.rx", true);
    require_interval(initial_energy, "energy");

    require_positive(cbr_interval, "traffic.cbr_interval");
    require(std::isfinite(traffic_start) && traffic_start >= 0.0, "traffic.start", "must be non-negative");
    require(source_fraction > 0.0 && source_fraction <= 1.0, "traffic.source_fraction", "must be in (0, 1]");
    require(packets_per_session > 0, "traffic.packets_per_session", "must be positive");
    for (const Flow& f : flows)
    {
        require(f.src < node_count && f.dst < node_count, "flows", "node id out of range");
        require(f.src != f.dst, "flows", "source and destination must differ");
        require(std::isfinite(f.start) && f.start >= 0.0, "flows.start", "must be non-negative");
    }

    std::set<NodeId> placed;
    for (const Placement& p : placements)
    {
        require(p.node < node_count, "adversary.placements.node", "node id out of range");
        require(placed.insert(p.node).second, "adversary.placements.node", "a node has exactly one policy");
        if (p.policy.kind == BehaviorKind::Wormhole)
        {
            require(p.policy.peer < node_count && p.policy.peer != p.node, "adversary.placements.peer",
                    "wormhole peer must be another node");
        }
        if (p.policy.kind == BehaviorKind::Spoof)
        {
            require(p.policy.victim < node_count, "adversary.placements.victim", "node id out of range");
        }
        for (NodeId t : p.policy.targets)
        {
            require(t < node_count, "adversary.placements.targets", "node id out of range");
        }
        require(p.policy.drop_probability >= 0.0 && p.policy.drop_probability <= 1.0,
                "adversary.placements.drop_probability", "must be in [0, 1]");
        require(std::isfinite(p.policy.rate) && p.policy.rate >= 0.0, "adversary.placements.rate",
                "must be non-negative");
    }
    for (const Placement& p : placements)
    {
        if (p.policy.kind == BehaviorKind::Wormhole)
        {
            bool mirrored = false;
            for (const Placement& q : placements)
            {
                mirrored |= q.node == p.policy.peer && q.policy.kind == BehaviorKind::Wormhole && q.policy.peer == p.node;
            }
            require(mirrored, "adversary.placements.peer", "wormhole peers must reference each other");
        }
    }
    require(malicious_fraction >= 0.0 && malicious_fraction <= 1.0, "malicious_fraction", "must be in [0, 1]");
    for (BehaviorKind k : attack_kinds)
    {
        require(k != BehaviorKind::Honest, "attack_kinds", "honest is not an attack");
    }
    require(malicious_fraction == 0.0 || !attack_kinds.empty(), "attack_kinds",
            "required when malicious_fraction is positive");
    require(grey_drop_probability >= 0.0 && grey_drop_probability <= 1.0, "adversary.grey_drop_probability",
            "must be in [0, 1]");
    require(std::isfinite(flood_rate) && flood_rate >= 0.0, "adversary.flood_rate", "must be non-negative");
    require_positive(flood_interval, "adversary.flood_interval");
    require_positive(slander_interval, "adversary.slander_interval");

    const DetectionThresholds& th = detection.thresholds;
    require(th.accusation_threshold >= 1, "detection.accusation_threshold", "must be at least 1");
    require(th.energy_high >= 0.0 && th.energy_high <= 1.0, "detection.energy_high", "must be in [0, 1]");
    require(th.energy_floor >= 0.0 && th.energy_floor <= th.energy_high, "detection.energy_floor",
            "must be in [0, energy_high]");
    require(std::isfinite(th.velocity_low) && th.velocity_low >= 0.0, "detection.velocity_low",
            "must be non-negative");
    require(th.nuisance_limit >= 1, "detection.nuisance_limit", "must be at least 1");
    require(detection.blacklist_limit >= 0.0 && detection.blacklist_limit < 1.0, "detection.blacklist_limit",
            "must be in [0, 1)");
    require_positive(detection.ack_timeout_factor, "detection.ack_timeout_factor");

    try
    {
        weights.validate();
    }
    catch (const Error& e)
    {
        throw ConfigError("election.weights", e.what());
    }

    for (const NodeOverride& o : overrides)
    {
        require(o.node < node_count, "nodes.node", "node id out of range");
        if (o.position)
        {
            require(area.contains(*o.position), "nodes.position", "outside the area");
        }
        if (o.energy)
        {
            require_positive(*o.energy, "nodes.energy");
        }
        if (o.tx_power)
        {
            require_positive(*o.tx_power, "nodes.tx_power");
        }
        if (o.rx_power)
        {
            require(std::isfinite(*o.rx_power) && *o.rx_power >= 0.0, "nodes.rx_power", "must be non-negative");
        }
    }
    for (const ForcedDepletion& d : depletions)
    {
        require(d.node < node_count, "depletions.node", "node id out of range");
        require(std::isfinite(d.time) && d.time >= 0.0, "depletions.time", "must be non-negative");
    }
}

} // namespace c3h
