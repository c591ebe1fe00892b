#pragma once

#include "c3h/adversary.hpp"
#include "c3h/clustering.hpp"
#include "c3h/detection.hpp"
#include "c3h/radio_mobility.hpp"
#include "c3h/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace c3h
{

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
};

struct DetectionConfig
{
    bool enabled = true;
    DetectionThresholds thresholds;
    double blacklist_limit = 0.1;
    double ack_timeout_factor = 4.0;
};

struct Placement
{
    NodeId node = kNoNode;
    BehaviorPolicy policy;
};

/// Fixed per-node values replacing the random draws.
struct NodeOverride
{
    NodeId node = kNoNode;
    std::optional<Position> position;
    std::optional<double> energy;
    std::optional<double> tx_power;
    std::optional<double> rx_power;
};

/// CBR source. `stop` < 0 means until the end of the run.
struct Flow
{
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    double start = 1.0;
    double stop = -1.0;
};

struct ForcedDepletion
{
    NodeId node = kNoNode;
    double time = 0.0;
};

struct SimConfig
{
    Area area;
    std::size_t node_count = 20;
    std::uint64_t seed = 1;
    double sim_duration = 100.0;

    std::uint32_t packet_size = 512;
    std::uint32_t hello_size = 32;
    std::uint32_t control_size = 32;
    double channel_capacity = 2e6;

    double hello_interval = 0.01;
    double mobility_step = 0.01;
    double topology_interval = 0.1;
    bool mobile = true;
    WaypointParams waypoint;

    /// trans_power here is only a template; per-node powers come from tx_power.
    RadioParams radio;
    Interval tx_power{300.0, 600.0};
    Interval rx_power{50.0, 300.0};
    Interval initial_energy{5.0, 10.0};

    double cbr_interval = 0.25;
    double traffic_start = 1.0;
    double source_fraction = 0.1;
    std::uint64_t packets_per_session = 20;
    /// When non-empty, replaces the randomly drawn sources.
    std::vector<Flow> flows;

    std::vector<Placement> placements;
    double malicious_fraction = 0.0;
    std::vector<BehaviorKind> attack_kinds{BehaviorKind::BlackHole};
    double grey_drop_probability = 1.0;
    double flood_rate = 100.0;
    double flood_interval = 0.1;
    double slander_interval = 1.0;

    DetectionConfig detection;
    ElectionWeights weights;

    std::vector<NodeOverride> overrides;
    std::vector<ForcedDepletion> depletions;

    bool keep_event_log = false;

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

} // namespace c3h
