#pragma once

#include "c3h/adversary.hpp"
#include "c3h/protocol.hpp"
#include "c3h/types.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace c3h
{

struct Metrics
{
    /// Absent when no planted attacker ever acted.
    std::optional<double> detection_rate;
    std::uint64_t false_positives = 0;
    /// Absent when no DATA packet was generated.
    std::optional<double> throughput;
    /// Absent when no session delivered anything.
    std::optional<double> mean_e2e_delay;
    std::vector<double> energy_remaining;

    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t expired = 0;
    std::uint64_t attackers_planted = 0;
    std::uint64_t attackers_acted = 0;
    std::uint64_t attackers_detected = 0;
};

/// Ground truth about one planted attacker.
struct PlantedAttacker
{
    NodeId node = kNoNode;
    BehaviorKind kind = BehaviorKind::Honest;
    bool acted = false;
};

struct MetricInputs
{
    std::span<const PlantedAttacker> planted;
    const std::set<NodeId>* expelled = nullptr;
    std::span<const Session> sessions;
    std::span<const double> energy_remaining;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t expired = 0;
};

/// 100 * part / whole, absent for whole = 0.
std::optional<double> percentage(std::uint64_t part, std::uint64_t whole);

/// Mean of (last delivery - start) over sessions that delivered at least once, in session order.
std::optional<double> mean_session_delay(std::span<const Session> sessions);

/// Table overflow cannot succeed against head-only routing, so it is not an
/// activity detection is scored on.
bool scored_for_detection(BehaviorKind kind);

Metrics collect_metrics(const MetricInputs& in);

} // namespace c3h
