#include "c3h/metrics.hpp"

#include <algorithm>

namespace c3h
{

std::optional<double> percentage(std::uint64_t part, std::uint64_t whole)
{
    if (whole == 0)
    {
        return std::nullopt;
    }
    return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::optional<double> mean_session_delay(std::span<const Session> sessions)
{
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const Session& s : sessions)
    {
        if (s.delivered == 0)
        {
            continue;
        }
        sum += s.last_delivery - s.start_time;
        ++n;
    }
    if (n == 0)
    {
        return std::nullopt;
    }
    return sum / static_cast<double>(n);
}

bool scored_for_detection(BehaviorKind kind)
{
    return kind != BehaviorKind::Honest && kind != BehaviorKind::TableOverflow;
}

Metrics collect_metrics(const MetricInputs& in)
{
    Metrics m;
    m.generated = in.generated;
    m.delivered = in.delivered;
    m.dropped = in.dropped;
    m.expired = in.expired;
    m.energy_remaining.assign(in.energy_remaining.begin(), in.energy_remaining.end());

    std::set<NodeId> planted;
    for (const PlantedAttacker& p : in.planted)
    {
        planted.insert(p.node);
        ++m.attackers_planted;
        if (!p.acted || !scored_for_detection(p.kind))
        {
            continue;
        }
        ++m.attackers_acted;
        if (in.expelled != nullptr && in.expelled->contains(p.node))
        {
            ++m.attackers_detected;
        }
    }
    m.detection_rate = percentage(m.attackers_detected, m.attackers_acted);
    if (in.expelled != nullptr)
    {
        m.false_positives = static_cast<std::uint64_t>(
            std::count_if(in.expelled->begin(), in.expelled->end(), [&](NodeId n) { return !planted.contains(n); }));
    }
    m.throughput = percentage(m.delivered, m.generated);
    m.mean_e2e_delay = mean_session_delay(in.sessions);
    return m;
}

} // namespace c3h
