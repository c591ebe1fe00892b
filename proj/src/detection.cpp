#include "c3h/detection.hpp"

namespace c3h
{

bool SurveillanceLedger::open(NodeId gateway, PacketId packet, double at, double res_eng, double rel_mobility)
{
    SurveillanceEntry entry;
    entry.packet = packet;
    entry.handed_over_at = at;
    entry.res_eng = res_eng;
    entry.rel_mobility = rel_mobility;
    return m_entries[gateway].emplace(packet, entry).second;
}

bool SurveillanceLedger::resolve(NodeId gateway, PacketId packet, AckStatus status, LinkContext context)
{
    auto g = m_entries.find(gateway);
    if (g == m_entries.end())
    {
        return false;
    }
    auto it = g->second.find(packet);
    if (it == g->second.end() || it->second.status != AckStatus::Pending || status == AckStatus::Pending)
    {
        return false;
    }
    it->second.status = status;
    it->second.context = context;
    return true;
}

const SurveillanceEntry* SurveillanceLedger::find(NodeId gateway, PacketId packet) const
{
    auto g = m_entries.find(gateway);
    if (g == m_entries.end())
    {
        return nullptr;
    }
    auto it = g->second.find(packet);
    return it == g->second.end() ? nullptr : &it->second;
}

std::vector<SurveillanceEntry> SurveillanceLedger::entries(NodeId gateway) const
{
    std::vector<SurveillanceEntry> out;
    auto g = m_entries.find(gateway);
    if (g != m_entries.end())
    {
        for (const auto& [id, entry] : g->second)
        {
            out.push_back(entry);
        }
    }
    return out;
}

std::vector<NodeId> SurveillanceLedger::pending(PacketId packet) const
{
    std::vector<NodeId> out;
    for (const auto& [gateway, byPacket] : m_entries)
    {
        auto it = byPacket.find(packet);
        if (it != byPacket.end() && it->second.status == AckStatus::Pending)
        {
            out.push_back(gateway);
        }
    }
    return out;
}

void SurveillanceLedger::consume(NodeId gateway, const std::vector<PacketId>& packets)
{
    auto g = m_entries.find(gateway);
    if (g == m_entries.end())
    {
        return;
    }
    for (PacketId id : packets)
    {
        auto it = g->second.find(id);
        if (it != g->second.end())
        {
            it->second.consumed = true;
        }
    }
}

std::size_t SurveillanceLedger::size() const
{
    std::size_t n = 0;
    for (const auto& [gateway, byPacket] : m_entries)
    {
        n += byPacket.size();
    }
    return n;
}

std::string_view to_string(VerdictKind kind)
{
    switch (kind)
    {
    case VerdictKind::Normal:
        return "normal";
    case VerdictKind::Selfish:
        return "selfish";
    case VerdictKind::Malicious:
        return "malicious";
    case VerdictKind::Inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

Verdict judge_forwarding(const SurveillanceLedger& ledger, NodeId gateway, const DetectionThresholds& thresholds)
{
    std::vector<PacketId> culpable;
    std::vector<PacketId> selfish;
    std::size_t resolved = 0;
    std::size_t timeouts = 0;
    for (const SurveillanceEntry& e : ledger.entries(gateway))
    {
        if (e.status == AckStatus::Pending || e.consumed)
        {
            continue;
        }
        ++resolved;
        if (e.status != AckStatus::Timeout)
        {
            continue;
        }
        ++timeouts;
        // Exhaustion, fast relative motion or a broken link all explain silence.
        const bool steady = e.context == LinkContext::LinkOk && e.rel_mobility <= thresholds.velocity_low;
        if (steady && e.res_eng >= thresholds.energy_high)
        {
            culpable.push_back(e.packet);
        }
        else if (steady && e.res_eng >= thresholds.energy_floor)
        {
            selfish.push_back(e.packet);
        }
    }
    if (resolved == 0)
    {
        throw Error(ErrorCode::NoEvidence, "no resolved surveillance entries for gateway");
    }

    Verdict verdict;
    verdict.target = gateway;
    if (culpable.size() >= thresholds.accusation_threshold)
    {
        verdict.kind = VerdictKind::Malicious;
        verdict.offence = Offence::DataDropping;
        verdict.evidence = std::move(culpable);
    }
    else if (selfish.size() >= thresholds.accusation_threshold)
    {
        verdict.kind = VerdictKind::Selfish;
        verdict.offence = Offence::Selfishness;
        verdict.evidence = std::move(selfish);
    }
    else if (timeouts > 0)
    {
        verdict.kind = VerdictKind::Inconclusive;
    }
    return verdict;
}

Verdict verify_identity(const LinkRegistry& links, NodeId link, NodeId claimed)
{
    const NodeId* owner = links.owner(link);
    if (owner == nullptr)
    {
        throw Error(ErrorCode::UnknownLink, "frame on a link not registered at this head");
    }
    Verdict verdict;
    verdict.target = *owner;
    if (*owner != claimed)
    {
        verdict.kind = VerdictKind::Malicious;
        verdict.offence = Offence::Impersonation;
    }
    return verdict;
}

std::size_t SlanderMonitor::count(NodeId reporter, NodeId target) const
{
    auto it = m_counts.find({reporter, target});
    return it == m_counts.end() ? 0 : it->second;
}

std::size_t SlanderMonitor::bump(NodeId reporter, NodeId target)
{
    return ++m_counts[{reporter, target}];
}

void SlanderMonitor::reset(NodeId reporter, NodeId target)
{
    m_counts.erase({reporter, target});
}

ReportOutcome handle_trust_report(SlanderMonitor& monitor, NodeId ch, const Packet& report, std::size_t nuisance_limit)
{
    if (report.kind != PacketKind::TrustReport || report.subject == kNoNode)
    {
        return ReportOutcome::Discarded;
    }
    const NodeId reporter = report.link == kNoNode ? report.src : report.link;
    if (report.subject == ch)
    {
        return ReportOutcome::Discarded;
    }
    if (monitor.bump(reporter, report.subject) > nuisance_limit)
    {
        monitor.reset(reporter, report.subject);
        return ReportOutcome::ReporterSelfish;
    }
    return ReportOutcome::Discarded;
}

bool handle_route_advert(RoutingTable& table, NodeId self, const Packet& advert, const ClusterMap& map)
{
    if (advert.kind != PacketKind::RouteAdvert || !advert.from_ch || advert.advertised.empty())
    {
        return false;
    }
    const NodeId sender = advert.link == kNoNode ? advert.src : advert.link;
    if (sender == self || sender >= map.node_count() || !map.is_head(sender))
    {
        return false;
    }
    const GatewayChain chain = map.gateways_between(self, sender);
    if (chain.empty())
    {
        return false;
    }
    table.merge_from_head(self, sender, chain, advert.advertised);
    return true;
}

} // namespace c3h
