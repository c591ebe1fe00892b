#include "c3h/simulator.hpp"

#include <algorithm>
#include <string>

namespace c3h
{

void Simulator::mark_acted(NodeId node)
{
    for (PlantedAttacker& p : m_planted)
    {
        if (p.node == node && !p.acted)
        {
            p.acted = true;
            m_log.add(m_now, "acted", node, kNoNode, 0, to_string(p.kind));
        }
    }
}

void Simulator::probe_route(NodeId head, const ChPath& path, const Session& session)
{
    // The route request passes every gateway on the new route; a black hole answers it.
    for (const GatewayChain& chain : path.links)
    {
        for (NodeId g : chain)
        {
            const BehaviorPolicy& policy = m_nodes[g].policy;
            if (policy.is_honest() || m_map.is_head(g))
            {
                continue;
            }
            Packet rreq;
            rreq.kind = PacketKind::Rreq;
            rreq.src = head;
            rreq.link = head;
            rreq.subject = session.dst;
            rreq.session = session.id;
            rreq.from_ch = true;
            const Action action = intercept(policy, rreq, InterceptContext{g, m_config.seed, m_now});
            if (action.kind == ActionKind::Fabricate && action.fabricated)
            {
                // Heads only take route replies from other heads.
                const NodeId own = m_map.is_clustered(g) ? m_map.head_of(g) : kNoNode;
                ++m_audit.fake_rreps_rejected;
                m_log.add(m_now, "rrep_rejected", g, own, 0, std::to_string(session.id));
            }
            else if (action.kind == ActionKind::Tunnel)
            {
                m_log.add(m_now, "rreq_tunnel", g, action.peer, 0, std::to_string(session.id));
            }
        }
    }
}

void Simulator::spoof_hellos()
{
    for (const PlantedAttacker& p : m_planted)
    {
        if (p.kind != BehaviorKind::Spoof)
        {
            continue;
        }
        const NodeId n = p.node;
        const BehaviorPolicy& policy = m_nodes[n].policy;
        if (!active(n) || policy.victim == kNoNode || policy.victim == n || policy.victim >= m_n)
        {
            continue;
        }
        Packet hello;
        hello.kind = PacketKind::Hello;
        hello.src = n;
        hello.link = n;
        hello.payload_size = m_config.hello_size;
        const Packet spoofed = spoof_identity(policy, hello);
        charge_tx(n, m_config.hello_size);

        // Neighbors file the beacon under the victim's name.
        for (NodeId b = 0; b < m_n; ++b)
        {
            if (!m_link[static_cast<std::size_t>(n) * m_n + b])
            {
                continue;
            }
            if (HelloHistory* h = history(b, spoofed.src))
            {
                record_hello_in_place(*h, distance(m_nodes[n].motion.position, m_nodes[b].motion.position));
            }
        }

        if (!m_map.is_clustered(n) || m_map.is_head(n))
        {
            continue;
        }
        const NodeId head = m_map.head_of(n);
        mark_acted(n);
        ++m_audit.spoofed_hellos;
        m_log.add(m_now, "spoof_hello", n, spoofed.src);
        if (!detection_on())
        {
            continue;
        }
        try
        {
            const Verdict v = verify_identity(m_registries[head], spoofed.link, spoofed.src);
            if (v.kind == VerdictKind::Malicious)
            {
                m_log.add(m_now, "verdict", v.target, head, 0, "malicious impersonation");
                punish(head, v.target, Offence::Impersonation);
            }
        }
        catch (const Error&)
        {
        }
    }
}

void Simulator::on_slander(std::uint64_t tick)
{
    for (const PlantedAttacker& p : m_planted)
    {
        const NodeId n = p.node;
        if (p.kind != BehaviorKind::Slander || !active(n) || !m_map.is_clustered(n) || m_map.is_head(n))
        {
            continue;
        }
        const NodeId head = m_map.head_of(n);
        for (const Packet& report : emit_slander(m_nodes[n].policy, n, head, m_now))
        {
            charge_tx(n, m_config.control_size);
            charge_rx(head, m_config.control_size);
            mark_acted(n);
            ++m_audit.slander_reports;
            m_log.add(m_now, "slander", n, report.subject);
            if (!detection_on())
            {
                continue;
            }
            if (handle_trust_report(m_monitors[head], head, report, m_config.detection.thresholds.nuisance_limit) ==
                ReportOutcome::ReporterSelfish)
            {
                m_log.add(m_now, "verdict", n, head, 0, "selfish slander");
                penalize_selfish(head, n, Offence::Slander);
                if (m_expelled.contains(n))
                {
                    break;
                }
            }
        }
        settle(n);
        settle(head);
    }
    const double next = static_cast<double>(tick + 1) * m_config.slander_interval;
    if (next <= m_config.sim_duration)
    {
        schedule(next, EventKind::Slander, kNoNode, tick + 1);
    }
}

void Simulator::on_flood(std::uint64_t tick)
{
    const double t_begin = static_cast<double>(tick - 1) * m_config.flood_interval;
    const double t_end = static_cast<double>(tick) * m_config.flood_interval;
    for (const PlantedAttacker& p : m_planted)
    {
        const NodeId n = p.node;
        if (p.kind != BehaviorKind::TableOverflow || !active(n) || !m_map.is_clustered(n) || m_map.is_head(n))
        {
            continue;
        }
        const NodeId head = m_map.head_of(n);
        const auto adverts = emit_table_flood(m_nodes[n].policy, n, head, t_begin, t_end, m_n);
        if (adverts.empty())
        {
            continue;
        }
        mark_acted(n);
        RoutingTable& table = m_tables[head];
        std::uint64_t accepted = 0;
        for (const Packet& advert : adverts)
        {
            charge_tx(n, m_config.control_size);
            charge_rx(head, m_config.control_size);
            ++m_audit.adverts_received;
            if (handle_route_advert(table, head, advert, m_map))
            {
                ++accepted;
            }
        }
        m_audit.adverts_accepted += accepted;
        m_log.add(m_now, "advert_flood", n, head, 0, std::to_string(adverts.size()) + " " + std::to_string(accepted));
        settle(n);
        settle(head);
    }
    const double next = static_cast<double>(tick + 1) * m_config.flood_interval;
    if (next <= m_config.sim_duration)
    {
        schedule(next, EventKind::Flood, kNoNode, tick + 1);
    }
}

void Simulator::judge(NodeId ch, NodeId gateway)
{
    if (!detection_on() || m_expelled.contains(gateway))
    {
        return;
    }
    auto& ledger = m_surveillance[ch];
    Verdict v;
    try
    {
        v = judge_forwarding(ledger, gateway, m_config.detection.thresholds);
    }
    catch (const Error&)
    {
        return;
    }
    switch (v.kind)
    {
    case VerdictKind::Malicious:
        m_log.add(m_now, "verdict", gateway, ch, 0, "malicious dropping");
        punish(ch, gateway, v.offence);
        break;
    case VerdictKind::Selfish:
        m_log.add(m_now, "verdict", gateway, ch, 0, "selfish dropping");
        ledger.consume(gateway, v.evidence);
        penalize_selfish(ch, gateway, v.offence);
        break;
    case VerdictKind::Inconclusive:
    case VerdictKind::Normal:
        break;
    }
}

void Simulator::punish(NodeId ch, NodeId target, Offence offence)
{
    if (m_expelled.contains(target))
    {
        return;
    }
    change_trust(target, on_malicious(record(target)), "malicious");
    expel(ch, target, offence);
}

void Simulator::penalize_selfish(NodeId ch, NodeId target, Offence offence)
{
    if (m_expelled.contains(target))
    {
        return;
    }
    change_trust(target, on_selfish(record(target)), "selfish");
    if (is_blacklisted(record(target), m_config.detection.blacklist_limit))
    {
        expel(ch, target, offence);
    }
}

void Simulator::expel(NodeId ch, NodeId target, Offence offence)
{
    if (!m_expelled.insert(target).second)
    {
        return;
    }
    const BlacklistEntry entry{target, offence, m_now, ch};
    m_log.add(m_now, "expel", target, ch, 0, to_string(offence));
    m_blacklists[ch].insert(entry);
    flood_blacklist(ch, entry, kNoNode);
    for (const MembershipEvent& e : m_map.remove(target))
    {
        m_log.add(m_now, "leave", e.node, e.ch, 0, "expelled");
    }
    refresh_topology();
}

void Simulator::flood_blacklist(NodeId from, const BlacklistEntry& entry, NodeId except)
{
    for (const auto& [pair, chain] : m_map.gateway_links())
    {
        if (pair.low != from && pair.high != from)
        {
            continue;
        }
        const NodeId to = pair.low == from ? pair.high : pair.low;
        if (to == except)
        {
            continue;
        }
        const std::uint64_t msg = m_next_msg++;
        m_blacklist_msgs.emplace(msg, BlacklistMessage{entry, from, to});
        const double delay = hop_time(m_config.control_size) * static_cast<double>(chain.size() + 1);
        schedule(m_now + delay, EventKind::BlacklistArrival, to, msg);
    }
}

void Simulator::on_blacklist_arrival(std::uint64_t msg)
{
    auto node = m_blacklist_msgs.extract(msg);
    if (node.empty())
    {
        return;
    }
    const BlacklistMessage& m = node.mapped();
    if (m_blacklists[m.to].insert(m.entry))
    {
        m_log.add(m_now, "blacklist", m.entry.node, m.to, 0, std::to_string(m.from));
        if (m_map.is_head(m.to))
        {
            flood_blacklist(m.to, m.entry, m.from);
        }
    }
}

void Simulator::sync_blacklists()
{
    for (const auto& [pair, chain] : m_map.gateway_links())
    {
        Blacklist& a = m_blacklists[pair.low];
        Blacklist& b = m_blacklists[pair.high];
        for (const auto& [node, entry] : a.entries())
        {
            if (b.insert(entry))
            {
                m_log.add(m_now, "blacklist", node, pair.high, 0, std::to_string(pair.low));
            }
        }
        for (const auto& [node, entry] : b.entries())
        {
            if (a.insert(entry))
            {
                m_log.add(m_now, "blacklist", node, pair.low, 0, std::to_string(pair.high));
            }
        }
    }
}

} // namespace c3h
