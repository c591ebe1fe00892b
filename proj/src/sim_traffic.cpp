#include "c3h/simulator.hpp"

#include <algorithm>
#include <string>

namespace c3h
{

namespace
{

std::string heads_text(const ChPath& path)
{
    std::string out;
    for (std::size_t i = 0; i < path.heads.size(); ++i)
    {
        if (i > 0)
        {
            out += '>';
            for (NodeId g : path.links[i - 1])
            {
                out += std::to_string(g);
                out += '>';
            }
        }
        out += std::to_string(path.heads[i]);
    }
    return out;
}

std::vector<TraceEntry> as_trace(const std::vector<PlannedHop>& plan)
{
    std::vector<TraceEntry> trace;
    trace.reserve(plan.size());
    for (const PlannedHop& h : plan)
    {
        trace.push_back({h.node, h.role});
    }
    return trace;
}

} // namespace

void Simulator::on_cbr(std::size_t index)
{
    const Flow& flow = m_flow_list[index];
    FlowState& fs = m_flows[index];
    if (flow.stop >= 0.0 && m_now > flow.stop)
    {
        return;
    }

    if (!fs.session || m_sessions[*fs.session].packets_sent >= m_sessions[*fs.session].planned_packets)
    {
        Session s;
        s.id = m_sessions.size() + 1;
        s.src = flow.src;
        s.dst = flow.dst;
        s.planned_packets = m_config.packets_per_session;
        s.start_time = m_now;
        fs.session = m_sessions.size();
        m_sessions.push_back(s);
        m_session_state.emplace_back();
        m_log.add(m_now, "session", s.src, s.dst, 0, std::to_string(s.id));

        const NodeId src = flow.src;
        const NodeId head = !m_nodes[src].alive || !m_map.is_clustered(src) ? kNoNode : m_map.head_of(src);
        if (head == kNoNode)
        {
            m_sessions.back().rejected = true;
            m_session_state.back().decided = true;
            m_log.add(m_now, "admission", src, kNoNode, 0, std::to_string(s.id) + " " + std::string(to_string(Admission::NotMember)));
        }
        else
        {
            const double trust = head == src ? 1.0 : trust_value(record(src));
            m_requests[head].push(s.id, src, trust);
            if (m_admission_pending.insert(head).second)
            {
                schedule(m_now, EventKind::Admission, head);
            }
        }
    }

    Session& s = m_sessions[*fs.session];
    SessionState& state = m_session_state[*fs.session];
    Packet p;
    p.id = m_next_packet++;
    p.kind = PacketKind::Data;
    p.src = s.src;
    p.dst = s.dst;
    p.link = s.src;
    p.session = s.id;
    p.payload_size = m_config.packet_size;
    p.created_at = m_now;
    ++m_traffic.generated;
    ++s.packets_sent;
    m_log.add(m_now, "generate", s.src, s.dst, p.id, std::to_string(s.id));

    if (!state.decided)
    {
        state.waiting.push_back(std::move(p));
    }
    else if (s.rejected)
    {
        drop_unlaunched(s, p, "rejected");
    }
    else
    {
        launch(s, std::move(p));
    }

    ++fs.tick;
    const double next = flow.start + static_cast<double>(fs.tick) * m_config.cbr_interval;
    if (next <= m_config.sim_duration && (flow.stop < 0.0 || next <= flow.stop))
    {
        schedule(next, EventKind::Cbr, kNoNode, index);
    }
}

void Simulator::on_admission(NodeId head)
{
    m_admission_pending.erase(head);
    RequestQueue& queue = m_requests[head];
    while (!queue.empty())
    {
        const RequestQueue::Request req = queue.pop();
        const std::size_t index = req.session - 1;
        Session& s = m_sessions[index];
        SessionState& state = m_session_state[index];

        AdmissionDecision d;
        if (!m_nodes[s.src].alive || !m_map.is_head(head))
        {
            d.outcome = Admission::NotMember;
        }
        else if (s.src == head)
        {
            d.requester_trust = 1.0;
        }
        else
        {
            d = originate_request(m_registries[head], m_ledgers[head], m_blacklists[head], s.src, s.src);
        }
        m_log.add(m_now, "admission", s.src, head, 0, std::to_string(s.id) + " " + std::string(to_string(d.outcome)));

        state.decided = true;
        state.trust = d.requester_trust;
        s.rejected = d.outcome != Admission::Accepted;
        if (!s.rejected)
        {
            s.admitted_by = head;
        }
        auto waiting = std::move(state.waiting);
        state.waiting.clear();
        for (Packet& p : waiting)
        {
            if (s.rejected)
            {
                drop_unlaunched(s, p, "rejected");
            }
            else
            {
                launch(s, std::move(p));
            }
        }
    }
}

void Simulator::launch(Session& s, Packet packet)
{
    const NodeId src = s.src;
    if (!active(src))
    {
        drop_unlaunched(s, packet, "source_down");
        return;
    }
    if (!m_map.is_clustered(src))
    {
        drop_unlaunched(s, packet, "unclustered");
        return;
    }
    const NodeId head = m_map.head_of(src);
    ChPath path;
    try
    {
        path = discover_route(m_map, head, s.dst, m_blacklists[head]);
    }
    catch (const Error&)
    {
        drop_unlaunched(s, packet, "no_route");
        return;
    }
    if (path != s.ch_path)
    {
        s.ch_path = path;
        m_log.add(m_now, "route", head, s.dst, 0, heads_text(path));
        probe_route(head, path, s);
    }

    Flight flight;
    flight.session = s.id;
    flight.plan = hop_plan(path, src, s.dst);
    flight.rank = m_session_state[s.id - 1].trust;

    const auto planned = as_trace(flight.plan);
    ++m_audit.plans_checked;
    if (!valid_path_shape(planned) || has_unsupervised_pair(planned))
    {
        ++m_audit.plan_shape_violations;
    }
    if (!valid_route_shape(path))
    {
        ++m_audit.route_shape_violations;
    }

    const NodeId first = flight.plan[0].node;
    const NodeId next = flight.plan[1].node;
    const PacketId id = packet.id;
    const double rank = flight.rank;
    m_flights.emplace(id, std::move(flight));
    enqueue(first, Frame{std::move(packet), next, false}, rank);
}

void Simulator::enqueue(NodeId at, Frame frame, double rank)
{
    NodeState& node = m_nodes[at];
    if (!node.alive)
    {
        fail_frame(frame, at, "sender_down", true);
        return;
    }
    const int cls = is_control(frame.packet.kind) ? 0 : 1;
    node.queue.emplace(QueueKey{cls, -rank, m_queue_seq++}, std::move(frame));
    if (!node.busy)
    {
        start_tx(at);
    }
}

void Simulator::start_tx(NodeId n)
{
    NodeState& node = m_nodes[n];
    while (!node.busy && !node.queue.empty())
    {
        Frame frame = std::move(node.queue.begin()->second);
        node.queue.erase(node.queue.begin());

        if (!frame.hidden)
        {
            HopRole role = role_of(n);
            if (frame.packet.kind == PacketKind::Data)
            {
                auto it = m_flights.find(frame.packet.id);
                if (it != m_flights.end())
                {
                    const PlannedHop& me = it->second.plan[it->second.pos];
                    // A forwarder that no longer holds its planned role is outside supervision.
                    const bool supervised = me.role == HopRole::Member ||
                                            (me.role == HopRole::ClusterHead && m_map.is_head(n)) ||
                                            (me.role == HopRole::Gateway && m_map.is_gateway(n) && !m_map.is_head(n));
                    if (me.node != n || !supervised)
                    {
                        drop(frame.packet.id, n, "role_lost", true);
                        continue;
                    }
                    role = me.role;
                }
            }
            frame.packet.path_trace.push_back({n, role});
        }
        frame.packet.link = n;

        const std::uint32_t bytes = frame.packet.payload_size;
        charge_tx(n, bytes);
        node.busy = true;
        node.on_air = std::move(frame);
        schedule(m_now + hop_time(bytes), EventKind::TxDone, n);
        settle(n);
    }
}

void Simulator::on_tx_done(NodeId n)
{
    NodeState& node = m_nodes[n];
    node.busy = false;
    Frame frame = std::move(node.on_air);
    const NodeId to = frame.to;

    if (!node.alive || to >= m_n || !linked(n, to))
    {
        fail_frame(frame, n, "link_break", true);
    }
    else if (m_expelled.contains(n))
    {
        fail_frame(frame, n, "refused", false);
    }
    else
    {
        charge_rx(to, frame.packet.payload_size);
        frame.packet.hops.push_back({n, to, false});
        if (m_nodes[to].battery.depleted())
        {
            settle(to);
            fail_frame(frame, n, "receiver_down", true);
        }
        else if (frame.packet.kind == PacketKind::Data)
        {
            receive_data(to, std::move(frame.packet));
        }
        else if (frame.packet.kind == PacketKind::Ack)
        {
            receive_ack(to, std::move(frame.packet));
        }
    }
    if (m_nodes[n].alive)
    {
        start_tx(n);
    }
}

void Simulator::fail_frame(const Frame& frame, NodeId at, std::string_view reason, bool broken)
{
    if (frame.packet.kind == PacketKind::Data)
    {
        drop(frame.packet.id, at, reason, broken);
    }
    else if (frame.packet.kind == PacketKind::Ack)
    {
        m_log.add(m_now, "ack_lost", at, frame.to, frame.packet.ref, reason);
        if (broken)
        {
            m_broken.insert(frame.packet.ref);
        }
        m_flights.erase(frame.packet.id);
    }
}

void Simulator::receive_data(NodeId at, Packet packet)
{
    auto it = m_flights.find(packet.id);
    if (it == m_flights.end())
    {
        return;
    }
    Flight& fl = it->second;
    const std::size_t idx = fl.pos + 1;
    const NodeId expected = fl.plan[fl.pos].node;
    const bool in_order = idx < fl.plan.size() && fl.plan[idx].node == at && packet.link == expected &&
                          !packet.path_trace.empty() && packet.path_trace.back().node == expected;
    if (!in_order)
    {
        // Only the planned upstream hop may hand over a packet; anything else
        // arrived around the supervising heads.
        ++m_audit.unsupervised_rejections;
        if (detection_on() && m_map.is_head(at))
        {
            const NodeId claimed = packet.path_trace.empty() ? packet.src : packet.path_trace.back().node;
            try
            {
                const Verdict v = verify_identity(m_registries[at], packet.link, claimed);
                if (v.kind == VerdictKind::Malicious)
                {
                    m_log.add(m_now, "verdict", v.target, at, packet.id, "malicious tunneling");
                    punish(at, v.target, Offence::Tunneling);
                }
            }
            catch (const Error&)
            {
            }
        }
        drop(packet.id, at, "unsupervised", false);
        return;
    }
    fl.pos = idx;
    const PlannedHop& here = fl.plan[idx];
    const PlannedHop& prev = fl.plan[idx - 1];

    if (detection_on() && here.role == HopRole::Gateway)
    {
        if (prev.role == HopRole::ClusterHead)
        {
            open_surveillance(prev.node, at, packet.id, fl.plan.size() - 1);
        }
        else if (prev.role == HopRole::Gateway && idx >= 2 && linked(fl.plan[idx - 2].node, prev.node))
        {
            // The upstream head overhears its gateway passing the packet on.
            const NodeId up = fl.plan[idx - 2].node;
            auto& ledger = m_surveillance[up];
            if (ledger.resolve(prev.node, packet.id, AckStatus::Acked))
            {
                m_log.add(m_now, "overheard", up, prev.node, packet.id);
                judge(up, prev.node);
            }
            open_surveillance(up, at, packet.id, 0);
        }
    }

    if (here.role == HopRole::ClusterHead && prev.role == HopRole::Gateway)
    {
        send_ack(at, packet, fl, idx);
    }
    if (idx + 1 == fl.plan.size())
    {
        deliver(at, packet);
        return;
    }

    if (here.role != HopRole::ClusterHead && !m_nodes[at].policy.is_honest() && !m_map.is_head(at))
    {
        const Action action = intercept(m_nodes[at].policy, packet, InterceptContext{at, m_config.seed, m_now});
        if (action.kind == ActionKind::Drop)
        {
            mark_acted(at);
            drop(packet.id, at, "attack", false);
            return;
        }
        if (action.kind == ActionKind::Tunnel)
        {
            mark_acted(at);
            ++m_audit.tunnel_actions;
            m_log.add(m_now, "tunnel", at, action.peer, packet.id);
            const std::uint64_t msg = m_next_msg++;
            packet.hops.push_back({at, action.peer, true});
            m_tunnels.emplace(msg, Frame{std::move(packet), action.peer, true});
            schedule(m_now + hop_time(m_config.packet_size), EventKind::Tunnel, at, msg);
            return;
        }
    }
    const NodeId next = fl.plan[idx + 1].node;
    const double rank = fl.rank;
    enqueue(at, Frame{std::move(packet), next, false}, rank);
}

void Simulator::on_tunnel(std::uint64_t msg)
{
    auto node = m_tunnels.extract(msg);
    if (node.empty())
    {
        return;
    }
    Frame frame = std::move(node.mapped());
    const NodeId peer = frame.to;
    auto it = m_flights.find(frame.packet.id);
    if (it == m_flights.end())
    {
        return;
    }
    if (!active(peer))
    {
        drop(frame.packet.id, peer, "tunnel_lost", false);
        return;
    }
    mark_acted(peer);
    // The far end re-injects the packet toward the route, skipping the trace.
    const Flight& fl = it->second;
    NodeId target = kNoNode;
    if (fl.pos + 1 < fl.plan.size() && linked(peer, fl.plan[fl.pos + 1].node))
    {
        target = fl.plan[fl.pos + 1].node;
    }
    else if (m_map.is_clustered(peer) && !m_map.is_head(peer))
    {
        target = m_map.head_of(peer);
    }
    if (target == kNoNode)
    {
        drop(frame.packet.id, peer, "tunnel_stranded", false);
        return;
    }
    const double rank = fl.rank;
    frame.to = target;
    frame.hidden = true;
    enqueue(peer, std::move(frame), rank);
}

void Simulator::deliver(NodeId at, Packet& packet)
{
    auto it = m_flights.find(packet.id);
    const Flight& fl = it->second;
    packet.path_trace.push_back({at, fl.plan.back().role});

    Session& s = m_sessions[fl.session - 1];
    ++m_traffic.delivered;
    ++s.delivered;
    s.last_delivery = m_now;
    m_log.add(m_now, "deliver", at, packet.src, packet.id, std::to_string(s.id));

    ++m_audit.delivered_checked;
    if (!valid_path_shape(packet.path_trace))
    {
        ++m_audit.delivered_shape_violations;
    }
    if (has_unsupervised_pair(packet.path_trace))
    {
        ++m_audit.delivered_unsupervised_pairs;
    }
    m_audit.delivered_tunneled_hops += static_cast<std::uint64_t>(
        std::count_if(packet.hops.begin(), packet.hops.end(), [](const RealizedHop& h) { return h.tunneled; }));

    for (std::size_t i = 0; i + 1 < packet.path_trace.size(); ++i)
    {
        const NodeId n = packet.path_trace[i].node;
        if (!m_expelled.contains(n))
        {
            change_trust(n, on_forward_success(record(n)), "forward");
        }
    }
    m_flights.erase(it);
    finish_session_if_done(s);
}

void Simulator::drop(PacketId id, NodeId at, std::string_view reason, bool broken)
{
    auto it = m_flights.find(id);
    if (it == m_flights.end() || it->second.ref != 0)
    {
        return;
    }
    Session& s = m_sessions[it->second.session - 1];
    ++m_traffic.dropped;
    ++s.dropped;
    if (broken)
    {
        m_broken.insert(id);
    }
    m_log.add(m_now, "drop", at, kNoNode, id, reason);
    m_flights.erase(it);
    finish_session_if_done(s);
}

void Simulator::drop_unlaunched(Session& s, const Packet& packet, std::string_view reason)
{
    ++m_traffic.dropped;
    ++s.dropped;
    m_log.add(m_now, "drop", s.src, kNoNode, packet.id, reason);
    finish_session_if_done(s);
}

void Simulator::finish_session_if_done(Session& s)
{
    if (s.end_time >= 0.0 || s.packets_sent < s.planned_packets || !s.finished())
    {
        return;
    }
    s.end_time = m_now;
    m_log.add(m_now, "session_end", s.src, s.dst, 0, std::to_string(s.id) + " " + std::to_string(s.delivered));
    if (!s.rejected && s.delivered > 0 && !m_expelled.contains(s.src))
    {
        change_trust(s.src, on_service_charge(record(s.src)), "service");
    }
}

void Simulator::send_ack(NodeId at, const Packet& data, const Flight& flight, std::size_t index)
{
    std::size_t up = index;
    while (up > 0)
    {
        --up;
        if (flight.plan[up].role == HopRole::ClusterHead)
        {
            break;
        }
    }
    Flight ack;
    ack.session = flight.session;
    ack.ref = data.id;
    ack.rank = flight.rank;
    for (std::size_t k = index + 1; k-- > up;)
    {
        ack.plan.push_back(flight.plan[k]);
    }

    Packet p;
    p.id = m_next_packet++;
    p.kind = PacketKind::Ack;
    p.src = at;
    p.dst = flight.plan[up].node;
    p.link = at;
    p.session = flight.session;
    p.ref = data.id;
    p.payload_size = m_config.control_size;
    p.created_at = m_now;
    p.from_ch = true;

    const NodeId next = ack.plan[1].node;
    const double rank = ack.rank;
    m_flights.emplace(p.id, std::move(ack));
    enqueue(at, Frame{std::move(p), next, false}, rank);
}

void Simulator::receive_ack(NodeId at, Packet packet)
{
    auto it = m_flights.find(packet.id);
    if (it == m_flights.end())
    {
        return;
    }
    Flight& fl = it->second;
    const std::size_t idx = fl.pos + 1;
    if (idx >= fl.plan.size() || fl.plan[idx].node != at || packet.link != fl.plan[fl.pos].node)
    {
        m_flights.erase(it);
        return;
    }
    fl.pos = idx;
    if (idx + 1 < fl.plan.size())
    {
        const NodeId next = fl.plan[idx + 1].node;
        const double rank = fl.rank;
        enqueue(at, Frame{std::move(packet), next, false}, rank);
        return;
    }
    const PacketId ref = fl.ref;
    m_flights.erase(it);
    m_log.add(m_now, "ack", at, packet.src, ref);
    if (!detection_on())
    {
        return;
    }
    auto& ledger = m_surveillance[at];
    for (NodeId g : ledger.pending(ref))
    {
        ledger.resolve(g, ref, AckStatus::Acked);
        judge(at, g);
    }
}

void Simulator::open_surveillance(NodeId ch, NodeId gateway, PacketId packet, std::size_t path_hops)
{
    const bool opened =
        m_surveillance[ch].open(gateway, packet, m_now, residual(gateway), rel_mobility(ch, gateway));
    if (!opened)
    {
        return;
    }
    m_log.add(m_now, "watch", ch, gateway, packet);
    if (path_hops > 0)
    {
        const double wait =
            ack_timeout(m_config.detection.ack_timeout_factor, hop_time(m_config.packet_size), path_hops);
        schedule(m_now + wait, EventKind::AckTimeout, ch, packet);
    }
}

void Simulator::on_ack_timeout(NodeId ch, PacketId packet)
{
    auto& ledger = m_surveillance[ch];
    for (NodeId g : ledger.pending(packet))
    {
        const bool broken = m_broken.contains(packet) || !active(g) || !m_map.is_head(ch) || !m_map.is_gateway(g);
        const LinkContext context = broken ? LinkContext::LinkBroken : LinkContext::LinkOk;
        ledger.resolve(g, packet, AckStatus::Timeout, context);
        m_log.add(m_now, "timeout", ch, g, packet, broken ? "link_broken" : "link_ok");
        judge(ch, g);
    }
}

} // namespace c3h
