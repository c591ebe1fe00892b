#include "c3h/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace c3h
{

namespace
{

// Independent random streams, so that e.g. adding an attacker does not move any node.
constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kMotionStream = 2;
constexpr std::uint64_t kHardwareStream = 3;
constexpr std::uint64_t kTrafficStream = 4;
constexpr std::uint64_t kAdversaryStream = 5;

std::string_view membership_kind(MembershipEvent::Kind kind)
{
    switch (kind)
    {
    case MembershipEvent::Kind::Joined:
        return "join";
    case MembershipEvent::Kind::Left:
        return "leave";
    case MembershipEvent::Kind::Elected:
        return "elect";
    case MembershipEvent::Kind::Dissolved:
        return "dissolve";
    case MembershipEvent::Kind::Merged:
        return "merge";
    }
    return "membership";
}

/// Partial Fisher-Yates: the first `count` entries become a uniform sample.
void sample_front(std::vector<NodeId>& pool, std::size_t count, Rng& rng)
{
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i)
    {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
}

} // namespace

Simulator::Simulator(SimConfig config)
    : m_config(std::move(config)),
      m_motion_rng(m_config.seed, kMotionStream),
      m_log(m_config.keep_event_log)
{
    m_config.validate();
    m_n = m_config.node_count;
    m_nodes.resize(m_n);
    m_link.assign(m_n * m_n, 0);
    m_history.resize(m_n * m_n);
    m_mobility.assign(m_n, 0.0);
    m_adjacency = Adjacency(m_n);
    m_map = ClusterMap(m_n);
    m_holder.assign(m_n, kNoNode);
    for (NodeId n = 0; n < m_n; ++n)
    {
        m_detached.admit(n);
    }

    place_nodes();
    assign_traffic();
    assign_attackers();

    on_hello(0);
    refresh_topology();
    schedule_initial();
}

void Simulator::place_nodes()
{
    Rng placement(m_config.seed, kPlacementStream);
    Rng hardware(m_config.seed, kHardwareStream);
    for (NodeId n = 0; n < m_n; ++n)
    {
        NodeState& node = m_nodes[n];
        Position p{placement.uniform(0.0, m_config.area.width), placement.uniform(0.0, m_config.area.height)};
        node.tx_power = hardware.uniform(m_config.tx_power.lo, m_config.tx_power.hi);
        node.rx_power = hardware.uniform(m_config.rx_power.lo, m_config.rx_power.hi);
        double energy = hardware.uniform(m_config.initial_energy.lo, m_config.initial_energy.hi);
        for (const NodeOverride& o : m_config.overrides)
        {
            if (o.node != n)
            {
                continue;
            }
            p = o.position.value_or(p);
            node.tx_power = o.tx_power.value_or(node.tx_power);
            node.rx_power = o.rx_power.value_or(node.rx_power);
            energy = o.energy.value_or(energy);
        }
        node.battery = EnergyState::full(energy);
        if (m_config.mobile)
        {
            node.motion = waypoint_start(p, m_config.area, m_config.waypoint, m_motion_rng);
        }
        else
        {
            node.motion.position = p;
            node.motion.target = p;
        }
    }
}

void Simulator::assign_traffic()
{
    if (!m_config.flows.empty())
    {
        m_flow_list = m_config.flows;
    }
    else
    {
        Rng traffic(m_config.seed, kTrafficStream);
        std::vector<NodeId> pool;
        for (NodeId n = 0; n < m_n; ++n)
        {
            const bool placed = std::any_of(m_config.placements.begin(), m_config.placements.end(),
                                            [&](const Placement& p) { return p.node == n; });
            if (!placed)
            {
                pool.push_back(n);
            }
        }
        if (pool.size() >= 2)
        {
            const auto wanted = static_cast<std::size_t>(
                std::max<long long>(1, std::llround(m_config.source_fraction * static_cast<double>(m_n))));
            const std::size_t count = std::min(wanted, pool.size() - 1);
            sample_front(pool, count, traffic);
            for (std::size_t i = 0; i < count; ++i)
            {
                Flow f;
                f.src = pool[i];
                do
                {
                    f.dst = pool[traffic.below(pool.size())];
                } while (f.dst == f.src);
                f.start = m_config.traffic_start;
                m_flow_list.push_back(f);
            }
        }
    }
    m_flows.resize(m_flow_list.size());
    for (const Flow& f : m_flow_list)
    {
        m_log.add(0.0, "flow", f.src, f.dst, 0, format_double(f.start));
    }
}

void Simulator::assign_attackers()
{
    for (const Placement& p : m_config.placements)
    {
        m_nodes[p.node].policy = p.policy;
    }

    Rng adversary(m_config.seed, kAdversaryStream);
    const auto count = static_cast<std::size_t>(std::llround(m_config.malicious_fraction * static_cast<double>(m_n)));
    if (count > 0 && !m_config.attack_kinds.empty())
    {
        std::set<NodeId> busy;
        for (const Flow& f : m_flow_list)
        {
            busy.insert(f.src);
            busy.insert(f.dst);
        }
        std::vector<NodeId> pool;
        for (NodeId n = 0; n < m_n; ++n)
        {
            if (!busy.contains(n) && m_nodes[n].policy.is_honest())
            {
                pool.push_back(n);
            }
        }
        sample_front(pool, count, adversary);
        std::vector<NodeId> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(std::min(count, pool.size())));
        std::sort(chosen.begin(), chosen.end());

        std::vector<NodeId> wormholes;
        for (std::size_t i = 0; i < chosen.size(); ++i)
        {
            const NodeId n = chosen[i];
            const BehaviorKind kind = m_config.attack_kinds[i % m_config.attack_kinds.size()];
            BehaviorPolicy& policy = m_nodes[n].policy;
            switch (kind)
            {
            case BehaviorKind::BlackHole:
                policy = BehaviorPolicy::black_hole();
                break;
            case BehaviorKind::GreyHole:
                policy = BehaviorPolicy::grey_hole(m_config.grey_drop_probability);
                break;
            case BehaviorKind::Wormhole:
                policy = BehaviorPolicy::wormhole(kNoNode);
                wormholes.push_back(n);
                break;
            case BehaviorKind::Spoof:
            {
                NodeId victim = n;
                while (victim == n)
                {
                    victim = static_cast<NodeId>(adversary.below(m_n));
                }
                policy = BehaviorPolicy::spoof(victim);
                break;
            }
            case BehaviorKind::Slander:
            {
                std::vector<NodeId> targets;
                while (targets.size() < std::min<std::size_t>(2, m_n - 1))
                {
                    const auto t = static_cast<NodeId>(adversary.below(m_n));
                    if (t != n && std::find(targets.begin(), targets.end(), t) == targets.end())
                    {
                        targets.push_back(t);
                    }
                }
                policy = BehaviorPolicy::slander(std::move(targets));
                break;
            }
            case BehaviorKind::TableOverflow:
                policy = BehaviorPolicy::table_overflow(m_config.flood_rate);
                break;
            case BehaviorKind::Honest:
                break;
            }
        }
        // Colluders pair up in id order; an unpaired one has no tunnel to use.
        for (std::size_t i = 0; i + 1 < wormholes.size(); i += 2)
        {
            m_nodes[wormholes[i]].policy.peer = wormholes[i + 1];
            m_nodes[wormholes[i + 1]].policy.peer = wormholes[i];
        }
    }

    for (NodeId n = 0; n < m_n; ++n)
    {
        if (!m_nodes[n].policy.is_honest())
        {
            m_planted.push_back(PlantedAttacker{n, m_nodes[n].policy.kind, false});
            m_log.add(0.0, "plant", n, m_nodes[n].policy.peer, 0, to_string(m_nodes[n].policy.kind));
        }
    }
}

void Simulator::schedule(double time, EventKind kind, NodeId a, std::uint64_t id)
{
    m_events.push(time, EventData{kind, a, id});
}

void Simulator::schedule_initial()
{
    const double end = m_config.sim_duration;
    if (m_config.mobile && m_config.mobility_step <= end)
    {
        schedule(m_config.mobility_step, EventKind::Mobility, kNoNode, 1);
    }
    if (m_config.hello_interval <= end)
    {
        schedule(m_config.hello_interval, EventKind::Hello, kNoNode, 1);
    }
    if (m_config.topology_interval <= end)
    {
        schedule(m_config.topology_interval, EventKind::Topology, kNoNode, 1);
    }
    for (std::size_t i = 0; i < m_flow_list.size(); ++i)
    {
        if (m_flow_list[i].start <= end)
        {
            schedule(m_flow_list[i].start, EventKind::Cbr, kNoNode, i);
        }
    }
    const auto has = [&](BehaviorKind k) {
        return std::any_of(m_planted.begin(), m_planted.end(), [&](const PlantedAttacker& p) { return p.kind == k; });
    };
    if (has(BehaviorKind::Slander) && m_config.slander_interval <= end)
    {
        schedule(m_config.slander_interval, EventKind::Slander, kNoNode, 1);
    }
    if (has(BehaviorKind::TableOverflow) && m_config.flood_interval <= end)
    {
        schedule(m_config.flood_interval, EventKind::Flood, kNoNode, 1);
    }
    for (const ForcedDepletion& d : m_config.depletions)
    {
        if (d.time <= end)
        {
            schedule(d.time, EventKind::Depletion, d.node);
        }
    }
}

void Simulator::run_until(double t)
{
    t = std::min(t, m_config.sim_duration);
    while (!m_events.empty() && m_events.top().time <= t)
    {
        auto entry = m_events.pop();
        m_now = entry.time;
        dispatch(entry.payload);
    }
    m_now = std::max(m_now, t);
    if (t >= m_config.sim_duration && !m_done)
    {
        finish();
    }
}

Metrics Simulator::run()
{
    run_until(m_config.sim_duration);
    return metrics();
}

void Simulator::finish()
{
    m_done = true;
    m_log.add(m_now, "end", kNoNode, kNoNode, 0, std::to_string(in_flight()));
}

void Simulator::dispatch(const EventData& ev)
{
    switch (ev.kind)
    {
    case EventKind::Mobility:
        on_mobility(ev.id);
        break;
    case EventKind::Hello:
        on_hello(ev.id);
        break;
    case EventKind::Topology:
        on_topology(ev.id);
        break;
    case EventKind::Cbr:
        on_cbr(static_cast<std::size_t>(ev.id));
        break;
    case EventKind::Admission:
        on_admission(ev.a);
        break;
    case EventKind::TxDone:
        on_tx_done(ev.a);
        break;
    case EventKind::Tunnel:
        on_tunnel(ev.id);
        break;
    case EventKind::AckTimeout:
        on_ack_timeout(ev.a, ev.id);
        break;
    case EventKind::Slander:
        on_slander(ev.id);
        break;
    case EventKind::Flood:
        on_flood(ev.id);
        break;
    case EventKind::BlacklistArrival:
        on_blacklist_arrival(ev.id);
        break;
    case EventKind::Depletion:
        if (m_nodes[ev.a].alive)
        {
            drain(m_nodes[ev.a].battery);
            kill(ev.a, "forced");
        }
        break;
    }
}

void Simulator::on_mobility(std::uint64_t tick)
{
    for (NodeId n = 0; n < m_n; ++n)
    {
        if (m_nodes[n].alive)
        {
            m_nodes[n].motion = waypoint_step(m_nodes[n].motion, m_config.mobility_step, m_config.area,
                                              m_config.waypoint, m_motion_rng);
        }
    }
    const double next = static_cast<double>(tick + 1) * m_config.mobility_step;
    if (next <= m_config.sim_duration)
    {
        schedule(next, EventKind::Mobility, kNoNode, tick + 1);
    }
}

bool Simulator::linked(NodeId a, NodeId b) const
{
    if (a == b || a >= m_n || b >= m_n || !m_nodes[a].alive || !m_nodes[b].alive)
    {
        return false;
    }
    const double d = std::max(distance(m_nodes[a].motion.position, m_nodes[b].motion.position), kMinSeparation);
    return in_link(d, std::min(m_nodes[a].tx_power, m_nodes[b].tx_power), m_config.radio);
}

HelloHistory* Simulator::history(NodeId observer, NodeId subject)
{
    auto& slot = m_history[static_cast<std::size_t>(observer) * m_n + subject];
    return slot ? &*slot : nullptr;
}

const HelloHistory* Simulator::history(NodeId observer, NodeId subject) const
{
    const auto& slot = m_history[static_cast<std::size_t>(observer) * m_n + subject];
    return slot ? &*slot : nullptr;
}

void Simulator::on_hello(std::uint64_t tick)
{
    std::vector<unsigned char> sending(m_n, 0);
    for (NodeId n = 0; n < m_n; ++n)
    {
        if (m_nodes[n].alive)
        {
            sending[n] = 1;
            charge_tx(n, m_config.hello_size);
        }
    }
    const RadioParams& radio = m_config.radio;
    auto heard = [&](NodeId observer, NodeId sender, double d) {
        auto& slot = m_history[static_cast<std::size_t>(observer) * m_n + sender];
        if (!slot)
        {
            slot.emplace(sender, m_config.hello_interval);
        }
        // The receiver only knows the received power; the distance is inferred from it.
        const double p = m_nodes[sender].tx_power;
        record_hello_in_place(*slot, estimate_distance(p, friis_recv_power(p, d, radio), radio));
        charge_rx(observer, m_config.hello_size);
    };
    for (NodeId a = 0; a < m_n; ++a)
    {
        for (NodeId b = a + 1; b < m_n; ++b)
        {
            const std::size_t ab = static_cast<std::size_t>(a) * m_n + b;
            const std::size_t ba = static_cast<std::size_t>(b) * m_n + a;
            bool up = false;
            double d = 0.0;
            if (sending[a] && sending[b])
            {
                d = std::max(distance(m_nodes[a].motion.position, m_nodes[b].motion.position), kMinSeparation);
                up = in_link(d, std::min(m_nodes[a].tx_power, m_nodes[b].tx_power), radio);
            }
            if (up)
            {
                heard(a, b, d);
                heard(b, a, d);
            }
            else if (m_link[ab])
            {
                m_history[ab].reset();
                m_history[ba].reset();
            }
            m_link[ab] = m_link[ba] = up ? 1 : 0;
        }
    }
    spoof_hellos();
    for (NodeId n = 0; n < m_n; ++n)
    {
        settle(n);
    }
    if (tick == 0)
    {
        return;
    }
    const double next = static_cast<double>(tick + 1) * m_config.hello_interval;
    if (next <= m_config.sim_duration)
    {
        schedule(next, EventKind::Hello, kNoNode, tick + 1);
    }
}

void Simulator::on_topology(std::uint64_t tick)
{
    refresh_topology();
    const double next = static_cast<double>(tick + 1) * m_config.topology_interval;
    if (next <= m_config.sim_duration)
    {
        schedule(next, EventKind::Topology, kNoNode, tick + 1);
    }
}

double Simulator::residual(NodeId node) const
{
    const EnergyState& b = m_nodes[node].battery;
    return res_eng(std::min(b.consumed, b.total), b.total);
}

double Simulator::rel_mobility(NodeId observer, NodeId subject) const
{
    const HelloHistory* h = history(observer, subject);
    if (h == nullptr || h->size() < 2)
    {
        return 0.0;
    }
    return std::abs(pairwise_mobility(*h));
}

HopRole Simulator::role_of(NodeId node) const
{
    if (m_map.is_head(node))
    {
        return HopRole::ClusterHead;
    }
    return m_map.is_gateway(node) ? HopRole::Gateway : HopRole::Member;
}

void Simulator::refresh_topology()
{
    Adjacency adj(m_n);
    for (NodeId a = 0; a < m_n; ++a)
    {
        if (!active(a))
        {
            continue;
        }
        for (NodeId b = a + 1; b < m_n; ++b)
        {
            if (m_link[static_cast<std::size_t>(a) * m_n + b] && active(b))
            {
                adj.link(a, b);
            }
        }
    }
    m_adjacency = std::move(adj);

    for (NodeId n = 0; n < m_n; ++n)
    {
        std::vector<double> per_neighbor;
        for (NodeId nb : m_adjacency.neighbors(n))
        {
            const HelloHistory* h = history(n, nb);
            if (h != nullptr && h->size() >= 2)
            {
                per_neighbor.push_back(std::abs(pairwise_mobility(*h)));
            }
        }
        m_mobility[n] = per_neighbor.empty() ? 0.0 : avg_mobility(per_neighbor);
    }

    ClusterContext ctx;
    ctx.adjacency = &m_adjacency;
    ctx.weights = m_config.weights;
    ctx.metrics = [this](NodeId node, std::size_t reference) {
        ElectionMetrics m;
        m.res_eng = residual(node);
        m.trust = trust_value(record(node));
        m.mobility_membership = mobility_membership(m_mobility[node], m_config.waypoint.v_max);
        m.dnc = dnc(m_adjacency.degree(node), std::max<std::size_t>(reference, 1));
        return m;
    };
    ctx.active = [this](NodeId node) { return active(node); };
    ctx.admits = [this](NodeId node, NodeId ch) {
        auto it = m_blacklists.find(ch);
        return it == m_blacklists.end() || !it->second.contains(node);
    };
    ctx.must_step_down = [this](NodeId ch) { return residual(ch) < kEnergyFloor; };

    for (const MembershipEvent& e : maintain_membership(m_map, ctx))
    {
        m_log.add(m_now, membership_kind(e.kind), e.node, e.ch);
    }
    if (designate_gateways(m_map, ctx))
    {
        m_log.add(m_now, "gateways", kNoNode, kNoNode, 0, std::to_string(m_map.gateway_links().size()));
    }

    reconcile_ledgers();

    m_registries.clear();
    m_tables.clear();
    for (const auto& [ch, cluster] : m_map.clusters())
    {
        LinkRegistry& reg = m_registries[ch];
        for (NodeId m : cluster.members)
        {
            reg.enroll(m, m);
        }
        m_tables.emplace(ch, RoutingTable::build(m_map, ch));
        m_blacklists[ch];
    }
    sync_blacklists();
}

void Simulator::reconcile_ledgers()
{
    for (NodeId n = 0; n < m_n; ++n)
    {
        const NodeId target = m_map.is_clustered(n) && !m_map.is_head(n) ? m_map.head_of(n) : kNoNode;
        if (target == m_holder[n])
        {
            continue;
        }
        TrustLedger& from = m_holder[n] == kNoNode ? m_detached : m_ledgers[m_holder[n]];
        TrustLedger& to = target == kNoNode ? m_detached : m_ledgers[target];
        to.put(n, from.take(n).value_or(init_trust()));
        m_holder[n] = target;
    }
}

TrustRecord& Simulator::record(NodeId node)
{
    return m_holder[node] == kNoNode ? m_detached.at(node) : m_ledgers.at(m_holder[node]).at(node);
}

TrustRecord Simulator::trust_record(NodeId node) const
{
    return m_holder.at(node) == kNoNode ? m_detached.at(node) : m_ledgers.at(m_holder[node]).at(node);
}

void Simulator::change_trust(NodeId node, TrustRecord next, std::string_view cause)
{
    TrustRecord& rec = record(node);
    if (rec == next)
    {
        return;
    }
    rec = next;
    std::string detail = std::to_string(rec.earn_trust);
    detail += '/';
    detail += std::to_string(rec.loose_trust);
    detail += ' ';
    detail += cause;
    m_log.add(m_now, "trust", node, m_holder[node], 0, detail);
}

void Simulator::charge_tx(NodeId node, std::uint32_t bytes)
{
    consume_energy(m_nodes[node].battery, m_nodes[node].tx_power, bytes, m_config.channel_capacity);
}

void Simulator::charge_rx(NodeId node, std::uint32_t bytes)
{
    consume_energy(m_nodes[node].battery, m_nodes[node].rx_power, bytes, m_config.channel_capacity);
}

void Simulator::settle(NodeId node)
{
    if (m_nodes[node].alive && m_nodes[node].battery.depleted())
    {
        kill(node, "exhausted");
    }
}

void Simulator::kill(NodeId node, std::string_view why)
{
    NodeState& state = m_nodes[node];
    if (!state.alive)
    {
        return;
    }
    state.alive = false;
    m_log.add(m_now, "depleted", node, kNoNode, 0, why);
    auto queued = std::move(state.queue);
    state.queue.clear();
    for (auto& [key, frame] : queued)
    {
        fail_frame(frame, node, "sender_down", true);
    }
}

double Simulator::hop_time(std::uint32_t bytes) const
{
    return static_cast<double>(bytes) * 8.0 / m_config.channel_capacity;
}

const RoutingTable* Simulator::routing_table(NodeId head) const
{
    auto it = m_tables.find(head);
    return it == m_tables.end() ? nullptr : &it->second;
}

const Blacklist* Simulator::blacklist(NodeId head) const
{
    auto it = m_blacklists.find(head);
    return it == m_blacklists.end() ? nullptr : &it->second;
}

const LinkRegistry* Simulator::registry(NodeId head) const
{
    auto it = m_registries.find(head);
    return it == m_registries.end() ? nullptr : &it->second;
}

const SurveillanceLedger* Simulator::surveillance(NodeId head) const
{
    auto it = m_surveillance.find(head);
    return it == m_surveillance.end() ? nullptr : &it->second;
}

std::uint64_t Simulator::in_flight() const
{
    std::uint64_t n = 0;
    for (const auto& [id, flight] : m_flights)
    {
        n += flight.ref == 0 ? 1 : 0;
    }
    for (const SessionState& s : m_session_state)
    {
        n += s.waiting.size();
    }
    return n;
}

Metrics Simulator::metrics() const
{
    std::vector<double> energy;
    energy.reserve(m_n);
    for (const NodeState& node : m_nodes)
    {
        energy.push_back(node.battery.remaining);
    }
    MetricInputs in;
    in.planted = m_planted;
    in.expelled = &m_expelled;
    in.sessions = m_sessions;
    in.energy_remaining = energy;
    in.generated = m_traffic.generated;
    in.delivered = m_traffic.delivered;
    in.dropped = m_traffic.dropped;
    in.expired = m_done ? in_flight() : 0;
    return collect_metrics(in);
}

Metrics run(const SimConfig& config)
{
    Simulator sim(config);
    return sim.run();
}

} // namespace c3h
