#pragma once

#include "c3h/adversary.hpp"
#include "c3h/clustering.hpp"
#include "c3h/config.hpp"
#include "c3h/detection.hpp"
#include "c3h/energy.hpp"
#include "c3h/event_log.hpp"
#include "c3h/event_queue.hpp"
#include "c3h/metrics.hpp"
#include "c3h/packet.hpp"
#include "c3h/protocol.hpp"
#include "c3h/radio_mobility.hpp"
#include "c3h/rng.hpp"
#include "c3h/trust_ledger.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

namespace c3h
{

struct TrafficCounters
{
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
};

/// Structural checks made while the run executes.
struct AuditCounters
{
    std::uint64_t plans_checked = 0;
    std::uint64_t plan_shape_violations = 0;
    std::uint64_t route_shape_violations = 0;
    std::uint64_t delivered_checked = 0;
    std::uint64_t delivered_shape_violations = 0;
    std::uint64_t delivered_unsupervised_pairs = 0;
    std::uint64_t delivered_tunneled_hops = 0;
    std::uint64_t tunnel_actions = 0;
    std::uint64_t unsupervised_rejections = 0;
    std::uint64_t fake_rreps_rejected = 0;
    std::uint64_t adverts_received = 0;
    std::uint64_t adverts_accepted = 0;
    std::uint64_t spoofed_hellos = 0;
    std::uint64_t slander_reports = 0;
};

/// One deterministic run of the clustered network.
class Simulator
{
  public:
    /// Validates the configuration (ConfigError), places nodes, forms the
    /// initial clusters and schedules the periodic events.
    explicit Simulator(SimConfig config);

    /// Processes every event at or before `t` (capped at the run length).
    void run_until(double t);

    /// Runs to the configured duration and returns the final metrics.
    Metrics run();

    double now() const noexcept { return m_now; }
    bool done() const noexcept { return m_done; }
    const SimConfig& config() const noexcept { return m_config; }

    const ClusterMap& clusters() const noexcept { return m_map; }
    const Adjacency& adjacency() const noexcept { return m_adjacency; }
    const RoutingTable* routing_table(NodeId head) const;
    const Blacklist* blacklist(NodeId head) const;
    const LinkRegistry* registry(NodeId head) const;
    const SurveillanceLedger* surveillance(NodeId head) const;
    TrustRecord trust_record(NodeId node) const;
    /// Head whose ledger holds the node's record, or kNoNode for the detached pool.
    NodeId record_holder(NodeId node) const { return m_holder.at(node); }

    bool is_alive(NodeId node) const { return m_nodes.at(node).alive; }
    bool is_expelled(NodeId node) const { return m_expelled.contains(node); }
    const std::set<NodeId>& expelled() const noexcept { return m_expelled; }
    Position position(NodeId node) const { return m_nodes.at(node).motion.position; }
    const EnergyState& battery(NodeId node) const { return m_nodes.at(node).battery; }
    double tx_power(NodeId node) const { return m_nodes.at(node).tx_power; }
    double rx_power(NodeId node) const { return m_nodes.at(node).rx_power; }
    const BehaviorPolicy& policy(NodeId node) const { return m_nodes.at(node).policy; }
    bool linked(NodeId a, NodeId b) const;

    const std::vector<PlantedAttacker>& planted() const noexcept { return m_planted; }
    const std::vector<Flow>& flows() const noexcept { return m_flow_list; }
    const std::vector<Session>& sessions() const noexcept { return m_sessions; }
    const TrafficCounters& traffic() const noexcept { return m_traffic; }
    /// DATA packets generated but neither delivered nor dropped yet.
    std::uint64_t in_flight() const;
    const AuditCounters& audit() const noexcept { return m_audit; }
    const EventLog& log() const noexcept { return m_log; }

    /// Metrics as of now; after the run, in-flight packets count as expired.
    Metrics metrics() const;

    /// Air time of a frame of `bytes` on the configured channel.
    double hop_time(std::uint32_t bytes) const;

  private:
    enum class EventKind : std::uint8_t
    {
        Mobility,
        Hello,
        Topology,
        Cbr,
        Admission,
        TxDone,
        Tunnel,
        AckTimeout,
        Slander,
        Flood,
        BlacklistArrival,
        Depletion,
    };

    struct EventData
    {
        EventKind kind = EventKind::Hello;
        NodeId a = kNoNode;
        std::uint64_t id = 0;
    };

    struct Frame
    {
        Packet packet;
        NodeId to = kNoNode;
        /// Sent without adding the sender to the path trace.
        bool hidden = false;
    };

    struct QueueKey
    {
        int cls = 0;
        double rank = 0.0;
        std::uint64_t seq = 0;

        auto operator<=>(const QueueKey&) const = default;
    };

    struct NodeState
    {
        WaypointState motion;
        EnergyState battery;
        double tx_power = 0.0;
        double rx_power = 0.0;
        BehaviorPolicy policy;
        bool alive = true;
        bool busy = false;
        Frame on_air;
        std::map<QueueKey, Frame> queue;
    };

    /// A DATA or ACK packet on its planned hops. For ACKs `ref` names the DATA packet.
    struct Flight
    {
        SessionId session = 0;
        std::vector<PlannedHop> plan;
        std::size_t pos = 0;
        PacketId ref = 0;
        double rank = 0.0;
    };

    struct SessionState
    {
        std::vector<Packet> waiting;
        bool decided = false;
        double trust = 0.0;
    };

    struct FlowState
    {
        std::optional<std::size_t> session;
        std::uint64_t tick = 0;
    };

    struct BlacklistMessage
    {
        BlacklistEntry entry;
        NodeId from = kNoNode;
        NodeId to = kNoNode;
    };

    // setup
    void place_nodes();
    void assign_traffic();
    void assign_attackers();
    void schedule_initial();
    void schedule(double time, EventKind kind, NodeId a = kNoNode, std::uint64_t id = 0);
    void finish();

    // world
    void dispatch(const EventData& ev);
    void on_mobility(std::uint64_t tick);
    void on_hello(std::uint64_t tick);
    void on_topology(std::uint64_t tick);
    void refresh_topology();
    void reconcile_ledgers();
    bool active(NodeId node) const { return m_nodes[node].alive && !m_expelled.contains(node); }
    double residual(NodeId node) const;
    double rel_mobility(NodeId observer, NodeId subject) const;
    HopRole role_of(NodeId node) const;
    HelloHistory* history(NodeId observer, NodeId subject);
    const HelloHistory* history(NodeId observer, NodeId subject) const;

    // energy
    void charge_tx(NodeId node, std::uint32_t bytes);
    void charge_rx(NodeId node, std::uint32_t bytes);
    void settle(NodeId node);
    void kill(NodeId node, std::string_view why);

    // trust
    TrustRecord& record(NodeId node);
    void change_trust(NodeId node, TrustRecord next, std::string_view cause);

    // traffic
    void on_cbr(std::size_t flow);
    void on_admission(NodeId head);
    void launch(Session& session, Packet packet);
    void enqueue(NodeId at, Frame frame, double rank);
    void start_tx(NodeId node);
    void on_tx_done(NodeId node);
    void fail_frame(const Frame& frame, NodeId at, std::string_view reason, bool broken);
    void receive_data(NodeId at, Packet packet);
    void receive_ack(NodeId at, Packet packet);
    void on_tunnel(std::uint64_t id);
    void deliver(NodeId at, Packet& packet);
    void drop(PacketId id, NodeId at, std::string_view reason, bool broken);
    void drop_unlaunched(Session& session, const Packet& packet, std::string_view reason);
    void finish_session_if_done(Session& session);
    void send_ack(NodeId at, const Packet& data, const Flight& flight, std::size_t index);
    void open_surveillance(NodeId ch, NodeId gateway, PacketId packet, std::size_t path_hops);
    void on_ack_timeout(NodeId ch, PacketId packet);

    // adversaries and detection
    bool detection_on() const { return m_config.detection.enabled; }
    void mark_acted(NodeId node);
    void probe_route(NodeId head, const ChPath& path, const Session& session);
    void spoof_hellos();
    void on_slander(std::uint64_t tick);
    void on_flood(std::uint64_t tick);
    void judge(NodeId ch, NodeId gateway);
    void punish(NodeId ch, NodeId target, Offence offence);
    void penalize_selfish(NodeId ch, NodeId target, Offence offence);
    void expel(NodeId ch, NodeId target, Offence offence);
    void flood_blacklist(NodeId from, const BlacklistEntry& entry, NodeId except);
    void on_blacklist_arrival(std::uint64_t id);
    void sync_blacklists();

    SimConfig m_config;
    std::size_t m_n = 0;
    Rng m_motion_rng;
    EventQueue<EventData> m_events;
    double m_now = 0.0;
    bool m_done = false;

    std::vector<NodeState> m_nodes;
    std::vector<unsigned char> m_link;
    std::vector<std::optional<HelloHistory>> m_history;
    std::vector<double> m_mobility;
    Adjacency m_adjacency;
    ClusterMap m_map;

    std::map<NodeId, TrustLedger> m_ledgers;
    TrustLedger m_detached;
    std::vector<NodeId> m_holder;
    std::map<NodeId, RoutingTable> m_tables;
    std::map<NodeId, Blacklist> m_blacklists;
    std::map<NodeId, LinkRegistry> m_registries;
    std::map<NodeId, SurveillanceLedger> m_surveillance;
    std::map<NodeId, SlanderMonitor> m_monitors;
    std::map<NodeId, RequestQueue> m_requests;
    std::set<NodeId> m_admission_pending;
    std::set<NodeId> m_expelled;

    std::vector<PlantedAttacker> m_planted;
    std::vector<Flow> m_flow_list;
    std::vector<FlowState> m_flows;
    std::vector<Session> m_sessions;
    std::vector<SessionState> m_session_state;

    std::map<PacketId, Flight> m_flights;
    std::set<PacketId> m_broken;
    std::map<std::uint64_t, Frame> m_tunnels;
    std::map<std::uint64_t, BlacklistMessage> m_blacklist_msgs;
    std::uint64_t m_next_msg = 1;
    PacketId m_next_packet = 1;
    std::uint64_t m_queue_seq = 0;

    TrafficCounters m_traffic;
    AuditCounters m_audit;
    EventLog m_log;
};

/// Runs `config` to completion.
Metrics run(const SimConfig& config);

} // namespace c3h
