#pragma once

#include "c3h/clustering.hpp"
#include "c3h/packet.hpp"
#include "c3h/trust_ledger.hpp"
#include "c3h/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <span>
#include <vector>

namespace c3h
{

/// Route over the cluster-head backbone. links[i] joins heads[i] to heads[i+1].
struct ChPath
{
    std::vector<NodeId> heads;
    std::vector<GatewayChain> links;

    friend bool operator==(const ChPath&, const ChPath&) = default;
};

struct PlannedHop
{
    NodeId node = kNoNode;
    HopRole role = HopRole::Member;

    friend bool operator==(const PlannedHop&, const PlannedHop&) = default;
};

/// Minimum-CH-hop route from `src_ch` to the head of `dst` (breadth first,
/// ascending head ids). Links through gateways on `excluded` are skipped.
/// Throws NoRoute when the destination cluster is unreachable.
ChPath discover_route(const ClusterMap& map, NodeId src_ch, NodeId dst, const Blacklist& excluded);

/// Radio hops src -> head -> [gateways -> head]* -> dst. The source or
/// destination is folded into the first or last head when it is that head.
std::vector<PlannedHop> hop_plan(const ChPath& path, NodeId src, NodeId dst);

/// At most two gateways between consecutive heads.
bool valid_route_shape(const ChPath& path);

/// Matches member? (CH (gateway gateway?)?)+ member? on recorded roles.
bool valid_path_shape(std::span<const TraceEntry> trace);

/// True if two consecutive entries are both plain members (neither head nor gateway).
bool has_unsupervised_pair(std::span<const TraceEntry> trace);

struct RouteEntry
{
    NodeId next_head = kNoNode;
    GatewayChain gateways;
    std::size_t hops = 0;

    friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

/// Head-level routing state. Only cluster heads hold one.
class RoutingTable
{
  public:
    /// Breadth-first table for `head` over the current backbone.
    static RoutingTable build(const ClusterMap& map, NodeId head);

    std::size_t size() const { return m_entries.size(); }
    const std::map<NodeId, RouteEntry>& entries() const { return m_entries; }
    const RouteEntry* find(NodeId dest_head) const;

    /// Installs routes learned from a neighboring head's adjacency exchange:
    /// every advertised head not yet known becomes reachable through `advertiser`.
    /// Returns the number of new entries.
    std::size_t merge_from_head(NodeId self, NodeId advertiser, const GatewayChain& chain,
                                std::span<const NodeId> advertised);

    friend bool operator==(const RoutingTable&, const RoutingTable&) = default;

  private:
    std::map<NodeId, RouteEntry> m_entries;
};

struct Session
{
    SessionId id = 0;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    NodeId admitted_by = kNoNode;
    ChPath ch_path;
    std::uint64_t planned_packets = 0;
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_acked = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    double start_time = 0.0;
    double end_time = -1.0;
    double last_delivery = -1.0;
    bool rejected = false;
    bool charged = false;

    bool finished() const { return delivered + dropped >= planned_packets; }
};

enum class Admission
{
    Accepted,
    RejectedUntrusted,
    RejectedBlacklisted,
    RejectedSpoofed,
    NotMember,
};

std::string_view to_string(Admission admission);

/// Physical link id -> node registered on it at this head.
class LinkRegistry
{
  public:
    void enroll(NodeId link, NodeId owner) { m_owner[link] = owner; }
    void withdraw(NodeId link) { m_owner.erase(link); }
    const NodeId* owner(NodeId link) const;
    std::size_t size() const { return m_owner.size(); }
    void clear() { m_owner.clear(); }

  private:
    std::map<NodeId, NodeId> m_owner;
};

struct AdmissionDecision
{
    Admission outcome = Admission::Accepted;
    /// For RejectedSpoofed: the registered owner of the link used.
    NodeId offender = kNoNode;
    double requester_trust = 0.0;
};

/// A head's gatekeeping of a transfer request arriving on `link` and claiming `claimed_src`:
/// identity by link, then the blacklist, then positive trust.
AdmissionDecision originate_request(const LinkRegistry& links, const TrustLedger& ledger, const Blacklist& blacklist,
                                    NodeId link, NodeId claimed_src);

/// Pending transfer requests at one head, served highest requester trust first, then FIFO.
class RequestQueue
{
  public:
    struct Request
    {
        SessionId session = 0;
        NodeId requester = kNoNode;
        double trust = 0.0;
        std::uint64_t order = 0;
    };

    void push(SessionId session, NodeId requester, double trust);
    Request pop();
    bool empty() const { return m_queue.empty(); }
    std::size_t size() const { return m_queue.size(); }

  private:
    struct Lower
    {
        bool operator()(const Request& a, const Request& b) const
        {
            if (a.trust != b.trust)
            {
                return a.trust < b.trust;
            }
            return a.order > b.order;
        }
    };

    std::priority_queue<Request, std::vector<Request>, Lower> m_queue;
    std::uint64_t m_next = 0;
};

/// factor * per-hop transmission time * radio hops on the path.
double ack_timeout(double factor, double hop_time, std::size_t path_hops);

} // namespace c3h
