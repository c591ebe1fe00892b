#include "c3h/protocol.hpp"

#include <algorithm>
#include <deque>

namespace c3h
{

namespace
{

using Backbone = std::map<NodeId, std::vector<NodeId>>;

Backbone backbone_of(const ClusterMap& map, const Blacklist* excluded)
{
    Backbone graph;
    for (const auto& [pair, chain] : map.gateway_links())
    {
        if (excluded != nullptr)
        {
            const bool tainted = std::any_of(chain.begin(), chain.end(), [&](NodeId g) { return excluded->contains(g); });
            if (tainted || excluded->contains(pair.low) || excluded->contains(pair.high))
            {
                continue;
            }
        }
        graph[pair.low].push_back(pair.high);
        graph[pair.high].push_back(pair.low);
    }
    for (auto& [head, next] : graph)
    {
        std::sort(next.begin(), next.end());
    }
    return graph;
}

/// Parent pointers of a breadth-first search rooted at `root`.
std::map<NodeId, NodeId> bfs_parents(const Backbone& graph, NodeId root)
{
    std::map<NodeId, NodeId> parent{{root, root}};
    std::deque<NodeId> frontier{root};
    while (!frontier.empty())
    {
        const NodeId at = frontier.front();
        frontier.pop_front();
        auto it = graph.find(at);
        if (it == graph.end())
        {
            continue;
        }
        for (NodeId next : it->second)
        {
            if (parent.try_emplace(next, at).second)
            {
                frontier.push_back(next);
            }
        }
    }
    return parent;
}

} // namespace

ChPath discover_route(const ClusterMap& map, NodeId src_ch, NodeId dst, const Blacklist& excluded)
{
    if (src_ch == kNoNode || !map.is_head(src_ch))
    {
        throw Error(ErrorCode::NoRoute, "route requested from a node that is not a cluster head");
    }
    if (dst == kNoNode || dst >= map.node_count() || !map.is_clustered(dst))
    {
        throw Error(ErrorCode::NoRoute, "destination is not registered in any cluster");
    }
    const NodeId dst_head = map.head_of(dst);
    ChPath path;
    if (dst_head == src_ch)
    {
        path.heads.push_back(src_ch);
        return path;
    }

    const auto parent = bfs_parents(backbone_of(map, &excluded), src_ch);
    if (!parent.contains(dst_head))
    {
        throw Error(ErrorCode::NoRoute, "destination cluster unreachable over the backbone");
    }
    for (NodeId at = dst_head; at != src_ch; at = parent.at(at))
    {
        path.heads.push_back(at);
    }
    path.heads.push_back(src_ch);
    std::reverse(path.heads.begin(), path.heads.end());
    for (std::size_t i = 0; i + 1 < path.heads.size(); ++i)
    {
        path.links.push_back(map.gateways_between(path.heads[i], path.heads[i + 1]));
    }
    return path;
}

std::vector<PlannedHop> hop_plan(const ChPath& path, NodeId src, NodeId dst)
{
    std::vector<PlannedHop> plan;
    if (path.heads.empty())
    {
        return plan;
    }
    if (src != path.heads.front())
    {
        plan.push_back({src, HopRole::Member});
    }
    for (std::size_t i = 0; i < path.heads.size(); ++i)
    {
        plan.push_back({path.heads[i], HopRole::ClusterHead});
        if (i < path.links.size())
        {
            for (NodeId g : path.links[i])
            {
                plan.push_back({g, HopRole::Gateway});
            }
        }
    }
    if (dst != path.heads.back())
    {
        plan.push_back({dst, HopRole::Member});
    }
    return plan;
}

bool valid_route_shape(const ChPath& path)
{
    if (path.heads.empty() || path.links.size() + 1 != path.heads.size())
    {
        return false;
    }
    return std::all_of(path.links.begin(), path.links.end(),
                       [](const GatewayChain& chain) { return !chain.empty() && chain.size() <= 2; });
}

bool valid_path_shape(std::span<const TraceEntry> trace)
{
    const std::size_t n = trace.size();
    std::size_t i = 0;
    auto at = [&](HopRole role) { return i < n && trace[i].role == role; };

    if (at(HopRole::Member))
    {
        ++i;
    }
    std::size_t heads = 0;
    while (at(HopRole::ClusterHead))
    {
        ++i;
        ++heads;
        if (at(HopRole::Gateway))
        {
            ++i;
            if (at(HopRole::Gateway))
            {
                ++i;
            }
        }
    }
    if (heads == 0)
    {
        return false;
    }
    if (at(HopRole::Member))
    {
        ++i;
    }
    return i == n;
}

bool has_unsupervised_pair(std::span<const TraceEntry> trace)
{
    for (std::size_t i = 1; i < trace.size(); ++i)
    {
        if (trace[i - 1].role == HopRole::Member && trace[i].role == HopRole::Member)
        {
            return true;
        }
    }
    return false;
}

RoutingTable RoutingTable::build(const ClusterMap& map, NodeId head)
{
    RoutingTable table;
    if (!map.is_head(head))
    {
        return table;
    }
    const auto parent = bfs_parents(backbone_of(map, nullptr), head);
    for (const auto& [dest, up] : parent)
    {
        if (dest == head)
        {
            continue;
        }
        std::size_t hops = 1;
        NodeId first = dest;
        while (parent.at(first) != head)
        {
            first = parent.at(first);
            ++hops;
        }
        table.m_entries.emplace(dest, RouteEntry{first, map.gateways_between(head, first), hops});
    }
    return table;
}

const RouteEntry* RoutingTable::find(NodeId dest_head) const
{
    auto it = m_entries.find(dest_head);
    return it == m_entries.end() ? nullptr : &it->second;
}

std::size_t RoutingTable::merge_from_head(NodeId self, NodeId advertiser, const GatewayChain& chain,
                                          std::span<const NodeId> advertised)
{
    std::size_t added = 0;
    if (advertiser != self && m_entries.try_emplace(advertiser, RouteEntry{advertiser, chain, 1}).second)
    {
        ++added;
    }
    for (NodeId dest : advertised)
    {
        if (dest == self || dest == advertiser)
        {
            continue;
        }
        if (m_entries.try_emplace(dest, RouteEntry{advertiser, chain, 2}).second)
        {
            ++added;
        }
    }
    return added;
}

std::string_view to_string(PacketKind kind)
{
    switch (kind)
    {
    case PacketKind::Hello:
        return "HELLO";
    case PacketKind::Rreq:
        return "RREQ";
    case PacketKind::Rrep:
        return "RREP";
    case PacketKind::Data:
        return "DATA";
    case PacketKind::Ack:
        return "ACK";
    case PacketKind::TrustReport:
        return "TRUST_REPORT";
    case PacketKind::RouteAdvert:
        return "ROUTE_ADVERT";
    case PacketKind::Blacklist:
        return "BLACKLIST";
    }
    return "UNKNOWN";
}

std::string_view to_string(Admission admission)
{
    switch (admission)
    {
    case Admission::Accepted:
        return "accepted";
    case Admission::RejectedUntrusted:
        return "rejected_untrusted";
    case Admission::RejectedBlacklisted:
        return "rejected_blacklisted";
    case Admission::RejectedSpoofed:
        return "rejected_spoofed";
    case Admission::NotMember:
        return "not_member";
    }
    return "unknown";
}

const NodeId* LinkRegistry::owner(NodeId link) const
{
    auto it = m_owner.find(link);
    return it == m_owner.end() ? nullptr : &it->second;
}

AdmissionDecision originate_request(const LinkRegistry& links, const TrustLedger& ledger, const Blacklist& blacklist,
                                    NodeId link, NodeId claimed_src)
{
    const NodeId* owner = links.owner(link);
    if (owner == nullptr)
    {
        return {Admission::NotMember, kNoNode, 0.0};
    }
    if (*owner != claimed_src)
    {
        return {Admission::RejectedSpoofed, *owner, 0.0};
    }
    if (blacklist.contains(claimed_src))
    {
        return {Admission::RejectedBlacklisted, kNoNode, 0.0};
    }
    if (!ledger.contains(claimed_src))
    {
        return {Admission::NotMember, kNoNode, 0.0};
    }
    const TrustRecord& rec = ledger.at(claimed_src);
    if (!is_eligible(rec))
    {
        return {Admission::RejectedUntrusted, kNoNode, trust_value(rec)};
    }
    return {Admission::Accepted, kNoNode, trust_value(rec)};
}

void RequestQueue::push(SessionId session, NodeId requester, double trust)
{
    m_queue.push(Request{session, requester, trust, m_next++});
}

RequestQueue::Request RequestQueue::pop()
{
    Request top = m_queue.top();
    m_queue.pop();
    return top;
}

double ack_timeout(double factor, double hop_time, std::size_t path_hops)
{
    return factor * hop_time * static_cast<double>(path_hops);
}

} // namespace c3h
