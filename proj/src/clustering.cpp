#include "c3h/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace c3h
{

void ElectionWeights::validate() const
{
    if (energy < 0.0 || trust < 0.0 || mobility < 0.0 || dnc < 0.0)
    {
        throw Error(ErrorCode::InvalidWeights, "election weights must be non-negative");
    }
    if (std::abs(energy + trust + mobility + dnc - 1.0) > 1e-9)
    {
        throw Error(ErrorCode::InvalidWeights, "election weights must sum to 1");
    }
}

double res_eng(double expended, double total)
{
    if (!(total > 0.0))
    {
        throw Error(ErrorCode::InvalidEnergy, "total energy must be positive");
    }
    return std::clamp(1.0 - expended / total, 0.0, 1.0);
}

double dnc(std::size_t ndnb_ni, std::size_t ndnb_ch)
{
    if (ndnb_ch == 0)
    {
        throw Error(ErrorCode::InvalidClusterHead, "cluster head without downlink neighbors must be re-elected");
    }
    const std::size_t cap = 2 * ndnb_ch;
    const std::size_t effective = std::min(ndnb_ni, cap);
    return static_cast<double>(effective) / static_cast<double>(cap);
}

double mobility_membership(double avg_mob, double v_max)
{
    if (!(v_max > 0.0))
    {
        return avg_mob == 0.0 ? 1.0 : 0.0;
    }
    return 1.0 - std::min(std::abs(avg_mob) / v_max, 1.0);
}

double composite_score(const ElectionMetrics& m, const ElectionWeights& w)
{
    return w.energy * m.res_eng + w.trust * m.trust + w.mobility * m.mobility_membership + w.dnc * m.dnc;
}

NodeId elect_ch(std::span<const Candidate> candidates, const ElectionWeights& w, double energy_floor)
{
    if (candidates.empty())
    {
        throw Error(ErrorCode::NoCandidates, "election without candidates");
    }
    const bool any_qualified = std::any_of(candidates.begin(), candidates.end(),
                                           [&](const Candidate& c) { return c.metrics.res_eng >= energy_floor; });

    NodeId best = kNoNode;
    double best_score = 0.0;
    for (const Candidate& c : candidates)
    {
        if (any_qualified && c.metrics.res_eng < energy_floor)
        {
            continue;
        }
        const double score = composite_score(c.metrics, w);
        if (best == kNoNode || score > best_score || (score == best_score && c.id < best))
        {
            best = c.id;
            best_score = score;
        }
    }
    return best;
}

Adjacency::Adjacency(std::size_t node_count)
    : m_neighbors(node_count),
      m_matrix(node_count * node_count, 0)
{
}

void Adjacency::link(NodeId a, NodeId b)
{
    if (a == b || linked(a, b))
    {
        return;
    }
    m_matrix[index(a, b)] = 1;
    m_matrix[index(b, a)] = 1;
    m_neighbors[a].insert(std::lower_bound(m_neighbors[a].begin(), m_neighbors[a].end(), b), b);
    m_neighbors[b].insert(std::lower_bound(m_neighbors[b].begin(), m_neighbors[b].end(), a), a);
}

ClusterMap::ClusterMap(std::size_t node_count)
    : m_head_of(node_count, kNoNode)
{
}

bool ClusterMap::is_gateway(NodeId node) const
{
    const NodeId ch = m_head_of[node];
    if (ch == kNoNode || ch == node)
    {
        return false;
    }
    return m_clusters.at(ch).gateways.contains(node);
}

const Cluster* ClusterMap::cluster(NodeId ch) const
{
    auto it = m_clusters.find(ch);
    return it == m_clusters.end() ? nullptr : &it->second;
}

GatewayChain ClusterMap::gateways_between(NodeId from, NodeId to) const
{
    auto it = m_links.find(ChPair::of(from, to));
    if (it == m_links.end())
    {
        return {};
    }
    GatewayChain chain = it->second;
    if (from > to)
    {
        std::reverse(chain.begin(), chain.end());
    }
    return chain;
}

void ClusterMap::make_head(NodeId ch)
{
    if (m_head_of[ch] == ch)
    {
        return;
    }
    if (m_head_of[ch] != kNoNode)
    {
        remove(ch);
    }
    Cluster c;
    c.ch = ch;
    m_clusters.emplace(ch, std::move(c));
    m_head_of[ch] = ch;
}

void ClusterMap::add_member(NodeId ch, NodeId node)
{
    if (node == ch || m_head_of[node] == ch)
    {
        return;
    }
    if (m_head_of[node] != kNoNode)
    {
        remove(node);
    }
    m_clusters.at(ch).members.insert(node);
    m_head_of[node] = ch;
}

std::vector<MembershipEvent> ClusterMap::remove(NodeId node)
{
    std::vector<MembershipEvent> events;
    const NodeId ch = m_head_of[node];
    if (ch == kNoNode)
    {
        return events;
    }
    if (ch == node)
    {
        dissolve(ch, events);
        return events;
    }
    Cluster& c = m_clusters.at(ch);
    c.members.erase(node);
    m_head_of[node] = kNoNode;
    std::erase_if(m_links, [&](const auto& entry) {
        return std::find(entry.second.begin(), entry.second.end(), node) != entry.second.end();
    });
    rebuild_gateway_sets();
    events.push_back({MembershipEvent::Kind::Left, node, ch});
    return events;
}

void ClusterMap::set_link(ChPair pair, GatewayChain chain)
{
    m_links[pair] = std::move(chain);
    rebuild_gateway_sets();
}

void ClusterMap::dissolve(NodeId ch, std::vector<MembershipEvent>& events)
{
    auto it = m_clusters.find(ch);
    if (it == m_clusters.end())
    {
        return;
    }
    for (NodeId m : it->second.members)
    {
        m_head_of[m] = kNoNode;
        events.push_back({MembershipEvent::Kind::Left, m, ch});
    }
    m_head_of[ch] = kNoNode;
    m_clusters.erase(it);
    std::erase_if(m_links, [&](const auto& entry) { return entry.first.low == ch || entry.first.high == ch; });
    rebuild_gateway_sets();
    events.push_back({MembershipEvent::Kind::Dissolved, ch, ch});
}

void ClusterMap::rebuild_gateway_sets()
{
    for (auto& [ch, c] : m_clusters)
    {
        c.gateways.clear();
    }
    for (const auto& [pair, chain] : m_links)
    {
        for (NodeId g : chain)
        {
            const NodeId h = m_head_of[g];
            if (h != kNoNode && h != g)
            {
                m_clusters.at(h).gateways.insert(g);
            }
        }
    }
}

namespace
{

/// Moves the surviving members of a retired head's cluster under `winner`.
void absorb(ClusterMap& map, const ClusterContext& ctx, NodeId winner, const std::vector<NodeId>& former,
            std::vector<MembershipEvent>& events)
{
    const Adjacency& adj = *ctx.adjacency;
    for (NodeId m : former)
    {
        if (m == winner)
        {
            continue;
        }
        if (ctx.active(m) && adj.linked(winner, m) && ctx.admits(m, winner))
        {
            map.add_member(winner, m);
            events.push_back({MembershipEvent::Kind::Joined, m, winner});
        }
        else
        {
            events.push_back({MembershipEvent::Kind::Left, m, kNoNode});
        }
    }
}

std::vector<NodeId> head_ids(const ClusterMap& map)
{
    std::vector<NodeId> heads;
    heads.reserve(map.clusters().size());
    for (const auto& [ch, c] : map.clusters())
    {
        heads.push_back(ch);
    }
    return heads;
}

} // namespace

std::vector<MembershipEvent> maintain_membership(ClusterMap& map, const ClusterContext& ctx)
{
    const Adjacency& adj = *ctx.adjacency;
    std::vector<MembershipEvent> events;

    // Existing clusters: drop dead heads, lost members and heads under the energy floor.
    for (NodeId ch : head_ids(map))
    {
        if (!map.is_head(ch))
        {
            continue;
        }
        if (!ctx.active(ch) || adj.degree(ch) == 0)
        {
            map.dissolve(ch, events);
            continue;
        }
        const std::vector<NodeId> members(map.cluster(ch)->members.begin(), map.cluster(ch)->members.end());
        for (NodeId m : members)
        {
            if (!ctx.active(m) || !adj.linked(ch, m) || !ctx.admits(m, ch))
            {
                auto left = map.remove(m);
                events.insert(events.end(), left.begin(), left.end());
            }
        }
        if (ctx.must_step_down(ch))
        {
            std::vector<Candidate> candidates;
            candidates.push_back({ch, ctx.metrics(ch, adj.degree(ch))});
            for (NodeId m : map.cluster(ch)->members)
            {
                candidates.push_back({m, ctx.metrics(m, adj.degree(ch))});
            }
            const NodeId winner = elect_ch(candidates, ctx.weights);
            if (winner != ch)
            {
                std::vector<NodeId> former(map.cluster(ch)->members.begin(), map.cluster(ch)->members.end());
                former.push_back(ch);
                std::vector<MembershipEvent> ignored;
                map.dissolve(ch, ignored);
                map.make_head(winner);
                events.push_back({MembershipEvent::Kind::Elected, winner, winner});
                absorb(map, ctx, winner, former, events);
            }
        }
    }

    // Heads that drifted into radio range of each other merge.
    for (;;)
    {
        std::optional<std::pair<NodeId, NodeId>> meeting;
        for (const auto& [a, c] : map.clusters())
        {
            for (NodeId b : adj.neighbors(a))
            {
                if (b > a && map.is_head(b))
                {
                    meeting = std::pair{a, b};
                    break;
                }
            }
            if (meeting)
            {
                break;
            }
        }
        if (!meeting)
        {
            break;
        }
        const auto [a, b] = *meeting;
        const std::size_t ref = std::max(adj.degree(a), adj.degree(b));
        const Candidate pair[] = {{a, ctx.metrics(a, ref)}, {b, ctx.metrics(b, ref)}};
        const NodeId winner = elect_ch(pair, ctx.weights);
        const NodeId loser = winner == a ? b : a;
        std::vector<NodeId> former(map.cluster(loser)->members.begin(), map.cluster(loser)->members.end());
        former.insert(former.begin(), loser);
        std::vector<MembershipEvent> ignored;
        map.dissolve(loser, ignored);
        events.push_back({MembershipEvent::Kind::Merged, loser, winner});
        absorb(map, ctx, winner, former, events);
    }

    // Unclustered nodes join the best admitting head in range.
    std::map<NodeId, double> head_score;
    for (const auto& [ch, c] : map.clusters())
    {
        head_score[ch] = composite_score(ctx.metrics(ch, adj.degree(ch)), ctx.weights);
    }
    for (NodeId n = 0; n < map.node_count(); ++n)
    {
        if (map.is_clustered(n) || !ctx.active(n))
        {
            continue;
        }
        NodeId best = kNoNode;
        for (NodeId nb : adj.neighbors(n))
        {
            if (!map.is_head(nb) || !ctx.admits(n, nb))
            {
                continue;
            }
            if (best == kNoNode || head_score[nb] > head_score[best])
            {
                best = nb;
            }
        }
        if (best != kNoNode)
        {
            map.add_member(best, n);
            events.push_back({MembershipEvent::Kind::Joined, n, best});
        }
    }

    // Remaining nodes elect fresh heads among themselves.
    std::set<NodeId> pool;
    for (NodeId n = 0; n < map.node_count(); ++n)
    {
        if (map.is_clustered(n) || !ctx.active(n) || adj.degree(n) == 0)
        {
            continue;
        }
        const bool near_head =
            std::any_of(adj.neighbors(n).begin(), adj.neighbors(n).end(), [&](NodeId nb) { return map.is_head(nb); });
        if (!near_head)
        {
            pool.insert(n);
        }
    }
    while (!pool.empty())
    {
        std::size_t max_degree = 0;
        for (NodeId n : pool)
        {
            max_degree = std::max(max_degree, adj.degree(n));
        }
        const std::size_t ref = std::max<std::size_t>(1, (max_degree + 1) / 2);
        std::vector<Candidate> candidates;
        candidates.reserve(pool.size());
        for (NodeId n : pool)
        {
            candidates.push_back({n, ctx.metrics(n, ref)});
        }
        const NodeId winner = elect_ch(candidates, ctx.weights);
        map.make_head(winner);
        pool.erase(winner);
        events.push_back({MembershipEvent::Kind::Elected, winner, winner});
        for (NodeId nb : adj.neighbors(winner))
        {
            if (map.is_clustered(nb) || !ctx.active(nb))
            {
                continue;
            }
            pool.erase(nb);
            if (ctx.admits(nb, winner))
            {
                map.add_member(winner, nb);
                events.push_back({MembershipEvent::Kind::Joined, nb, winner});
            }
        }
    }

    return events;
}

bool designate_gateways(ClusterMap& map, const ClusterContext& ctx)
{
    const Adjacency& adj = *ctx.adjacency;
    std::vector<double> score(map.node_count(), -1.0);
    auto score_of = [&](NodeId n) {
        if (score[n] < 0.0)
        {
            const NodeId h = map.head_of(n);
            const std::size_t ref = std::max<std::size_t>(1, adj.degree(h));
            score[n] = composite_score(ctx.metrics(n, ref), ctx.weights);
        }
        return score[n];
    };

    auto valid = [&](ChPair pair, const GatewayChain& chain) {
        if (!map.is_head(pair.low) || !map.is_head(pair.high) || chain.empty() || chain.size() > 2)
        {
            return false;
        }
        for (NodeId g : chain)
        {
            if (!ctx.active(g) || map.is_head(g))
            {
                return false;
            }
        }
        if (chain.size() == 1)
        {
            const NodeId g = chain.front();
            const NodeId h = map.head_of(g);
            return (h == pair.low || h == pair.high) && adj.linked(pair.low, g) && adj.linked(g, pair.high);
        }
        return map.head_of(chain[0]) == pair.low && map.head_of(chain[1]) == pair.high &&
               adj.linked(pair.low, chain[0]) && adj.linked(chain[0], chain[1]) && adj.linked(chain[1], pair.high);
    };

    struct Best
    {
        GatewayChain chain;
        double score = 0.0;
    };
    auto better = [](const GatewayChain& chain, double s, const Best& current) {
        if (chain.size() != current.chain.size())
        {
            return chain.size() < current.chain.size();
        }
        if (s != current.score)
        {
            return s > current.score;
        }
        return chain < current.chain;
    };

    std::map<ChPair, Best> best;
    auto offer = [&](ChPair pair, GatewayChain chain, double s) {
        auto it = best.find(pair);
        if (it == best.end())
        {
            best.emplace(pair, Best{std::move(chain), s});
        }
        else if (better(chain, s, it->second))
        {
            it->second = Best{std::move(chain), s};
        }
    };

    for (NodeId m = 0; m < map.node_count(); ++m)
    {
        if (!map.is_clustered(m) || map.is_head(m) || !ctx.active(m))
        {
            continue;
        }
        const NodeId h = map.head_of(m);
        for (NodeId nb : adj.neighbors(m))
        {
            if (map.is_head(nb))
            {
                if (nb != h)
                {
                    offer(ChPair::of(h, nb), GatewayChain{m}, score_of(m));
                }
                continue;
            }
            if (!map.is_clustered(nb) || !ctx.active(nb))
            {
                continue;
            }
            const NodeId other = map.head_of(nb);
            if (other == h || h > other)
            {
                continue;
            }
            offer(ChPair{h, other}, GatewayChain{m, nb}, score_of(m) + score_of(nb));
        }
    }

    std::map<ChPair, GatewayChain> next;
    for (auto& [pair, choice] : best)
    {
        if (adj.linked(pair.low, pair.high))
        {
            continue;
        }
        auto old = map.m_links.find(pair);
        if (old != map.m_links.end() && valid(pair, old->second))
        {
            next.emplace(pair, old->second);
        }
        else
        {
            next.emplace(pair, std::move(choice.chain));
        }
    }

    const bool changed = next != map.m_links;
    map.m_links = std::move(next);
    map.rebuild_gateway_sets();
    return changed;
}

} // namespace c3h
