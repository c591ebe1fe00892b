#pragma once

#include "c3h/types.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace c3h
{

/// Fuzzy memberships that feed cluster-head and gateway election.
struct ElectionMetrics
{
    double res_eng = 1.0;
    double trust = 0.5;
    double mobility_membership = 1.0;
    double dnc = 0.5;
};

struct ElectionWeights
{
    double energy = 0.25;
    double trust = 0.25;
    double mobility = 0.25;
    double dnc = 0.25;

    /// Throws InvalidWeights unless all weights are non-negative and sum to 1.
    void validate() const;
};

/// Residual energy below this fraction disqualifies a candidate when others qualify.
inline constexpr double kEnergyFloor = 0.4;

double res_eng(double expended, double total);
double dnc(std::size_t ndnb_ni, std::size_t ndnb_ch);
double mobility_membership(double avg_mob, double v_max);
double composite_score(const ElectionMetrics& m, const ElectionWeights& w);

struct Candidate
{
    NodeId id = kNoNode;
    ElectionMetrics metrics;
};

/// Highest composite score wins; ties go to the lowest id. Candidates under
/// the energy floor only count when nobody clears it.
NodeId elect_ch(std::span<const Candidate> candidates, const ElectionWeights& w, double energy_floor = kEnergyFloor);

/// Symmetric radio-link graph over node ids 0..n-1.
class Adjacency
{
  public:
    explicit Adjacency(std::size_t node_count = 0);

    std::size_t size() const noexcept { return m_neighbors.size(); }
    void link(NodeId a, NodeId b);
    bool linked(NodeId a, NodeId b) const { return a != b && m_matrix[index(a, b)] != 0; }
    const std::vector<NodeId>& neighbors(NodeId a) const { return m_neighbors[a]; }
    std::size_t degree(NodeId a) const { return m_neighbors[a].size(); }

    friend bool operator==(const Adjacency& a, const Adjacency& b) { return a.m_matrix == b.m_matrix; }

  private:
    std::size_t index(NodeId a, NodeId b) const { return static_cast<std::size_t>(a) * m_neighbors.size() + b; }

    std::vector<std::vector<NodeId>> m_neighbors;
    std::vector<unsigned char> m_matrix;
};

/// One single-hop cluster. `members` excludes the head itself.
struct Cluster
{
    NodeId ch = kNoNode;
    std::set<NodeId> members;
    std::set<NodeId> gateways;
};

/// Unordered pair of cluster heads, stored low id first.
struct ChPair
{
    NodeId low = kNoNode;
    NodeId high = kNoNode;

    static ChPair of(NodeId a, NodeId b) { return a < b ? ChPair{a, b} : ChPair{b, a}; }
    auto operator<=>(const ChPair&) const = default;
};

/// Gateways linking two heads, listed in order from `low` to `high`.
using GatewayChain = std::vector<NodeId>;

struct MembershipEvent
{
    enum class Kind
    {
        Joined,
        Left,
        Elected,
        Dissolved,
        Merged,
    };

    Kind kind;
    NodeId node = kNoNode;
    NodeId ch = kNoNode;
};

/// World-supplied views the clustering rules consult.
struct ClusterContext
{
    const Adjacency* adjacency = nullptr;
    ElectionWeights weights;
    /// Election metrics of `node` relative to a head with `reference_degree` downlink neighbors.
    std::function<ElectionMetrics(NodeId node, std::size_t reference_degree)> metrics;
    /// Node may hold any role at all (alive, not expelled).
    std::function<bool(NodeId node)> active;
    /// Head `ch` accepts `node` as a member.
    std::function<bool(NodeId node, NodeId ch)> admits;
    /// Head must hand over (for example, residual energy under the floor).
    std::function<bool(NodeId ch)> must_step_down;
};

class ClusterMap
{
  public:
    explicit ClusterMap(std::size_t node_count = 0);

    std::size_t node_count() const noexcept { return m_head_of.size(); }
    const std::map<NodeId, Cluster>& clusters() const noexcept { return m_clusters; }
    const std::map<ChPair, GatewayChain>& gateway_links() const noexcept { return m_links; }

    NodeId head_of(NodeId node) const { return m_head_of[node]; }
    bool is_head(NodeId node) const { return m_head_of[node] == node; }
    bool is_clustered(NodeId node) const { return m_head_of[node] != kNoNode; }
    bool is_gateway(NodeId node) const;
    const Cluster* cluster(NodeId ch) const;

    /// Gateways between two heads, ordered from `from` towards `to`; empty if not CH-adjacent.
    GatewayChain gateways_between(NodeId from, NodeId to) const;

    // Direct mutations, used by the rules below and by tests that build fixed layouts.
    void make_head(NodeId ch);
    void add_member(NodeId ch, NodeId node);
    /// Detaches a node from whatever role it holds; dissolving its cluster if it was a head.
    std::vector<MembershipEvent> remove(NodeId node);
    void set_link(ChPair pair, GatewayChain chain);

    friend std::vector<MembershipEvent> maintain_membership(ClusterMap& map, const ClusterContext& ctx);
    friend bool designate_gateways(ClusterMap& map, const ClusterContext& ctx);

  private:
    void dissolve(NodeId ch, std::vector<MembershipEvent>& events);
    void rebuild_gateway_sets();

    std::map<NodeId, Cluster> m_clusters;
    std::vector<NodeId> m_head_of;
    std::map<ChPair, GatewayChain> m_links;
};

/// Joins, leaves, hand-overs, merges and fresh elections for one topology
/// snapshot. Deterministic: nodes and heads are visited in ascending id order.
std::vector<MembershipEvent> maintain_membership(ClusterMap& map, const ClusterContext& ctx);

/// Picks at most two gateways per neighboring cluster pair. A still-valid
/// designation is kept. Returns true if any designation changed.
bool designate_gateways(ClusterMap& map, const ClusterContext& ctx);

} // namespace c3h
