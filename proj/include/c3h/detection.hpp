#pragma once

#include "c3h/clustering.hpp"
#include "c3h/packet.hpp"
#include "c3h/protocol.hpp"
#include "c3h/trust_ledger.hpp"
#include "c3h/types.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace c3h
{

enum class AckStatus : std::uint8_t
{
    Pending,
    Acked,
    Timeout,
};

enum class LinkContext : std::uint8_t
{
    LinkOk,
    LinkBroken,
};

/// One DATA packet handed to a gateway under a head's watch.
struct SurveillanceEntry
{
    PacketId packet = 0;
    double handed_over_at = 0.0;
    AckStatus status = AckStatus::Pending;
    LinkContext context = LinkContext::LinkOk;
    double res_eng = 1.0;
    double rel_mobility = 0.0;
    /// Already used as evidence for a selfish penalty.
    bool consumed = false;
};

/// A head's record of what its gateways were given and what came back.
class SurveillanceLedger
{
  public:
    /// Returns false if the (gateway, packet) entry already exists.
    bool open(NodeId gateway, PacketId packet, double at, double res_eng, double rel_mobility);

    /// PENDING -> status. Returns false for unknown or already resolved entries.
    bool resolve(NodeId gateway, PacketId packet, AckStatus status, LinkContext context = LinkContext::LinkOk);

    const SurveillanceEntry* find(NodeId gateway, PacketId packet) const;
    std::vector<SurveillanceEntry> entries(NodeId gateway) const;

    /// Gateways with a pending entry for `packet`, ascending.
    std::vector<NodeId> pending(PacketId packet) const;

    /// Marks the listed entries of `gateway` as spent evidence.
    void consume(NodeId gateway, const std::vector<PacketId>& packets);

    std::size_t size() const;

  private:
    std::map<NodeId, std::map<PacketId, SurveillanceEntry>> m_entries;
};

struct DetectionThresholds
{
    std::size_t accusation_threshold = 3;
    double energy_high = 0.5;
    double velocity_low = 5.0;
    /// Lowest residual energy at which a silent gateway is still called selfish.
    double energy_floor = kEnergyFloor;
    std::size_t nuisance_limit = 5;
};

enum class VerdictKind : std::uint8_t
{
    Normal,
    Selfish,
    Malicious,
    Inconclusive,
};

std::string_view to_string(VerdictKind kind);

struct Verdict
{
    NodeId target = kNoNode;
    VerdictKind kind = VerdictKind::Normal;
    Offence offence = Offence::DataDropping;
    std::vector<PacketId> evidence;
};

/// Throws NoEvidence if the gateway has no resolved, unconsumed entry.
Verdict judge_forwarding(const SurveillanceLedger& ledger, NodeId gateway, const DetectionThresholds& thresholds);

/// The frame on `link` claims to come from `claimed`. Throws UnknownLink for unregistered links.
Verdict verify_identity(const LinkRegistry& links, NodeId link, NodeId claimed);

enum class ReportOutcome : std::uint8_t
{
    Discarded,
    ReporterSelfish,
};

/// Per-head count of TRUST_REPORTs by (reporter, target).
class SlanderMonitor
{
  public:
    std::size_t count(NodeId reporter, NodeId target) const;
    std::size_t bump(NodeId reporter, NodeId target);
    void reset(NodeId reporter, NodeId target);

  private:
    std::map<std::pair<NodeId, NodeId>, std::size_t> m_counts;
};

/// Reports never touch the target. Once a reporter exceeds `nuisance_limit`
/// reports against one target it is flagged selfish and its count restarts.
ReportOutcome handle_trust_report(SlanderMonitor& monitor, NodeId ch, const Packet& report, std::size_t nuisance_limit);

/// Only an adjacency exchange sent by a neighboring head is merged into `table`.
/// Returns true if the advert was accepted.
bool handle_route_advert(RoutingTable& table, NodeId self, const Packet& advert, const ClusterMap& map);

} // namespace c3h
