#pragma once

#include "c3h/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

namespace c3h
{

/// Per-member trust counters; trust = 1 - loose / earn.
struct TrustRecord
{
    std::uint64_t earn_trust = 2;
    std::uint64_t loose_trust = 1;

    friend bool operator==(const TrustRecord&, const TrustRecord&) = default;
};

TrustRecord init_trust();
double trust_value(const TrustRecord& rec);

TrustRecord on_forward_success(TrustRecord rec);
TrustRecord on_selfish(TrustRecord rec);
TrustRecord on_malicious(TrustRecord rec);
TrustRecord on_service_charge(TrustRecord rec);

bool is_eligible(const TrustRecord& rec);
bool is_blacklisted(const TrustRecord& rec, double limit);

/// Why a node was expelled.
enum class Offence
{
    DataDropping,
    Impersonation,
    Tunneling,
    Slander,
    Selfishness,
};

std::string_view to_string(Offence offence);

struct BlacklistEntry
{
    NodeId node = kNoNode;
    Offence reason = Offence::DataDropping;
    double issued_at = 0.0;
    NodeId issuing_ch = kNoNode;
};

/// Records held by one cluster head for its members.
class TrustLedger
{
  public:
    bool contains(NodeId node) const { return m_records.contains(node); }
    std::size_t size() const { return m_records.size(); }

    const TrustRecord& at(NodeId node) const { return m_records.at(node); }
    TrustRecord& at(NodeId node) { return m_records.at(node); }

    /// Inserts a fresh record if the node is unknown.
    TrustRecord& admit(NodeId node);
    void put(NodeId node, TrustRecord rec) { m_records[node] = rec; }
    std::optional<TrustRecord> take(NodeId node);

    const std::map<NodeId, TrustRecord>& records() const { return m_records; }

  private:
    std::map<NodeId, TrustRecord> m_records;
};

/// A cluster head's copy of the network-wide blacklist.
class Blacklist
{
  public:
    /// Returns false if the node was already listed (first entry wins).
    bool insert(const BlacklistEntry& entry);
    bool contains(NodeId node) const { return m_entries.contains(node); }
    std::size_t size() const { return m_entries.size(); }
    const std::map<NodeId, BlacklistEntry>& entries() const { return m_entries; }

  private:
    std::map<NodeId, BlacklistEntry> m_entries;
};

} // namespace c3h
