#include "c3h/trust_ledger.hpp"

#include <algorithm>

namespace c3h
{

TrustRecord init_trust()
{
    return TrustRecord{2, 1};
}

double trust_value(const TrustRecord& rec)
{
    return 1.0 - static_cast<double>(rec.loose_trust) / static_cast<double>(rec.earn_trust);
}

TrustRecord on_forward_success(TrustRecord rec)
{
    ++rec.earn_trust;
    return rec;
}

TrustRecord on_selfish(TrustRecord rec)
{
    rec.loose_trust = std::min(rec.loose_trust + 1, rec.earn_trust);
    return rec;
}

TrustRecord on_malicious(TrustRecord rec)
{
    rec.loose_trust = rec.earn_trust;
    return rec;
}

TrustRecord on_service_charge(TrustRecord rec)
{
    rec.loose_trust = std::min(rec.loose_trust + 1, rec.earn_trust);
    return rec;
}

bool is_eligible(const TrustRecord& rec)
{
    // loose < earn  <=>  1 - loose/earn > 0, without rounding.
    return rec.loose_trust < rec.earn_trust;
}

bool is_blacklisted(const TrustRecord& rec, double limit)
{
    // (earn - loose) / earn < limit, compared without the subtraction from 1.
    return static_cast<double>(rec.earn_trust - rec.loose_trust) < limit * static_cast<double>(rec.earn_trust);
}

std::string_view to_string(Offence offence)
{
    switch (offence)
    {
    case Offence::DataDropping:
        return "data_dropping";
    case Offence::Impersonation:
        return "impersonation";
    case Offence::Tunneling:
        return "tunneling";
    case Offence::Slander:
        return "slander";
    case Offence::Selfishness:
        return "selfishness";
    }
    return "unknown";
}

TrustRecord& TrustLedger::admit(NodeId node)
{
    return m_records.try_emplace(node, init_trust()).first->second;
}

std::optional<TrustRecord> TrustLedger::take(NodeId node)
{
    auto it = m_records.find(node);
    if (it == m_records.end())
    {
        return std::nullopt;
    }
    TrustRecord rec = it->second;
    m_records.erase(it);
    return rec;
}

bool Blacklist::insert(const BlacklistEntry& entry)
{
    return m_entries.try_emplace(entry.node, entry).second;
}

} // namespace c3h
