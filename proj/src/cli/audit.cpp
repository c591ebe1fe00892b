#include "c3h/cli/audit.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace c3h::cli
{

namespace
{

SessionId session_of(const LogRecord& r)
{
    std::istringstream in(r.detail);
    SessionId id = 0;
    in >> id;
    return id;
}

} // namespace

std::vector<LogRecord> read_log(const std::string& text)
{
    std::vector<LogRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
    {
        ++n;
        if (line.empty())
        {
            continue;
        }
        auto r = parse_record(line);
        if (!r)
        {
            throw std::runtime_error("event log line " + std::to_string(n) + " is malformed");
        }
        out.push_back(std::move(*r));
    }
    return out;
}

std::string write_log(const std::vector<LogRecord>& records)
{
    std::string out;
    for (const LogRecord& r : records)
    {
        out += format_record(r);
        out += '\n';
    }
    return out;
}

Metrics derive_metrics(const std::vector<LogRecord>& records)
{
    std::vector<PlantedAttacker> planted;
    std::map<NodeId, std::size_t> planted_index;
    std::set<NodeId> expelled;
    std::map<SessionId, Session> sessions;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t expired = 0;

    for (const LogRecord& r : records)
    {
        if (r.kind == "plant")
        {
            const auto kind = parse_behavior(r.detail);
            if (!kind)
            {
                throw std::runtime_error("plant record with unknown behavior '" + r.detail + "'");
            }
            planted_index[r.a] = planted.size();
            planted.push_back({r.a, *kind, false});
        }
        else if (r.kind == "acted")
        {
            if (auto it = planted_index.find(r.a); it != planted_index.end())
            {
                planted[it->second].acted = true;
            }
        }
        else if (r.kind == "expel")
        {
            expelled.insert(r.a);
        }
        else if (r.kind == "session")
        {
            Session s;
            s.id = session_of(r);
            s.src = r.a;
            s.dst = r.b;
            s.start_time = r.time;
            sessions[s.id] = s;
        }
        else if (r.kind == "generate")
        {
            ++generated;
        }
        else if (r.kind == "deliver")
        {
            ++delivered;
            Session& s = sessions.at(session_of(r));
            ++s.delivered;
            s.last_delivery = r.time;
        }
        else if (r.kind == "drop")
        {
            ++dropped;
        }
        else if (r.kind == "end")
        {
            expired = std::stoull(r.detail);
        }
    }

    std::vector<Session> ordered;
    ordered.reserve(sessions.size());
    for (auto& [id, s] : sessions)
    {
        ordered.push_back(s);
    }
    MetricInputs in;
    in.planted = planted;
    in.expelled = &expelled;
    in.sessions = ordered;
    in.generated = generated;
    in.delivered = delivered;
    in.dropped = dropped;
    in.expired = expired;
    return collect_metrics(in);
}

std::vector<std::string> compare_rows(const ResultRow& published, const ResultRow& derived)
{
    // Compared as published, so a row read back from CSV matches its exact source.
    const auto text = [](const std::optional<double>& v) { return v ? format_fixed(*v) : std::string("NA"); };
    std::vector<std::string> diff;
    if (text(published.detection_rate) != text(derived.detection_rate))
    {
        diff.emplace_back("detection_rate");
    }
    if (published.false_positives != derived.false_positives)
    {
        diff.emplace_back("false_positives");
    }
    if (text(published.throughput) != text(derived.throughput))
    {
        diff.emplace_back("throughput");
    }
    if (text(published.mean_e2e_delay) != text(derived.mean_e2e_delay))
    {
        diff.emplace_back("mean_e2e_delay");
    }
    return diff;
}

} // namespace c3h::cli
