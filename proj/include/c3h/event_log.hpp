#pragma once

#include "c3h/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace c3h
{

struct LogRecord
{
    double time = 0.0;
    std::string kind;
    NodeId a = kNoNode;
    NodeId b = kNoNode;
    PacketId packet = 0;
    std::string detail;

    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

/// Tab-separated: time kind a b packet detail. Times use the shortest
/// representation that parses back to the same double; absent nodes print as '-'.
std::string format_record(const LogRecord& record);
std::optional<LogRecord> parse_record(std::string_view line);

/// Shortest round-trip text of a double.
std::string format_double(double value);

/// Structured run log. The digest covers every record whether or not the
/// records themselves are retained.
class EventLog
{
  public:
    explicit EventLog(bool keep_records = false)
        : m_keep(keep_records)
    {
    }

    void add(double time, std::string_view kind, NodeId a = kNoNode, NodeId b = kNoNode, PacketId packet = 0,
             std::string_view detail = {});

    std::uint64_t digest() const noexcept { return m_digest; }
    std::uint64_t count() const noexcept { return m_count; }
    bool keeps_records() const noexcept { return m_keep; }
    const std::vector<LogRecord>& records() const noexcept { return m_records; }

  private:
    bool m_keep;
    std::uint64_t m_digest = 0xcbf29ce484222325ULL;
    std::uint64_t m_count = 0;
    std::vector<LogRecord> m_records;
};

} // namespace c3h
