#include "c3h/event_log.hpp"

#include <array>
#include <charconv>

namespace c3h
{

namespace
{

void append_node(std::string& out, NodeId id)
{
    if (id == kNoNode)
    {
        out += '-';
    }
    else
    {
        out += std::to_string(id);
    }
}

std::optional<NodeId> parse_node(std::string_view field)
{
    if (field == "-")
    {
        return kNoNode;
    }
    NodeId id = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
    if (ec != std::errc{} || ptr != field.data() + field.size())
    {
        return std::nullopt;
    }
    return id;
}

} // namespace

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_record(const LogRecord& r)
{
    std::string out = format_double(r.time);
    out += '\t';
    out += r.kind;
    out += '\t';
    append_node(out, r.a);
    out += '\t';
    append_node(out, r.b);
    out += '\t';
    out += std::to_string(r.packet);
    out += '\t';
    out += r.detail;
    return out;
}

std::optional<LogRecord> parse_record(std::string_view line)
{
    std::array<std::string_view, 6> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i < 5; ++i)
    {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos)
        {
            return std::nullopt;
        }
        fields[i] = line.substr(start, tab - start);
        start = tab + 1;
    }
    fields[5] = line.substr(start);

    LogRecord r;
    auto [tp, tec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), r.time);
    if (tec != std::errc{} || tp != fields[0].data() + fields[0].size())
    {
        return std::nullopt;
    }
    r.kind = std::string(fields[1]);
    auto a = parse_node(fields[2]);
    auto b = parse_node(fields[3]);
    if (!a || !b)
    {
        return std::nullopt;
    }
    r.a = *a;
    r.b = *b;
    auto [pp, pec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), r.packet);
    if (pec != std::errc{} || pp != fields[4].data() + fields[4].size())
    {
        return std::nullopt;
    }
    r.detail = std::string(fields[5]);
    return r;
}

void EventLog::add(double time, std::string_view kind, NodeId a, NodeId b, PacketId packet, std::string_view detail)
{
    LogRecord record{time, std::string(kind), a, b, packet, std::string(detail)};
    const std::string line = format_record(record);
    // FNV-1a over the line and its terminator.
    for (unsigned char c : line)
    {
        m_digest ^= c;
        m_digest *= 0x100000001b3ULL;
    }
    m_digest ^= static_cast<unsigned char>('\n');
    m_digest *= 0x100000001b3ULL;
    ++m_count;
    if (m_keep)
    {
        m_records.push_back(std::move(record));
    }
}

} // namespace c3h
