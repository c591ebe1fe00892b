#include "c3h/cli/results.hpp"

#include "c3h/event_log.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace c3h::cli
{

namespace
{

std::string optional_text(const std::optional<double>& v)
{
    return v ? format_fixed(*v) : "NA";
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep))
    {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == sep)
    {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string& text, std::size_t line)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(text, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != text.size())
    {
        throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + text + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& text, std::size_t line)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    {
        throw std::runtime_error("line " + std::to_string(line) + ": bad integer '" + text + "'");
    }
    return std::stoull(text);
}

std::optional<double> parse_optional(const std::string& text, std::size_t line)
{
    if (text == "NA")
    {
        return std::nullopt;
    }
    return parse_number(text, line);
}

std::string metric_line(const std::string& name, const std::vector<double>& values, std::size_t rows)
{
    const auto s = stat_of(values);
    std::string out = "  " + name + ": ";
    if (!s)
    {
        return out + "NA\n";
    }
    out += format_fixed(s->mean) + " +- " + format_fixed(s->stddev);
    if (s->n != rows)
    {
        out += " (" + std::to_string(s->n) + " of " + std::to_string(rows) + " runs)";
    }
    return out + "\n";
}

} // namespace

std::string format_fixed(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string attack_label(const std::vector<BehaviorKind>& kinds)
{
    std::string out;
    for (BehaviorKind k : kinds)
    {
        if (!out.empty())
        {
            out += ';';
        }
        out += to_string(k);
    }
    return out;
}

ResultRow make_row(std::size_t node_count, std::uint64_t seed, double malicious_fraction,
                   const std::vector<BehaviorKind>& kinds, const Metrics& m)
{
    ResultRow r;
    r.node_count = node_count;
    r.seed = seed;
    r.malicious_fraction = malicious_fraction;
    r.attack_kinds = attack_label(kinds);
    r.detection_rate = m.detection_rate;
    r.false_positives = m.false_positives;
    r.throughput = m.throughput;
    r.mean_e2e_delay = m.mean_e2e_delay;
    return r;
}

std::string format_csv(const ResultsTable& table)
{
    std::string out = kCsvHeader;
    out += '\n';
    for (const ResultRow& r : table)
    {
        out += std::to_string(r.node_count) + ',' + std::to_string(r.seed) + ',' + format_double(r.malicious_fraction) +
               ',' + r.attack_kinds + ',' + optional_text(r.detection_rate) + ',' + std::to_string(r.false_positives) +
               ',' + optional_text(r.throughput) + ',' + optional_text(r.mean_e2e_delay) + '\n';
    }
    return out;
}

ResultsTable parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
    {
        throw std::runtime_error("line 1: unexpected header");
    }
    ResultsTable table;
    std::size_t n = 1;
    while (std::getline(in, line))
    {
        ++n;
        if (line.empty())
        {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 8)
        {
            throw std::runtime_error("line " + std::to_string(n) + ": expected 8 columns");
        }
        ResultRow r;
        r.node_count = parse_unsigned(f[0], n);
        r.seed = parse_unsigned(f[1], n);
        r.malicious_fraction = parse_number(f[2], n);
        r.attack_kinds = f[3];
        r.detection_rate = parse_optional(f[4], n);
        r.false_positives = parse_unsigned(f[5], n);
        r.throughput = parse_optional(f[6], n);
        r.mean_e2e_delay = parse_optional(f[7], n);
        table.push_back(std::move(r));
    }
    return table;
}

std::optional<Stat> stat_of(const std::vector<double>& values)
{
    if (values.empty())
    {
        return std::nullopt;
    }
    Stat s;
    s.n = values.size();
    double sum = 0.0;
    for (double v : values)
    {
        sum += v;
    }
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1)
    {
        double sq = 0.0;
        for (double v : values)
        {
            sq += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
    }
    return s;
}

std::string format_summary(const ResultsTable& table)
{
    std::map<std::size_t, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : table)
    {
        groups[r.node_count].push_back(&r);
    }
    std::string out;
    for (const auto& [nodes, rows] : groups)
    {
        out += "node_count " + std::to_string(nodes) + " (" + std::to_string(rows.size()) + " runs)\n";
        for (const std::string& metric : kMetricNames)
        {
            std::vector<double> values;
            for (const ResultRow* r : rows)
            {
                if (auto v = metric_value(*r, metric))
                {
                    values.push_back(*v);
                }
            }
            out += metric_line(metric, values, rows.size());
        }
    }
    return out;
}

UnknownMetric::UnknownMetric(const std::string& name)
    : std::runtime_error("unknown metric '" + name + "'; valid metrics: detection_rate, false_positives, throughput, "
                         "mean_e2e_delay")
{
}

std::optional<double> metric_value(const ResultRow& row, const std::string& metric)
{
    if (metric == "detection_rate")
    {
        return row.detection_rate;
    }
    if (metric == "false_positives")
    {
        return static_cast<double>(row.false_positives);
    }
    if (metric == "throughput")
    {
        return row.throughput;
    }
    if (metric == "mean_e2e_delay")
    {
        return row.mean_e2e_delay;
    }
    throw UnknownMetric(metric);
}

PlotData emit_plotdata(const ResultsTable& table, const std::string& metric)
{
    bool known = false;
    for (const std::string& m : kMetricNames)
    {
        known |= m == metric;
    }
    if (!known)
    {
        throw UnknownMetric(metric);
    }
    if (table.empty())
    {
        throw std::invalid_argument("empty results table");
    }

    using Key = std::pair<double, std::string>;
    std::map<Key, std::map<std::size_t, std::vector<double>>> groups;
    for (const ResultRow& r : table)
    {
        auto& by_nodes = groups[{r.malicious_fraction, r.attack_kinds}];
        auto& values = by_nodes[r.node_count];
        if (auto v = metric_value(r, metric))
        {
            values.push_back(*v);
        }
    }

    PlotData data;
    data.metric = metric;
    for (const auto& [key, by_nodes] : groups)
    {
        PlotSeries s;
        s.malicious_fraction = key.first;
        s.attack_kinds = key.second;
        for (const auto& [nodes, values] : by_nodes)
        {
            if (auto st = stat_of(values))
            {
                s.points.push_back({static_cast<double>(nodes), st->mean, st->stddev});
            }
        }
        if (s.points.empty())
        {
            data.notices.push_back(metric + " omitted for malicious_fraction " + format_double(key.first) +
                                   " attack_kinds " + key.second + ": not applicable in any run");
            continue;
        }
        data.series.push_back(std::move(s));
    }
    return data;
}

std::string format_plotdata(const PlotData& data)
{
    std::string out;
    for (const std::string& n : data.notices)
    {
        out += "# notice: " + n + '\n';
    }
    for (const PlotSeries& s : data.series)
    {
        out += "# metric " + data.metric + " malicious_fraction " + format_double(s.malicious_fraction) +
               " attack_kinds " + s.attack_kinds + '\n';
        out += "x,y,err\n";
        for (const PlotPoint& p : s.points)
        {
            out += format_double(p.x) + ',' + format_fixed(p.y) + ',' + format_fixed(p.err) + '\n';
        }
        out += '\n';
    }
    return out;
}

} // namespace c3h::cli
