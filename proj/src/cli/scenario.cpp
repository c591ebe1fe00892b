#include "c3h/cli/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace c3h::cli
{

namespace
{

int line_of(const YAML::Node& n)
{
    const YAML::Mark m = n.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& field)
{
    if (!n.IsScalar())
    {
        throw ScenarioError(field, line_of(n), "expected a single value");
    }
    try
    {
        return n.as<T>();
    }
    catch (const YAML::BadConversion&)
    {
        throw ScenarioError(field, line_of(n), "invalid value '" + n.Scalar() + "'");
    }
}

double number(const YAML::Node& n, const std::string& field)
{
    const double v = scalar<double>(n, field);
    if (!std::isfinite(v))
    {
        throw ScenarioError(field, line_of(n), "must be finite");
    }
    return v;
}

std::uint64_t count(const YAML::Node& n, const std::string& field)
{
    const std::string text = scalar<std::string>(n, field);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    {
        throw ScenarioError(field, line_of(n), "expected a non-negative integer, got '" + text + "'");
    }
    try
    {
        return std::stoull(text);
    }
    catch (const std::exception&)
    {
        throw ScenarioError(field, line_of(n), "integer out of range");
    }
}

NodeId node_id(const YAML::Node& n, const std::string& field)
{
    const std::uint64_t v = count(n, field);
    if (v >= kNoNode)
    {
        throw ScenarioError(field, line_of(n), "node id out of range");
    }
    return static_cast<NodeId>(v);
}

BehaviorKind behavior(const YAML::Node& n, const std::string& field)
{
    const std::string text = scalar<std::string>(n, field);
    const auto kind = parse_behavior(text);
    if (!kind)
    {
        throw ScenarioError(field, line_of(n),
                            "unknown behavior '" + text +
                                "' (expected honest, black_hole, grey_hole, wormhole, spoof, slander, table_overflow)");
    }
    return *kind;
}

Interval interval(const YAML::Node& n, const std::string& field)
{
    if (!n.IsSequence() || n.size() != 2)
    {
        throw ScenarioError(field, line_of(n), "expected [low, high]");
    }
    return {number(n[0], field), number(n[1], field)};
}

template <typename T, typename F>
std::vector<T> list(const YAML::Node& n, const std::string& field, F&& item)
{
    if (!n.IsSequence())
    {
        throw ScenarioError(field, line_of(n), "expected a list");
    }
    std::vector<T> out;
    for (const YAML::Node& e : n)
    {
        out.push_back(item(e, field));
    }
    return out;
}

/// Walks one mapping, remembering which keys were read so leftovers can be rejected.
class Section
{
  public:
    Section(const YAML::Node& node, std::string path, std::map<std::string, int>& lines)
        : m_node(node),
          m_path(std::move(path)),
          m_lines(lines)
    {
        if (!m_node.IsMap())
        {
            throw ScenarioError(m_path.empty() ? "<root>" : m_path, line_of(m_node), "expected a mapping");
        }
        for (const auto& kv : m_node)
        {
            const std::string key = kv.first.as<std::string>();
            m_lines.emplace(join(m_path, key), line_of(kv.first));
        }
    }

    /// Calls `f(value, field)` when the key is present.
    template <typename F>
    void on(const std::string& key, F&& f)
    {
        m_used.insert(key);
        const YAML::Node v = std::as_const(m_node)[key];
        if (v && !v.IsNull())
        {
            f(v, join(m_path, key));
        }
    }

    template <typename F>
    void section(const std::string& key, F&& f)
    {
        on(key, [&](const YAML::Node& v, const std::string& field) {
            Section child(v, field, m_lines);
            f(child);
            child.finish();
        });
    }

    void finish() const
    {
        for (const auto& kv : m_node)
        {
            const std::string key = kv.first.as<std::string>();
            if (!m_used.contains(key))
            {
                throw ScenarioError(join(m_path, key), line_of(kv.first), "unknown key '" + key + "'");
            }
        }
    }

    std::map<std::string, int>& lines() { return m_lines; }

  private:
    YAML::Node m_node;
    std::string m_path;
    std::map<std::string, int>& m_lines;
    std::set<std::string> m_used;
};

Placement placement(const YAML::Node& n, const std::string& field, std::map<std::string, int>& lines)
{
    Placement p;
    bool has_node = false;
    bool has_kind = false;
    Section s(n, field, lines);
    s.on("node", [&](const YAML::Node& v, const std::string& f) {
        p.node = node_id(v, f);
        has_node = true;
    });
    s.on("kind", [&](const YAML::Node& v, const std::string& f) {
        p.policy.kind = behavior(v, f);
        has_kind = true;
    });
    s.on("peer", [&](const YAML::Node& v, const std::string& f) { p.policy.peer = node_id(v, f); });
    s.on("victim", [&](const YAML::Node& v, const std::string& f) { p.policy.victim = node_id(v, f); });
    s.on("targets", [&](const YAML::Node& v, const std::string& f) { p.policy.targets = list<NodeId>(v, f, node_id); });
    s.on("rate", [&](const YAML::Node& v, const std::string& f) { p.policy.rate = number(v, f); });
    s.on("drop_probability",
         [&](const YAML::Node& v, const std::string& f) { p.policy.drop_probability = number(v, f); });
    s.finish();
    if (!has_node || !has_kind)
    {
        throw ScenarioError(field, line_of(n), "a placement needs both node and kind");
    }
    return p;
}

Flow flow(const YAML::Node& n, const std::string& field, std::map<std::string, int>& lines)
{
    Flow f;
    bool has_src = false;
    bool has_dst = false;
    Section s(n, field, lines);
    s.on("src", [&](const YAML::Node& v, const std::string& k) {
        f.src = node_id(v, k);
        has_src = true;
    });
    s.on("dst", [&](const YAML::Node& v, const std::string& k) {
        f.dst = node_id(v, k);
        has_dst = true;
    });
    s.on("start", [&](const YAML::Node& v, const std::string& k) { f.start = number(v, k); });
    s.on("stop", [&](const YAML::Node& v, const std::string& k) { f.stop = number(v, k); });
    s.finish();
    if (!has_src || !has_dst)
    {
        throw ScenarioError(field, line_of(n), "a flow needs both src and dst");
    }
    return f;
}

NodeOverride node_override(const YAML::Node& n, const std::string& field, std::map<std::string, int>& lines)
{
    NodeOverride o;
    bool has_node = false;
    Section s(n, field, lines);
    s.on("node", [&](const YAML::Node& v, const std::string& k) {
        o.node = node_id(v, k);
        has_node = true;
    });
    s.on("position", [&](const YAML::Node& v, const std::string& k) {
        const Interval xy = interval(v, k);
        o.position = Position{xy.lo, xy.hi};
    });
    s.on("energy", [&](const YAML::Node& v, const std::string& k) { o.energy = number(v, k); });
    s.on("tx_power", [&](const YAML::Node& v, const std::string& k) { o.tx_power = number(v, k); });
    s.on("rx_power", [&](const YAML::Node& v, const std::string& k) { o.rx_power = number(v, k); });
    s.finish();
    if (!has_node)
    {
        throw ScenarioError(field, line_of(n), "a node entry needs a node id");
    }
    return o;
}

template <typename T, typename F>
std::vector<T> records(const YAML::Node& n, const std::string& field, std::map<std::string, int>& lines, F&& item)
{
    if (!n.IsSequence())
    {
        throw ScenarioError(field, line_of(n), "expected a list");
    }
    std::vector<T> out;
    for (const YAML::Node& e : n)
    {
        out.push_back(item(e, field, lines));
    }
    return out;
}

void read_root(Section& root, Scenario& sc, std::optional<Sweep>& sweep_given)
{
    SimConfig& c = sc.base;
    auto& lines = root.lines();

    root.on("node_count", [&](const YAML::Node& v, const std::string& f) { c.node_count = count(v, f); });
    root.on("seed", [&](const YAML::Node& v, const std::string& f) { c.seed = count(v, f); });
    root.on("sim_duration", [&](const YAML::Node& v, const std::string& f) { c.sim_duration = number(v, f); });
    root.on("packet_size",
            [&](const YAML::Node& v, const std::string& f) { c.packet_size = static_cast<std::uint32_t>(count(v, f)); });
    root.on("control_size",
            [&](const YAML::Node& v, const std::string& f) { c.control_size = static_cast<std::uint32_t>(count(v, f)); });
    root.on("channel_capacity", [&](const YAML::Node& v, const std::string& f) { c.channel_capacity = number(v, f); });
    root.on("topology_interval",
            [&](const YAML::Node& v, const std::string& f) { c.topology_interval = number(v, f); });
    root.on("energy", [&](const YAML::Node& v, const std::string& f) { c.initial_energy = interval(v, f); });
    root.on("malicious_fraction",
            [&](const YAML::Node& v, const std::string& f) { c.malicious_fraction = number(v, f); });
    root.on("attack_kinds",
            [&](const YAML::Node& v, const std::string& f) { c.attack_kinds = list<BehaviorKind>(v, f, behavior); });

    root.section("area", [&](Section& s) {
        s.on("width", [&](const YAML::Node& v, const std::string& f) { c.area.width = number(v, f); });
        s.on("height", [&](const YAML::Node& v, const std::string& f) { c.area.height = number(v, f); });
    });
    root.section("hello", [&](Section& s) {
        s.on("interval", [&](const YAML::Node& v, const std::string& f) { c.hello_interval = number(v, f); });
        s.on("size",
             [&](const YAML::Node& v, const std::string& f) { c.hello_size = static_cast<std::uint32_t>(count(v, f)); });
    });
    root.section("mobility", [&](Section& s) {
        s.on("mobile", [&](const YAML::Node& v, const std::string& f) { c.mobile = scalar<bool>(v, f); });
        s.on("step", [&](const YAML::Node& v, const std::string& f) { c.mobility_step = number(v, f); });
        s.on("speed", [&](const YAML::Node& v, const std::string& f) {
            const Interval r = interval(v, f);
            c.waypoint.v_min = r.lo;
            c.waypoint.v_max = r.hi;
        });
        s.on("pause", [&](const YAML::Node& v, const std::string& f) { c.waypoint.pause = number(v, f); });
    });
    root.section("radio", [&](Section& s) {
        s.on("k", [&](const YAML::Node& v, const std::string& f) { c.radio.k = number(v, f); });
        s.on("q", [&](const YAML::Node& v, const std::string& f) { c.radio.q = static_cast<int>(count(v, f)); });
        s.on("recv_power_floor",
             [&](const YAML::Node& v, const std::string& f) { c.radio.recv_power_floor = number(v, f); });
        s.on("range", [&](const YAML::Node& v, const std::string& f) { c.radio.radio_range = number(v, f); });
    });
    root.section("power", [&](Section& s) {
        s.on("tx", [&](const YAML::Node& v, const std::string& f) { c.tx_power = interval(v, f); });
        s.on("rx", [&](const YAML::Node& v, const std::string& f) { c.rx_power = interval(v, f); });
    });
    root.section("traffic", [&](Section& s) {
        s.on("cbr_interval", [&](const YAML::Node& v, const std::string& f) { c.cbr_interval = number(v, f); });
        s.on("start", [&](const YAML::Node& v, const std::string& f) { c.traffic_start = number(v, f); });
        s.on("source_fraction", [&](const YAML::Node& v, const std::string& f) { c.source_fraction = number(v, f); });
        s.on("packets_per_session",
             [&](const YAML::Node& v, const std::string& f) { c.packets_per_session = count(v, f); });
    });
    root.on("flows", [&](const YAML::Node& v, const std::string& f) { c.flows = records<Flow>(v, f, lines, flow); });
    root.section("adversary", [&](Section& s) {
        s.on("grey_drop_probability",
             [&](const YAML::Node& v, const std::string& f) { c.grey_drop_probability = number(v, f); });
        s.on("flood_rate", [&](const YAML::Node& v, const std::string& f) { c.flood_rate = number(v, f); });
        s.on("flood_interval", [&](const YAML::Node& v, const std::string& f) { c.flood_interval = number(v, f); });
        s.on("slander_interval",
             [&](const YAML::Node& v, const std::string& f) { c.slander_interval = number(v, f); });
        s.on("placements", [&](const YAML::Node& v, const std::string& f) {
            c.placements = records<Placement>(v, f, lines, placement);
        });
    });
    root.section("detection", [&](Section& s) {
        DetectionConfig& d = c.detection;
        s.on("enabled", [&](const YAML::Node& v, const std::string& f) { d.enabled = scalar<bool>(v, f); });
        s.on("accusation_threshold", [&](const YAML::Node& v, const std::string& f) {
            d.thresholds.accusation_threshold = static_cast<std::size_t>(count(v, f));
        });
        s.on("energy_high", [&](const YAML::Node& v, const std::string& f) { d.thresholds.energy_high = number(v, f); });
        s.on("velocity_low",
             [&](const YAML::Node& v, const std::string& f) { d.thresholds.velocity_low = number(v, f); });
        s.on("energy_floor",
             [&](const YAML::Node& v, const std::string& f) { d.thresholds.energy_floor = number(v, f); });
        s.on("nuisance_limit", [&](const YAML::Node& v, const std::string& f) {
            d.thresholds.nuisance_limit = static_cast<std::size_t>(count(v, f));
        });
        s.on("blacklist_limit", [&](const YAML::Node& v, const std::string& f) { d.blacklist_limit = number(v, f); });
        s.on("ack_timeout_factor",
             [&](const YAML::Node& v, const std::string& f) { d.ack_timeout_factor = number(v, f); });
    });
    root.section("election", [&](Section& s) {
        s.section("weights", [&](Section& w) {
            w.on("energy", [&](const YAML::Node& v, const std::string& f) { c.weights.energy = number(v, f); });
            w.on("trust", [&](const YAML::Node& v, const std::string& f) { c.weights.trust = number(v, f); });
            w.on("mobility", [&](const YAML::Node& v, const std::string& f) { c.weights.mobility = number(v, f); });
            w.on("dnc", [&](const YAML::Node& v, const std::string& f) { c.weights.dnc = number(v, f); });
        });
    });
    root.on("nodes",
            [&](const YAML::Node& v, const std::string& f) { c.overrides = records<NodeOverride>(v, f, lines, node_override); });
    root.on("depletions", [&](const YAML::Node& v, const std::string& f) {
        c.depletions = records<ForcedDepletion>(v, f, lines, [](const YAML::Node& n, const std::string& field, auto& ls) {
            ForcedDepletion d;
            bool has_node = false;
            bool has_time = false;
            Section s(n, field, ls);
            s.on("node", [&](const YAML::Node& x, const std::string& k) {
                d.node = node_id(x, k);
                has_node = true;
            });
            s.on("time", [&](const YAML::Node& x, const std::string& k) {
                d.time = number(x, k);
                has_time = true;
            });
            s.finish();
            if (!has_node || !has_time)
            {
                throw ScenarioError(field, line_of(n), "a depletion needs node and time");
            }
            return d;
        });
    });

    root.section("sweep", [&](Section& s) {
        Sweep sw;
        s.on("node_counts", [&](const YAML::Node& v, const std::string& f) {
            for (std::uint64_t n : list<std::uint64_t>(v, f, count))
            {
                sw.node_counts.push_back(static_cast<std::size_t>(n));
            }
        });
        s.on("seeds", [&](const YAML::Node& v, const std::string& f) { sw.seeds = list<std::uint64_t>(v, f, count); });
        s.on("malicious_fractions",
             [&](const YAML::Node& v, const std::string& f) { sw.malicious_fractions = list<double>(v, f, number); });
        sweep_given = sw;
    });
    root.section("output", [&](Section& s) {
        s.on("dir", [&](const YAML::Node& v, const std::string& f) { sc.out_dir = scalar<std::string>(v, f); });
    });
    root.on("log_level", [&](const YAML::Node& v, const std::string& f) {
        const auto level = parse_log_level(scalar<std::string>(v, f));
        if (!level)
        {
            throw ScenarioError(f, line_of(v), "expected quiet, info or verbose");
        }
        sc.log_level = *level;
    });
}

void fill_sweep(Scenario& sc)
{
    if (sc.sweep.node_counts.empty())
    {
        sc.sweep.node_counts = {sc.base.node_count};
    }
    if (sc.sweep.seeds.empty())
    {
        sc.sweep.seeds = {sc.base.seed};
    }
    if (sc.sweep.malicious_fractions.empty())
    {
        sc.sweep.malicious_fractions = {sc.base.malicious_fraction};
    }
}

int line_for_field(const std::map<std::string, int>& lines, std::string field)
{
    while (!field.empty())
    {
        if (auto it = lines.find(field); it != lines.end())
        {
            return it->second;
        }
        const auto dot = field.rfind('.');
        if (dot == std::string::npos)
        {
            break;
        }
        field.erase(dot);
    }
    return 0;
}

std::optional<std::string> env(const char* name)
{
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0')
    {
        return std::nullopt;
    }
    return std::string(v);
}

template <typename T>
T env_number(const char* name, const std::string& text)
{
    std::istringstream in(text);
    T v{};
    if (!(in >> v) || !in.eof() || (std::is_unsigned_v<T> && text.find('-') != std::string::npos))
    {
        throw ScenarioError(name, 0, "invalid value '" + text + "'");
    }
    return v;
}

} // namespace

std::optional<LogLevel> parse_log_level(std::string_view text)
{
    if (text == "quiet")
    {
        return LogLevel::Quiet;
    }
    if (text == "info")
    {
        return LogLevel::Info;
    }
    if (text == "verbose")
    {
        return LogLevel::Verbose;
    }
    return std::nullopt;
}

ScenarioError::ScenarioError(std::string field, int line, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + field + ": " + what),
      m_field(std::move(field)),
      m_line(line)
{
}

Scenario parse_scenario(const std::string& text)
{
    YAML::Node doc;
    try
    {
        doc = YAML::Load(text);
    }
    catch (const YAML::ParserException& e)
    {
        throw ScenarioError("<syntax>", e.mark.line + 1, e.msg);
    }

    Scenario sc;
    std::map<std::string, int> lines;
    std::optional<Sweep> sweep;
    if (doc && !doc.IsNull())
    {
        Section root(doc, "", lines);
        read_root(root, sc, sweep);
        root.finish();
    }
    if (sweep)
    {
        sc.sweep = *sweep;
    }
    fill_sweep(sc);

    for (const Cell& cell : cells(sc.sweep))
    {
        try
        {
            cell_config(sc, cell).validate();
        }
        catch (const ConfigError& e)
        {
            std::string msg = e.what();
            if (msg.starts_with(e.field() + ": "))
            {
                msg.erase(0, e.field().size() + 2);
            }
            throw ScenarioError(e.field(), line_for_field(lines, e.field()), msg);
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ScenarioError(path, 0, "cannot read scenario file");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::vector<BehaviorKind> parse_attack_list(const std::string& text)
{
    std::vector<BehaviorKind> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
    {
        const auto kind = parse_behavior(item);
        if (!kind || *kind == BehaviorKind::Honest)
        {
            throw ScenarioError("attack", 0, "unknown attack '" + item + "'");
        }
        out.push_back(*kind);
    }
    if (out.empty())
    {
        throw ScenarioError("attack", 0, "empty attack list");
    }
    return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
    {
        out.push_back(env_number<std::size_t>("sweep", item));
    }
    if (out.empty())
    {
        throw ScenarioError("sweep", 0, "empty node count list");
    }
    return out;
}

Overrides overrides_from_env()
{
    Overrides o;
    if (auto v = env("C3H_SEED"))
    {
        o.seed = env_number<std::uint64_t>("C3H_SEED", *v);
    }
    if (auto v = env("C3H_NODES"))
    {
        o.nodes = env_number<std::size_t>("C3H_NODES", *v);
    }
    if (auto v = env("C3H_MALICIOUS"))
    {
        o.malicious = env_number<double>("C3H_MALICIOUS", *v);
    }
    if (auto v = env("C3H_ATTACK"))
    {
        o.attack = parse_attack_list(*v);
    }
    if (auto v = env("C3H_OUT"))
    {
        o.out = *v;
    }
    if (auto v = env("C3H_SWEEP"))
    {
        o.sweep = parse_count_list(*v);
    }
    if (auto v = env("C3H_LOG_LEVEL"))
    {
        o.log_level = parse_log_level(*v);
        if (!o.log_level)
        {
            throw ScenarioError("C3H_LOG_LEVEL", 0, "expected quiet, info or verbose");
        }
    }
    return o;
}

Overrides layer(const Overrides& top, const Overrides& bottom)
{
    Overrides o = bottom;
    if (top.seed)
    {
        o.seed = top.seed;
    }
    if (top.nodes)
    {
        o.nodes = top.nodes;
    }
    if (top.malicious)
    {
        o.malicious = top.malicious;
    }
    if (top.attack)
    {
        o.attack = top.attack;
    }
    if (top.out)
    {
        o.out = top.out;
    }
    if (top.sweep)
    {
        o.sweep = top.sweep;
    }
    if (top.log_level)
    {
        o.log_level = top.log_level;
    }
    return o;
}

void apply(Scenario& sc, const Overrides& o)
{
    if (o.sweep)
    {
        sc.sweep.node_counts = *o.sweep;
    }
    if (o.nodes)
    {
        sc.base.node_count = *o.nodes;
        sc.sweep.node_counts = {*o.nodes};
    }
    if (o.seed)
    {
        sc.base.seed = *o.seed;
        sc.sweep.seeds = {*o.seed};
    }
    if (o.malicious)
    {
        sc.base.malicious_fraction = *o.malicious;
        sc.sweep.malicious_fractions = {*o.malicious};
    }
    if (o.attack)
    {
        sc.base.attack_kinds = *o.attack;
    }
    if (o.out)
    {
        sc.out_dir = *o.out;
    }
    if (o.log_level)
    {
        sc.log_level = *o.log_level;
    }
}

std::vector<Cell> cells(const Sweep& sweep)
{
    std::vector<Cell> out;
    for (std::size_t n : sweep.node_counts)
    {
        for (std::uint64_t seed : sweep.seeds)
        {
            for (double m : sweep.malicious_fractions)
            {
                out.push_back({n, seed, m});
            }
        }
    }
    return out;
}

SimConfig cell_config(const Scenario& scenario, const Cell& cell)
{
    SimConfig c = scenario.base;
    c.node_count = cell.node_count;
    c.seed = cell.seed;
    c.malicious_fraction = cell.malicious_fraction;
    return c;
}

} // namespace c3h::cli
