#pragma once

#include "c3h/config.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace c3h::cli
{

enum class LogLevel
{
    Quiet,
    Info,
    Verbose,
};

std::optional<LogLevel> parse_log_level(std::string_view text);

struct Sweep
{
    std::vector<std::size_t> node_counts;
    std::vector<std::uint64_t> seeds;
    std::vector<double> malicious_fractions;
};

struct Scenario
{
    /// Every sweep cell starts from this configuration.
    SimConfig base;
    Sweep sweep;
    std::string out_dir = "results";
    LogLevel log_level = LogLevel::Info;
};

/// Parse failure with the location of the offending key or value.
class ScenarioError : public std::runtime_error
{
  public:
    ScenarioError(std::string field, int line, const std::string& what);

    const std::string& field() const noexcept { return m_field; }
    /// 1-based; 0 when unknown.
    int line() const noexcept { return m_line; }

  private:
    std::string m_field;
    int m_line = 0;
};

/// Parses scenario text. Unknown keys are rejected and omitted keys keep the
/// SimConfig defaults. An absent sweep list falls back to the single base value.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Values given on the command line or in the environment.
struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> nodes;
    std::optional<double> malicious;
    std::optional<std::vector<BehaviorKind>> attack;
    std::optional<std::string> out;
    std::optional<std::vector<std::size_t>> sweep;
    std::optional<LogLevel> log_level;
};

/// Reads C3H_SEED, C3H_NODES, C3H_MALICIOUS, C3H_ATTACK, C3H_OUT, C3H_SWEEP and
/// C3H_LOG_LEVEL. Throws ScenarioError naming the variable on a bad value.
Overrides overrides_from_env();

/// Fields set in `top` win over `bottom`.
Overrides layer(const Overrides& top, const Overrides& bottom);

/// --seed and --nodes pin their sweep axis to one value; --sweep replaces the node counts.
void apply(Scenario& scenario, const Overrides& o);

std::vector<BehaviorKind> parse_attack_list(const std::string& text);
std::vector<std::size_t> parse_count_list(const std::string& text);

struct Cell
{
    std::size_t node_count = 0;
    std::uint64_t seed = 0;
    double malicious_fraction = 0.0;
};

/// Cross product in (node_count, seed, malicious_fraction) order.
std::vector<Cell> cells(const Sweep& sweep);

/// The base configuration specialised to one cell.
SimConfig cell_config(const Scenario& scenario, const Cell& cell);

} // namespace c3h::cli
