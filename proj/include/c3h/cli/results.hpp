#pragma once

#include "c3h/adversary.hpp"
#include "c3h/metrics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace c3h::cli
{

struct ResultRow
{
    std::size_t node_count = 0;
    std::uint64_t seed = 0;
    double malicious_fraction = 0.0;
    /// Semicolon-separated behavior names.
    std::string attack_kinds;
    std::optional<double> detection_rate;
    std::uint64_t false_positives = 0;
    std::optional<double> throughput;
    std::optional<double> mean_e2e_delay;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

using ResultsTable = std::vector<ResultRow>;

std::string attack_label(const std::vector<BehaviorKind>& kinds);
ResultRow make_row(std::size_t node_count, std::uint64_t seed, double malicious_fraction,
                   const std::vector<BehaviorKind>& kinds, const Metrics& m);

inline constexpr const char* kCsvHeader =
    "node_count,seed,malicious_fraction,attack_kinds,detection_rate,false_positives,throughput,mean_e2e_delay";

/// Metric values carry six decimals; absent values print as NA.
std::string format_csv(const ResultsTable& table);
/// Throws std::runtime_error naming the line on malformed input.
ResultsTable parse_csv(const std::string& text);

struct Stat
{
    double mean = 0.0;
    /// Sample standard deviation; 0 for a single value.
    double stddev = 0.0;
    std::size_t n = 0;
};

/// Statistics over the present values; nullopt when none are present.
std::optional<Stat> stat_of(const std::vector<double>& values);

/// Mean and stddev of each metric per node count.
std::string format_summary(const ResultsTable& table);

inline const std::vector<std::string> kMetricNames{"detection_rate", "false_positives", "throughput",
                                                   "mean_e2e_delay"};

class UnknownMetric : public std::runtime_error
{
  public:
    explicit UnknownMetric(const std::string& name);
};

std::optional<double> metric_value(const ResultRow& row, const std::string& metric);

struct PlotPoint
{
    double x = 0.0;
    double y = 0.0;
    double err = 0.0;
};

/// One configuration: rows sharing malicious_fraction and attack_kinds.
struct PlotSeries
{
    double malicious_fraction = 0.0;
    std::string attack_kinds;
    std::vector<PlotPoint> points;
};

struct PlotData
{
    std::string metric;
    std::vector<PlotSeries> series;
    std::vector<std::string> notices;
};

/// Throws UnknownMetric for a name outside kMetricNames and std::invalid_argument for an empty table.
PlotData emit_plotdata(const ResultsTable& table, const std::string& metric);
std::string format_plotdata(const PlotData& data);

std::string format_fixed(double value);

} // namespace c3h::cli
