#pragma once

#include "c3h/cli/results.hpp"
#include "c3h/cli/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace c3h::cli
{

struct CellOutcome
{
    Cell cell;
    ResultRow row;
    std::uint64_t digest = 0;
    std::uint64_t events = 0;
};

/// A sweep cell whose run threw.
class CellFailure : public std::runtime_error
{
  public:
    CellFailure(Cell cell, const std::string& what);
    const Cell& cell() const noexcept { return m_cell; }

  private:
    Cell m_cell;
};

/// "n20_s7_m0.1"
std::string cell_name(const Cell& cell);
std::string hex_digest(std::uint64_t digest);

/// Runs every cell, `jobs` at a time, and returns outcomes in sweep order.
/// With `log_dir` set, each cell's event log is written there as <cell>.log.
/// The first failing cell in sweep order is reported as CellFailure.
std::vector<CellOutcome> run_cells(const Scenario& scenario, std::size_t jobs,
                                   const std::optional<std::string>& log_dir = std::nullopt);

ResultsTable table_of(const std::vector<CellOutcome>& outcomes);

/// node_count,seed,malicious_fraction,events,digest
std::string format_digests(const std::vector<CellOutcome>& outcomes);

struct RunInfo
{
    std::string scenario_path;
    std::string started_at;
    std::string finished_at;
    double wall_seconds = 0.0;
    std::size_t jobs = 1;
};

/// Writes results.csv, summary.txt and digests.csv (deterministic) plus
/// metadata.json (timestamps) into the output directory.
void write_outputs(const std::string& out_dir, const std::vector<CellOutcome>& outcomes, const RunInfo& info);

std::string utc_timestamp();

} // namespace c3h::cli
