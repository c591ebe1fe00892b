#pragma once

#include "c3h/cli/results.hpp"
#include "c3h/event_log.hpp"

#include <string>
#include <vector>

namespace c3h::cli
{

/// Parses a written event log; throws std::runtime_error naming the bad line.
std::vector<LogRecord> read_log(const std::string& text);
std::string write_log(const std::vector<LogRecord>& records);

/// Recomputes the result-table metrics from log records alone.
Metrics derive_metrics(const std::vector<LogRecord>& records);

/// Field names whose values differ; empty when the row re-derives exactly.
std::vector<std::string> compare_rows(const ResultRow& published, const ResultRow& derived);

} // namespace c3h::cli
