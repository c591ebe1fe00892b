#include "c3h/cli/runner.hpp"

#include "c3h/cli/audit.hpp"
#include "c3h/simulator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

namespace c3h::cli
{

namespace fs = std::filesystem;

namespace
{

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
}

CellOutcome run_cell(const Scenario& scenario, const Cell& cell, const std::optional<std::string>& log_dir)
{
    SimConfig config = cell_config(scenario, cell);
    config.keep_event_log = log_dir.has_value();
    Simulator sim(config);
    const Metrics m = sim.run();

    CellOutcome out;
    out.cell = cell;
    out.row = make_row(cell.node_count, cell.seed, cell.malicious_fraction, config.attack_kinds, m);
    out.digest = sim.log().digest();
    out.events = sim.log().count();
    if (log_dir)
    {
        write_file(fs::path(*log_dir) / (cell_name(cell) + ".log"), write_log(sim.log().records()));
    }
    return out;
}

} // namespace

CellFailure::CellFailure(Cell cell, const std::string& what)
    : std::runtime_error("cell " + cell_name(cell) + " failed: " + what),
      m_cell(cell)
{
}

std::string cell_name(const Cell& cell)
{
    return "n" + std::to_string(cell.node_count) + "_s" + std::to_string(cell.seed) + "_m" +
           format_double(cell.malicious_fraction);
}

std::string hex_digest(std::uint64_t digest)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::vector<CellOutcome> run_cells(const Scenario& scenario, std::size_t jobs, const std::optional<std::string>& log_dir)
{
    const std::vector<Cell> all = cells(scenario.sweep);
    if (log_dir)
    {
        fs::create_directories(*log_dir);
    }

    std::vector<std::optional<CellOutcome>> done(all.size());
    std::vector<std::string> errors(all.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < all.size(); i = next++)
        {
            try
            {
                done[i] = run_cell(scenario, all[i], log_dir);
            }
            catch (const std::exception& e)
            {
                errors[i] = e.what();
            }
            catch (...)
            {
                errors[i] = "unknown failure";
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(all.size(), 1));
    if (jobs == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j)
        {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool)
        {
            t.join();
        }
    }

    std::vector<CellOutcome> out;
    for (std::size_t i = 0; i < all.size(); ++i)
    {
        if (!done[i])
        {
            throw CellFailure(all[i], errors[i]);
        }
        out.push_back(std::move(*done[i]));
    }
    return out;
}

ResultsTable table_of(const std::vector<CellOutcome>& outcomes)
{
    ResultsTable t;
    for (const CellOutcome& o : outcomes)
    {
        t.push_back(o.row);
    }
    return t;
}

std::string format_digests(const std::vector<CellOutcome>& outcomes)
{
    std::string out = "node_count,seed,malicious_fraction,events,digest\n";
    for (const CellOutcome& o : outcomes)
    {
        out += std::to_string(o.cell.node_count) + ',' + std::to_string(o.cell.seed) + ',' +
               format_double(o.cell.malicious_fraction) + ',' + std::to_string(o.events) + ',' + hex_digest(o.digest) +
               '\n';
    }
    return out;
}

void write_outputs(const std::string& out_dir, const std::vector<CellOutcome>& outcomes, const RunInfo& info)
{
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const ResultsTable table = table_of(outcomes);
    write_file(dir / "results.csv", format_csv(table));
    write_file(dir / "summary.txt", format_summary(table));
    write_file(dir / "digests.csv", format_digests(outcomes));

    nlohmann::json meta;
    meta["scenario"] = info.scenario_path;
    meta["started_at"] = info.started_at;
    meta["finished_at"] = info.finished_at;
    meta["wall_seconds"] = info.wall_seconds;
    meta["jobs"] = info.jobs;
    meta["cells"] = outcomes.size();
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
}

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace c3h::cli
