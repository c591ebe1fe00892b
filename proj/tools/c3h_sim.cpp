#include "c3h/cli/audit.hpp"
#include "c3h/cli/results.hpp"
#include "c3h/cli/runner.hpp"
#include "c3h/cli/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace
{

using namespace c3h::cli;
namespace fs = std::filesystem;

constexpr int kExitRunFailed = 1;
constexpr int kExitBadInput = 2;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error("cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunFlags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> nodes;
    std::optional<double> malicious;
    std::optional<std::string> attack;
    std::optional<std::string> out;
    std::optional<std::string> sweep;
    std::optional<std::string> log_level;
    std::size_t jobs = 1;
};

int cmd_run(const RunFlags& f)
{
    Scenario sc;
    try
    {
        Overrides flags;
        flags.seed = f.seed;
        flags.nodes = f.nodes;
        flags.malicious = f.malicious;
        if (f.attack)
        {
            flags.attack = parse_attack_list(*f.attack);
        }
        flags.out = f.out;
        if (f.sweep)
        {
            flags.sweep = parse_count_list(*f.sweep);
        }
        if (f.log_level)
        {
            flags.log_level = parse_log_level(*f.log_level);
            if (!flags.log_level)
            {
                throw ScenarioError("log-level", 0, "expected quiet, info or verbose");
            }
        }
        sc = load_scenario(f.config);
        apply(sc, layer(flags, overrides_from_env()));
        for (const Cell& cell : cells(sc.sweep))
        {
            cell_config(sc, cell).validate();
        }
    }
    catch (const ScenarioError& e)
    {
        std::cerr << f.config << ": " << e.what() << "\n";
        return kExitBadInput;
    }
    catch (const c3h::ConfigError& e)
    {
        std::cerr << f.config << ": " << e.what() << "\n";
        return kExitBadInput;
    }

    const bool verbose = sc.log_level == LogLevel::Verbose;
    const std::optional<std::string> log_dir =
        verbose ? std::optional<std::string>((fs::path(sc.out_dir) / "logs").string()) : std::nullopt;

    RunInfo info;
    info.scenario_path = f.config;
    info.jobs = f.jobs;
    info.started_at = utc_timestamp();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CellOutcome> outcomes;
    try
    {
        if (sc.log_level != LogLevel::Quiet)
        {
            std::cerr << "running " << cells(sc.sweep).size() << " cells\n";
        }
        outcomes = run_cells(sc, f.jobs, log_dir);
    }
    catch (const CellFailure& e)
    {
        std::cerr << e.what() << "\n";
        return kExitRunFailed;
    }
    info.finished_at = utc_timestamp();
    info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try
    {
        write_outputs(sc.out_dir, outcomes, info);
    }
    catch (const std::exception& e)
    {
        std::cerr << e.what() << "\n";
        return kExitRunFailed;
    }
    if (sc.log_level != LogLevel::Quiet)
    {
        std::cout << format_summary(table_of(outcomes));
        std::cerr << "wrote " << outcomes.size() << " rows to " << (fs::path(sc.out_dir) / "results.csv").string()
                  << "\n";
    }
    return 0;
}

int cmd_plot(const std::string& results, const std::string& metric, const std::optional<std::string>& out)
{
    PlotData data;
    try
    {
        data = emit_plotdata(parse_csv(read_file(results)), metric);
    }
    catch (const UnknownMetric& e)
    {
        std::cerr << e.what() << "\n";
        return kExitBadInput;
    }
    catch (const std::exception& e)
    {
        std::cerr << results << ": " << e.what() << "\n";
        return kExitBadInput;
    }
    for (const std::string& n : data.notices)
    {
        std::cerr << "notice: " << n << "\n";
    }
    const std::string text = format_plotdata(data);
    if (out)
    {
        std::ofstream(*out, std::ios::binary) << text;
    }
    else
    {
        std::cout << text;
    }
    return 0;
}

/// Re-derives every row that has an event log next to it.
int cmd_audit(const std::string& dir)
{
    ResultsTable table;
    try
    {
        table = parse_csv(read_file((fs::path(dir) / "results.csv").string()));
    }
    catch (const std::exception& e)
    {
        std::cerr << e.what() << "\n";
        return kExitBadInput;
    }
    std::size_t checked = 0;
    std::size_t failed = 0;
    for (const ResultRow& row : table)
    {
        const Cell cell{row.node_count, row.seed, row.malicious_fraction};
        const fs::path log = fs::path(dir) / "logs" / (cell_name(cell) + ".log");
        if (!fs::exists(log))
        {
            continue;
        }
        ++checked;
        ResultRow derived;
        try
        {
            derived = make_row(row.node_count, row.seed, row.malicious_fraction, {},
                               c3h::cli::derive_metrics(read_log(read_file(log.string()))));
        }
        catch (const std::exception& e)
        {
            ++failed;
            std::cout << cell_name(cell) << ": " << e.what() << "\n";
            continue;
        }
        const auto diff = compare_rows(row, derived);
        if (!diff.empty())
        {
            ++failed;
            std::cout << cell_name(cell) << ": mismatch in";
            for (const std::string& d : diff)
            {
                std::cout << ' ' << d;
            }
            std::cout << "\n";
        }
    }
    std::cout << checked << " rows checked, " << failed << " mismatched\n";
    if (checked == 0)
    {
        std::cerr << "no event logs found; run with --log-level verbose first\n";
        return kExitBadInput;
    }
    return failed == 0 ? 0 : kExitRunFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Clustered MANET trust and detection simulator"};
    app.require_subcommand(1);

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario file (sweep or single cell)");
    run_cmd->add_option("config", run.config, "Scenario file")->required();
    run_cmd->add_option("--seed", run.seed, "Single seed");
    run_cmd->add_option("--nodes", run.nodes, "Single node count");
    run_cmd->add_option("--malicious", run.malicious, "Fraction of malicious nodes");
    run_cmd->add_option("--attack", run.attack, "Comma-separated attack kinds");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--sweep", run.sweep, "Comma-separated node counts");
    run_cmd->add_option("--log-level", run.log_level, "quiet, info or verbose (verbose writes event logs)");
    run_cmd->add_option("--jobs", run.jobs, "Cells run in parallel")
        ->default_val(std::max(1u, std::thread::hardware_concurrency()));

    std::string results;
    std::string metric;
    std::optional<std::string> plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Write (x, y, err) series for one metric");
    plot_cmd->add_option("results", results, "results.csv")->required();
    plot_cmd->add_option("--metric", metric, "detection_rate, false_positives, throughput or mean_e2e_delay")
        ->required();
    plot_cmd->add_option("--out", plot_out, "Series file (default stdout)");

    std::string audit_dir;
    auto* audit_cmd = app.add_subcommand("audit", "Re-derive result rows from their event logs");
    audit_cmd->add_option("dir", audit_dir, "Output directory of a verbose run")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    if (run_cmd->parsed())
    {
        return cmd_run(run);
    }
    if (plot_cmd->parsed())
    {
        return cmd_plot(results, metric, plot_out);
    }
    return cmd_audit(audit_dir);
}
