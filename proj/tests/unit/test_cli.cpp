#include "c3h/cli/audit.hpp"
#include "c3h/cli/results.hpp"
#include "c3h/cli/runner.hpp"
#include "c3h/cli/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace c3h;
using namespace c3h::cli;
namespace fs = std::filesystem;

namespace
{

const char* kSmall = R"(node_count: 20
sim_duration: 6
malicious_fraction: 0.1
attack_kinds: [black_hole]
traffic:
  source_fraction: 0.2
sweep:
  node_counts: [20, 30]
  seeds: [1, 2]
)";

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("c3h_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Runs the built binary; returns its exit status and fills `output` with stdout+stderr.
int run_binary(const std::string& args, const fs::path& dir, std::string& output)
{
    const char* bin = std::getenv("C3H_SIM_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "C3H_SIM_BIN not set");
    const fs::path log = dir / "console.txt";
    const std::string cmd = std::string(bin) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    output = read_file(log);
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

int error_line(const std::string& text)
{
    try
    {
        parse_scenario(text);
    }
    catch (const ScenarioError& e)
    {
        return e.line();
    }
    return -1;
}

ResultRow row(std::size_t n, std::uint64_t seed, std::optional<double> thr, std::optional<double> det = 50.0)
{
    ResultRow r;
    r.node_count = n;
    r.seed = seed;
    r.malicious_fraction = 0.1;
    r.attack_kinds = "black_hole";
    r.detection_rate = det;
    r.throughput = thr;
    r.mean_e2e_delay = 1.25;
    return r;
}

} // namespace

TEST_CASE("default scenario reproduces the node-count sweep")
{
    const char* dir = std::getenv("C3H_SCENARIO_DIR");
    REQUIRE(dir != nullptr);
    const Scenario sc = load_scenario(std::string(dir) + "/default.yaml");
    CHECK(sc.sweep.node_counts == std::vector<std::size_t>{20, 40, 60, 80, 100});
    CHECK(sc.sweep.seeds.size() == 10);
    CHECK(cells(sc.sweep).size() == 50);
    CHECK(sc.base.malicious_fraction == 0.1);
    CHECK(sc.base.area.width == 500.0);
    CHECK(sc.base.tx_power.lo == 300.0);
    CHECK(sc.base.tx_power.hi == 600.0);
    CHECK(sc.base.hello_interval == 0.01);
    CHECK(sc.base.packet_size == 512);
}

TEST_CASE("scenario parsing")
{
    const Scenario sc = parse_scenario(kSmall);
    CHECK(sc.base.node_count == 20);
    CHECK(sc.base.sim_duration == 6.0);
    CHECK(sc.sweep.node_counts == std::vector<std::size_t>{20, 30});
    CHECK(sc.sweep.malicious_fractions == std::vector<double>{0.1});
    const auto cs = cells(sc.sweep);
    REQUIRE(cs.size() == 4);
    CHECK(cs[1].node_count == 20);
    CHECK(cs[1].seed == 2);
    CHECK(cs[2].node_count == 30);
    CHECK(cell_config(sc, cs[3]).node_count == 30);
    CHECK(cell_config(sc, cs[3]).seed == 2);

    // Omitted keys keep the defaults.
    const Scenario empty = parse_scenario("{}");
    CHECK(empty.base.sim_duration == SimConfig{}.sim_duration);
    CHECK(cells(empty.sweep).size() == 1);

    CHECK(error_line("node_count: 20\nnodez: 30\n") == 2);
    CHECK(error_line("detection:\n  enabled: true\n  energy_high: 3\n") == 3);
    CHECK(error_line("area: {width: 100, height: 100}\nradio:\n  q: 7\n") == 3);
    CHECK(error_line("node_count: [1, 2\n") >= 1);

    try
    {
        parse_scenario("nodez: 30\n");
        FAIL("expected ScenarioError");
    }
    catch (const ScenarioError& e)
    {
        CHECK(std::string(e.what()).find("nodez") != std::string::npos);
        CHECK(e.line() == 1);
    }
}

TEST_CASE("flags beat environment beats file")
{
    Scenario sc = parse_scenario(kSmall);
    ::setenv("C3H_SEED", "9", 1);
    ::setenv("C3H_NODES", "40", 1);
    ::setenv("C3H_ATTACK", "grey_hole,wormhole", 1);
    const Overrides env = overrides_from_env();
    ::unsetenv("C3H_SEED");
    ::unsetenv("C3H_NODES");
    ::unsetenv("C3H_ATTACK");
    CHECK(env.seed == 9u);
    CHECK(env.nodes == 40u);

    Overrides flags;
    flags.nodes = 20;
    apply(sc, layer(flags, env));
    CHECK(sc.sweep.node_counts == std::vector<std::size_t>{20});
    CHECK(sc.sweep.seeds == std::vector<std::uint64_t>{9});
    CHECK(sc.base.attack_kinds == std::vector<BehaviorKind>{BehaviorKind::GreyHole, BehaviorKind::Wormhole});
    CHECK(cells(sc.sweep).size() == 1);

    ::setenv("C3H_MALICIOUS", "lots", 1);
    CHECK_THROWS_AS(overrides_from_env(), ScenarioError);
    ::unsetenv("C3H_MALICIOUS");

    CHECK(parse_count_list("20,40, 60") == std::vector<std::size_t>{20, 40, 60});
    CHECK_THROWS(parse_count_list("20,x"));
    CHECK_THROWS(parse_attack_list("black_hole,sybil"));
}

TEST_CASE("results table text")
{
    ResultsTable t{row(20, 1, 80.0), row(20, 2, std::nullopt, std::nullopt)};
    const std::string csv = format_csv(t);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(csv.find("20,1,0.1,black_hole,50.000000,0,80.000000,1.250000\n") != std::string::npos);
    CHECK(csv.find("20,2,0.1,black_hole,NA,0,NA,1.250000\n") != std::string::npos);
    CHECK(parse_csv(csv) == t);
    CHECK_THROWS(parse_csv("node_count\n1\n"));

    const auto s = stat_of({2, 4, 4, 4, 5, 5, 7, 9});
    REQUIRE(s);
    CHECK(s->mean == 5.0);
    CHECK(s->stddev == doctest::Approx(2.138089935299395).epsilon(1e-12));
    CHECK(stat_of({3})->stddev == 0.0);
    CHECK_FALSE(stat_of({}));

    const std::string summary = format_summary(t);
    CHECK(summary.find("throughput: 80.000000 +- 0.000000 (1 of 2 runs)") != std::string::npos);
}

TEST_CASE("plot series")
{
    ResultsTable fifty;
    for (std::size_t n = 20; n <= 100; n += 20)
    {
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
        {
            fifty.push_back(row(n, seed, static_cast<double>(n) + static_cast<double>(seed)));
        }
    }
    const PlotData thr = emit_plotdata(fifty, "throughput");
    REQUIRE(thr.series.size() == 1);
    REQUIRE(thr.series[0].points.size() == 5);
    // Mean of n+1..n+10 is n+5.5; sample sd of 1..10 is sqrt(55/6).
    for (std::size_t i = 0; i < 5; ++i)
    {
        CHECK(thr.series[0].points[i].x == 20.0 * static_cast<double>(i + 1));
        CHECK(thr.series[0].points[i].y == doctest::Approx(20.0 * static_cast<double>(i + 1) + 5.5));
        CHECK(thr.series[0].points[i].err == doctest::Approx(std::sqrt(55.0 / 6.0)));
    }

    const PlotData one = emit_plotdata({row(20, 1, 70.0)}, "throughput");
    REQUIRE(one.series.size() == 1);
    REQUIRE(one.series[0].points.size() == 1);
    CHECK(one.series[0].points[0].err == 0.0);

    ResultsTable clean{row(20, 1, 90.0, std::nullopt), row(40, 1, 95.0, std::nullopt)};
    clean[0].malicious_fraction = clean[1].malicious_fraction = 0.0;
    const PlotData det = emit_plotdata(clean, "detection_rate");
    CHECK(det.series.empty());
    REQUIRE(det.notices.size() == 1);
    CHECK(format_plotdata(det).find("# notice:") != std::string::npos);

    try
    {
        emit_plotdata(fifty, "goodput");
        FAIL("expected UnknownMetric");
    }
    catch (const UnknownMetric& e)
    {
        for (const std::string& name : kMetricNames)
        {
            CHECK(std::string(e.what()).find(name) != std::string::npos);
        }
    }
    CHECK_THROWS_AS(emit_plotdata({}, "throughput"), std::invalid_argument);
}

TEST_CASE("sweep runs are ordered, repeatable and re-derivable from their logs")
{
    const Scenario sc = parse_scenario(kSmall);
    const fs::path dir = scratch("audit");
    const auto serial = run_cells(sc, 1, (dir / "logs").string());
    const auto parallel = run_cells(sc, 3);
    REQUIRE(serial.size() == 4);
    CHECK(format_csv(table_of(serial)) == format_csv(table_of(parallel)));
    CHECK(format_digests(serial) == format_digests(parallel));
    CHECK(serial[2].row.node_count == 30);
    CHECK(serial[2].row.seed == 1);

    for (const CellOutcome& o : serial)
    {
        const auto records = read_log(read_file(dir / "logs" / (cell_name(o.cell) + ".log")));
        CHECK(records.size() == o.events);
        const Metrics derived = derive_metrics(records);
        const ResultRow again = make_row(o.row.node_count, o.row.seed, o.row.malicious_fraction,
                                         sc.base.attack_kinds, derived);
        CHECK(compare_rows(o.row, again).empty());
    }
    CHECK(cell_name(Cell{20, 7, 0.1}) == "n20_s7_m0.1");
    fs::remove_all(dir);
}

TEST_CASE("command line runner")
{
    const fs::path dir = scratch("binary");
    write_file(dir / "small.yaml", kSmall);
    write_file(dir / "bad.yaml", "node_count: 20\nnodez: 30\n");
    std::string out;

    CHECK(run_binary("run " + (dir / "bad.yaml").string(), dir, out) == 2);
    CHECK(out.find("nodez") != std::string::npos);
    CHECK(out.find("line 2") != std::string::npos);

    CHECK(run_binary("run " + (dir / "missing.yaml").string(), dir, out) == 2);

    const std::string single = "run " + (dir / "small.yaml").string() + " --nodes 20 --seed 7 --out " + (dir / "one").string();
    REQUIRE(run_binary(single, dir, out) == 0);
    const ResultsTable t = parse_csv(read_file(dir / "one" / "results.csv"));
    REQUIRE(t.size() == 1);
    CHECK(t[0].node_count == 20);
    CHECK(t[0].seed == 7);
    CHECK(fs::exists(dir / "one" / "summary.txt"));
    CHECK(fs::exists(dir / "one" / "metadata.json"));

    const std::string full = "run " + (dir / "small.yaml").string() + " --log-level verbose --out ";
    REQUIRE(run_binary(full + (dir / "a").string(), dir, out) == 0);
    REQUIRE(run_binary(full + (dir / "b").string() + " --jobs 1", dir, out) == 0);
    for (const char* f : {"results.csv", "summary.txt", "digests.csv"})
    {
        CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
    }
    CHECK(parse_csv(read_file(dir / "a" / "results.csv")).size() == 4);

    CHECK(run_binary("audit " + (dir / "a").string(), dir, out) == 0);
    CHECK(run_binary("audit " + (dir / "one").string(), dir, out) == 2);

    const std::string plot = "plot " + (dir / "a" / "results.csv").string();
    REQUIRE(run_binary(plot + " --metric throughput", dir, out) == 0);
    CHECK(out.find("# metric throughput") != std::string::npos);
    CHECK(run_binary(plot + " --metric goodput", dir, out) == 2);
    CHECK(out.find("mean_e2e_delay") != std::string::npos);

    // A tampered row no longer matches its log.
    std::string csv = read_file(dir / "a" / "results.csv");
    const auto pos = csv.find('\n') + 1;
    const auto comma = csv.find(",0,", pos);
    REQUIRE(comma != std::string::npos);
    csv.replace(comma, 3, ",7,");
    write_file(dir / "a" / "results.csv", csv);
    CHECK(run_binary("audit " + (dir / "a").string(), dir, out) == 1);

    fs::remove_all(dir);
}
