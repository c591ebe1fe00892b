#include "c3h/simulator.hpp"
#include "support/desk_scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace c3h;

namespace
{

SimConfig small_mobile(std::uint64_t seed)
{
    SimConfig c;
    c.node_count = 20;
    c.seed = seed;
    c.sim_duration = 15.0;
    c.malicious_fraction = 0.1;
    c.source_fraction = 0.2;
    return c;
}

// 3 x 4 grid, 40 m apart, no motion, no attackers.
SimConfig static_grid()
{
    SimConfig c;
    c.node_count = 12;
    c.area = {150, 150};
    c.mobile = false;
    c.sim_duration = 30.0;
    c.initial_energy = {1000, 1000};
    c.tx_power = {600, 600};
    for (NodeId n = 0; n < 12; ++n)
    {
        NodeOverride o;
        o.node = n;
        o.position = Position{10.0 + 40.0 * static_cast<double>(n % 4), 10.0 + 40.0 * static_cast<double>(n / 4)};
        c.overrides.push_back(o);
    }
    c.flows = {{0, 11, 1.0, 20.0}, {3, 8, 1.5, 20.0}, {5, 6, 2.0, 20.0}};
    return c;
}

std::string config_error_field(const SimConfig& c)
{
    try
    {
        c.validate();
    }
    catch (const ConfigError& e)
    {
        return e.field();
    }
    return {};
}

} // namespace

TEST_CASE("radio energy per frame")
{
    CHECK(transmission_energy(300, 512, 2e6) == doctest::Approx(0.6144e-3).epsilon(1e-12));
    CHECK(transmission_energy(50, 512, 2e6) == doctest::Approx(0.1024e-3).epsilon(1e-12));
    CHECK(transmission_energy(300, 0, 2e6) == 0.0);

    EnergyState b = EnergyState::full(1e-3);
    CHECK(consume_energy(b, 300, 512, 2e6) == doctest::Approx(0.6144e-3));
    const double last = consume_energy(b, 300, 512, 2e6);
    CHECK(last == doctest::Approx(1e-3 - 0.6144e-3));
    CHECK(b.remaining == 0.0);
    CHECK(b.depleted());
    CHECK(b.consumed == doctest::Approx(b.total));

    EnergyState full = EnergyState::full(7.0);
    CHECK(drain(full) == 7.0);
    CHECK(full.depleted());
}

TEST_CASE("event queue orders by time then insertion")
{
    EventQueue<int> q;
    q.push(2.0, 1);
    q.push(1.0, 2);
    q.push(2.0, 3);
    q.push(1.0, 4);
    q.push(0.5, 5);
    std::vector<int> order;
    while (!q.empty())
    {
        order.push_back(q.pop().payload);
    }
    CHECK(order == std::vector<int>{5, 2, 4, 1, 3});
}

TEST_CASE("metric formulas")
{
    CHECK(percentage(3, 4) == 75.0);
    CHECK(percentage(80, 100) == 80.0);
    CHECK_FALSE(percentage(0, 0));

    const std::vector<PlantedAttacker> planted{
        {1, BehaviorKind::BlackHole, true},  {2, BehaviorKind::BlackHole, true}, {3, BehaviorKind::GreyHole, true},
        {4, BehaviorKind::Wormhole, true},   {5, BehaviorKind::BlackHole, false},
        {6, BehaviorKind::TableOverflow, true},
    };
    const std::set<NodeId> expelled{1, 2, 3, 5, 9};
    MetricInputs in;
    in.planted = planted;
    in.expelled = &expelled;
    in.generated = 100;
    in.delivered = 80;
    in.dropped = 15;
    in.expired = 5;
    const Metrics m = collect_metrics(in);
    REQUIRE(m.detection_rate);
    CHECK(*m.detection_rate == 75.0);
    CHECK(m.false_positives == 1);
    REQUIRE(m.throughput);
    CHECK(*m.throughput == 80.0);
    CHECK_FALSE(m.mean_e2e_delay);
    CHECK(m.attackers_acted == 4);

    const std::vector<PlantedAttacker> idle{{1, BehaviorKind::BlackHole, false}};
    MetricInputs none;
    none.planted = idle;
    none.expelled = &expelled;
    const Metrics n = collect_metrics(none);
    CHECK_FALSE(n.detection_rate);
    CHECK_FALSE(n.throughput);

    std::vector<Session> sessions(3);
    sessions[0].start_time = 1.0;
    sessions[0].last_delivery = 3.0;
    sessions[0].delivered = 2;
    sessions[1].start_time = 2.0;
    sessions[2].start_time = 4.0;
    sessions[2].last_delivery = 8.0;
    sessions[2].delivered = 1;
    CHECK(mean_session_delay(sessions) == 3.0);
}

TEST_CASE("configuration errors name the field")
{
    SimConfig c;
    CHECK(config_error_field(c).empty());
    c.detection.thresholds.energy_high = 1.5;
    CHECK(config_error_field(c) == "detection.energy_high");

    c = SimConfig{};
    c.node_count = 1;
    CHECK(config_error_field(c) == "node_count");

    c = SimConfig{};
    c.flows = {{3, 3}};
    CHECK(config_error_field(c) == "flows");

    c = SimConfig{};
    c.placements = {{2, BehaviorPolicy::wormhole(5)}};
    CHECK(config_error_field(c) == "adversary.placements.peer");

    c = SimConfig{};
    c.malicious_fraction = 0.2;
    c.attack_kinds.clear();
    CHECK(config_error_field(c) == "attack_kinds");

    c = SimConfig{};
    c.detection.thresholds.energy_high = 2.0;
    CHECK_THROWS_AS(Simulator{c}, ConfigError);
}

TEST_CASE("identical seeds give identical runs")
{
    Simulator a(small_mobile(4));
    Simulator b(small_mobile(4));
    const Metrics ma = a.run();
    const Metrics mb = b.run();
    CHECK(a.log().digest() == b.log().digest());
    CHECK(a.log().count() == b.log().count());
    CHECK(ma.generated == mb.generated);
    CHECK(ma.delivered == mb.delivered);
    CHECK(ma.energy_remaining == mb.energy_remaining);

    Simulator c(small_mobile(5));
    c.run();
    CHECK(c.log().digest() != a.log().digest());
}

TEST_CASE("packets and energy are conserved")
{
    for (std::uint64_t seed : {1, 2, 3})
    {
        Simulator sim(small_mobile(seed));
        for (double t = 2.0; t <= 15.0; t += 2.0)
        {
            sim.run_until(t);
            const TrafficCounters& tc = sim.traffic();
            REQUIRE(tc.generated == tc.delivered + tc.dropped + sim.in_flight());
        }
        const Metrics m = sim.run();
        CHECK(m.generated == m.delivered + m.dropped + m.expired);
        CHECK(m.generated > 0);
        for (NodeId n = 0; n < sim.config().node_count; ++n)
        {
            const EnergyState& b = sim.battery(n);
            REQUIRE(b.remaining >= 0.0);
            REQUIRE(b.remaining <= b.total);
            REQUIRE(std::abs(b.total - b.consumed - b.remaining) <= 1e-9 * b.total);
            REQUIRE(b.consumed > 0.0);
        }
        CHECK(sim.audit().plan_shape_violations == 0);
        CHECK(sim.audit().delivered_shape_violations == 0);
        CHECK(sim.audit().delivered_unsupervised_pairs == 0);
    }
}

TEST_CASE("static honest network delivers everything")
{
    Simulator sim(static_grid());
    const Metrics m = sim.run();
    REQUIRE(m.throughput);
    CHECK(*m.throughput == 100.0);
    CHECK(m.false_positives == 0);
    CHECK_FALSE(m.detection_rate);
    CHECK(sim.expelled().empty());
    for (NodeId n = 0; n < 12; ++n)
    {
        CHECK(sim.is_alive(n));
    }
    CHECK(sim.position(5) == Position{50, 50});
}

TEST_CASE("forced depletion takes a node down")
{
    SimConfig c = static_grid();
    c.depletions = {{5, 3.0}};
    Simulator sim(c);
    sim.run_until(2.9);
    CHECK(sim.is_alive(5));
    sim.run_until(3.5);
    CHECK_FALSE(sim.is_alive(5));
    CHECK(sim.battery(5).remaining == 0.0);
    const Metrics m = sim.run();
    CHECK(m.false_positives == 0);
    CHECK_FALSE(sim.is_expelled(5));
}

TEST_CASE("planted black holes only ever cost throughput without detection")
{
    // Bridges in the order they are planted; each one cuts another pair of clusters.
    const NodeId bridges[] = {desk::kBridge01, desk::kBridge23, desk::kBridge02, desk::kBridge13};
    double previous = 101.0;
    for (std::size_t planted = 0; planted <= 4; ++planted)
    {
        double sum = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
        {
            SimConfig c = desk::config(seed);
            c.detection.enabled = false;
            for (std::size_t i = 0; i < planted; ++i)
            {
                c.placements.push_back({bridges[i], BehaviorPolicy::black_hole()});
            }
            sum += Simulator(c).run().throughput.value_or(0.0);
        }
        const double mean = sum / 10.0;
        CHECK(mean <= previous);
        previous = mean;
    }
    CHECK(previous < 100.0);
}

TEST_CASE("blacklisting a gateway restores delivery")
{
    for (std::uint64_t seed : {1, 2, 3})
    {
        SimConfig c = desk::config(seed);
        c.placements = {{desk::kBridge01, BehaviorPolicy::black_hole()}};
        c.keep_event_log = true;
        Simulator on(c);
        on.run();
        c.detection.enabled = false;
        Simulator off(c);
        off.run();

        double expelled_at = -1.0;
        for (const LogRecord& r : on.log().records())
        {
            if (r.kind == "expel" && r.a == desk::kBridge01)
            {
                expelled_at = r.time;
                break;
            }
        }
        REQUIRE(expelled_at > 0.0);

        // Delivery ratio of sessions opened after the expulsion, in each run.
        auto after = [&](const Simulator& sim) {
            std::uint64_t generated = 0;
            std::uint64_t delivered = 0;
            for (const Session& s : sim.sessions())
            {
                if (s.start_time > expelled_at)
                {
                    generated += s.packets_sent;
                    delivered += s.delivered;
                }
            }
            return generated == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(generated);
        };
        CHECK(after(on) > after(off));
        CHECK(*on.metrics().throughput > *off.metrics().throughput);
    }
}
