#include "c3h/radio_mobility.hpp"
#include "c3h/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace c3h;

namespace
{

RadioParams radio(double k, int q)
{
    RadioParams r;
    r.k = k;
    r.q = q;
    return r;
}

HelloHistory history_of(const std::vector<double>& dists, double t, std::size_t window = HelloHistory::kDefaultWindow)
{
    HelloHistory h(1, t, window);
    for (double d : dists)
    {
        h = record_hello(h, d);
    }
    return h;
}

// Explicit sum of successive changes, the unsimplified estimator.
double mobility_oracle(const std::vector<double>& d, double t)
{
    double sum = 0.0;
    for (std::size_t i = 1; i < d.size(); ++i)
    {
        sum += d[i] - d[i - 1];
    }
    return sum / (static_cast<double>(d.size()) * t);
}

} // namespace

TEST_CASE("friis received power")
{
    CHECK(friis_recv_power(1.0, 1.0, radio(1, 2)) == 1.0);
    CHECK(friis_recv_power(300.0, 50.0, radio(1, 2)) == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(friis_recv_power(600.0, 10.0, radio(2, 3)) == doctest::Approx(1.2).epsilon(1e-15));

    SUBCASE("co-located antennas are rejected")
    {
        try
        {
            friis_recv_power(300.0, 0.0, radio(1, 2));
            FAIL("expected DegenerateDistance");
        }
        catch (const Error& e)
        {
            CHECK(e.code() == ErrorCode::DegenerateDistance);
        }
    }

    SUBCASE("strictly decreasing in distance")
    {
        Rng rng(11);
        for (int i = 0; i < 1000; ++i)
        {
            const double p = rng.uniform(300, 600);
            const double d = rng.uniform(0.1, 100);
            const int q = 2 + static_cast<int>(rng.below(3));
            CHECK(friis_recv_power(p, d, radio(1, q)) > friis_recv_power(p, d * 1.001, radio(1, q)));
        }
    }
}

TEST_CASE("distance estimate inverts the received power")
{
    CHECK(estimate_distance(100.0, 4.0, radio(1, 2)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(estimate_distance(600.0, 1.2, radio(2, 3)) == doctest::Approx(10.0).epsilon(1e-14));

    for (double bad : {0.0, -1.0})
    {
        try
        {
            estimate_distance(300.0, bad, radio(1, 2));
            FAIL("expected InvalidSignal");
        }
        catch (const Error& e)
        {
            CHECK(e.code() == ErrorCode::InvalidSignal);
        }
    }
}

TEST_CASE("link rule needs range and power")
{
    RadioParams r = radio(1, 2);
    r.radio_range = 100;
    r.recv_power_floor = 0.03;
    CHECK(in_link(50, 300, r));
    CHECK(in_link(100, 300, r));      // 300 / 10000 = 0.03, exactly the floor
    CHECK_FALSE(in_link(100.5, 600, r));
    r.recv_power_floor = 0.05;
    CHECK_FALSE(in_link(90, 300, r)); // 0.037 < 0.05
    CHECK(in_link(0.0, 300, r));      // clamped separation
}

TEST_CASE("radio parameters are validated")
{
    CHECK_THROWS_AS(radio(0, 2).validate(), ConfigError);
    CHECK_THROWS_AS(radio(1, 5).validate(), ConfigError);
    CHECK_THROWS_AS(radio(1, 1).validate(), ConfigError);
    CHECK_NOTHROW(radio(2, 4).validate());
}

TEST_CASE("random waypoint steps")
{
    const Area area{500, 500};
    const WaypointParams params{10, 30, 1.0};
    Rng rng(3);

    SUBCASE("paused node stays put")
    {
        WaypointState s;
        s.position = {40, 40};
        s.target = {40, 40};
        s.pause_remaining = 0.5;
        const WaypointState next = waypoint_step(s, 0.1, area, params, rng);
        CHECK(next.position == s.position);
        CHECK(next.pause_remaining == doctest::Approx(0.4));
    }

    SUBCASE("linear travel")
    {
        WaypointState s;
        s.position = {0, 0};
        s.target = {100, 0};
        s.speed = 20;
        const WaypointState next = waypoint_step(s, 0.5, area, params, rng);
        CHECK(next.position.x == doctest::Approx(10.0));
        CHECK(next.position.y == 0.0);
    }

    SUBCASE("arrival starts the pause")
    {
        WaypointState s;
        s.position = {90, 0};
        s.target = {100, 0};
        s.speed = 20;
        const WaypointState next = waypoint_step(s, 0.5, area, params, rng);
        CHECK(next.position == Position{100, 0});
        CHECK(next.pause_remaining == 1.0);
    }

    SUBCASE("expired pause draws a new leg inside the configured ranges")
    {
        WaypointState s;
        s.position = {100, 0};
        s.target = {100, 0};
        s.pause_remaining = 0.05;
        const WaypointState next = waypoint_step(s, 0.1, area, params, rng);
        CHECK(next.pause_remaining == 0.0);
        CHECK(area.contains(next.target));
        CHECK(next.speed >= 10.0);
        CHECK(next.speed <= 30.0);
    }

    SUBCASE("trajectories stay in the area and repeat per seed")
    {
        Rng a(99);
        Rng b(99);
        WaypointState sa = waypoint_start({250, 250}, area, params, a);
        WaypointState sb = waypoint_start({250, 250}, area, params, b);
        for (int i = 0; i < 20000; ++i)
        {
            sa = waypoint_step(sa, 0.01, area, params, a);
            sb = waypoint_step(sb, 0.01, area, params, b);
            REQUIRE(area.contains(sa.position));
            REQUIRE(sa.position == sb.position);
            REQUIRE(sa.speed >= 10.0);
            REQUIRE(sa.speed <= 30.0);
            REQUIRE(sa.pause_remaining >= 0.0);
        }
    }
}

TEST_CASE("hello history window")
{
    HelloHistory h(4, 0.01);
    h = record_hello(h, 12);
    CHECK(h.size() == 1);
    CHECK(h.sample(1) == 12);
    h = record_hello(h, 13);
    h = record_hello(h, 14);
    CHECK(h.size() == 3);

    HelloHistory w(4, 0.01, 100);
    for (int i = 0; i < 100; ++i)
    {
        record_hello_in_place(w, i);
    }
    CHECK(w.size() == 100);
    record_hello_in_place(w, 100);
    CHECK(w.size() == 100);
    CHECK(w.sample(1) == 1.0);
    CHECK(w.sample(100) == 100.0);
}

TEST_CASE("pairwise mobility")
{
    CHECK(pairwise_mobility(history_of({10, 10, 10}, 0.01)) == 0.0);
    CHECK(pairwise_mobility(history_of({10, 12, 14}, 0.01)) == doctest::Approx(4.0 / 0.03).epsilon(1e-12));
    CHECK(pairwise_mobility(history_of({10, 15, 10}, 0.01)) == 0.0);
    CHECK(pairwise_mobility(history_of({20, 10}, 0.5)) == doctest::Approx(-10.0));

    try
    {
        pairwise_mobility(history_of({10}, 0.01));
        FAIL("expected InsufficientSamples");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::InsufficientSamples);
    }

    SUBCASE("evicted samples drop out of the estimate")
    {
        std::vector<double> d;
        for (int i = 0; i < 150; ++i)
        {
            d.push_back(i * 0.5);
        }
        const HelloHistory h = history_of(d, 0.01, 100);
        const std::vector<double> kept(d.end() - 100, d.end());
        CHECK(pairwise_mobility(h) == doctest::Approx(mobility_oracle(kept, 0.01)).epsilon(1e-12));
    }
}

TEST_CASE("average mobility")
{
    const std::vector<double> one{5};
    const std::vector<double> zeros{0, 0, 0};
    const std::vector<double> three{10, 20, 30};
    CHECK(avg_mobility(one) == 5.0);
    CHECK(avg_mobility(zeros) == 0.0);
    CHECK(avg_mobility(three) == 20.0);
    try
    {
        avg_mobility(std::vector<double>{});
        FAIL("expected NoNeighbors");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::NoNeighbors);
    }
}
