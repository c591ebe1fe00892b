#pragma once

#include "c3h/rng.hpp"
#include "c3h/types.hpp"

#include <cstddef>
#include <deque>
#include <span>

namespace c3h
{

struct Position
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b);

struct Area
{
    double width = 500.0;
    double height = 500.0;

    bool contains(Position p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

/// Friis-model radio. Powers are in milliwatts, distances in meters.
struct RadioParams
{
    double k = 1.0;
    int q = 2;
    double trans_power = 300.0;
    double recv_power_floor = 0.03;
    double radio_range = 100.0;

    void validate() const;
};

/// Co-located antennas are clamped to this separation before the Friis model.
inline constexpr double kMinSeparation = 0.1;

/// K * P / d^q. Throws DegenerateDistance for d <= 0.
double friis_recv_power(double trans_power, double dist, const RadioParams& radio);

/// Inverse of friis_recv_power: (K * P / recv)^(1/q). Throws InvalidSignal for recv <= 0.
double estimate_distance(double trans_power, double recv_power, const RadioParams& radio);

/// Link rule: within radio_range and received power at or above the floor.
bool in_link(double dist, double trans_power, const RadioParams& radio);

struct WaypointParams
{
    double v_min = 10.0;
    double v_max = 30.0;
    double pause = 1.0;
};

struct WaypointState
{
    Position position;
    Position target;
    double speed = 0.0;
    double pause_remaining = 0.0;
};

WaypointState waypoint_start(Position start, Area area, const WaypointParams& params, Rng& rng);

/// Advances one random-waypoint step of length dt.
WaypointState waypoint_step(WaypointState state, double dt, Area area, const WaypointParams& params, Rng& rng);

/// Sliding window of HELLO-derived distances to one neighbor. Samples are
/// indexed 1..n; when the window is full the oldest sample is evicted and
/// indices re-base.
class HelloHistory
{
  public:
    static constexpr std::size_t kDefaultWindow = 100;

    HelloHistory(NodeId neighbor, double interval, std::size_t window = kDefaultWindow);

    NodeId neighbor() const noexcept { return m_neighbor; }
    double interval() const noexcept { return m_interval; }
    std::size_t window() const noexcept { return m_window; }
    std::size_t size() const noexcept { return m_samples.size(); }

    /// Distance of sample `index` (1-based).
    double sample(std::size_t index) const { return m_samples.at(index - 1); }
    double front() const { return m_samples.front(); }
    double back() const { return m_samples.back(); }

    void clear() { m_samples.clear(); }

    friend HelloHistory record_hello(HelloHistory history, double dist);
    friend void record_hello_in_place(HelloHistory& history, double dist);

  private:
    NodeId m_neighbor;
    double m_interval;
    std::size_t m_window;
    std::deque<double> m_samples;
};

HelloHistory record_hello(HelloHistory history, double dist);
void record_hello_in_place(HelloHistory& history, double dist);

/// Effective relative mobility: sum of successive distance changes over n*t.
/// Signed: positive when the neighbor recedes.
double pairwise_mobility(const HelloHistory& history);

/// Mean over downlink neighbors.
double avg_mobility(std::span<const double> mobilities);

} // namespace c3h
