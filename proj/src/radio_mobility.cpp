#include "c3h/radio_mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace c3h
{

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::DegenerateDistance:
        return "DegenerateDistance";
    case ErrorCode::InvalidSignal:
        return "InvalidSignal";
    case ErrorCode::InsufficientSamples:
        return "InsufficientSamples";
    case ErrorCode::NoNeighbors:
        return "NoNeighbors";
    case ErrorCode::InvalidEnergy:
        return "InvalidEnergy";
    case ErrorCode::InvalidClusterHead:
        return "InvalidClusterHead";
    case ErrorCode::InvalidWeights:
        return "InvalidWeights";
    case ErrorCode::NoCandidates:
        return "NoCandidates";
    case ErrorCode::NoRoute:
        return "NoRoute";
    case ErrorCode::NoEvidence:
        return "NoEvidence";
    case ErrorCode::UnknownLink:
        return "UnknownLink";
    case ErrorCode::ConfigError:
        return "ConfigError";
    }
    return "Unknown";
}

double distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

void RadioParams::validate() const
{
    if (!(k > 0.0))
    {
        throw ConfigError("radio.k", "Friis constant must be positive");
    }
    if (q < 2 || q > 4)
    {
        throw ConfigError("radio.q", "path-loss exponent must be 2, 3 or 4");
    }
    if (!(trans_power > 0.0))
    {
        throw ConfigError("radio.trans_power", "must be positive");
    }
    if (recv_power_floor < 0.0)
    {
        throw ConfigError("radio.recv_power_floor", "must be non-negative");
    }
    if (!(radio_range > 0.0))
    {
        throw ConfigError("radio.radio_range", "must be positive");
    }
}

namespace
{

double root(double value, int q)
{
    switch (q)
    {
    case 2:
        return std::sqrt(value);
    case 3:
        return std::cbrt(value);
    case 4:
        return std::sqrt(std::sqrt(value));
    default:
        return std::pow(value, 1.0 / q);
    }
}

} // namespace

double friis_recv_power(double trans_power, double dist, const RadioParams& radio)
{
    if (!(dist > 0.0))
    {
        throw Error(ErrorCode::DegenerateDistance, "co-located transmitter and receiver");
    }
    return radio.k * trans_power / std::pow(dist, radio.q);
}

double estimate_distance(double trans_power, double recv_power, const RadioParams& radio)
{
    if (!(recv_power > 0.0))
    {
        throw Error(ErrorCode::InvalidSignal, "received power must be positive");
    }
    return root(radio.k * trans_power / recv_power, radio.q);
}

bool in_link(double dist, double trans_power, const RadioParams& radio)
{
    if (dist > radio.radio_range)
    {
        return false;
    }
    return friis_recv_power(trans_power, std::max(dist, kMinSeparation), radio) >= radio.recv_power_floor;
}

namespace
{

void new_leg(WaypointState& state, Area area, const WaypointParams& params, Rng& rng)
{
    state.target = Position{rng.uniform(0.0, area.width), rng.uniform(0.0, area.height)};
    state.speed = rng.uniform(params.v_min, params.v_max);
    state.pause_remaining = 0.0;
}

Position clamp_to(Position p, Area area)
{
    return Position{std::clamp(p.x, 0.0, area.width), std::clamp(p.y, 0.0, area.height)};
}

} // namespace

WaypointState waypoint_start(Position start, Area area, const WaypointParams& params, Rng& rng)
{
    WaypointState state;
    state.position = clamp_to(start, area);
    new_leg(state, area, params, rng);
    return state;
}

WaypointState waypoint_step(WaypointState state, double dt, Area area, const WaypointParams& params, Rng& rng)
{
    if (state.pause_remaining > 0.0)
    {
        state.pause_remaining -= dt;
        if (state.pause_remaining <= 0.0)
        {
            new_leg(state, area, params, rng);
        }
        return state;
    }

    const double remaining = distance(state.position, state.target);
    const double travel = state.speed * dt;
    if (travel >= remaining)
    {
        state.position = state.target;
        state.pause_remaining = params.pause;
        if (state.pause_remaining <= 0.0)
        {
            new_leg(state, area, params, rng);
        }
        return state;
    }

    const double fraction = travel / remaining;
    state.position.x += (state.target.x - state.position.x) * fraction;
    state.position.y += (state.target.y - state.position.y) * fraction;
    state.position = clamp_to(state.position, area);
    return state;
}

HelloHistory::HelloHistory(NodeId neighbor, double interval, std::size_t window)
    : m_neighbor(neighbor),
      m_interval(interval),
      m_window(std::max<std::size_t>(window, 2))
{
    if (!(interval > 0.0))
    {
        throw ConfigError("hello_interval", "must be positive");
    }
}

void record_hello_in_place(HelloHistory& history, double dist)
{
    if (history.m_samples.size() == history.m_window)
    {
        history.m_samples.pop_front();
    }
    history.m_samples.push_back(dist);
}

HelloHistory record_hello(HelloHistory history, double dist)
{
    record_hello_in_place(history, dist);
    return history;
}

double pairwise_mobility(const HelloHistory& history)
{
    const std::size_t n = history.size();
    if (n < 2)
    {
        throw Error(ErrorCode::InsufficientSamples, "mobility needs at least two HELLO samples");
    }
    // The sum of successive changes telescopes; taking it in closed form keeps
    // a round trip back to the starting distance at exactly zero.
    return (history.back() - history.front()) / (static_cast<double>(n) * history.interval());
}

double avg_mobility(std::span<const double> mobilities)
{
    if (mobilities.empty())
    {
        throw Error(ErrorCode::NoNeighbors, "average mobility needs at least one downlink neighbor");
    }
    return std::accumulate(mobilities.begin(), mobilities.end(), 0.0) / static_cast<double>(mobilities.size());
}

} // namespace c3h
