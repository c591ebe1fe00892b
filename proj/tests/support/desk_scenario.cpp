#include "support/desk_scenario.hpp"

#include <cmath>
#include <numbers>

namespace c3h::desk
{

namespace
{

const Position kCenter[4] = {{45, 45}, {235, 45}, {45, 235}, {235, 235}};

// Members fan out on the side of their head facing away from the grid centre,
// beyond the reach of the bridges, so the heads keep the highest degree.
const double kAway[4] = {225.0, 315.0, 135.0, 45.0};

void pin(SimConfig& c, NodeId node, Position p)
{
    NodeOverride o;
    o.node = node;
    o.position = p;
    c.overrides.push_back(o);
}

} // namespace

NodeId member(int c, int i)
{
    return static_cast<NodeId>(10 + 5 * c + i);
}

SimConfig config(std::uint64_t seed)
{
    SimConfig c;
    c.node_count = kNodes;
    c.seed = seed;
    c.area = {280, 280};
    c.mobile = false;
    c.sim_duration = 30.0;
    c.initial_energy = {10.0, 10.0};
    c.malicious_fraction = 0.0;

    for (int h = 0; h < 4; ++h)
    {
        pin(c, kHead[h], kCenter[h]);
        for (int i = 0; i < 5; ++i)
        {
            const double a = (kAway[h] + 15.0 * (i - 2)) * std::numbers::pi / 180.0;
            pin(c, member(h, i), {kCenter[h].x + 20.0 * std::cos(a), kCenter[h].y + 20.0 * std::sin(a)});
        }
    }
    pin(c, kBridge01, {140, 45});
    pin(c, kBridge23, {140, 235});
    pin(c, kBridge02, {45, 140});
    pin(c, kBridge13, {235, 140});
    pin(c, kExtra2, {kCenter[2].x - 7.0, kCenter[2].y + 7.0});
    pin(c, kExtra3, {kCenter[3].x + 7.0, kCenter[3].y + 7.0});

    c.flows = {
        {member(0, 2), member(1, 0), 1.0, 20.0},
        {member(0, 3), member(1, 4), 1.1, 20.0},
        {member(0, 1), member(1, 2), 1.2, 20.0},
        {member(2, 2), member(3, 0), 1.3, 20.0},
    };
    return c;
}

std::vector<NodeId> bystanders()
{
    return {member(0, 4), member(1, 3), member(2, 4), member(3, 2)};
}

} // namespace c3h::desk
