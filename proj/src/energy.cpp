#include "c3h/energy.hpp"

#include <algorithm>

namespace c3h
{

double transmission_energy(double power_mw, std::uint32_t bytes, double capacity)
{
    const double seconds = static_cast<double>(bytes) * 8.0 / capacity;
    return power_mw / 1000.0 * seconds;
}

double consume_energy(EnergyState& battery, double power_mw, std::uint32_t bytes, double capacity)
{
    const double cost = std::min(transmission_energy(power_mw, bytes, capacity), std::max(battery.remaining, 0.0));
    battery.remaining -= cost;
    battery.consumed += cost;
    if (battery.remaining < 0.0)
    {
        battery.remaining = 0.0;
    }
    return cost;
}

double drain(EnergyState& battery)
{
    const double cost = std::max(battery.remaining, 0.0);
    battery.remaining = 0.0;
    battery.consumed += cost;
    return cost;
}

} // namespace c3h
