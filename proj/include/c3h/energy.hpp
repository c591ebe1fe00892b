#pragma once

#include <cstdint>

namespace c3h
{

/// Battery of one node, in joules.
struct EnergyState
{
    double total = 0.0;
    double remaining = 0.0;
    /// Sum of every deduction so far; total - consumed == remaining.
    double consumed = 0.0;

    static EnergyState full(double joules) { return {joules, joules, 0.0}; }
    bool depleted() const { return remaining <= 0.0; }
};

/// Joules spent moving `bytes` through a radio drawing `power_mw` on a
/// channel of `capacity` bits per second.
double transmission_energy(double power_mw, std::uint32_t bytes, double capacity);

/// Deducts transmission_energy, never below zero. Returns the joules actually deducted.
double consume_energy(EnergyState& battery, double power_mw, std::uint32_t bytes, double capacity);

/// Empties the battery at once. Returns the joules removed.
double drain(EnergyState& battery);

} // namespace c3h
