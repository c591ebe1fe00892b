#pragma once

#include <cstdint>
#include <random>

namespace c3h
{

/// splitmix64 finalizer; used to derive independent stream seeds and
/// stateless per-packet draws.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Maps 64 random bits onto [0, 1) with 53 bits of precision.
constexpr double unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seeded generator owned by one simulation instance. Uniform draws are
/// computed from raw engine output so sequences are identical across
/// standard library implementations.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : m_engine(mix64(seed ^ mix64(stream + 1)))
    {
    }

    std::uint64_t next() { return m_engine(); }

    double uniform() { return unit_interval(m_engine()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
        {
            return 0;
        }
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

  private:
    std::mt19937_64 m_engine;
};

} // namespace c3h
