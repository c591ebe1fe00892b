#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace c3h
{

using NodeId = std::uint32_t;
using PacketId = std::uint64_t;
using SessionId = std::uint64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class ErrorCode
{
    DegenerateDistance,
    InvalidSignal,
    InsufficientSamples,
    NoNeighbors,
    InvalidEnergy,
    InvalidClusterHead,
    InvalidWeights,
    NoCandidates,
    NoRoute,
    NoEvidence,
    UnknownLink,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a machine-checkable code.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what),
          m_code(code)
    {
    }

    ErrorCode code() const noexcept { return m_code; }

  private:
    ErrorCode m_code;
};

/// Raised for invalid configuration; names the offending field.
class ConfigError : public Error
{
  public:
    ConfigError(std::string field, const std::string& what)
        : Error(ErrorCode::ConfigError, field + ": " + what),
          m_field(std::move(field))
    {
    }

    const std::string& field() const noexcept { return m_field; }

  private:
    std::string m_field;
};

} // namespace c3h
