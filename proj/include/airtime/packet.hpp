#pragma once

#include <array>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <stdexcept>

namespace airtime {

/// Simulation clock. Integer nanoseconds keep event ordering exact.
using SimTime = std::chrono::nanoseconds;

using StationId = std::uint32_t;

/// 802.11e traffic identifier within one station (0..15).
using Tid = std::uint8_t;

inline constexpr std::size_t kTidsPerStation = 16;

enum class QosLevel : std::uint8_t
{
  VO = 0,
  VI = 1,
  BE = 2,
  BK = 3,
};

inline constexpr std::size_t kQosLevels = 4;

/// Strict priority order used when several levels are backlogged.
inline constexpr std::array<QosLevel, kQosLevels> kQosPriorityOrder{
  QosLevel::VO, QosLevel::VI, QosLevel::BE, QosLevel::BK};

/// 802.1D user priority to access category; TIDs 8..15 reuse the mapping of tid & 7.
inline constexpr QosLevel
qos_level_of(Tid tid)
{
  switch (tid & 7)
  {
  case 1:
  case 2:
    return QosLevel::BK;
  case 4:
  case 5:
    return QosLevel::VI;
  case 6:
  case 7:
    return QosLevel::VO;
  default:
    return QosLevel::BE;
  }
}

inline constexpr std::size_t
index_of(QosLevel q)
{
  return static_cast<std::size_t>(q);
}

struct Packet
{
  std::uint64_t flow_key = 0; // hashed to pick a flow queue
  std::uint32_t flow_id = 0;  // simulator flow index
  std::uint64_t seq = 0;      // per-flow sequence number
  std::uint32_t length = 0;   // bytes
  SimTime created{0};
  SimTime enqueued{0};
  StationId station = 0;
  Tid tid = 0;
};

inline constexpr double
to_seconds(SimTime t)
{
  return std::chrono::duration<double>(t).count();
}

inline constexpr double
to_micros(SimTime t)
{
  return std::chrono::duration<double, std::micro>(t).count();
}

inline SimTime
from_micros(double us)
{
  return SimTime{static_cast<std::int64_t>(std::llround(us * 1e3))};
}

inline SimTime
from_seconds(double s)
{
  return SimTime{static_cast<std::int64_t>(std::llround(s * 1e9))};
}

} // namespace airtime
