#pragma once

// CoDel applied to a single flow queue, plus per-station parameter switching
// for low-rate stations.

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "airtime/flow_queue.hpp"

namespace airtime::codel {

using namespace std::chrono_literals;

struct CodelParams
{
  SimTime target = 5ms;
  SimTime interval = 100ms;
  /// Queues holding at most this many bytes are never dropped from.
  std::uint32_t mtu_bytes = 1514;

  friend bool operator==(const CodelParams&, const CodelParams&) = default;
};

inline void
validate(const CodelParams& p)
{
  if (p.target <= SimTime::zero() || p.interval <= p.target)
    throw std::invalid_argument("CoDel parameters need 0 < target < interval");
}

inline constexpr CodelParams kDefaultParams{5ms, 100ms, 1514};
inline constexpr CodelParams kLowRateParams{50ms, 300ms, 1514};

/// Stations whose expected rate is below this get kLowRateParams.
inline constexpr double kLowRateThresholdBps = 12e6;
inline constexpr SimTime kParamHysteresis = 2s;

/// Next drop time: t + interval / sqrt(count).
inline SimTime
control_law(SimTime t, SimTime interval, std::uint32_t count)
{
  const double step = static_cast<double>(interval.count()) / std::sqrt(static_cast<double>(count));
  return t + SimTime{static_cast<std::int64_t>(step)};
}

namespace detail {

inline bool
should_drop(FlowQueue& q, const Packet& head, SimTime now, const CodelParams& p)
{
  const SimTime sojourn = now - head.enqueued;
  // The head has already been popped, so this is the backlog behind it.
  if (sojourn < p.target || q.backlog_bytes <= p.mtu_bytes)
  {
    q.codel.first_above_time.reset();
    return false;
  }
  if (!q.codel.first_above_time)
  {
    q.codel.first_above_time = now + p.interval;
    return false;
  }
  return now >= *q.codel.first_above_time;
}

} // namespace detail

/// Dequeue from `q` applying the CoDel control law. Every packet dropped on
/// the way is passed to `on_drop` and counted in `q.drops`.
template <typename DropFn>
std::optional<Packet>
codel_dequeue(FlowQueue& q, SimTime now, const CodelParams& p, DropFn&& on_drop)
{
  auto& st = q.codel;
  if (q.empty())
  {
    st.dropping = false;
    st.first_above_time.reset();
    return std::nullopt;
  }

  auto drop = [&](Packet&& pkt) {
    ++q.drops;
    on_drop(std::move(pkt));
  };

  Packet pkt = q.pop();
  bool ok_to_drop = detail::should_drop(q, pkt, now, p);

  if (st.dropping)
  {
    if (!ok_to_drop)
    {
      st.dropping = false;
    }
    else
    {
      while (st.dropping && now >= st.drop_next)
      {
        drop(std::move(pkt));
        ++st.count;
        if (q.empty())
        {
          st.dropping = false;
          st.first_above_time.reset();
          return std::nullopt;
        }
        pkt = q.pop();
        if (!detail::should_drop(q, pkt, now, p))
          st.dropping = false;
        else
          st.drop_next = control_law(st.drop_next, p.interval, st.count);
      }
    }
  }
  else if (ok_to_drop)
  {
    drop(std::move(pkt));
    if (q.empty())
    {
      st.first_above_time.reset();
      return std::nullopt;
    }
    pkt = q.pop();
    detail::should_drop(q, pkt, now, p);
    st.dropping = true;
    // Re-entering soon after leaving the dropping state resumes near the
    // previous drop rate.
    const std::uint32_t delta = st.count - st.last_count;
    if (delta > 1 && now - st.drop_next < 16 * p.interval)
      st.count = delta;
    else
      st.count = 1;
    st.last_count = st.count;
    st.drop_next = control_law(now, p.interval, st.count);
  }
  return pkt;
}

/// Per-station parameter set, shared by all of that station's TIDs.
struct StationCodel
{
  CodelParams params = kDefaultParams;
  std::optional<SimTime> last_change;
};

/// Select CoDel parameters from the station's expected rate, changing them
/// at most once per hysteresis period.
inline CodelParams
adapt_params(StationCodel& station, double estimated_rate_bps, SimTime now)
{
  if (estimated_rate_bps < 0)
    throw std::domain_error("estimated rate must be non-negative");
  const CodelParams wanted = estimated_rate_bps < kLowRateThresholdBps ? kLowRateParams : kDefaultParams;
  if (wanted == station.params)
    return station.params;
  if (station.last_change && now - *station.last_change < kParamHysteresis)
    return station.params;
  station.params = wanted;
  station.last_change = now;
  return station.params;
}

} // namespace airtime::codel
