#pragma once

// Deficit-based station scheduler for the access point.
//
// Stations take the place of flows in an FQ-CoDel style new/old list
// scheduler and the deficit is kept in airtime rather than bytes, one per
// QoS level. Every time the scheduler picks a station it builds a whole
// aggregate for it, and it keeps going until the hardware queue is full.
//
// With airtime fairness disabled the same machinery degrades to the plain
// per-station round robin used by drivers without airtime accounting.

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "airtime/codel.hpp"
#include "airtime/packet.hpp"
#include "airtime/phy_model.hpp"

namespace airtime::sched {

using namespace std::chrono_literals;

struct AggregateLimits
{
  std::size_t max_packets = 64;
  std::uint32_t max_bytes = 65535;
  SimTime max_txop = 4ms; // cap on the data portion (PHY header + payload)
};

struct Aggregate
{
  StationId station = 0;
  Tid tid = 0;
  std::vector<Packet> packets;
  double size_bytes = 0; // on-air A-MPDU length
  SimTime duration{0};   // data portion plus per-transmission overhead
};

/// Total medium occupancy of one transmission of `ampdu_bytes` at `rate_bps`.
inline SimTime
transmission_duration(double ampdu_bytes, double rate_bps, const phy::PhyConstants& c)
{
  return from_micros(phy::t_data_for_bytes(ampdu_bytes, rate_bps, c) + phy::t_overhead(rate_bps, c));
}

/// Pull packets from `next` into one aggregate until a limit is hit.
///
/// `next()` yields std::optional<Packet>; a packet that does not fit is handed
/// back through `put_back` so it leads the following aggregate. The first
/// packet is always taken, even if on its own it exceeds the TXOP cap.
template <typename NextFn, typename PutBackFn>
std::optional<Aggregate>
assemble_aggregate(StationId station,
                   Tid tid,
                   double rate_bps,
                   const AggregateLimits& limits,
                   const phy::PhyConstants& c,
                   NextFn&& next,
                   PutBackFn&& put_back)
{
  Aggregate agg;
  agg.station = station;
  agg.tid = tid;
  while (agg.packets.size() < limits.max_packets)
  {
    std::optional<Packet> pkt = next();
    if (!pkt)
      break;
    const double bytes = agg.size_bytes + phy::mpdu_length(pkt->length, c);
    if (!agg.packets.empty())
    {
      const bool too_big = bytes > limits.max_bytes;
      const bool too_long = from_micros(phy::t_data_for_bytes(bytes, rate_bps, c)) > limits.max_txop;
      if (too_big || too_long)
      {
        put_back(std::move(*pkt));
        break;
      }
    }
    agg.size_bytes = bytes;
    agg.packets.push_back(std::move(*pkt));
  }
  if (agg.packets.empty())
    return std::nullopt;
  agg.duration = transmission_duration(agg.size_bytes, rate_bps, c);
  return agg;
}

/// Where the scheduler gets packets for a (station, TID) pair.
class PacketSource
{
public:
  virtual ~PacketSource() = default;
  virtual std::size_t backlog(StationId station, Tid tid) const = 0;
  virtual std::optional<Packet> dequeue(StationId station, Tid tid, SimTime now) = 0;
};

enum class Direction
{
  tx,
  rx,
};

enum class ListMembership : std::uint8_t
{
  none,
  new_list,
  old_list,
};

struct StationState
{
  StationId id = 0;
  double phy_rate_bps = 0;
  std::array<SimTime, kQosLevels> deficits{};
  codel::StationCodel codel;

  std::array<ListMembership, kQosLevels> membership{};
  /// Packets pulled from the queues that did not fit the previous aggregate.
  std::array<std::deque<Packet>, kTidsPerStation> retry;

  // Bookkeeping for deficit conservation and metrics.
  std::array<SimTime, kQosLevels> quanta_granted{};
  std::array<SimTime, kQosLevels> airtime_charged{};
  SimTime tx_airtime{0};
  SimTime rx_airtime{0};
  std::uint64_t served_from_new = 0;
  std::uint64_t aggregates_built = 0;
};

struct SchedulerConfig
{
  SimTime quantum = 1000us;
  std::size_t hw_queue_capacity = 2;
  bool airtime_fairness = true;
  bool sparse_optimisation = true;
  AggregateLimits limits;
  phy::PhyConstants phy = phy::kDefaultConstants;
};

class AirtimeScheduler
{
public:
  explicit AirtimeScheduler(SchedulerConfig cfg = {})
    : cfg_(cfg)
  {
    if (cfg_.quantum <= SimTime::zero())
      throw std::invalid_argument("airtime quantum must be positive");
    if (cfg_.hw_queue_capacity == 0)
      throw std::invalid_argument("hardware queue needs room for one aggregate");
  }

  const SchedulerConfig& config() const { return cfg_; }

  StationId add_station(double phy_rate_bps)
  {
    phy::detail::require_positive(phy_rate_bps, "PHY rate");
    StationState st;
    st.id = static_cast<StationId>(stations_.size());
    st.phy_rate_bps = phy_rate_bps;
    // Every station starts with one quantum in hand.
    st.deficits.fill(cfg_.quantum);
    st.quanta_granted.fill(cfg_.quantum);
    stations_.push_back(std::move(st));
    return stations_.back().id;
  }

  std::size_t num_stations() const { return stations_.size(); }
  StationState& station(StationId id) { return stations_.at(id); }
  const StationState& station(StationId id) const { return stations_.at(id); }

  const std::deque<StationId>& new_stations(QosLevel q) const { return lists_[index_of(q)].new_stations; }
  const std::deque<StationId>& old_stations(QosLevel q) const { return lists_[index_of(q)].old_stations; }

  std::deque<Aggregate>& hardware_queue() { return hw_queue_; }
  const std::deque<Aggregate>& hardware_queue() const { return hw_queue_; }
  bool hardware_queue_full() const { return hw_queue_.size() >= cfg_.hw_queue_capacity; }

  /// Tell the scheduler that `station` has traffic queued on `tid`.
  void notify_backlogged(StationId station, Tid tid)
  {
    StationState& st = stations_.at(station);
    const std::size_t level = index_of(qos_level_of(tid));
    if (st.membership[level] != ListMembership::none)
      return;
    if (cfg_.airtime_fairness && cfg_.sparse_optimisation)
    {
      st.membership[level] = ListMembership::new_list;
      lists_[level].new_stations.push_back(station);
    }
    else
    {
      st.membership[level] = ListMembership::old_list;
      lists_[level].old_stations.push_back(station);
    }
  }

  /// Queued packets of `station` at one QoS level, including held-back ones.
  std::size_t station_backlog(const PacketSource& src, StationId station, QosLevel level) const
  {
    const StationState& st = stations_.at(station);
    std::size_t n = 0;
    for (Tid t = 0; t < kTidsPerStation; ++t)
      if (qos_level_of(t) == level)
        n += st.retry[t].size() + src.backlog(station, t);
    return n;
  }

  /// Build one aggregate for `station` on `tid`, or nullopt if nothing is queued.
  std::optional<Aggregate> build_aggregate(PacketSource& src, StationId station, Tid tid, SimTime now)
  {
    StationState& st = stations_.at(station);
    auto& retry = st.retry.at(tid);
    return assemble_aggregate(
      station,
      tid,
      st.phy_rate_bps,
      cfg_.limits,
      cfg_.phy,
      [&]() -> std::optional<Packet> {
        if (!retry.empty())
        {
          Packet p = std::move(retry.front());
          retry.pop_front();
          return p;
        }
        return src.dequeue(station, tid, now);
      },
      [&](Packet&& p) { retry.push_front(std::move(p)); });
  }

  /// Fill the hardware queue. Returns the number of aggregates added.
  std::size_t schedule(PacketSource& src, SimTime now)
  {
    std::size_t built = 0;
    for (QosLevel level : kQosPriorityOrder)
    {
      if (hardware_queue_full())
        break;
      built += schedule_level(src, level, now);
    }
    return built;
  }

  /// Charge airtime used by a transmission to or from `station`.
  SimTime account_airtime(StationId station, QosLevel level, SimTime duration, Direction dir)
  {
    if (duration < SimTime::zero())
      throw std::domain_error("airtime duration must be non-negative");
    StationState& st = stations_.at(station);
    const std::size_t l = index_of(level);
    st.deficits[l] -= duration;
    st.airtime_charged[l] += duration;
    (dir == Direction::tx ? st.tx_airtime : st.rx_airtime) += duration;
    return st.deficits[l];
  }

private:
  struct LevelLists
  {
    std::deque<StationId> new_stations;
    std::deque<StationId> old_stations;
  };

  std::optional<Tid> first_backlogged_tid(const PacketSource& src, const StationState& st, QosLevel level) const
  {
    for (Tid t = 0; t < kTidsPerStation; ++t)
      if (qos_level_of(t) == level && (!st.retry[t].empty() || src.backlog(st.id, t) > 0))
        return t;
    return std::nullopt;
  }

  void move_head_to_old(LevelLists& lists, std::size_t level, bool from_new)
  {
    auto& src = from_new ? lists.new_stations : lists.old_stations;
    const StationId id = src.front();
    src.pop_front();
    lists.old_stations.push_back(id);
    stations_[id].membership[level] = ListMembership::old_list;
  }

  std::size_t schedule_level(PacketSource& src, QosLevel level, SimTime now)
  {
    const std::size_t l = index_of(level);
    LevelLists& lists = lists_[l];
    std::size_t built = 0;
    while (!hardware_queue_full())
    {
      bool from_new;
      if (!lists.new_stations.empty())
        from_new = true;
      else if (!lists.old_stations.empty())
        from_new = false;
      else
        return built;

      const StationId id = from_new ? lists.new_stations.front() : lists.old_stations.front();
      StationState& st = stations_[id];

      if (cfg_.airtime_fairness && st.deficits[l] <= SimTime::zero())
      {
        st.deficits[l] += cfg_.quantum;
        st.quanta_granted[l] += cfg_.quantum;
        move_head_to_old(lists, l, from_new);
        continue;
      }

      std::optional<Aggregate> agg;
      if (auto tid = first_backlogged_tid(src, st, level))
        agg = build_aggregate(src, id, *tid, now);

      if (!agg)
      {
        if (from_new)
        {
          move_head_to_old(lists, l, true);
        }
        else
        {
          lists.old_stations.pop_front();
          st.membership[l] = ListMembership::none;
        }
        continue;
      }

      ++st.aggregates_built;
      if (from_new)
        ++st.served_from_new;
      hw_queue_.push_back(std::move(*agg));
      ++built;

      // New stations get priority for a single round only. Without airtime
      // fairness every station is served once per round.
      if (from_new || !cfg_.airtime_fairness)
        move_head_to_old(lists, l, from_new);
    }
    return built;
  }

  SchedulerConfig cfg_;
  std::vector<StationState> stations_;
  std::array<LevelLists, kQosLevels> lists_{};
  std::deque<Aggregate> hw_queue_;
};

} // namespace airtime::sched
