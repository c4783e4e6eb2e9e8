#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "airtime/packet.hpp"

namespace airtime {

/// Global identifier of one (station, TID) queueing context.
using TidId = std::uint32_t;

struct CodelState
{
  std::optional<SimTime> first_above_time;
  SimTime drop_next{0};
  std::uint32_t count = 0;
  std::uint32_t last_count = 0;
  bool dropping = false;
};

/// One DRR sub-queue with its CoDel state.
struct FlowQueue
{
  std::deque<Packet> packets;
  std::int64_t deficit = 0; // bytes
  std::optional<TidId> owner;
  CodelState codel;
  std::uint64_t backlog_bytes = 0;

  std::uint64_t dequeued_packets = 0;
  std::uint64_t dequeued_bytes = 0;
  std::uint64_t drops = 0;

  bool empty() const { return packets.empty(); }
  std::size_t size() const { return packets.size(); }

  void push(Packet p)
  {
    backlog_bytes += p.length;
    packets.push_back(std::move(p));
  }

  Packet pop()
  {
    Packet p = std::move(packets.front());
    packets.pop_front();
    backlog_bytes -= p.length;
    return p;
  }
};

} // namespace airtime
