#pragma once

// Reference implementations and property checks shared by the unit tests and
// the acceptance binary. Each check returns an empty string on success and a
// description of the first violation otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "airtime/airtime_sched.hpp"
#include "airtime/codel.hpp"
#include "airtime/fq_mac.hpp"
#include "airtime/report.hpp"

namespace oracle {

using namespace airtime;
using namespace std::chrono_literals;

inline Packet
make_packet(std::uint64_t flow, std::uint64_t seq, std::uint32_t len = 1500, SimTime created = SimTime{0})
{
  Packet p;
  p.flow_key = flow;
  p.flow_id = static_cast<std::uint32_t>(flow);
  p.seq = seq;
  p.length = len;
  p.created = created;
  return p;
}

/// Flow keys that hash to `count` distinct queues of `fq`.
inline std::vector<std::uint64_t>
distinct_flows(const fq::FqMac& fq, std::size_t count)
{
  std::vector<std::uint64_t> keys;
  std::vector<std::size_t> used;
  for (std::uint64_t k = 1; keys.size() < count; ++k)
  {
    const auto q = fq.hash_queue(k);
    if (std::find(used.begin(), used.end(), q) == used.end())
    {
      used.push_back(q);
      keys.push_back(k);
    }
  }
  return keys;
}

// ---------------------------------------------------------------------------
// CoDel: drop instants for a queue whose sojourn never falls below target,
// dequeued on a fixed grid. Written from the control law alone.

inline std::vector<std::int64_t>
codel_reference_drops_ms(double interval_ms, std::int64_t first_above_ms, std::int64_t step_ms, std::int64_t end_ms)
{
  auto on_grid = [&](double t) {
    return static_cast<std::int64_t>(std::ceil(t / static_cast<double>(step_ms))) * step_ms;
  };
  std::vector<std::int64_t> drops;
  std::int64_t t = on_grid(static_cast<double>(first_above_ms) + interval_ms);
  double next = 0;
  for (int k = 1; t < end_ms; ++k)
  {
    drops.push_back(t);
    next = (k == 1 ? static_cast<double>(t) : next) + interval_ms / std::sqrt(static_cast<double>(k));
    t = on_grid(next);
  }
  return drops;
}

/// Drive codel_dequeue once per `step`, keeping every sojourn at or above
/// `sojourn` and the backlog well above one MTU.
inline std::vector<std::int64_t>
codel_observed_drops_ms(const codel::CodelParams& p, SimTime sojourn, SimTime step, SimTime end)
{
  FlowQueue q;
  std::vector<std::int64_t> drops;
  std::uint64_t seq = 0;
  for (SimTime now{0}; now < end; now += step)
  {
    for (int i = 0; i < 3; ++i)
    {
      auto pkt = make_packet(1, seq++);
      pkt.enqueued = now - sojourn;
      q.push(pkt);
    }
    codel::codel_dequeue(q, now, p, [&](Packet&&) {
      drops.push_back(std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
    });
  }
  return drops;
}

inline std::string
check_codel_schedule()
{
  const auto expected = codel_reference_drops_ms(100, 0, 1, 1000);
  const auto got = codel_observed_drops_ms(codel::kDefaultParams, 20ms, 1ms, 1000ms);
  if (expected == got)
    return {};
  std::ostringstream os;
  os << "drop instants differ: expected " << expected.size() << ", got " << got.size();
  for (std::size_t i = 0; i < std::min(expected.size(), got.size()); ++i)
    if (expected[i] != got[i])
    {
      os << "; first mismatch #" << i << " expected " << expected[i] << " ms got " << got[i] << " ms";
      break;
    }
  return os.str();
}

// ---------------------------------------------------------------------------
// fq_mac properties

/// Two permanently backlogged flows with different packet sizes in one TID:
/// at every point the byte counts differ by at most quantum + largest packet.
inline std::string
check_drr_byte_fairness()
{
  fq::FqConfig cfg;
  cfg.num_flow_queues = 64;
  fq::FqMac fq(cfg, 1);
  const auto flows = distinct_flows(fq, 2);
  const std::uint32_t sizes[2] = {1500, 200};
  const codel::CodelParams no_drop{10s, 20s, 1514};
  std::uint64_t seq[2] = {0, 0};
  for (int f = 0; f < 2; ++f)
    for (int i = 0; i < 40; ++i)
      fq.enqueue(make_packet(flows[f], seq[f]++, sizes[f]), 0, SimTime{0});

  std::int64_t bytes[2] = {0, 0};
  const std::int64_t bound = cfg.quantum + 1500;
  for (int step = 0; step < 2000; ++step)
  {
    auto p = fq.dequeue(0, SimTime{0}, no_drop);
    if (!p)
      return "queue ran dry";
    const int f = p->flow_key == flows[0] ? 0 : 1;
    bytes[f] += p->length;
    fq.enqueue(make_packet(flows[f], seq[f]++, sizes[f]), 0, SimTime{0});
    if (std::llabs(bytes[0] - bytes[1]) > bound)
      return "byte difference " + std::to_string(std::llabs(bytes[0] - bytes[1])) + " exceeds " +
             std::to_string(bound) + " after " + std::to_string(step + 1) + " dequeues";
  }
  return {};
}

/// Random enqueues against a small global limit; every overload drop must
/// come from the head of the longest queue (lowest index on ties), found here
/// by a linear scan.
inline std::string
check_drop_from_longest(std::uint64_t seed = 7)
{
  fq::FqConfig cfg;
  cfg.num_flow_queues = 16;
  cfg.global_limit = 40;
  fq::FqMac fq(cfg, 4);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> flow(1, 30);
  std::uniform_int_distribution<int> tid(0, 3);
  const codel::CodelParams no_drop{10s, 20s, 1514};
  std::uint64_t seq = 0;
  for (int i = 0; i < 3000; ++i)
  {
    if (i % 5 == 4)
    {
      fq.dequeue(static_cast<TidId>(tid(rng)), SimTime{0}, no_drop);
      continue;
    }
    std::size_t longest = 0;
    for (std::size_t q = 1; q < fq.num_queues(); ++q)
      if (fq.queue(q).size() > fq.queue(longest).size())
        longest = q;
    const bool full = fq.global_count() >= cfg.global_limit;
    std::optional<Packet> expected;
    if (full)
      expected = fq.queue(longest).packets.front();

    auto rep = fq.enqueue(make_packet(flow(rng), seq++), static_cast<TidId>(tid(rng)), SimTime{0});
    if (full != rep.dropped.has_value())
      return "drop expected=" + std::to_string(full) + " at step " + std::to_string(i);
    if (full && (rep.dropped->flow_key != expected->flow_key || rep.dropped->seq != expected->seq))
      return "dropped packet was not the head of the longest queue at step " + std::to_string(i);
    if (fq.global_count() > cfg.global_limit)
      return "global count above limit";
    std::size_t sum = 0;
    for (std::size_t q = 0; q < fq.num_queues(); ++q)
      sum += fq.queue(q).size();
    if (sum != fq.global_count())
      return "global count does not match queue contents";
  }
  return {};
}

/// Packets of one flow leave in the order they arrived, whatever else is
/// going on (hash collisions, overflow queues, CoDel and overload drops).
inline std::string
check_in_order(std::uint64_t seed = 11)
{
  fq::FqConfig cfg;
  cfg.num_flow_queues = 8; // many collisions
  cfg.global_limit = 200;
  fq::FqMac fq(cfg, 3);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> flow(1, 20);
  std::uniform_int_distribution<int> coin(0, 2);
  std::map<std::uint64_t, std::uint64_t> next_seq;
  std::map<std::uint64_t, TidId> flow_tid;
  std::map<std::uint64_t, std::int64_t> last_out;
  SimTime now{0};
  for (int i = 0; i < 20000; ++i)
  {
    now += 100us;
    if (coin(rng) != 0)
    {
      const auto f = flow(rng);
      if (!flow_tid.count(f))
        flow_tid[f] = static_cast<TidId>(f % 3);
      fq.enqueue(make_packet(f, next_seq[f]++), flow_tid[f], now);
    }
    else
    {
      auto p = fq.dequeue(static_cast<TidId>(i % 3), now, codel::kDefaultParams);
      if (!p)
        continue;
      auto it = last_out.find(p->flow_key);
      if (it != last_out.end() && static_cast<std::int64_t>(p->seq) <= it->second)
        return "flow " + std::to_string(p->flow_key) + " delivered seq " + std::to_string(p->seq) + " after " +
               std::to_string(it->second);
      last_out[p->flow_key] = static_cast<std::int64_t>(p->seq);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Airtime scheduler harness

/// Unlimited backlog of small packets on BE for every station that is
/// switched on, optionally also on VO.
class InfiniteSource : public sched::PacketSource
{
public:
  explicit InfiniteSource(std::size_t stations)
    : on_(stations, true)
    , vo_(stations, false)
  {
  }

  std::vector<bool> on_;
  std::vector<bool> vo_;
  std::map<StationId, std::size_t> finite_; // stations with a fixed number of BE packets
  std::uint64_t seq = 0;

  std::size_t backlog(StationId s, Tid t) const override
  {
    if (t == 6)
      return vo_[s] ? 1000 : 0;
    if (t != 0)
      return 0;
    if (auto it = finite_.find(s); it != finite_.end())
      return it->second;
    return on_[s] ? 1000 : 0;
  }

  std::optional<Packet> dequeue(StationId s, Tid t, SimTime) override
  {
    if (backlog(s, t) == 0)
      return std::nullopt;
    if (auto it = finite_.find(s); it != finite_.end() && t == 0)
      --it->second;
    auto p = make_packet(s, seq++, 100);
    p.station = s;
    p.tid = t;
    return p;
  }
};

/// Runs the scheduler with fixed per-station transmission durations charged at
/// completion. Returns how many aggregates each station got.
inline std::vector<std::uint64_t>
service_counts(const std::vector<SimTime>& durations, std::size_t transmissions, sched::AirtimeScheduler* out = nullptr)
{
  sched::SchedulerConfig cfg;
  sched::AirtimeScheduler local(cfg);
  sched::AirtimeScheduler& s = out ? *out : local;
  InfiniteSource src(durations.size());
  for (std::size_t i = 0; i < durations.size(); ++i)
  {
    s.add_station(144.4e6);
    s.notify_backlogged(static_cast<StationId>(i), 0);
  }
  std::vector<std::uint64_t> served(durations.size(), 0);
  SimTime now{0};
  for (std::size_t k = 0; k < transmissions; ++k)
  {
    s.schedule(src, now);
    if (s.hardware_queue().empty())
      break;
    auto agg = std::move(s.hardware_queue().front());
    s.hardware_queue().pop_front();
    now += durations[agg.station];
    s.account_airtime(agg.station, QosLevel::BE, durations[agg.station], sched::Direction::tx);
    ++served[agg.station];
  }
  return served;
}

/// Deficit of every station and level equals granted quanta minus charged airtime.
inline std::string
check_deficit_conservation()
{
  sched::AirtimeScheduler s{sched::SchedulerConfig{}};
  service_counts({500us, 800us, 3000us, 1200us}, 5000, &s);
  for (StationId i = 0; i < s.num_stations(); ++i)
  {
    const auto& st = s.station(i);
    for (std::size_t l = 0; l < kQosLevels; ++l)
      if (st.deficits[l] != st.quanta_granted[l] - st.airtime_charged[l])
        return "station " + std::to_string(i) + " level " + std::to_string(l) + " deficit not conserved";
  }
  return {};
}

} // namespace oracle
