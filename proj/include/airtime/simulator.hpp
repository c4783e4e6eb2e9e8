#pragma once

// Discrete-event model of an 802.11n access point serving a set of stations.
//
// Downlink traffic enters the access point through one of four queueing
// schemes:
//
//   fifo             shared tail-drop FIFO qdisc -> per-TID driver queues
//   fq_codel         FQ-CoDel qdisc              -> per-TID driver queues
//   fq_mac           per-TID flow queueing in the MAC, round-robin stations
//   airtime_fair_fq  as fq_mac, stations picked by the airtime scheduler
//
// A qdisc hands packets to the driver only while the driver queue of the
// head packet has room; a full driver queue stops the whole qdisc until it
// drains. The MAC keeps at most `hw_queue_capacity` aggregates queued to the
// hardware. The medium is shared by the access point and stations with
// uplink traffic in round-robin order without collisions; each transmission
// occupies it for the duration given by the PHY model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "airtime/airtime_sched.hpp"
#include "airtime/codel.hpp"
#include "airtime/fq_mac.hpp"
#include "airtime/metrics.hpp"
#include "airtime/phy_model.hpp"
#include "airtime/scenario.hpp"

namespace airtime::sim {

struct StationReport
{
  std::string name;
  double phy_rate_bps = 0;
  bool backlogged = false; // carries at least one bulk (non-ping) flow
  double throughput_bps = 0;
  double down_bps = 0;
  double up_bps = 0;
  double airtime_share = 0;
  double tx_airtime_s = 0;
  double rx_airtime_s = 0;
  std::uint64_t aggregates = 0;
  double mean_aggregation = 0;  // packets per downlink aggregate
  double mean_packet_bytes = 0; // of packets in downlink aggregates
  std::uint64_t latency_samples = 0;
  double latency_p50_ms = std::nan("");
  double latency_p90_ms = std::nan("");
  double latency_p99_ms = std::nan("");
  std::uint64_t drops = 0;
};

struct FlowReport
{
  std::uint32_t station = 0;
  FlowKind kind = FlowKind::udp_cbr;
  FlowDirection direction = FlowDirection::down;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_queue = 0;
  double throughput_bps = 0;
};

struct MetricsReport
{
  int schema_version = kSchemaVersion;
  std::string scenario;
  Scheme scheme = Scheme::fifo;
  std::uint64_t seed = 0;
  double duration_s = 0;
  std::vector<StationReport> stations;
  std::vector<FlowReport> flows;
  double jain_index = std::nan(""); // over airtime of backlogged stations
  double total_throughput_bps = 0;
  double busy_fraction = 0;
  std::uint64_t events = 0;
};

/// Expected station rate used to pick CoDel parameters: a full aggregate of
/// MTU-sized packets at the configured PHY rate.
inline double
estimated_station_rate(double phy_rate_bps, const sched::AggregateLimits& limits, const phy::PhyConstants& c)
{
  constexpr double l = 1500;
  double n = 1;
  while (n + 1 <= static_cast<double>(limits.max_packets) && phy::ampdu_length(n + 1, l, c) <= limits.max_bytes &&
         from_micros(phy::t_data(n + 1, l, phy_rate_bps, c)) <= limits.max_txop)
    n += 1;
  return phy::base_rate(n, l, phy_rate_bps, c);
}

class Simulation
{
public:
  explicit Simulation(Scenario scenario, std::ostream* trace = nullptr)
    : sc_(std::move(scenario))
    , trace_(trace)
    , rng_(sc_.seed)
  {
    validate(sc_);
    setup();
  }

  MetricsReport run()
  {
    const SimTime end = from_seconds(sc_.duration);
    while (!events_.empty())
    {
      if (events_.top().time >= end)
        break;
      // Copy out before pop: the handler may push new events.
      Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      ++event_count_;
      ev.fn();
    }
    now_ = end;
    return report();
  }

private:
  // --- events ------------------------------------------------------------

  struct Event
  {
    SimTime time;
    std::uint64_t seq;
    std::function<void()> fn;
  };

  struct EventOrder
  {
    bool operator()(const Event& a, const Event& b) const
    {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void at(SimTime t, std::function<void()> fn) { events_.push(Event{t, next_seq_++, std::move(fn)}); }

  // --- per-entity runtime state -------------------------------------------

  struct FlowRt
  {
    FlowSpec spec;
    StationId station = 0;
    std::uint64_t key = 0;
    std::uint64_t next_seq = 0;
    SimTime stop{0};

    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t delivered_bytes = 0;

    // tcp_like congestion state
    double cwnd = 10;
    double ssthresh = 0;
    std::uint64_t inflight = 0;
    SimTime srtt{0};
    SimTime recover_until{0};
  };

  struct StationRt
  {
    double rate_bps = 0;
    double estimated_rate_bps = 0;
    bool bulk = false;
    std::deque<Packet> uplink;
    std::vector<std::deque<Packet>> driver; // per TID, below a qdisc
    std::uint64_t down_bytes = 0;
    std::uint64_t up_bytes = 0;
    std::uint64_t drops = 0;
    std::uint64_t aggregates = 0;
    std::uint64_t aggregate_packets = 0;
    std::uint64_t aggregate_bytes = 0;
    std::vector<double> ping_ms;
  };

  /// Driver-level queues below a qdisc.
  class DriverSource : public sched::PacketSource
  {
  public:
    explicit DriverSource(Simulation& sim)
      : sim_(sim)
    {
    }
    std::size_t backlog(StationId s, Tid t) const override { return sim_.stations_[s].driver[t].size(); }
    std::optional<Packet> dequeue(StationId s, Tid t, SimTime) override
    {
      auto& q = sim_.stations_[s].driver[t];
      if (q.empty())
        return std::nullopt;
      Packet p = std::move(q.front());
      q.pop_front();
      return p;
    }

  private:
    Simulation& sim_;
  };

  /// The per-TID MAC queues, with per-station CoDel parameters.
  class MacSource : public sched::PacketSource
  {
  public:
    explicit MacSource(Simulation& sim)
      : sim_(sim)
    {
    }
    std::size_t backlog(StationId s, Tid t) const override { return sim_.mac_->tid_backlog(tid_id(s, t)); }
    std::optional<Packet> dequeue(StationId s, Tid t, SimTime now) override
    {
      return sim_.mac_->dequeue(tid_id(s, t), now, sim_.codel_params_for(s, now), [&](Packet&& p) {
        sim_.on_drop(std::move(p));
      });
    }

  private:
    Simulation& sim_;
  };

  static TidId tid_id(StationId s, Tid t) { return static_cast<TidId>(s * kTidsPerStation + t); }

  // --- setup ---------------------------------------------------------------

  void setup()
  {
    const auto& c = sc_.config;
    sched::SchedulerConfig scfg;
    scfg.quantum = from_micros(c.airtime_quantum_us);
    scfg.hw_queue_capacity = c.hw_queue_capacity;
    scfg.airtime_fairness = sc_.scheme == Scheme::airtime_fair_fq;
    scfg.sparse_optimisation = c.sparse_optimisation;
    scfg.limits.max_packets = c.max_ampdu_packets;
    scfg.limits.max_bytes = c.max_ampdu_bytes;
    scfg.limits.max_txop = from_micros(c.max_txop_us);
    sched_ = std::make_unique<sched::AirtimeScheduler>(scfg);

    default_codel_.target = from_micros(c.codel_target_ms * 1e3);
    default_codel_.interval = from_micros(c.codel_interval_ms * 1e3);
    codel::validate(default_codel_);

    const std::size_t n = sc_.stations.size();
    stations_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      const auto& spec = sc_.stations[i];
      auto& st = stations_[i];
      st.rate_bps = spec.phy_rate_mbps * 1e6;
      st.estimated_rate_bps = estimated_station_rate(st.rate_bps, scfg.limits, scfg.phy);
      st.driver.resize(kTidsPerStation);
      sched_->add_station(st.rate_bps);
      for (const auto& f : spec.flows)
      {
        if (f.kind != FlowKind::ping)
          st.bulk = true;
        FlowRt fr;
        fr.spec = f;
        fr.station = static_cast<StationId>(i);
        fr.key = fq::mix64(flows_.size() + 1);
        fr.stop = from_seconds(flow_stop(f, sc_));
        fr.cwnd = std::min<double>(10, f.window);
        fr.ssthresh = f.window;
        flows_.push_back(fr);
      }
    }

    switch (sc_.scheme)
    {
    case Scheme::fifo:
      source_ = std::make_unique<DriverSource>(*this);
      break;
    case Scheme::fq_codel:
      qdisc_ = std::make_unique<fq::FqMac>(
        fq::FqConfig{c.qdisc_flow_queues, c.qdisc_limit, static_cast<std::int64_t>(c.qdisc_quantum), sc_.seed}, 1);
      source_ = std::make_unique<DriverSource>(*this);
      break;
    case Scheme::fq_mac:
    case Scheme::airtime_fair_fq:
      mac_ = std::make_unique<fq::FqMac>(
        fq::FqConfig{c.fq_flow_queues, c.fq_global_limit, static_cast<std::int64_t>(c.fq_quantum), sc_.seed},
        n * kTidsPerStation);
      source_ = std::make_unique<MacSource>(*this);
      break;
    }

    std::uniform_real_distribution<double> jitter(0.0, c.start_jitter_ms * 1e-3);
    for (std::uint32_t id = 0; id < flows_.size(); ++id)
    {
      const SimTime start = from_seconds(flows_[id].spec.start + jitter(rng_));
      at(start, [this, id] { start_flow(id); });
    }
  }

  codel::CodelParams codel_params_for(StationId s, SimTime now)
  {
    if (!sc_.config.codel_per_station)
      return default_codel_;
    auto& st = sched_->station(s);
    return codel::adapt_params(st.codel, stations_[s].estimated_rate_bps, now);
  }

  // --- traffic generation --------------------------------------------------

  void start_flow(std::uint32_t id)
  {
    FlowRt& f = flows_[id];
    switch (f.spec.kind)
    {
    case FlowKind::udp_cbr:
      udp_tick(id);
      break;
    case FlowKind::tcp_like:
      tcp_try_send(id);
      break;
    case FlowKind::ping:
      ping_tick(id);
      break;
    }
  }

  Packet make_packet(FlowRt& f, std::uint32_t id, std::uint32_t length)
  {
    Packet p;
    p.flow_key = f.key;
    p.flow_id = id;
    p.seq = f.next_seq++;
    p.length = length;
    p.created = now_;
    p.station = f.station;
    p.tid = f.spec.tid;
    ++f.generated;
    return p;
  }

  void emit(FlowRt& f, std::uint32_t id, Packet p)
  {
    if (f.spec.direction == FlowDirection::down)
      ap_enqueue(std::move(p));
    else
      station_enqueue(std::move(p));
    (void)id;
  }

  void udp_tick(std::uint32_t id)
  {
    FlowRt& f = flows_[id];
    if (now_ >= f.stop)
      return;
    emit(f, id, make_packet(f, id, f.spec.packet_size));
    const double gap_s = f.spec.packet_size * 8.0 / (f.spec.rate_mbps * 1e6);
    at(now_ + from_seconds(gap_s), [this, id] { udp_tick(id); });
  }

  void ping_tick(std::uint32_t id)
  {
    FlowRt& f = flows_[id];
    if (now_ >= f.stop)
      return;
    emit(f, id, make_packet(f, id, f.spec.packet_size));
    at(now_ + from_micros(f.spec.interval_ms * 1e3), [this, id] { ping_tick(id); });
  }

  void tcp_try_send(std::uint32_t id)
  {
    FlowRt& f = flows_[id];
    while (now_ < f.stop && static_cast<double>(f.inflight) < std::floor(f.cwnd))
    {
      ++f.inflight;
      emit(f, id, make_packet(f, id, f.spec.packet_size));
    }
  }

  void tcp_on_ack(std::uint32_t id, SimTime sent)
  {
    FlowRt& f = flows_[id];
    --f.inflight;
    const SimTime rtt = now_ - sent;
    f.srtt = f.srtt == SimTime::zero() ? rtt : SimTime{(7 * f.srtt.count() + rtt.count()) / 8};
    const double wmax = f.spec.window;
    if (f.cwnd < f.ssthresh)
      f.cwnd += 1;
    else
      f.cwnd += 1.0 / f.cwnd;
    f.cwnd = std::min(f.cwnd, wmax);
    tcp_try_send(id);
  }

  void tcp_on_loss(std::uint32_t id)
  {
    FlowRt& f = flows_[id];
    --f.inflight;
    // At most one window reduction per round trip.
    if (now_ >= f.recover_until)
    {
      f.ssthresh = std::max(f.cwnd / 2, 2.0);
      f.cwnd = f.ssthresh;
      const SimTime base = from_micros(f.spec.base_rtt_ms * 1e3);
      f.recover_until = now_ + std::max(f.srtt, base);
    }
    tcp_try_send(id);
  }

  // --- enqueue paths ---------------------------------------------------------

  void trace(const char* ev, const Packet& p)
  {
    if (!trace_)
      return;
    *trace_ << "{\"t_ns\":" << now_.count() << ",\"ev\":\"" << ev << "\",\"flow\":" << p.flow_id
            << ",\"seq\":" << p.seq << ",\"sta\":" << p.station << ",\"tid\":" << unsigned(p.tid)
            << ",\"len\":" << p.length << "}\n";
  }

  void ap_enqueue(Packet p)
  {
    trace("enqueue", p);
    switch (sc_.scheme)
    {
    case Scheme::fifo:
      if (fifo_.size() >= sc_.config.fifo_limit)
      {
        on_drop(std::move(p));
        return;
      }
      p.enqueued = now_;
      fifo_.push_back(std::move(p));
      break;
    case Scheme::fq_codel: {
      auto r = qdisc_->enqueue(std::move(p), 0, now_);
      if (r.dropped)
        on_drop(std::move(*r.dropped));
      break;
    }
    case Scheme::fq_mac:
    case Scheme::airtime_fair_fq: {
      const StationId s = p.station;
      const Tid t = p.tid;
      auto r = mac_->enqueue(std::move(p), tid_id(s, t), now_);
      if (r.dropped)
        on_drop(std::move(*r.dropped));
      sched_->notify_backlogged(s, t);
      break;
    }
    }
    kick();
  }

  void station_enqueue(Packet p)
  {
    trace("enqueue", p);
    auto& st = stations_[p.station];
    if (st.uplink.size() >= sc_.config.uplink_queue_limit)
    {
      on_drop(std::move(p));
      return;
    }
    p.enqueued = now_;
    st.uplink.push_back(std::move(p));
    kick_medium();
  }

  void on_drop(Packet p)
  {
    trace("drop", p);
    FlowRt& f = flows_[p.flow_id];
    ++f.dropped;
    ++stations_[p.station].drops;
    if (f.spec.kind == FlowKind::tcp_like)
    {
      const std::uint32_t id = p.flow_id;
      at(now_ + from_micros(f.spec.base_rtt_ms * 1e3), [this, id] { tcp_on_loss(id); });
    }
  }

  // --- qdisc to driver -----------------------------------------------------

  std::optional<Packet> qdisc_dequeue()
  {
    if (sc_.scheme == Scheme::fifo)
    {
      if (fifo_.empty())
        return std::nullopt;
      Packet p = std::move(fifo_.front());
      fifo_.pop_front();
      return p;
    }
    return qdisc_->dequeue(0, now_, default_codel_, [&](Packet&& p) { on_drop(std::move(p)); });
  }

  bool qdisc_run()
  {
    if (sc_.scheme != Scheme::fifo && sc_.scheme != Scheme::fq_codel)
      return false;
    bool moved = false;
    for (;;)
    {
      if (!qdisc_held_)
      {
        qdisc_held_ = qdisc_dequeue();
        if (!qdisc_held_)
          break;
      }
      auto& dq = stations_[qdisc_held_->station].driver[qdisc_held_->tid];
      if (dq.size() >= sc_.config.driver_queue_limit)
        break;
      const StationId s = qdisc_held_->station;
      const Tid t = qdisc_held_->tid;
      dq.push_back(std::move(*qdisc_held_));
      qdisc_held_.reset();
      sched_->notify_backlogged(s, t);
      moved = true;
    }
    return moved;
  }

  void kick()
  {
    for (;;)
    {
      const bool moved = qdisc_run();
      const std::size_t before = sched_->hardware_queue().size();
      const std::size_t built = sched_->schedule(*source_, now_);
      for (std::size_t i = before; i < sched_->hardware_queue().size(); ++i)
        for (const auto& p : sched_->hardware_queue()[i].packets)
          trace("dequeue", p);
      if (!moved && built == 0)
        break;
    }
    kick_medium();
  }

  // --- medium --------------------------------------------------------------

  void kick_medium()
  {
    if (medium_busy_)
      return;
    const std::size_t contenders = stations_.size() + 1;
    for (std::size_t k = 0; k < contenders; ++k)
    {
      const std::size_t c = (rr_next_ + k) % contenders;
      if (c == 0)
      {
        if (sched_->hardware_queue().empty())
          continue;
        rr_next_ = 1 % contenders;
        start_ap_tx();
        return;
      }
      auto& st = stations_[c - 1];
      if (st.uplink.empty())
        continue;
      rr_next_ = (c + 1) % contenders;
      start_station_tx(static_cast<StationId>(c - 1));
      return;
    }
  }

  void start_ap_tx()
  {
    medium_busy_ = true;
    const SimTime d = sched_->hardware_queue().front().duration;
    at(now_ + d, [this] { complete_ap_tx(); });
  }

  void start_station_tx(StationId s)
  {
    auto& st = stations_[s];
    const auto& lim = sched_->config().limits;
    const Tid tid = st.uplink.front().tid;
    auto agg = sched::assemble_aggregate(
      s,
      tid,
      st.rate_bps,
      lim,
      sched_->config().phy,
      [&]() -> std::optional<Packet> {
        if (st.uplink.empty())
          return std::nullopt;
        Packet p = std::move(st.uplink.front());
        st.uplink.pop_front();
        return p;
      },
      [&](Packet&& p) { st.uplink.push_front(std::move(p)); });
    for (const auto& p : agg->packets)
      trace("dequeue", p);
    medium_busy_ = true;
    uplink_in_flight_ = std::move(*agg);
    at(now_ + uplink_in_flight_->duration, [this] { complete_station_tx(); });
  }

  void complete_ap_tx()
  {
    sched::Aggregate agg = std::move(sched_->hardware_queue().front());
    sched_->hardware_queue().pop_front();
    medium_busy_ = false;
    busy_time_ += agg.duration;
    sched_->account_airtime(agg.station, qos_level_of(agg.tid), agg.duration, sched::Direction::tx);

    auto& st = stations_[agg.station];
    ++st.aggregates;
    st.aggregate_packets += agg.packets.size();
    for (auto& p : agg.packets)
    {
      st.aggregate_bytes += p.length;
      deliver_to_station(std::move(p));
    }
    kick();
  }

  void complete_station_tx()
  {
    sched::Aggregate agg = std::move(*uplink_in_flight_);
    uplink_in_flight_.reset();
    medium_busy_ = false;
    busy_time_ += agg.duration;
    sched_->account_airtime(agg.station, qos_level_of(agg.tid), agg.duration, sched::Direction::rx);
    for (auto& p : agg.packets)
      deliver_to_ap(std::move(p));
    kick();
  }

  // --- delivery --------------------------------------------------------------

  void deliver_to_station(Packet p)
  {
    trace("deliver", p);
    FlowRt& f = flows_[p.flow_id];
    ++f.delivered;
    f.delivered_bytes += p.length;
    stations_[p.station].down_bytes += p.length;
    switch (f.spec.kind)
    {
    case FlowKind::udp_cbr:
      break;
    case FlowKind::tcp_like: {
      const std::uint32_t id = p.flow_id;
      const SimTime sent = p.created;
      at(now_ + from_micros(f.spec.base_rtt_ms * 1e3), [this, id, sent] { tcp_on_ack(id, sent); });
      break;
    }
    case FlowKind::ping: {
      // Echo the request back; the reply keeps the request's creation time.
      Packet reply = make_packet(f, p.flow_id, p.length);
      reply.created = p.created;
      station_enqueue(std::move(reply));
      break;
    }
    }
  }

  void deliver_to_ap(Packet p)
  {
    trace("deliver", p);
    FlowRt& f = flows_[p.flow_id];
    ++f.delivered;
    f.delivered_bytes += p.length;
    auto& st = stations_[p.station];
    st.up_bytes += p.length;
    switch (f.spec.kind)
    {
    case FlowKind::udp_cbr:
      break;
    case FlowKind::tcp_like: {
      const std::uint32_t id = p.flow_id;
      const SimTime sent = p.created;
      at(now_ + from_micros(f.spec.base_rtt_ms * 1e3), [this, id, sent] { tcp_on_ack(id, sent); });
      break;
    }
    case FlowKind::ping:
      st.ping_ms.push_back(to_micros(now_ - p.created) / 1e3);
      break;
    }
  }

  // --- reporting -------------------------------------------------------------

  std::vector<std::uint64_t> count_queued_per_flow() const
  {
    std::vector<std::uint64_t> n(flows_.size(), 0);
    auto add = [&](const Packet& p) { ++n[p.flow_id]; };
    for (const auto& p : fifo_)
      add(p);
    if (qdisc_held_)
      add(*qdisc_held_);
    for (const fq::FqMac* q : {qdisc_.get(), mac_.get()})
      if (q)
        for (std::size_t i = 0; i < q->num_queues(); ++i)
          for (const auto& p : q->queue(i).packets)
            add(p);
    for (std::size_t s = 0; s < stations_.size(); ++s)
    {
      for (const auto& dq : stations_[s].driver)
        for (const auto& p : dq)
          add(p);
      for (const auto& p : stations_[s].uplink)
        add(p);
      for (const auto& rq : sched_->station(static_cast<StationId>(s)).retry)
        for (const auto& p : rq)
          add(p);
    }
    for (const auto& agg : sched_->hardware_queue())
      for (const auto& p : agg.packets)
        add(p);
    if (uplink_in_flight_)
      for (const auto& p : uplink_in_flight_->packets)
        add(p);
    return n;
  }

  MetricsReport report() const
  {
    MetricsReport r;
    r.scenario = sc_.name;
    r.scheme = sc_.scheme;
    r.seed = sc_.seed;
    r.duration_s = sc_.duration;
    r.events = event_count_;
    const double dur = sc_.duration;

    std::vector<double> bulk_shares;
    std::vector<double> all_shares;
    double total_bits = 0;
    for (std::size_t i = 0; i < stations_.size(); ++i)
    {
      const auto& st = stations_[i];
      const auto& ss = sched_->station(static_cast<StationId>(i));
      StationReport sr;
      sr.name = sc_.stations[i].name;
      sr.phy_rate_bps = st.rate_bps;
      sr.backlogged = st.bulk;
      sr.down_bps = st.down_bytes * 8.0 / dur;
      sr.up_bps = st.up_bytes * 8.0 / dur;
      sr.throughput_bps = sr.down_bps + sr.up_bps;
      sr.tx_airtime_s = to_seconds(ss.tx_airtime);
      sr.rx_airtime_s = to_seconds(ss.rx_airtime);
      sr.airtime_share = (sr.tx_airtime_s + sr.rx_airtime_s) / dur;
      sr.aggregates = st.aggregates;
      if (st.aggregates > 0)
      {
        sr.mean_aggregation = static_cast<double>(st.aggregate_packets) / static_cast<double>(st.aggregates);
        sr.mean_packet_bytes = static_cast<double>(st.aggregate_bytes) / static_cast<double>(st.aggregate_packets);
      }
      sr.latency_samples = st.ping_ms.size();
      if (!st.ping_ms.empty())
      {
        sr.latency_p50_ms = metrics::percentile(st.ping_ms, 50);
        sr.latency_p90_ms = metrics::percentile(st.ping_ms, 90);
        sr.latency_p99_ms = metrics::percentile(st.ping_ms, 99);
      }
      sr.drops = st.drops;
      total_bits += sr.throughput_bps;
      all_shares.push_back(sr.airtime_share);
      if (st.bulk)
        bulk_shares.push_back(sr.airtime_share);
      r.stations.push_back(std::move(sr));
    }
    r.total_throughput_bps = total_bits;
    r.busy_fraction = to_seconds(busy_time_) / dur;

    const auto& shares = bulk_shares.empty() ? all_shares : bulk_shares;
    if (std::any_of(shares.begin(), shares.end(), [](double v) { return v > 0; }))
      r.jain_index = metrics::jain_index(shares);

    const auto queued = count_queued_per_flow();
    for (std::size_t i = 0; i < flows_.size(); ++i)
    {
      const auto& f = flows_[i];
      FlowReport fr;
      fr.station = f.station;
      fr.kind = f.spec.kind;
      fr.direction = f.spec.direction;
      fr.generated = f.generated;
      fr.delivered = f.delivered;
      fr.dropped = f.dropped;
      fr.in_queue = queued[i];
      fr.throughput_bps = f.delivered_bytes * 8.0 / dur;
      r.flows.push_back(fr);
    }
    return r;
  }

  Scenario sc_;
  std::ostream* trace_;
  std::mt19937_64 rng_;

  std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t event_count_ = 0;
  SimTime now_{0};

  std::vector<StationRt> stations_;
  std::vector<FlowRt> flows_;

  std::unique_ptr<sched::AirtimeScheduler> sched_;
  std::unique_ptr<sched::PacketSource> source_;
  codel::CodelParams default_codel_;

  std::deque<Packet> fifo_;
  std::unique_ptr<fq::FqMac> qdisc_;
  std::optional<Packet> qdisc_held_;
  std::unique_ptr<fq::FqMac> mac_;

  bool medium_busy_ = false;
  std::size_t rr_next_ = 0;
  std::optional<sched::Aggregate> uplink_in_flight_;
  SimTime busy_time_{0};
};

/// Run one scenario to completion.
inline MetricsReport
run(const Scenario& scenario, std::ostream* trace = nullptr)
{
  Simulation sim(scenario, trace);
  return sim.run();
}

} // namespace airtime::sim
