#pragma once

// Scenario description and its JSON form.
//
// Every field has a default, so a scenario file only needs the parts it
// changes. Writing a scenario back out emits every field, which makes the
// written form a fixed point of load/save.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "airtime/error.hpp"
#include "airtime/packet.hpp"

namespace airtime {

inline constexpr int kSchemaVersion = 1;

enum class Scheme
{
  fifo,
  fq_codel,
  fq_mac,
  airtime_fair_fq,
};

enum class FlowKind
{
  udp_cbr,
  tcp_like,
  ping,
};

enum class FlowDirection
{
  down,
  up,
};

inline constexpr const char* kSchemeNames = "fifo, fq_codel, fq_mac, airtime_fair_fq";

inline const char*
to_string(Scheme s)
{
  switch (s)
  {
  case Scheme::fifo:
    return "fifo";
  case Scheme::fq_codel:
    return "fq_codel";
  case Scheme::fq_mac:
    return "fq_mac";
  case Scheme::airtime_fair_fq:
    return "airtime_fair_fq";
  }
  return "?";
}

inline const char*
to_string(FlowKind k)
{
  switch (k)
  {
  case FlowKind::udp_cbr:
    return "udp_cbr";
  case FlowKind::tcp_like:
    return "tcp_like";
  case FlowKind::ping:
    return "ping";
  }
  return "?";
}

inline const char*
to_string(FlowDirection d)
{
  return d == FlowDirection::down ? "down" : "up";
}

inline Scheme
parse_scheme(const std::string& s)
{
  if (s == "fifo")
    return Scheme::fifo;
  if (s == "fq_codel")
    return Scheme::fq_codel;
  if (s == "fq_mac")
    return Scheme::fq_mac;
  if (s == "airtime_fair_fq")
    return Scheme::airtime_fair_fq;
  throw validation_error("unknown scheme '" + s + "'; valid schemes are: " + kSchemeNames);
}

struct FlowSpec
{
  FlowKind kind = FlowKind::udp_cbr;
  FlowDirection direction = FlowDirection::down;
  std::uint32_t packet_size = 1500; // bytes; ping uses 64 unless overridden
  double rate_mbps = 0;             // udp_cbr
  std::uint32_t window = 0;         // tcp_like, max congestion window in packets
  double base_rtt_ms = 2;           // tcp_like, path RTT excluding the WiFi hop queues
  double interval_ms = 100;         // ping
  double start = 0;                 // seconds
  double stop = -1;                 // seconds; negative means end of run
  Tid tid = 0;

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

struct StationSpec
{
  std::string name;
  double phy_rate_mbps = 0;
  std::vector<FlowSpec> flows;

  friend bool operator==(const StationSpec&, const StationSpec&) = default;
};

struct SimConfig
{
  std::size_t fifo_limit = 1000;        // shared qdisc FIFO, packets
  std::size_t driver_queue_limit = 128; // per-TID driver queue below a qdisc
  std::size_t uplink_queue_limit = 1000;

  std::size_t fq_flow_queues = 1024;
  std::size_t fq_global_limit = 8192;
  std::uint32_t fq_quantum = 300;

  std::size_t qdisc_flow_queues = 1024;
  std::size_t qdisc_limit = 10240;
  std::uint32_t qdisc_quantum = 1514;

  double codel_target_ms = 5;
  double codel_interval_ms = 100;
  bool codel_per_station = true;

  double airtime_quantum_us = 1000;
  bool sparse_optimisation = true;
  std::size_t hw_queue_capacity = 2;

  std::size_t max_ampdu_packets = 64;
  std::uint32_t max_ampdu_bytes = 65535;
  double max_txop_us = 4000;

  double start_jitter_ms = 10;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Scenario
{
  int schema_version = kSchemaVersion;
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration = 30; // seconds
  Scheme scheme = Scheme::airtime_fair_fq;
  std::vector<StationSpec> stations;
  SimConfig config;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Effective stop time of a flow, in seconds.
inline double
flow_stop(const FlowSpec& f, const Scenario& s)
{
  return f.stop < 0 ? s.duration : std::min(f.stop, s.duration);
}

inline void
validate(const Scenario& s)
{
  auto fail = [](const std::string& m) { throw validation_error(m); };
  if (s.schema_version != kSchemaVersion)
    fail("unsupported schema_version " + std::to_string(s.schema_version));
  if (!(s.duration > 0) || !std::isfinite(s.duration))
    fail("duration must be positive");
  if (s.stations.empty())
    fail("scenario needs at least one station");
  const auto& c = s.config;
  if (c.fifo_limit == 0 || c.driver_queue_limit == 0 || c.uplink_queue_limit == 0)
    fail("queue limits must be positive");
  if (c.fq_flow_queues == 0 || c.fq_global_limit == 0 || c.fq_quantum == 0)
    fail("fq_mac settings must be positive");
  if (c.qdisc_flow_queues == 0 || c.qdisc_limit == 0 || c.qdisc_quantum == 0)
    fail("fq_codel qdisc settings must be positive");
  if (!(c.codel_target_ms > 0) || !(c.codel_interval_ms > c.codel_target_ms))
    fail("CoDel needs 0 < target < interval");
  if (!(c.airtime_quantum_us > 0))
    fail("airtime quantum must be positive");
  if (c.hw_queue_capacity == 0)
    fail("hardware queue capacity must be positive");
  if (c.max_ampdu_packets == 0 || c.max_ampdu_bytes == 0 || !(c.max_txop_us > 0))
    fail("aggregation limits must be positive");
  if (c.start_jitter_ms < 0)
    fail("start jitter must be non-negative");

  for (std::size_t i = 0; i < s.stations.size(); ++i)
  {
    const auto& st = s.stations[i];
    const std::string where = "station " + std::to_string(i);
    if (!(st.phy_rate_mbps > 0) || !std::isfinite(st.phy_rate_mbps))
      fail(where + ": phy_rate_mbps must be positive");
    for (std::size_t j = 0; j < st.flows.size(); ++j)
    {
      const auto& f = st.flows[j];
      const std::string fw = where + " flow " + std::to_string(j);
      if (f.packet_size == 0)
        fail(fw + ": packet_size must be positive");
      if (f.tid >= kTidsPerStation)
        fail(fw + ": tid must be below 16");
      if (f.start < 0)
        fail(fw + ": start must be non-negative");
      if (f.stop >= 0 && f.stop <= f.start)
        fail(fw + ": stop must be after start");
      switch (f.kind)
      {
      case FlowKind::udp_cbr:
        if (!(f.rate_mbps > 0))
          fail(fw + ": udp_cbr needs rate_mbps > 0");
        break;
      case FlowKind::tcp_like:
        if (f.window < 1)
          fail(fw + ": tcp_like needs window >= 1 packet");
        if (!(f.base_rtt_ms > 0))
          fail(fw + ": tcp_like needs base_rtt_ms > 0");
        break;
      case FlowKind::ping:
        if (!(f.interval_ms > 0))
          fail(fw + ": ping needs interval_ms > 0");
        if (f.direction != FlowDirection::down)
          fail(fw + ": ping flows originate at the access point (direction down)");
        break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

/// Walks one JSON object, rejecting keys nobody asked for.
class ObjectReader
{
public:
  ObjectReader(const json& j, std::string path)
    : j_(j)
    , path_(std::move(path))
  {
    if (!j_.is_object())
      throw validation_error(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end())
      return;
    try
    {
      if constexpr (std::is_same_v<T, bool>)
      {
        if (!it->is_boolean())
          throw validation_error(path_ + "." + key + ": expected true or false");
        out = it->template get<bool>();
      }
      else if constexpr (std::is_same_v<T, std::uint8_t>)
      {
        if (!it->is_number_unsigned() || it->template get<unsigned>() > 255)
          throw validation_error(path_ + "." + key + ": expected an integer in 0..255");
        out = static_cast<std::uint8_t>(it->template get<unsigned>());
      }
      else if constexpr (std::is_unsigned_v<T>)
      {
        if (!it->is_number_unsigned())
          throw validation_error(path_ + "." + key + ": expected a non-negative integer");
        out = it->template get<T>();
      }
      else
        out = it->template get<T>();
    }
    catch (const nlohmann::json::exception& e)
    {
      throw validation_error(path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw validation_error(path_ + ": unknown key '" + it.key() + "'");
  }

  const std::string& path() const { return path_; }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline FlowKind
parse_flow_kind(const std::string& s, const std::string& where)
{
  if (s == "udp_cbr")
    return FlowKind::udp_cbr;
  if (s == "tcp_like")
    return FlowKind::tcp_like;
  if (s == "ping")
    return FlowKind::ping;
  throw validation_error(where + ": unknown flow kind '" + s + "' (udp_cbr, tcp_like, ping)");
}

inline FlowDirection
parse_direction(const std::string& s, const std::string& where)
{
  if (s == "down")
    return FlowDirection::down;
  if (s == "up")
    return FlowDirection::up;
  throw validation_error(where + ": direction must be 'down' or 'up'");
}

} // namespace detail

inline nlohmann::json
to_json(const FlowSpec& f)
{
  return {
    {"kind", to_string(f.kind)},
    {"direction", to_string(f.direction)},
    {"packet_size", f.packet_size},
    {"rate_mbps", f.rate_mbps},
    {"window", f.window},
    {"base_rtt_ms", f.base_rtt_ms},
    {"interval_ms", f.interval_ms},
    {"start", f.start},
    {"stop", f.stop},
    {"tid", f.tid},
  };
}

inline nlohmann::json
to_json(const SimConfig& c)
{
  return {
    {"fifo_limit", c.fifo_limit},
    {"driver_queue_limit", c.driver_queue_limit},
    {"uplink_queue_limit", c.uplink_queue_limit},
    {"fq_flow_queues", c.fq_flow_queues},
    {"fq_global_limit", c.fq_global_limit},
    {"fq_quantum", c.fq_quantum},
    {"qdisc_flow_queues", c.qdisc_flow_queues},
    {"qdisc_limit", c.qdisc_limit},
    {"qdisc_quantum", c.qdisc_quantum},
    {"codel_target_ms", c.codel_target_ms},
    {"codel_interval_ms", c.codel_interval_ms},
    {"codel_per_station", c.codel_per_station},
    {"airtime_quantum_us", c.airtime_quantum_us},
    {"sparse_optimisation", c.sparse_optimisation},
    {"hw_queue_capacity", c.hw_queue_capacity},
    {"max_ampdu_packets", c.max_ampdu_packets},
    {"max_ampdu_bytes", c.max_ampdu_bytes},
    {"max_txop_us", c.max_txop_us},
    {"start_jitter_ms", c.start_jitter_ms},
  };
}

inline nlohmann::json
to_json(const Scenario& s)
{
  nlohmann::json stations = nlohmann::json::array();
  for (const auto& st : s.stations)
  {
    nlohmann::json flows = nlohmann::json::array();
    for (const auto& f : st.flows)
      flows.push_back(to_json(f));
    stations.push_back({{"name", st.name}, {"phy_rate_mbps", st.phy_rate_mbps}, {"flows", flows}});
  }
  return {
    {"schema_version", s.schema_version},
    {"name", s.name},
    {"seed", s.seed},
    {"duration", s.duration},
    {"scheme", to_string(s.scheme)},
    {"stations", stations},
    {"config", to_json(s.config)},
  };
}

/// Parse and validate a scenario document.
inline Scenario
scenario_from_json(const nlohmann::json& j)
{
  Scenario s;
  detail::ObjectReader top(j, "scenario");
  top.get("schema_version", s.schema_version);
  top.get("name", s.name);
  top.get("seed", s.seed);
  top.get("duration", s.duration);
  std::string scheme = to_string(s.scheme);
  top.get("scheme", scheme);
  s.scheme = parse_scheme(scheme);

  if (const auto* stations = top.child("stations"))
  {
    if (!stations->is_array())
      throw validation_error("scenario.stations: expected an array");
    for (std::size_t i = 0; i < stations->size(); ++i)
    {
      const std::string sp = "scenario.stations[" + std::to_string(i) + "]";
      detail::ObjectReader r((*stations)[i], sp);
      StationSpec st;
      st.name = "sta" + std::to_string(i);
      r.get("name", st.name);
      r.get("phy_rate_mbps", st.phy_rate_mbps);
      if (const auto* flows = r.child("flows"))
      {
        if (!flows->is_array())
          throw validation_error(sp + ".flows: expected an array");
        for (std::size_t k = 0; k < flows->size(); ++k)
        {
          const std::string fp = sp + ".flows[" + std::to_string(k) + "]";
          detail::ObjectReader fr((*flows)[k], fp);
          FlowSpec f;
          std::string kind = "udp_cbr";
          std::string dir = "down";
          fr.get("kind", kind);
          fr.get("direction", dir);
          f.kind = detail::parse_flow_kind(kind, fp);
          f.direction = detail::parse_direction(dir, fp);
          if (f.kind == FlowKind::ping)
            f.packet_size = 64;
          fr.get("packet_size", f.packet_size);
          fr.get("rate_mbps", f.rate_mbps);
          fr.get("window", f.window);
          fr.get("base_rtt_ms", f.base_rtt_ms);
          fr.get("interval_ms", f.interval_ms);
          fr.get("start", f.start);
          fr.get("stop", f.stop);
          fr.get("tid", f.tid);
          fr.finish();
          st.flows.push_back(f);
        }
      }
      r.finish();
      s.stations.push_back(std::move(st));
    }
  }

  if (const auto* cfg = top.child("config"))
  {
    detail::ObjectReader r(*cfg, "scenario.config");
    auto& c = s.config;
    r.get("fifo_limit", c.fifo_limit);
    r.get("driver_queue_limit", c.driver_queue_limit);
    r.get("uplink_queue_limit", c.uplink_queue_limit);
    r.get("fq_flow_queues", c.fq_flow_queues);
    r.get("fq_global_limit", c.fq_global_limit);
    r.get("fq_quantum", c.fq_quantum);
    r.get("qdisc_flow_queues", c.qdisc_flow_queues);
    r.get("qdisc_limit", c.qdisc_limit);
    r.get("qdisc_quantum", c.qdisc_quantum);
    r.get("codel_target_ms", c.codel_target_ms);
    r.get("codel_interval_ms", c.codel_interval_ms);
    r.get("codel_per_station", c.codel_per_station);
    r.get("airtime_quantum_us", c.airtime_quantum_us);
    r.get("sparse_optimisation", c.sparse_optimisation);
    r.get("hw_queue_capacity", c.hw_queue_capacity);
    r.get("max_ampdu_packets", c.max_ampdu_packets);
    r.get("max_ampdu_bytes", c.max_ampdu_bytes);
    r.get("max_txop_us", c.max_txop_us);
    r.get("start_jitter_ms", c.start_jitter_ms);
    r.finish();
  }
  top.finish();
  validate(s);
  return s;
}

inline std::string
dump_scenario(const Scenario& s)
{
  return to_json(s).dump(2) + "\n";
}

inline Scenario
load_scenario_text(const std::string& text)
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::parse_error& e)
  {
    throw validation_error(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline Scenario
load_scenario_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCategory::io, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

} // namespace airtime
