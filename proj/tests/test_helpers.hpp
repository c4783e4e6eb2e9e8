#pragma once

#include "airtime/scenario.hpp"

namespace testutil {

using namespace airtime;

inline FlowSpec
udp(double mbps)
{
  FlowSpec f;
  f.kind = FlowKind::udp_cbr;
  f.rate_mbps = mbps;
  return f;
}

inline FlowSpec
tcp(std::uint32_t window = 400)
{
  FlowSpec f;
  f.kind = FlowKind::tcp_like;
  f.window = window;
  return f;
}

inline FlowSpec
ping()
{
  FlowSpec f;
  f.kind = FlowKind::ping;
  f.packet_size = 64;
  return f;
}

inline StationSpec
station(std::string name, double mbps, std::vector<FlowSpec> flows)
{
  return StationSpec{std::move(name), mbps, std::move(flows)};
}

/// Two fast stations and one slow one, all saturated with downlink UDP.
inline Scenario
three_station_udp(Scheme scheme, double duration, std::uint64_t seed = 1)
{
  Scenario s;
  s.name = "three_station_udp";
  s.scheme = scheme;
  s.duration = duration;
  s.seed = seed;
  s.stations = {station("fast1", 144.4, {udp(100)}), station("fast2", 144.4, {udp(100)}),
                station("slow", 7.2, {udp(100)})};
  return s;
}

/// Bulk TCP-like download plus ping on every station.
inline Scenario
three_station_tcp_ping(Scheme scheme, double duration, std::uint64_t seed = 1)
{
  Scenario s;
  s.name = "three_station_tcp_ping";
  s.scheme = scheme;
  s.duration = duration;
  s.seed = seed;
  s.stations = {station("fast1", 144.4, {tcp(), ping()}), station("fast2", 144.4, {tcp(), ping()}),
                station("slow", 7.2, {tcp(), ping()})};
  return s;
}

/// Three bulk stations plus a fast station that only receives ping.
inline Scenario
sparse_station(bool optimisation, double duration, std::uint64_t seed)
{
  Scenario s = three_station_udp(Scheme::airtime_fair_fq, duration, seed);
  s.name = "sparse_station";
  s.config.sparse_optimisation = optimisation;
  s.stations.push_back(station("sparse", 144.4, {ping()}));
  return s;
}

/// 28 fast bulk stations, one fast ping-only station and one slow bulk station.
inline Scenario
thirty_station_udp(Scheme scheme, double duration, std::uint64_t seed = 1)
{
  Scenario s;
  s.name = "thirty_station_udp";
  s.scheme = scheme;
  s.duration = duration;
  s.seed = seed;
  for (int i = 0; i < 30; ++i)
  {
    const std::string n = std::to_string(i);
    if (i == 28)
      s.stations.push_back(station("ping" + n, 65, {ping()}));
    else if (i == 29)
      s.stations.push_back(station("slow" + n, 1, {udp(20)}));
    else
      s.stations.push_back(station("fast" + n, 65, {udp(20)}));
  }
  return s;
}

} // namespace testutil
