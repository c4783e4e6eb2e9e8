#pragma once

// Report emission: JSON, CSV and a human-readable table. JSON and CSV carry
// the same values; CSV prints doubles with round-trip precision.

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "airtime/metrics.hpp"
#include "airtime/phy_model.hpp"
#include "airtime/simulator.hpp"

namespace airtime::report {

using nlohmann::json;

enum class Format
{
  json,
  csv,
  human,
};

inline Format
parse_format(const std::string& s)
{
  if (s == "json")
    return Format::json;
  if (s == "csv")
    return Format::csv;
  if (s == "human")
    return Format::human;
  throw Error(ErrorCategory::usage, "unknown format '" + s + "' (json, csv, human)");
}

/// NaN and infinities become JSON null.
inline json
num(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

inline std::string
csv_num(double v)
{
  if (!std::isfinite(v))
    return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string
csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Simulation runs

inline json
to_json(const sim::StationReport& s)
{
  return {
    {"name", s.name},
    {"phy_rate_bps", s.phy_rate_bps},
    {"backlogged", s.backlogged},
    {"throughput_bps", num(s.throughput_bps)},
    {"down_bps", num(s.down_bps)},
    {"up_bps", num(s.up_bps)},
    {"airtime_share", num(s.airtime_share)},
    {"tx_airtime_s", num(s.tx_airtime_s)},
    {"rx_airtime_s", num(s.rx_airtime_s)},
    {"aggregates", s.aggregates},
    {"mean_aggregation", num(s.mean_aggregation)},
    {"mean_packet_bytes", num(s.mean_packet_bytes)},
    {"latency_samples", s.latency_samples},
    {"latency_p50_ms", num(s.latency_p50_ms)},
    {"latency_p90_ms", num(s.latency_p90_ms)},
    {"latency_p99_ms", num(s.latency_p99_ms)},
    {"drops", s.drops},
  };
}

inline json
to_json(const sim::MetricsReport& r)
{
  json stations = json::array();
  for (const auto& s : r.stations)
    stations.push_back(to_json(s));
  json flows = json::array();
  for (const auto& f : r.flows)
    flows.push_back({
      {"station", f.station},
      {"kind", to_string(f.kind)},
      {"direction", to_string(f.direction)},
      {"generated", f.generated},
      {"delivered", f.delivered},
      {"dropped", f.dropped},
      {"in_queue", f.in_queue},
      {"throughput_bps", num(f.throughput_bps)},
    });
  return {
    {"schema_version", r.schema_version},
    {"scenario", r.scenario},
    {"scheme", to_string(r.scheme)},
    {"seed", r.seed},
    {"duration_s", r.duration_s},
    {"jain_index", num(r.jain_index)},
    {"total_throughput_bps", num(r.total_throughput_bps)},
    {"busy_fraction", num(r.busy_fraction)},
    {"events", r.events},
    {"stations", stations},
    {"flows", flows},
  };
}

/// Medians across repetitions of the same scenario.
struct StationSummary
{
  std::string name;
  double throughput_bps = 0;
  double airtime_share = 0;
  double mean_aggregation = 0;
  double mean_packet_bytes = 0;
  double latency_p50_ms = std::nan("");
};

struct RunSummary
{
  std::size_t repetitions = 0;
  std::vector<std::uint64_t> seeds;
  double jain_index = std::nan("");
  double total_throughput_bps = 0;
  std::vector<StationSummary> stations;
};

inline double
median_finite(const std::vector<double>& v)
{
  std::vector<double> finite;
  for (double x : v)
    if (std::isfinite(x))
      finite.push_back(x);
  return metrics::median(std::move(finite));
}

inline RunSummary
summarise(const std::vector<sim::MetricsReport>& runs)
{
  RunSummary s;
  s.repetitions = runs.size();
  if (runs.empty())
    return s;
  std::vector<double> jain;
  std::vector<double> total;
  for (const auto& r : runs)
  {
    s.seeds.push_back(r.seed);
    jain.push_back(r.jain_index);
    total.push_back(r.total_throughput_bps);
  }
  s.jain_index = median_finite(jain);
  s.total_throughput_bps = median_finite(total);
  for (std::size_t i = 0; i < runs.front().stations.size(); ++i)
  {
    std::vector<double> thr, share, agg, bytes, lat;
    for (const auto& r : runs)
    {
      const auto& st = r.stations[i];
      thr.push_back(st.throughput_bps);
      share.push_back(st.airtime_share);
      agg.push_back(st.mean_aggregation);
      bytes.push_back(st.mean_packet_bytes);
      lat.push_back(st.latency_p50_ms);
    }
    StationSummary ss;
    ss.name = runs.front().stations[i].name;
    ss.throughput_bps = median_finite(thr);
    ss.airtime_share = median_finite(share);
    ss.mean_aggregation = median_finite(agg);
    ss.mean_packet_bytes = median_finite(bytes);
    ss.latency_p50_ms = median_finite(lat);
    s.stations.push_back(ss);
  }
  return s;
}

inline json
to_json(const RunSummary& s)
{
  json stations = json::array();
  for (const auto& st : s.stations)
    stations.push_back({
      {"name", st.name},
      {"throughput_bps", num(st.throughput_bps)},
      {"airtime_share", num(st.airtime_share)},
      {"mean_aggregation", num(st.mean_aggregation)},
      {"mean_packet_bytes", num(st.mean_packet_bytes)},
      {"latency_p50_ms", num(st.latency_p50_ms)},
    });
  return {
    {"repetitions", s.repetitions},
    {"seeds", s.seeds},
    {"statistic", "median"},
    {"jain_index", num(s.jain_index)},
    {"total_throughput_bps", num(s.total_throughput_bps)},
    {"stations", stations},
  };
}

inline json
sim_document(const std::vector<sim::MetricsReport>& runs)
{
  json jr = json::array();
  for (const auto& r : runs)
    jr.push_back(to_json(r));
  return {{"schema_version", kSchemaVersion}, {"runs", jr}, {"summary", to_json(summarise(runs))}};
}

inline const std::vector<std::string>&
station_csv_columns()
{
  static const std::vector<std::string> cols{
    "schema_version", "scenario",        "scheme",           "seed",         "station",        "name",
    "phy_rate_bps",   "backlogged",      "throughput_bps",   "down_bps",     "up_bps",         "airtime_share",
    "tx_airtime_s",   "rx_airtime_s",    "aggregates",       "mean_aggregation", "mean_packet_bytes",
    "latency_samples", "latency_p50_ms", "latency_p90_ms",   "latency_p99_ms", "drops",       "jain_index",
    "total_throughput_bps", "busy_fraction"};
  return cols;
}

/// One row per station per run.
inline void
write_csv(std::ostream& out, const std::vector<sim::MetricsReport>& runs)
{
  const auto& cols = station_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : runs)
    for (std::size_t i = 0; i < r.stations.size(); ++i)
    {
      const auto& s = r.stations[i];
      out << r.schema_version << ',' << csv_field(r.scenario) << ',' << to_string(r.scheme) << ',' << r.seed << ','
          << i << ',' << csv_field(s.name) << ',' << csv_num(s.phy_rate_bps) << ',' << (s.backlogged ? 1 : 0) << ','
          << csv_num(s.throughput_bps) << ',' << csv_num(s.down_bps) << ',' << csv_num(s.up_bps) << ','
          << csv_num(s.airtime_share) << ',' << csv_num(s.tx_airtime_s) << ',' << csv_num(s.rx_airtime_s) << ','
          << s.aggregates << ',' << csv_num(s.mean_aggregation) << ',' << csv_num(s.mean_packet_bytes) << ','
          << s.latency_samples << ',' << csv_num(s.latency_p50_ms) << ',' << csv_num(s.latency_p90_ms) << ','
          << csv_num(s.latency_p99_ms) << ',' << s.drops << ',' << csv_num(r.jain_index) << ','
          << csv_num(r.total_throughput_bps) << ',' << csv_num(r.busy_fraction) << "\n";
    }
}

inline std::string
fixed(double v, int prec)
{
  if (!std::isfinite(v))
    return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

inline void
write_human(std::ostream& out, const std::vector<sim::MetricsReport>& runs)
{
  for (const auto& r : runs)
  {
    out << "scenario " << r.scenario << "  scheme " << to_string(r.scheme) << "  seed " << r.seed << "  duration "
        << r.duration_s << " s\n";
    out << std::left << std::setw(12) << "station" << std::right << std::setw(10) << "PHY Mbps" << std::setw(12)
        << "thr Mbps" << std::setw(10) << "airtime" << std::setw(10) << "aggr" << std::setw(12) << "p50 ms"
        << std::setw(12) << "p90 ms" << std::setw(10) << "drops" << "\n";
    for (const auto& s : r.stations)
      out << std::left << std::setw(12) << s.name << std::right << std::setw(10) << fixed(s.phy_rate_bps / 1e6, 1)
          << std::setw(12) << fixed(s.throughput_bps / 1e6, 2) << std::setw(9) << fixed(s.airtime_share * 100, 1)
          << "%" << std::setw(10) << fixed(s.mean_aggregation, 2) << std::setw(12) << fixed(s.latency_p50_ms, 2)
          << std::setw(12) << fixed(s.latency_p90_ms, 2) << std::setw(10) << s.drops << "\n";
    out << "total " << fixed(r.total_throughput_bps / 1e6, 2) << " Mbps  jain " << fixed(r.jain_index, 4)
        << "  busy " << fixed(r.busy_fraction * 100, 1) << "%\n\n";
  }
  if (runs.size() > 1)
  {
    const auto s = summarise(runs);
    out << "median over " << s.repetitions << " repetitions: total " << fixed(s.total_throughput_bps / 1e6, 2)
        << " Mbps  jain " << fixed(s.jain_index, 4) << "\n";
    for (const auto& st : s.stations)
      out << "  " << std::left << std::setw(12) << st.name << std::right << std::setw(10)
          << fixed(st.throughput_bps / 1e6, 2) << " Mbps " << std::setw(7) << fixed(st.airtime_share * 100, 1)
          << "% airtime  aggr " << fixed(st.mean_aggregation, 2) << "  p50 " << fixed(st.latency_p50_ms, 2)
          << " ms\n";
  }
}

inline void
write_sim(std::ostream& out, const std::vector<sim::MetricsReport>& runs, Format f)
{
  switch (f)
  {
  case Format::json:
    out << sim_document(runs).dump(2) << "\n";
    break;
  case Format::csv:
    write_csv(out, runs);
    break;
  case Format::human:
    write_human(out, runs);
    break;
  }
}

// ---------------------------------------------------------------------------
// Model calculator

struct ModelTable
{
  bool fairness = true;
  std::vector<phy::StationModelInput> inputs;
  std::vector<phy::ModelPrediction> predictions;

  double total_effective_rate_bps() const
  {
    double t = 0;
    for (const auto& p : predictions)
      t += p.effective_rate_bps;
    return t;
  }
};

inline ModelTable
model_table(std::vector<phy::StationModelInput> inputs, bool fairness)
{
  ModelTable t;
  t.fairness = fairness;
  t.predictions = phy::predict(inputs, fairness);
  t.inputs = std::move(inputs);
  return t;
}

inline void
write_model(std::ostream& out, const ModelTable& t, Format f)
{
  switch (f)
  {
  case Format::json: {
    json rows = json::array();
    for (std::size_t i = 0; i < t.inputs.size(); ++i)
      rows.push_back({
        {"packets_per_aggregate", t.inputs[i].packets_per_aggregate},
        {"packet_bytes", t.inputs[i].packet_bytes},
        {"phy_rate_bps", t.inputs[i].phy_rate_bps},
        {"airtime_share", t.predictions[i].airtime_share},
        {"base_rate_bps", t.predictions[i].base_rate_bps},
        {"effective_rate_bps", t.predictions[i].effective_rate_bps},
      });
    json doc{{"schema_version", kSchemaVersion},
             {"fairness", t.fairness},
             {"stations", rows},
             {"total_effective_rate_bps", t.total_effective_rate_bps()}};
    out << doc.dump(2) << "\n";
    break;
  }
  case Format::csv:
    out << "schema_version,station,packets_per_aggregate,packet_bytes,phy_rate_bps,fairness,airtime_share,"
           "base_rate_bps,effective_rate_bps\n";
    for (std::size_t i = 0; i < t.inputs.size(); ++i)
      out << kSchemaVersion << ',' << i << ',' << csv_num(t.inputs[i].packets_per_aggregate) << ','
          << csv_num(t.inputs[i].packet_bytes) << ',' << csv_num(t.inputs[i].phy_rate_bps) << ','
          << (t.fairness ? 1 : 0) << ',' << csv_num(t.predictions[i].airtime_share) << ','
          << csv_num(t.predictions[i].base_rate_bps) << ',' << csv_num(t.predictions[i].effective_rate_bps) << "\n";
    break;
  case Format::human:
    out << "airtime fairness: " << (t.fairness ? "on" : "off") << "\n";
    out << std::setw(10) << "aggr" << std::setw(8) << "T(i)" << std::setw(10) << "PHY" << std::setw(10) << "Base"
        << std::setw(10) << "R(i)" << "   (rates in Mbps)\n";
    for (std::size_t i = 0; i < t.inputs.size(); ++i)
      out << std::setw(10) << fixed(t.inputs[i].packets_per_aggregate, 2) << std::setw(7)
          << fixed(t.predictions[i].airtime_share * 100, 0) << "%" << std::setw(10)
          << fixed(t.inputs[i].phy_rate_bps / 1e6, 1) << std::setw(10)
          << fixed(t.predictions[i].base_rate_bps / 1e6, 1) << std::setw(10)
          << fixed(t.predictions[i].effective_rate_bps / 1e6, 1) << "\n";
    out << "total" << std::setw(43) << fixed(t.total_effective_rate_bps() / 1e6, 1) << "\n";
    break;
  }
}

} // namespace airtime::report
