#pragma once

// Model vs simulation: measured aggregation sizes go back into the analytical
// model and the predicted rates are set against the simulated ones.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "airtime/report.hpp"

namespace airtime::compare {

struct Row
{
  std::string name;
  bool modelled = false; // false when the station sent no downlink aggregates
  phy::StationModelInput input{};
  double model_share = std::nan("");
  double model_rate_bps = std::nan("");
  double sim_share = 0;
  double sim_rate_bps = 0;
  double rate_deviation_pct = std::nan("");
  double share_deviation_pct = std::nan("");
};

struct Comparison
{
  std::string scenario;
  Scheme scheme = Scheme::fifo;
  bool fairness = false;
  std::size_t repetitions = 0;
  std::vector<Row> rows;
  std::vector<std::string> warnings;

  double max_rate_deviation_pct() const
  {
    double m = 0;
    for (const auto& r : rows)
      if (r.modelled)
        m = std::max(m, std::abs(r.rate_deviation_pct));
    return m;
  }
};

inline double
deviation_pct(double measured, double predicted)
{
  return predicted != 0 ? (measured - predicted) / predicted * 100.0 : std::nan("");
}

/// Warnings for scenarios the model does not describe: anything other than
/// every station carrying saturating downlink traffic.
inline std::vector<std::string>
saturation_warnings(const Scenario& sc)
{
  std::vector<std::string> w;
  for (const auto& st : sc.stations)
  {
    bool down_bulk = false;
    for (const auto& f : st.flows)
    {
      if (f.direction == FlowDirection::up)
        w.push_back("station " + st.name + " has uplink traffic; the model covers downlink only");
      if (f.kind != FlowKind::ping && f.direction == FlowDirection::down)
        down_bulk = true;
    }
    if (!down_bulk)
      w.push_back("station " + st.name + " has no saturating downlink flow");
  }
  return w;
}

/// Compare the median of `runs` against the model. Rates are downlink only.
inline Comparison
compare_runs(const Scenario& sc, const std::vector<sim::MetricsReport>& runs)
{
  if (runs.empty())
    throw Error(ErrorCategory::internal, "comparison needs at least one run");
  Comparison c;
  c.scenario = sc.name;
  c.scheme = sc.scheme;
  c.fairness = sc.scheme == Scheme::airtime_fair_fq;
  c.repetitions = runs.size();
  c.warnings = saturation_warnings(sc);

  const std::size_t n = runs.front().stations.size();
  std::vector<phy::StationModelInput> inputs;
  std::vector<std::size_t> modelled;
  for (std::size_t i = 0; i < n; ++i)
  {
    std::vector<double> agg, bytes, share, down;
    for (const auto& r : runs)
    {
      const auto& s = r.stations[i];
      if (s.aggregates > 0)
      {
        agg.push_back(s.mean_aggregation);
        bytes.push_back(s.mean_packet_bytes);
      }
      share.push_back(s.airtime_share);
      down.push_back(s.down_bps);
    }
    Row row;
    row.name = runs.front().stations[i].name;
    row.sim_share = report::median_finite(share);
    row.sim_rate_bps = report::median_finite(down);
    if (!agg.empty())
    {
      row.modelled = true;
      row.input = {report::median_finite(agg), report::median_finite(bytes), runs.front().stations[i].phy_rate_bps};
      inputs.push_back(row.input);
      modelled.push_back(i);
    }
    else
    {
      c.warnings.push_back("station " + row.name + " sent no downlink aggregates; left out of the model");
    }
    c.rows.push_back(row);
  }

  if (!inputs.empty())
  {
    const auto pred = phy::predict(inputs, c.fairness);
    for (std::size_t k = 0; k < modelled.size(); ++k)
    {
      Row& row = c.rows[modelled[k]];
      row.model_share = pred[k].airtime_share;
      row.model_rate_bps = pred[k].effective_rate_bps;
      row.rate_deviation_pct = deviation_pct(row.sim_rate_bps, row.model_rate_bps);
      row.share_deviation_pct = deviation_pct(row.sim_share, row.model_share);
    }
  }
  return c;
}

inline nlohmann::json
to_json(const Comparison& c)
{
  using report::num;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows)
    rows.push_back({
      {"name", r.name},
      {"modelled", r.modelled},
      {"packets_per_aggregate", num(r.modelled ? r.input.packets_per_aggregate : std::nan(""))},
      {"packet_bytes", num(r.modelled ? r.input.packet_bytes : std::nan(""))},
      {"phy_rate_bps", num(r.modelled ? r.input.phy_rate_bps : std::nan(""))},
      {"model_airtime_share", num(r.model_share)},
      {"sim_airtime_share", num(r.sim_share)},
      {"model_rate_bps", num(r.model_rate_bps)},
      {"sim_rate_bps", num(r.sim_rate_bps)},
      {"rate_deviation_pct", num(r.rate_deviation_pct)},
      {"share_deviation_pct", num(r.share_deviation_pct)},
    });
  return {
    {"schema_version", kSchemaVersion},
    {"scenario", c.scenario},
    {"scheme", to_string(c.scheme)},
    {"fairness", c.fairness},
    {"repetitions", c.repetitions},
    {"statistic", "median"},
    {"max_rate_deviation_pct", c.max_rate_deviation_pct()},
    {"warnings", c.warnings},
    {"stations", rows},
  };
}

inline void
write(std::ostream& out, const Comparison& c, report::Format f)
{
  using report::csv_num;
  using report::fixed;
  switch (f)
  {
  case report::Format::json:
    out << to_json(c).dump(2) << "\n";
    break;
  case report::Format::csv:
    out << "schema_version,scenario,scheme,fairness,station,name,modelled,packets_per_aggregate,packet_bytes,"
           "phy_rate_bps,model_airtime_share,sim_airtime_share,model_rate_bps,sim_rate_bps,rate_deviation_pct,"
           "share_deviation_pct\n";
    for (std::size_t i = 0; i < c.rows.size(); ++i)
    {
      const auto& r = c.rows[i];
      out << kSchemaVersion << ',' << report::csv_field(c.scenario) << ',' << to_string(c.scheme) << ','
          << (c.fairness ? 1 : 0) << ',' << i << ',' << report::csv_field(r.name) << ',' << (r.modelled ? 1 : 0)
          << ',' << (r.modelled ? csv_num(r.input.packets_per_aggregate) : "") << ','
          << (r.modelled ? csv_num(r.input.packet_bytes) : "") << ','
          << (r.modelled ? csv_num(r.input.phy_rate_bps) : "") << ',' << csv_num(r.model_share) << ','
          << csv_num(r.sim_share) << ',' << csv_num(r.model_rate_bps) << ',' << csv_num(r.sim_rate_bps) << ','
          << csv_num(r.rate_deviation_pct) << ',' << csv_num(r.share_deviation_pct) << "\n";
    }
    break;
  case report::Format::human:
    out << "scenario " << c.scenario << "  scheme " << to_string(c.scheme) << "  fairness "
        << (c.fairness ? "on" : "off") << "  (median of " << c.repetitions << ")\n";
    out << std::left << std::setw(12) << "station" << std::right << std::setw(8) << "aggr" << std::setw(10)
        << "T model" << std::setw(10) << "T sim" << std::setw(11) << "R model" << std::setw(11) << "R sim"
        << std::setw(9) << "dev" << "\n";
    for (const auto& r : c.rows)
      out << std::left << std::setw(12) << r.name << std::right << std::setw(8)
          << (r.modelled ? fixed(r.input.packets_per_aggregate, 2) : "-") << std::setw(9)
          << fixed(r.model_share * 100, 1) << "%" << std::setw(9) << fixed(r.sim_share * 100, 1) << "%"
          << std::setw(11) << fixed(r.model_rate_bps / 1e6, 2) << std::setw(11) << fixed(r.sim_rate_bps / 1e6, 2)
          << std::setw(8) << fixed(r.rate_deviation_pct, 2) << "%\n";
    for (const auto& w : c.warnings)
      out << "warning: " << w << "\n";
    break;
  }
}

} // namespace airtime::compare
