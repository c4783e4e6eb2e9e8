// airtime-sim: model calculator, simulation runs, model/sim comparison and
// parameter sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "airtime/batch.hpp"
#include "airtime/compare.hpp"
#include "airtime/model_input.hpp"
#include "airtime/report.hpp"

namespace {

using namespace airtime;
using nlohmann::json;

struct RunOptions
{
  std::string scenario;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::size_t reps = 1;
  std::string format = "json";
  std::string out;
  std::string trace;
};

void
add_run_options(CLI::App* app, RunOptions& o, bool with_trace)
{
  app->add_option("--scenario", o.scenario, "scenario file (JSON)")->required();
  app->add_option("--scheme", o.scheme, "override the scenario's scheme");
  app->add_option("--seed", o.seed, "override the scenario's seed");
  app->add_option("--duration", o.duration, "override the simulated duration (s)");
  app->add_option("--reps", o.reps, "repetitions (seeds seed..seed+reps-1)");
  app->add_option("--format", o.format, "json, csv or human");
  app->add_option("--out", o.out, "output file (default stdout)");
  if (with_trace)
    app->add_option("--trace", o.trace, "per-packet trace file; '.<seed>' is appended when reps > 1");
}

Scenario
load_with_overrides(const RunOptions& o)
{
  Scenario sc = load_scenario_file(o.scenario);
  if (!o.scheme.empty())
    sc.scheme = parse_scheme(o.scheme);
  if (o.seed)
    sc.seed = *o.seed;
  if (o.duration)
    sc.duration = *o.duration;
  validate(sc);
  if (o.reps < 1)
    throw Error(ErrorCategory::usage, "--reps must be at least 1");
  return sc;
}

// Writes to --out when given, stdout otherwise.
template <typename Fn>
void
emit(const std::string& path, Fn&& fn)
{
  if (path.empty())
  {
    fn(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw Error(ErrorCategory::io, "cannot write '" + path + "'");
  fn(f);
  if (!f)
    throw Error(ErrorCategory::io, "write failed for '" + path + "'");
}

int
cmd_model(const std::vector<std::string>& stations,
          const std::string& input,
          bool fairness,
          const std::string& format,
          const std::string& out)
{
  const auto fmt = report::parse_format(format);
  std::vector<phy::StationModelInput> inputs;
  for (std::size_t i = 0; i < stations.size(); ++i)
    inputs.push_back(model_input::parse_station(stations[i], "--station #" + std::to_string(i + 1)));
  if (!input.empty())
  {
    std::ifstream in(input);
    if (!in)
      throw Error(ErrorCategory::io, "cannot open model input '" + input + "'");
    auto more = model_input::parse_stream(in, input);
    inputs.insert(inputs.end(), more.begin(), more.end());
  }
  if (inputs.empty())
    throw Error(ErrorCategory::usage, "no stations given (use --station n,l,r_mbps or --input FILE)");
  const auto table = report::model_table(std::move(inputs), fairness);
  emit(out, [&](std::ostream& os) { report::write_model(os, table, fmt); });
  return 0;
}

int
cmd_sim(const RunOptions& o)
{
  const auto fmt = report::parse_format(o.format);
  const Scenario sc = load_with_overrides(o);
  const auto runs = batch::run_repetitions(sc, o.reps, o.trace);
  emit(o.out, [&](std::ostream& os) { report::write_sim(os, runs, fmt); });
  return 0;
}

int
cmd_compare(const RunOptions& o)
{
  const auto fmt = report::parse_format(o.format);
  const Scenario sc = load_with_overrides(o);
  const auto runs = batch::run_repetitions(sc, o.reps);
  const auto cmp = compare::compare_runs(sc, runs);
  for (const auto& w : cmp.warnings)
    std::cerr << "warning: " << w << "\n";
  emit(o.out, [&](std::ostream& os) { compare::write(os, cmp, fmt); });
  return 0;
}

std::string
value_text(const json& v)
{
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string
file_safe(std::string s)
{
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.')
      c = '_';
  return s;
}

int
cmd_sweep(RunOptions o, const std::string& param, const std::vector<std::string>& values, const std::string& dir)
{
  const auto fmt = report::parse_format(o.format);
  if (values.empty())
    throw Error(ErrorCategory::usage, "--values needs at least one value");
  const Scenario base = load_with_overrides(o);
  json doc = to_json(base);

  json::json_pointer ptr;
  try
  {
    ptr = json::json_pointer(param);
  }
  catch (const json::exception&)
  {
    throw Error(ErrorCategory::usage, "--param is not a JSON pointer: " + param);
  }
  if (!doc.contains(ptr))
    throw Error(ErrorCategory::usage, "--param " + param + " does not name a scenario field");

  std::filesystem::create_directories(dir);
  json points = json::array();
  std::vector<std::vector<sim::MetricsReport>> all;
  std::vector<std::string> files;
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    json v;
    try
    {
      v = json::parse(values[i]);
    }
    catch (const json::parse_error&)
    {
      v = values[i]; // bare word, e.g. a scheme name
    }
    json point = doc;
    point[ptr] = v;
    point["name"] = base.name + "_" + std::to_string(i);
    const Scenario sc = scenario_from_json(point);

    const std::string path = (std::filesystem::path(dir) / (file_safe(sc.name) + ".json")).string();
    {
      std::ofstream f(path);
      if (!f)
        throw Error(ErrorCategory::io, "cannot write '" + path + "'");
      f << dump_scenario(sc);
    }
    if (load_scenario_file(path) != sc)
      throw Error(ErrorCategory::internal, "sweep file '" + path + "' does not reload identically");

    all.push_back(batch::run_repetitions(sc, o.reps));
    files.push_back(path);
    points.push_back({{"value", v},
                      {"scenario_file", path},
                      {"runs", report::sim_document(all.back())["runs"]},
                      {"summary", report::to_json(report::summarise(all.back()))}});
  }

  emit(o.out, [&](std::ostream& os) {
    switch (fmt)
    {
    case report::Format::json:
      os << json{{"schema_version", kSchemaVersion}, {"param", param}, {"points", points}}.dump(2) << "\n";
      break;
    case report::Format::csv:
      os << "schema_version,param,value,scenario_file,repetitions,jain_index,total_throughput_bps\n";
      for (std::size_t i = 0; i < all.size(); ++i)
      {
        const auto s = report::summarise(all[i]);
        os << kSchemaVersion << ',' << report::csv_field(param) << ','
           << report::csv_field(value_text(points[i]["value"])) << ',' << report::csv_field(files[i]) << ','
           << s.repetitions << ',' << report::csv_num(s.jain_index) << ','
           << report::csv_num(s.total_throughput_bps) << "\n";
      }
      break;
    case report::Format::human:
      for (std::size_t i = 0; i < all.size(); ++i)
      {
        os << param << " = " << value_text(points[i]["value"]) << "  (" << files[i] << ")\n";
        report::write_human(os, all[i]);
      }
      break;
    }
  });
  return 0;
}

int
fail(ErrorCategory c, const std::string& msg)
{
  std::cerr << "error[" << to_string(c) << "]: " << msg << "\n";
  return exit_code(c);
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"802.11n airtime fairness and queueing simulator"};
  app.require_subcommand(1);

  std::vector<std::string> model_stations;
  std::string model_input_path;
  bool fairness = true;
  std::string model_format = "human";
  std::string model_out;
  auto* model = app.add_subcommand("model", "analytical throughput and airtime model");
  model->add_option("--station", model_stations, "n,l,r_mbps (repeatable)");
  model->add_option("--input", model_input_path, "file with one n,l,r_mbps per line");
  model->add_flag("--fairness,!--no-fairness", fairness, "equal airtime shares (default on)");
  model->add_option("--format", model_format, "json, csv or human");
  model->add_option("--out", model_out, "output file (default stdout)");

  RunOptions sim_opts;
  auto* sim = app.add_subcommand("sim", "run a scenario");
  add_run_options(sim, sim_opts, true);

  RunOptions cmp_opts;
  cmp_opts.format = "human";
  auto* cmp = app.add_subcommand("compare", "model prediction vs simulation");
  add_run_options(cmp, cmp_opts, false);

  RunOptions sweep_opts;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  std::string sweep_dir = "sweep";
  auto* sweep = app.add_subcommand("sweep", "run a scenario over a list of parameter values");
  add_run_options(sweep, sweep_opts, false);
  sweep->add_option("--param", sweep_param, "JSON pointer into the scenario, e.g. /config/airtime_quantum_us")
    ->required();
  sweep->add_option("--values", sweep_values, "values to substitute")->delimiter(',')->required();
  sweep->add_option("--dir", sweep_dir, "directory for the generated scenario files");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::Success& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    return fail(ErrorCategory::usage, e.what());
  }

  try
  {
    if (*model)
      return cmd_model(model_stations, model_input_path, fairness, model_format, model_out);
    if (*sim)
      return cmd_sim(sim_opts);
    if (*cmp)
      return cmd_compare(cmp_opts);
    if (*sweep)
      return cmd_sweep(sweep_opts, sweep_param, sweep_values, sweep_dir);
  }
  catch (const Error& e)
  {
    return fail(e.category(), e.what());
  }
  catch (const std::domain_error& e)
  {
    return fail(ErrorCategory::validation, e.what());
  }
  catch (const std::filesystem::filesystem_error& e)
  {
    return fail(ErrorCategory::io, e.what());
  }
  catch (const std::exception& e)
  {
    return fail(ErrorCategory::internal, e.what());
  }
  return fail(ErrorCategory::usage, "no subcommand");
}
