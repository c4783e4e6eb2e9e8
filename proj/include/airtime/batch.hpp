#pragma once

// Seeded repetitions of one scenario, run concurrently. Results come back in
// seed order whatever order the runs finish in.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "airtime/simulator.hpp"

namespace airtime::batch {

inline std::string
trace_path_for(const std::string& base, std::uint64_t seed, std::size_t reps)
{
  return reps == 1 ? base : base + "." + std::to_string(seed);
}

/// Runs seeds seed, seed+1, ..., seed+reps-1. An empty `trace_base` means no
/// trace.
inline std::vector<sim::MetricsReport>
run_repetitions(const Scenario& base, std::size_t reps, const std::string& trace_base = {}, unsigned max_threads = 0)
{
  if (reps == 0)
    throw Error(ErrorCategory::usage, "repetitions must be at least 1");
  validate(base);
  if (max_threads == 0)
    max_threads = std::max(1u, std::thread::hardware_concurrency());

  auto one = [&](std::size_t k) {
    Scenario sc = base;
    sc.seed = base.seed + k;
    if (trace_base.empty())
      return sim::run(sc);
    const auto path = trace_path_for(trace_base, sc.seed, reps);
    std::ofstream tr(path);
    if (!tr)
      throw Error(ErrorCategory::io, "cannot write trace file '" + path + "'");
    return sim::run(sc, &tr);
  };

  std::vector<sim::MetricsReport> out(reps);
  for (std::size_t first = 0; first < reps; first += max_threads)
  {
    const std::size_t last = std::min(reps, first + max_threads);
    std::vector<std::future<sim::MetricsReport>> pending;
    for (std::size_t k = first; k < last; ++k)
      pending.push_back(std::async(std::launch::async, one, k));
    for (std::size_t k = first; k < last; ++k)
      out[k] = pending[k - first].get();
  }
  return out;
}

} // namespace airtime::batch
