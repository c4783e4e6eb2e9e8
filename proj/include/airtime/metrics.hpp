#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace airtime::metrics {

/// Jain's fairness index, (sum x)^2 / (n * sum x^2).
inline double
jain_index(std::span<const double> values)
{
  if (values.empty())
    throw std::domain_error("Jain's index needs at least one value");
  double sum = 0;
  double sum_sq = 0;
  for (double v : values)
  {
    if (v < 0 || !std::isfinite(v))
      throw std::domain_error("Jain's index needs non-negative finite values");
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0)
    throw std::domain_error("Jain's index is undefined when every value is zero");
  return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

/// Linear-interpolated percentile, p in [0, 100]. Empty input gives NaN.
inline double
percentile(std::vector<double> values, double p)
{
  if (values.empty())
    return std::nan("");
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

inline double
median(std::vector<double> values)
{
  return percentile(std::move(values), 50);
}

} // namespace airtime::metrics
