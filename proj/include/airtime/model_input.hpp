#pragma once

// Station lists for the model calculator: "n,l,r_mbps" per station, either
// from the command line or one per line in a file ('#' starts a comment).

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "airtime/error.hpp"
#include "airtime/phy_model.hpp"

namespace airtime::model_input {

namespace detail {

inline std::string_view
trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline const char* kFieldNames[] = {"packets_per_aggregate", "packet_bytes", "phy_rate_mbps"};

} // namespace detail

/// Parses one "n,l,r_mbps" triple. `where` prefixes error messages.
inline phy::StationModelInput
parse_station(std::string_view text, const std::string& where)
{
  double v[3];
  std::size_t field = 0;
  std::size_t pos = 0;
  for (;;)
  {
    const auto comma = text.find(',', pos);
    const auto tok = detail::trim(text.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    if (field >= 3)
      throw Error(ErrorCategory::usage, where + ": expected 3 fields (n,l,r_mbps), got more");
    double x = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw Error(ErrorCategory::usage,
                  where + ", field " + std::to_string(field + 1) + " (" + detail::kFieldNames[field] +
                    "): not a number: '" + std::string(tok) + "'");
    if (!(x > 0) || !std::isfinite(x))
      throw Error(ErrorCategory::usage,
                  where + ", field " + std::to_string(field + 1) + " (" + detail::kFieldNames[field] +
                    "): must be positive");
    v[field++] = x;
    if (comma == std::string_view::npos)
      break;
    pos = comma + 1;
  }
  if (field != 3)
    throw Error(ErrorCategory::usage, where + ": expected 3 fields (n,l,r_mbps), got " + std::to_string(field));
  return {v[0], v[1], v[2] * 1e6};
}

inline std::vector<phy::StationModelInput>
parse_stream(std::istream& in, const std::string& source)
{
  std::vector<phy::StationModelInput> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no)
  {
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty())
      continue;
    out.push_back(parse_station(s, source + ": line " + std::to_string(no)));
  }
  return out;
}

} // namespace airtime::model_input
