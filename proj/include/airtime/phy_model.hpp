#pragma once

// Analytical 802.11n A-MPDU throughput and airtime model.
//
// All durations are in microseconds, all rates in bits per second and all
// lengths in bytes. Packet counts may be fractional so that measured mean
// aggregation levels can be fed straight back into the model.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace airtime::phy {

struct PhyConstants
{
  double delimiter_bytes = 4;   // MPDU delimiter
  double mac_header_bytes = 34; // MAC header
  double fcs_bytes = 4;         // frame check sequence
  double phy_header_us = 32;
  double difs_us = 34;
  double sifs_us = 16;
  double backoff_us = 68; // slot time * CWmin / 2, collapsed into one value
  double block_ack_bytes = 58;
};

inline constexpr PhyConstants kDefaultConstants{};

struct StationModelInput
{
  double packets_per_aggregate; // n_i
  double packet_bytes;          // l_i
  double phy_rate_bps;          // r_i
};

struct ModelPrediction
{
  double airtime_share;      // T(i)
  double base_rate_bps;      // rate with the medium to itself
  double effective_rate_bps; // airtime_share * base_rate_bps
};

namespace detail {

inline void
require_positive(double v, const char* what)
{
  if (!(v > 0) || !std::isfinite(v))
    throw std::domain_error(std::string(what) + " must be positive and finite");
}

} // namespace detail

/// On-air size of one MPDU carrying an `l`-byte packet, padded to 4 bytes.
inline double
mpdu_length(double l, const PhyConstants& c = kDefaultConstants)
{
  detail::require_positive(l, "packet length");
  const double raw = l + c.delimiter_bytes + c.mac_header_bytes + c.fcs_bytes;
  const double rem = std::fmod(raw, 4.0);
  return rem == 0 ? raw : raw + (4.0 - rem);
}

/// A-MPDU length for `n` packets of `l` bytes each.
inline double
ampdu_length(double n, double l, const PhyConstants& c = kDefaultConstants)
{
  detail::require_positive(n, "packet count");
  return n * mpdu_length(l, c);
}

/// A-MPDU length for a concrete list of packet sizes.
inline double
ampdu_length(std::span<const std::uint32_t> lengths, const PhyConstants& c = kDefaultConstants)
{
  if (lengths.empty())
    throw std::domain_error("aggregate must contain at least one packet");
  double total = 0;
  for (auto l : lengths)
    total += mpdu_length(l, c);
  return total;
}

/// PHY header plus serialisation time of `ampdu_bytes` at rate `r`.
inline double
t_data_for_bytes(double ampdu_bytes, double r, const PhyConstants& c = kDefaultConstants)
{
  detail::require_positive(r, "PHY rate");
  return c.phy_header_us + 8.0 * ampdu_bytes / r * 1e6;
}

inline double
t_data(double n, double l, double r, const PhyConstants& c = kDefaultConstants)
{
  detail::require_positive(r, "PHY rate");
  return t_data_for_bytes(ampdu_length(n, l, c), r, c);
}

/// Per-transmission overhead: DIFS + SIFS + block ack + mean backoff.
/// The block ack is sent at the station's own rate.
inline double
t_overhead(double r, const PhyConstants& c = kDefaultConstants)
{
  detail::require_positive(r, "PHY rate");
  const double ack_us = c.sifs_us + 8.0 * c.block_ack_bytes / r * 1e6;
  return c.difs_us + c.sifs_us + ack_us + c.backoff_us;
}

/// Expected rate to a station that has the medium to itself, in bits/s.
inline double
base_rate(double n, double l, double r, const PhyConstants& c = kDefaultConstants)
{
  const double total_us = t_data(n, l, r, c) + t_overhead(r, c);
  return 8.0 * n * l / (total_us * 1e-6);
}

/// Airtime share and effective rate of every station.
///
/// With fairness each station gets 1/|I| of the airtime; without it, each
/// station's share is proportional to the duration of one of its
/// transmissions.
inline std::vector<ModelPrediction>
predict(std::span<const StationModelInput> stations,
        bool fairness,
        const PhyConstants& c = kDefaultConstants)
{
  if (stations.empty())
    throw std::domain_error("prediction needs at least one station");

  std::vector<double> data_us;
  data_us.reserve(stations.size());
  double total_data_us = 0;
  for (const auto& s : stations)
  {
    detail::require_positive(s.packets_per_aggregate, "packet count");
    detail::require_positive(s.packet_bytes, "packet length");
    detail::require_positive(s.phy_rate_bps, "PHY rate");
    data_us.push_back(t_data(s.packets_per_aggregate, s.packet_bytes, s.phy_rate_bps, c));
    total_data_us += data_us.back();
  }

  std::vector<ModelPrediction> out;
  out.reserve(stations.size());
  const double equal_share = 1.0 / static_cast<double>(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i)
  {
    const auto& s = stations[i];
    ModelPrediction p{};
    p.airtime_share = fairness ? equal_share : data_us[i] / total_data_us;
    p.base_rate_bps = base_rate(s.packets_per_aggregate, s.packet_bytes, s.phy_rate_bps, c);
    p.effective_rate_bps = p.airtime_share * p.base_rate_bps;
    out.push_back(p);
  }
  return out;
}

} // namespace airtime::phy
