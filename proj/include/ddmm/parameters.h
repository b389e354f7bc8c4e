/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_PARAMETERS_H
#define DDMM_PARAMETERS_H

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddmm {

/**
 * Raised when a scenario line cannot be parsed. Carries the 1-based line
 * number of the offending line.
 */
class ParseError : public std::runtime_error
{
public:
  ParseError (int line, const std::string &what);
  int Line () const { return m_line; }

private:
  int m_line;
};

/**
 * Raised when a parameter set violates an invariant. Names the field.
 */
class ValidationError : public std::runtime_error
{
public:
  ValidationError (std::string field, const std::string &what);
  const std::string &Field () const { return m_field; }

private:
  std::string m_field;
};

/**
 * Complete parameter set of the mobility/handover model. All values are SI:
 * metres, seconds, bytes, bit/s, dBm.
 *
 * Optional fields are derived when unset (see DeriveTopologyCounts and
 * EffectiveHopsMzMz); pinning them overrides the derivation.
 */
struct SystemParameters
{
  // Road network and mix-zone geometry.
  double area_x = 36000.0;
  double area_y = 24000.0;
  double road_spacing_x = 200.0;
  double road_spacing_y = 200.0;
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<int> zones_per_row;
  std::optional<int> zones_per_col;
  double overlap_x = 100.0;
  double overlap_y = 100.0;
  double mix_zone_radius = 1000.0;

  // Mobility.
  double max_pause = 25.0;
  double mean_speed = 25.0;
  double foreign_prefix_decay_rate = 1.0 / 240.0;

  // Links and nodes.
  double control_packet_size = 80.0;
  double data_packet_size = 400.0;
  double wired_bandwidth = 100e6;
  double wireless_bandwidth = 10e6;
  double wired_prop_delay = 0.5e-3;
  double wireless_prop_delay = 2e-3;
  double wireless_fail_prob = 0.5;
  double proc_time_lbs = 0.020;
  double proc_time_mz = 0.010;
  int hops_mu_mz = 1;
  int hops_lbs_mz = 10;
  std::optional<int> hops_mz_mz;
  double network_scale = 0.5;

  // Handover timeline.
  double l2_latency = 0.330;
  double auth_latency = 0.100;
  double scan_time = 0.300;
  double phi = 0.035;

  // Traffic.
  double buffer_size = 500e3;
  double session_packet_rate = 50.0;

  // Radio.
  double rss_ref_power = -60.0;
  double rss_ref_distance = 100.0;
  double path_loss_exponent = 3.5;
  double rss_handover_threshold = -85.0;
  double rss_min = -95.0;

  int g_prefixes_per_handover = 1;

  /// h_{MZ-MZ}: pinned value, else round(network_scale * hops_lbs_mz).
  int EffectiveHopsMzMz () const;

  bool operator== (const SystemParameters &) const = default;
};

/// Default values.
SystemParameters Defaults ();

/// Throws ValidationError naming the first violated field.
void Validate (const SystemParameters &p);

struct TopologyCounts
{
  int zones_per_row;  // zones spanning area_x
  int zones_per_col;  // zones spanning area_y
  double road_count_x; // N_x = X/S_x + 1
  double road_count_y; // N_y = Y/S_y + 1
  double k1;
  double k2;
  /// True when a pinned K differs from 2r/S.
  bool k_conflict = false;
};

/**
 * Road and zone counts. Zone pitch is 2r - l along each axis; counts are
 * ceil(area / pitch), at least 1. K1, K2 default to 2r/S_x, 2r/S_y.
 * Throws ValidationError when the pitch is not positive.
 */
TopologyCounts DeriveTopologyCounts (const SystemParameters &p);

/// Parses the line-oriented `key = value[unit]` scenario format on top of
/// Defaults(). Throws ParseError or ValidationError.
SystemParameters ParseScenario (std::string_view text);

/// Renders every field in canonical form; ParseScenario inverts it exactly.
std::string RenderScenario (const SystemParameters &p);

/// Sets one field from a canonical key or alias with an SI value (used by
/// sweeps). Throws ValidationError for an unknown key.
void SetParameter (SystemParameters &p, std::string_view key, double value);

/// Reads a field by key or alias (SI units).
double GetParameter (const SystemParameters &p, std::string_view key);

/// Canonical name for a key or alias; throws ValidationError if unknown.
std::string CanonicalKey (std::string_view key);

/// Canonical keys in declaration order.
const std::vector<std::string> &ParameterKeys ();

} // namespace ddmm

#endif // DDMM_PARAMETERS_H
