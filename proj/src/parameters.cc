/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/parameters.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace ddmm {

ParseError::ParseError (int line, const std::string &what)
  : std::runtime_error ("line " + std::to_string (line) + ": " + what),
    m_line (line)
{
}

ValidationError::ValidationError (std::string field, const std::string &what)
  : std::runtime_error (field + ": " + what),
    m_field (std::move (field))
{
}

namespace {

enum class Dim
{
  Length,
  Time,
  Speed,
  Size,
  Bitrate,
  Rate,
  Power,
  Plain,
  Integer
};

/// Accessors for one scenario key. Optional fields read as NaN when unset.
struct FieldInfo
{
  std::string key;
  Dim dim;
  std::function<double (const SystemParameters &)> get;
  std::function<void (SystemParameters &, double)> set;
  bool optional = false;
};

template <typename T>
FieldInfo
Plain (const char *key, Dim dim, T SystemParameters::*m)
{
  return {key, dim,
          [m] (const SystemParameters &p) { return static_cast<double> (p.*m); },
          [m] (SystemParameters &p, double v) { p.*m = static_cast<T> (v); }};
}

template <typename T>
FieldInfo
Opt (const char *key, Dim dim, std::optional<T> SystemParameters::*m)
{
  return {key, dim,
          [m] (const SystemParameters &p) {
            return (p.*m) ? static_cast<double> (*(p.*m)) : std::nan ("");
          },
          [m] (SystemParameters &p, double v) { p.*m = static_cast<T> (v); },
          true};
}

const std::vector<FieldInfo> &
Fields ()
{
  using P = SystemParameters;
  static const std::vector<FieldInfo> fields = {
    Plain ("area_x", Dim::Length, &P::area_x),
    Plain ("area_y", Dim::Length, &P::area_y),
    Plain ("road_spacing_x", Dim::Length, &P::road_spacing_x),
    Plain ("road_spacing_y", Dim::Length, &P::road_spacing_y),
    Opt ("k1", Dim::Plain, &P::k1),
    Opt ("k2", Dim::Plain, &P::k2),
    Opt ("zones_per_row", Dim::Integer, &P::zones_per_row),
    Opt ("zones_per_col", Dim::Integer, &P::zones_per_col),
    Plain ("overlap_x", Dim::Length, &P::overlap_x),
    Plain ("overlap_y", Dim::Length, &P::overlap_y),
    Plain ("mix_zone_radius", Dim::Length, &P::mix_zone_radius),
    Plain ("max_pause", Dim::Time, &P::max_pause),
    Plain ("mean_speed", Dim::Speed, &P::mean_speed),
    Plain ("foreign_prefix_decay_rate", Dim::Rate, &P::foreign_prefix_decay_rate),
    Plain ("control_packet_size", Dim::Size, &P::control_packet_size),
    Plain ("data_packet_size", Dim::Size, &P::data_packet_size),
    Plain ("wired_bandwidth", Dim::Bitrate, &P::wired_bandwidth),
    Plain ("wireless_bandwidth", Dim::Bitrate, &P::wireless_bandwidth),
    Plain ("wired_prop_delay", Dim::Time, &P::wired_prop_delay),
    Plain ("wireless_prop_delay", Dim::Time, &P::wireless_prop_delay),
    Plain ("wireless_fail_prob", Dim::Plain, &P::wireless_fail_prob),
    Plain ("proc_time_lbs", Dim::Time, &P::proc_time_lbs),
    Plain ("proc_time_mz", Dim::Time, &P::proc_time_mz),
    Plain ("hops_mu_mz", Dim::Integer, &P::hops_mu_mz),
    Plain ("hops_lbs_mz", Dim::Integer, &P::hops_lbs_mz),
    Opt ("hops_mz_mz", Dim::Integer, &P::hops_mz_mz),
    Plain ("network_scale", Dim::Plain, &P::network_scale),
    Plain ("l2_latency", Dim::Time, &P::l2_latency),
    Plain ("auth_latency", Dim::Time, &P::auth_latency),
    Plain ("scan_time", Dim::Time, &P::scan_time),
    Plain ("phi", Dim::Time, &P::phi),
    Plain ("buffer_size", Dim::Size, &P::buffer_size),
    Plain ("session_packet_rate", Dim::Rate, &P::session_packet_rate),
    Plain ("rss_ref_power", Dim::Power, &P::rss_ref_power),
    Plain ("rss_ref_distance", Dim::Length, &P::rss_ref_distance),
    Plain ("path_loss_exponent", Dim::Plain, &P::path_loss_exponent),
    Plain ("rss_handover_threshold", Dim::Power, &P::rss_handover_threshold),
    Plain ("rss_min", Dim::Power, &P::rss_min),
    Plain ("g_prefixes_per_handover", Dim::Integer, &P::g_prefixes_per_handover),
    // Mean foreign-prefix lifetime, stored as its reciprocal rate.
    {"foreign_prefix_lifetime", Dim::Time,
     [] (const P &p) { return 1.0 / p.foreign_prefix_decay_rate; },
     [] (P &p, double v) { p.foreign_prefix_decay_rate = 1.0 / v; }},
  };
  return fields;
}

const std::vector<std::pair<std::string, std::string>> &
Aliases ()
{
  static const std::vector<std::pair<std::string, std::string>> aliases = {
    {"x", "area_x"},
    {"y", "area_y"},
    {"s_x", "road_spacing_x"},
    {"s_y", "road_spacing_y"},
    {"n", "zones_per_row"},
    {"m", "zones_per_col"},
    {"l_x", "overlap_x"},
    {"l_y", "overlap_y"},
    {"r", "mix_zone_radius"},
    {"u_max", "max_pause"},
    {"v_mean", "mean_speed"},
    {"v", "mean_speed"},
    {"lambda_pr_f", "foreign_prefix_decay_rate"},
    {"prefix_lifetime", "foreign_prefix_lifetime"},
    {"l_c", "control_packet_size"},
    {"l_d", "data_packet_size"},
    {"bw", "wired_bandwidth"},
    {"bw_w", "wireless_bandwidth"},
    {"l", "wired_prop_delay"},
    {"l_w", "wireless_prop_delay"},
    {"p_f", "wireless_fail_prob"},
    {"t_pc_lbs", "proc_time_lbs"},
    {"t_pc_mz", "proc_time_mz"},
    {"h_mu_mz", "hops_mu_mz"},
    {"h_lbs_mz", "hops_lbs_mz"},
    {"h_mz_mz", "hops_mz_mz"},
    {"xi", "network_scale"},
    {"t_l2", "l2_latency"},
    {"l_auth", "auth_latency"},
    {"delta", "phi"},
    {"b", "buffer_size"},
    {"lambda_p", "session_packet_rate"},
    {"s_th", "rss_handover_threshold"},
    {"s_min", "rss_min"},
    {"e", "path_loss_exponent"},
    {"d_0", "rss_ref_distance"},
    {"g", "g_prefixes_per_handover"},
  };
  return aliases;
}

const FieldInfo *
FindField (std::string_view key)
{
  std::string k (key);
  for (const auto &[alias, canonical] : Aliases ())
    {
      if (alias == k)
        {
          k = canonical;
          break;
        }
    }
  for (const auto &f : Fields ())
    {
      if (f.key == k)
        {
          return &f;
        }
    }
  return nullptr;
}

std::string_view
Trim (std::string_view s)
{
  const auto *ws = " \t\r\n";
  auto b = s.find_first_not_of (ws);
  if (b == std::string_view::npos)
    {
      return {};
    }
  auto e = s.find_last_not_of (ws);
  return s.substr (b, e - b + 1);
}

/// Multiplier that converts `unit` to SI for the given dimension, or nullopt.
std::optional<double>
UnitScale (Dim dim, std::string_view unit)
{
  if (unit.empty ())
    {
      return 1.0;
    }
  struct U
  {
    Dim dim;
    const char *name;
    double scale;
  };
  static const U units[] = {
    {Dim::Length, "m", 1.0},         {Dim::Length, "km", 1e3},
    {Dim::Time, "s", 1.0},           {Dim::Time, "ms", 1e-3},
    {Dim::Time, "us", 1e-6},         {Dim::Time, "min", 60.0},
    {Dim::Speed, "m/s", 1.0},        {Dim::Speed, "km/h", 1.0 / 3.6},
    {Dim::Size, "B", 1.0},           {Dim::Size, "bytes", 1.0},
    {Dim::Size, "KB", 1e3},          {Dim::Size, "MB", 1e6},
    {Dim::Bitrate, "bps", 1.0},      {Dim::Bitrate, "bit/s", 1.0},
    {Dim::Bitrate, "kbps", 1e3},     {Dim::Bitrate, "Kbps", 1e3},
    {Dim::Bitrate, "Mbps", 1e6},     {Dim::Bitrate, "Gbps", 1e9},
    {Dim::Rate, "1/s", 1.0},         {Dim::Rate, "Hz", 1.0},
    {Dim::Rate, "pkt/s", 1.0},       {Dim::Rate, "packets/s", 1.0},
    {Dim::Power, "dBm", 1.0},
  };
  for (const auto &u : units)
    {
      if (u.dim == dim && unit == u.name)
        {
          return u.scale;
        }
    }
  return std::nullopt;
}

void
RequirePositive (const char *field, double v)
{
  if (!(v > 0.0) || !std::isfinite (v))
    {
      throw ValidationError (field, "must be strictly positive and finite");
    }
}

std::string
FormatDouble (double v)
{
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

int
SystemParameters::EffectiveHopsMzMz () const
{
  if (hops_mz_mz)
    {
      return *hops_mz_mz;
    }
  return static_cast<int> (std::lround (network_scale * hops_lbs_mz));
}

SystemParameters
Defaults ()
{
  return SystemParameters{};
}

void
Validate (const SystemParameters &p)
{
  RequirePositive ("area_x", p.area_x);
  RequirePositive ("area_y", p.area_y);
  RequirePositive ("road_spacing_x", p.road_spacing_x);
  RequirePositive ("road_spacing_y", p.road_spacing_y);
  if (p.road_spacing_x > p.area_x)
    {
      throw ValidationError ("road_spacing_x", "larger than area_x");
    }
  if (p.road_spacing_y > p.area_y)
    {
      throw ValidationError ("road_spacing_y", "larger than area_y");
    }
  if (p.k1)
    {
      RequirePositive ("k1", *p.k1);
    }
  if (p.k2)
    {
      RequirePositive ("k2", *p.k2);
    }
  if (p.zones_per_row && *p.zones_per_row < 1)
    {
      throw ValidationError ("zones_per_row", "must be at least 1");
    }
  if (p.zones_per_col && *p.zones_per_col < 1)
    {
      throw ValidationError ("zones_per_col", "must be at least 1");
    }
  RequirePositive ("overlap_x", p.overlap_x);
  RequirePositive ("overlap_y", p.overlap_y);
  RequirePositive ("mix_zone_radius", p.mix_zone_radius);
  RequirePositive ("max_pause", p.max_pause);
  if (!(p.mean_speed >= 0.0) || !std::isfinite (p.mean_speed))
    {
      throw ValidationError ("mean_speed", "must be non-negative and finite");
    }
  RequirePositive ("foreign_prefix_decay_rate", p.foreign_prefix_decay_rate);
  RequirePositive ("control_packet_size", p.control_packet_size);
  RequirePositive ("data_packet_size", p.data_packet_size);
  RequirePositive ("wired_bandwidth", p.wired_bandwidth);
  RequirePositive ("wireless_bandwidth", p.wireless_bandwidth);
  RequirePositive ("wired_prop_delay", p.wired_prop_delay);
  RequirePositive ("wireless_prop_delay", p.wireless_prop_delay);
  if (!(p.wireless_fail_prob >= 0.0 && p.wireless_fail_prob < 1.0))
    {
      throw ValidationError ("wireless_fail_prob", "probability must lie in [0,1)");
    }
  RequirePositive ("proc_time_lbs", p.proc_time_lbs);
  RequirePositive ("proc_time_mz", p.proc_time_mz);
  if (p.hops_mu_mz < 1)
    {
      throw ValidationError ("hops_mu_mz", "must be at least 1");
    }
  if (p.hops_lbs_mz < 1)
    {
      throw ValidationError ("hops_lbs_mz", "must be at least 1");
    }
  if (!(p.network_scale > 0.0 && p.network_scale <= 1.0))
    {
      throw ValidationError ("network_scale", "must lie in (0,1]");
    }
  if (p.EffectiveHopsMzMz () < 1)
    {
      throw ValidationError ("hops_mz_mz", "must be at least 1");
    }
  RequirePositive ("l2_latency", p.l2_latency);
  RequirePositive ("auth_latency", p.auth_latency);
  RequirePositive ("scan_time", p.scan_time);
  RequirePositive ("phi", p.phi);
  if (!(p.scan_time < p.l2_latency))
    {
      throw ValidationError ("scan_time", "must be shorter than l2_latency");
    }
  if (!(p.buffer_size >= 0.0) || !std::isfinite (p.buffer_size))
    {
      throw ValidationError ("buffer_size", "must be non-negative and finite");
    }
  RequirePositive ("session_packet_rate", p.session_packet_rate);
  if (!std::isfinite (p.rss_ref_power))
    {
      throw ValidationError ("rss_ref_power", "must be finite");
    }
  RequirePositive ("rss_ref_distance", p.rss_ref_distance);
  RequirePositive ("path_loss_exponent", p.path_loss_exponent);
  if (!std::isfinite (p.rss_handover_threshold))
    {
      throw ValidationError ("rss_handover_threshold", "must be finite");
    }
  if (!(p.rss_min < p.rss_handover_threshold))
    {
      throw ValidationError ("rss_min", "must be below rss_handover_threshold");
    }
  if (p.g_prefixes_per_handover < 1)
    {
      throw ValidationError ("g_prefixes_per_handover", "must be at least 1");
    }
}

TopologyCounts
DeriveTopologyCounts (const SystemParameters &p)
{
  RequirePositive ("road_spacing_x", p.road_spacing_x);
  RequirePositive ("road_spacing_y", p.road_spacing_y);
  RequirePositive ("mix_zone_radius", p.mix_zone_radius);
  const double pitchX = 2.0 * p.mix_zone_radius - p.overlap_x;
  const double pitchY = 2.0 * p.mix_zone_radius - p.overlap_y;
  if (!(pitchX > 0.0))
    {
      throw ValidationError ("mix_zone_radius", "radius must exceed overlap_x / 2");
    }
  if (!(pitchY > 0.0))
    {
      throw ValidationError ("mix_zone_radius", "radius must exceed overlap_y / 2");
    }

  TopologyCounts c{};
  c.road_count_x = p.area_x / p.road_spacing_x + 1.0;
  c.road_count_y = p.area_y / p.road_spacing_y + 1.0;
  c.zones_per_row = p.zones_per_row.value_or (
      std::max (1, static_cast<int> (std::ceil (p.area_x / pitchX))));
  c.zones_per_col = p.zones_per_col.value_or (
      std::max (1, static_cast<int> (std::ceil (p.area_y / pitchY))));
  const double kx = 2.0 * p.mix_zone_radius / p.road_spacing_x;
  const double ky = 2.0 * p.mix_zone_radius / p.road_spacing_y;
  c.k1 = p.k1.value_or (kx);
  c.k2 = p.k2.value_or (ky);
  c.k_conflict = (p.k1 && *p.k1 != kx) || (p.k2 && *p.k2 != ky);
  return c;
}

SystemParameters
ParseScenario (std::string_view text)
{
  SystemParameters p = Defaults ();
  std::set<std::string> seen;
  int lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size ())
    {
      auto nl = text.find ('\n', pos);
      if (nl == std::string_view::npos)
        {
          nl = text.size ();
        }
      std::string_view line = text.substr (pos, nl - pos);
      pos = nl + 1;
      ++lineNo;

      if (auto hash = line.find ('#'); hash != std::string_view::npos)
        {
          line = line.substr (0, hash);
        }
      line = Trim (line);
      if (line.empty ())
        {
          continue;
        }
      auto eq = line.find ('=');
      if (eq == std::string_view::npos)
        {
          throw ParseError (lineNo, "expected `key = value`");
        }
      auto key = Trim (line.substr (0, eq));
      auto value = Trim (line.substr (eq + 1));
      if (key.empty () || value.empty ())
        {
          throw ParseError (lineNo, "empty key or value");
        }
      const FieldInfo *field = FindField (key);
      if (field == nullptr)
        {
          throw ParseError (lineNo, "unknown key `" + std::string (key) + "`");
        }
      if (!seen.insert (field->key).second)
        {
          throw ParseError (lineNo, "duplicate key `" + field->key + "`");
        }

      double number = 0.0;
      // from_chars does not accept a leading '+'.
      auto numText = value;
      if (!numText.empty () && numText.front () == '+')
        {
          numText.remove_prefix (1);
        }
      auto [end, ec] = std::from_chars (numText.data (), numText.data () + numText.size (), number);
      if (ec != std::errc ())
        {
          throw ParseError (lineNo, "malformed number in `" + std::string (value) + "`");
        }
      auto unit = Trim (std::string_view (end, numText.data () + numText.size () - end));
      auto scale = UnitScale (field->dim, unit);
      if (!scale)
        {
          throw ParseError (lineNo, "unit `" + std::string (unit) + "` not valid for `" + field->key + "`");
        }
      number *= *scale;
      if (field->dim == Dim::Integer && number != std::floor (number))
        {
          throw ValidationError (field->key, "must be an integer");
        }
      if (field->key == "foreign_prefix_lifetime" && !(number > 0.0))
        {
          throw ValidationError (field->key, "must be strictly positive");
        }
      field->set (p, number);
    }
  Validate (p);
  return p;
}

std::string
RenderScenario (const SystemParameters &p)
{
  std::ostringstream os;
  for (const auto &f : Fields ())
    {
      if (f.key == "foreign_prefix_lifetime")
        {
          continue; // the rate is rendered; the lifetime is only an input form
        }
      double v = f.get (p);
      if (f.optional && std::isnan (v))
        {
          continue;
        }
      os << f.key << " = " << FormatDouble (v) << '\n';
    }
  return os.str ();
}

void
SetParameter (SystemParameters &p, std::string_view key, double value)
{
  const FieldInfo *field = FindField (key);
  if (field == nullptr)
    {
      throw ValidationError (std::string (key), "unknown parameter");
    }
  if (field->dim == Dim::Integer && value != std::floor (value))
    {
      throw ValidationError (field->key, "must be an integer");
    }
  field->set (p, value);
}

double
GetParameter (const SystemParameters &p, std::string_view key)
{
  const FieldInfo *field = FindField (key);
  if (field == nullptr)
    {
      throw ValidationError (std::string (key), "unknown parameter");
    }
  return field->get (p);
}

std::string
CanonicalKey (std::string_view key)
{
  const FieldInfo *field = FindField (key);
  if (field == nullptr)
    {
      throw ValidationError (std::string (key), "unknown parameter");
    }
  return field->key;
}

const std::vector<std::string> &
ParameterKeys ()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto &f : Fields ())
      {
        k.push_back (f.key);
      }
    return k;
  }();
  return keys;
}

} // namespace ddmm
