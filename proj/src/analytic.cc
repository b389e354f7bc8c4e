/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/analytic.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace ddmm {

std::string_view
SchemeName (Scheme s)
{
  switch (s)
    {
    case Scheme::DDMM:
      return "DDMM";
    case Scheme::PRE_FDMM:
      return "PRE_FDMM";
    case Scheme::RE_FDMM:
      return "RE_FDMM";
    }
  return "?";
}

Scheme
ParseScheme (std::string_view name)
{
  std::string up;
  for (char c : name)
    {
      up.push_back (static_cast<char> (std::toupper (static_cast<unsigned char> (c))));
    }
  if (up == "DDMM")
    {
      return Scheme::DDMM;
    }
  if (up == "PRE_FDMM" || up == "PRE" || up == "PRE-FDMM")
    {
      return Scheme::PRE_FDMM;
    }
  if (up == "RE_FDMM" || up == "RE" || up == "RE-FDMM")
    {
      return Scheme::RE_FDMM;
    }
  throw std::invalid_argument ("unknown scheme `" + std::string (name) + "`");
}

MobilityStats
ComputeMobilityStats (const SystemParameters &p)
{
  const TopologyCounts c = DeriveTopologyCounts (p);
  const double nx = c.road_count_x;
  const double ny = c.road_count_y;

  MobilityStats s{};
  s.epoch_length = p.area_x * (nx + 1.0) / (3.0 * nx) + p.area_y * (ny + 1.0) / (3.0 * ny);
  s.epoch_time = p.mean_speed > 0.0 ? s.epoch_length / p.mean_speed
                                    : std::numeric_limits<double>::infinity ();
  s.pause_time = p.max_pause / 2.0;

  // X-direction term pairs the zones spanning X with K1 and N_x.
  const double m = c.zones_per_row;
  const double n = c.zones_per_col;
  const double k1 = c.k1;
  const double k2 = c.k2;
  s.expected_crossings = m * k1 * (m + 1.0) / (6.0 * nx * nx) * (6.0 * nx - 4.0 * m * k1 + k1 + 3.0)
                         + n * k2 * (n + 1.0) / (6.0 * ny * ny) * (6.0 * ny - 4.0 * n * k2 + k2 + 3.0);
  if (!(s.expected_crossings > 0.0))
    {
      throw DomainError ("expected zone crossings per epoch is not positive ("
                         + std::to_string (s.expected_crossings) + ")");
    }
  s.residence_time = (s.epoch_time + 2.0 * s.pause_time) / s.expected_crossings;
  s.crossing_rate = std::isfinite (s.residence_time) ? 1.0 / s.residence_time : 0.0;
  return s;
}

PrefixStats
ComputePrefixStats (const SystemParameters &p, double muSn)
{
  if (!(muSn >= 0.0))
    {
      throw DomainError ("crossing rate must be non-negative");
    }
  if (!(p.foreign_prefix_decay_rate > 0.0))
    {
      throw DomainError ("foreign prefix decay rate must be positive");
    }
  const double lambdaF = p.foreign_prefix_decay_rate;
  PrefixStats s{};
  s.handover_survival_prob = muSn / (muSn + lambdaF);
  s.mean_anchored_prefixes = p.g_prefixes_per_handover * muSn / lambdaF;
  s.mean_active_prefixes = 1.0 + s.mean_anchored_prefixes;
  s.mean_prefix_lifetime = (muSn > 0.0 ? 1.0 / muSn : std::numeric_limits<double>::infinity ())
                           + 1.0 / lambdaF;
  return s;
}

double
GeometricHandoverPmf (double survivalProb, unsigned h)
{
  return std::pow (survivalProb, static_cast<double> (h)) * (1.0 - survivalProb);
}

double
LinkDelay (const LinkSpec &ls)
{
  return (8.0 * ls.packet_size / ls.bandwidth + ls.prop_delay) * (1.0 / (1.0 - ls.loss_prob))
         * ls.hops;
}

DelayTerms
ComputeDelayTerms (const SystemParameters &p)
{
  return ComputeDelayTerms (p, p.EffectiveHopsMzMz ());
}

DelayTerms
ComputeDelayTerms (const SystemParameters &p, int mzMzHops)
{
  const auto wireless = [&] (double size) {
    return LinkDelay ({size, p.wireless_bandwidth, p.wireless_prop_delay, p.hops_mu_mz,
                       p.wireless_fail_prob});
  };
  const auto wired = [&] (double size, int hops) {
    return LinkDelay ({size, p.wired_bandwidth, p.wired_prop_delay, hops, 0.0});
  };
  DelayTerms d{};
  d.mu_mz_control = wireless (p.control_packet_size);
  d.mu_mz_data = wireless (p.data_packet_size);
  d.lbs_mz_control = wired (p.control_packet_size, p.hops_lbs_mz);
  d.mz_mz_control = wired (p.control_packet_size, mzMzHops);
  d.mz_mz_data = wired (p.data_packet_size, mzMzHops);
  d.handover_initiate = 2.0 * d.mz_mz_control + p.proc_time_mz;
  d.predictive_window = 2.0 * d.mu_mz_control + d.handover_initiate;
  return d;
}

namespace {

void
RequireAuthAfterScan (const SystemParameters &p)
{
  if (!(p.l2_latency + p.auth_latency > p.scan_time))
    {
      throw DomainError ("L2 attach plus authentication must outlast the scan phase");
    }
}

} // namespace

double
HandoverLatency (Scheme s, const SystemParameters &p)
{
  return HandoverLatency (s, p, p.EffectiveHopsMzMz ());
}

double
HandoverLatency (Scheme s, const SystemParameters &p, int mzMzHops)
{
  RequireAuthAfterScan (p);
  const DelayTerms d = ComputeDelayTerms (p, mzMzHops);
  const double attach = p.l2_latency + p.auth_latency;
  switch (s)
    {
    case Scheme::DDMM: {
      const double movementDetection = 2.0 * d.mu_mz_control;
      const double locationUpdate = 2.0 * d.lbs_mz_control + p.proc_time_lbs + 2.0 * p.proc_time_mz;
      return attach + movementDetection + locationUpdate;
    }
    case Scheme::PRE_FDMM:
      return std::max (d.predictive_window - p.phi, 0.0) + attach - p.scan_time;
    case Scheme::RE_FDMM:
      return attach + d.handover_initiate;
    }
  return 0.0;
}

double
HandoverFailureProb (double muSn, double latency)
{
  return -std::expm1 (-muSn * latency);
}

double
SessionRecovery (Scheme s, const SystemParameters &p)
{
  return SessionRecovery (s, p, p.EffectiveHopsMzMz ());
}

double
SessionRecovery (Scheme s, const SystemParameters &p, int mzMzHops)
{
  const DelayTerms d = ComputeDelayTerms (p, mzMzHops);
  const double hl = HandoverLatency (s, p, mzMzHops);
  switch (s)
    {
    case Scheme::DDMM:
      return (hl - d.mu_mz_control) + d.mz_mz_data + d.mu_mz_data;
    case Scheme::RE_FDMM:
      return hl + d.mz_mz_data + d.mu_mz_data;
    case Scheme::PRE_FDMM:
      return hl + d.mu_mz_data;
    }
  return 0.0;
}

double
BufferingInterval (const SystemParameters &p)
{
  return BufferingInterval (p, p.EffectiveHopsMzMz ());
}

double
BufferingInterval (const SystemParameters &p, int mzMzHops)
{
  const DelayTerms d = ComputeDelayTerms (p, mzMzHops);
  return (d.mu_mz_control + (p.l2_latency + p.auth_latency - p.scan_time)) - d.mz_mz_data;
}

double
BufferOverflowTime (const SystemParameters &p, double nPr)
{
  const double byteRate = p.session_packet_rate * nPr * p.data_packet_size;
  return p.buffer_size / byteRate;
}

double
PacketLoss (Scheme s, const SystemParameters &p, double nPr)
{
  return PacketLoss (s, p, nPr, p.EffectiveHopsMzMz ());
}

double
PacketLoss (Scheme s, const SystemParameters &p, double nPr, int mzMzHops)
{
  if (!(nPr >= 1.0))
    {
      throw DomainError ("active prefix count must be at least 1");
    }
  const double lambda = p.session_packet_rate * nPr;
  switch (s)
    {
    case Scheme::DDMM:
    case Scheme::RE_FDMM:
      return lambda * p.data_packet_size * SessionRecovery (s, p, mzMzHops);
    case Scheme::PRE_FDMM: {
      const DelayTerms d = ComputeDelayTerms (p, mzMzHops);
      const double beforeBuffering = std::max (d.predictive_window - p.phi, 0.0);
      const double overflow
          = std::max (BufferingInterval (p, mzMzHops) - BufferOverflowTime (p, nPr), 0.0);
      return lambda * p.data_packet_size * (beforeBuffering + overflow);
    }
    }
  return 0.0;
}

double
TriangularSum (double n)
{
  return n * (n + 1.0) / 2.0;
}

double
SignalingCost (Scheme s, const SystemParameters &p, double muSn, double nPr)
{
  if (!(nPr >= 1.0))
    {
      throw DomainError ("active prefix count must be at least 1");
    }
  const double hMu = p.hops_mu_mz;
  const double hLbs = p.hops_lbs_mz;
  const double hMz = p.EffectiveHopsMzMz ();
  const double unit = 2.0 * muSn * p.control_packet_size;
  switch (s)
    {
    case Scheme::DDMM:
      return unit * (hMu + hLbs * (nPr + 1.0));
    case Scheme::PRE_FDMM:
      return unit * (hLbs + hMu + TriangularSum (nPr) * hMz);
    case Scheme::RE_FDMM:
      return unit * (hMz + TriangularSum (nPr) * hMz);
    }
  return 0.0;
}

SchemeMetrics
Evaluate (Scheme s, const SystemParameters &p)
{
  const MobilityStats mob = ComputeMobilityStats (p);
  const PrefixStats pre = ComputePrefixStats (p, mob.crossing_rate);
  SchemeMetrics m{};
  m.scheme = s;
  m.handover_latency = HandoverLatency (s, p);
  m.failure_prob = HandoverFailureProb (mob.crossing_rate, m.handover_latency);
  m.session_recovery = SessionRecovery (s, p);
  m.packet_loss = PacketLoss (s, p, pre.mean_active_prefixes);
  m.signaling_cost = SignalingCost (s, p, mob.crossing_rate, pre.mean_active_prefixes);
  return m;
}

} // namespace ddmm
