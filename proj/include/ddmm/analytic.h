/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_ANALYTIC_H
#define DDMM_ANALYTIC_H

#include "ddmm/parameters.h"

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ddmm {

enum class Scheme
{
  DDMM,
  PRE_FDMM,
  RE_FDMM
};

inline constexpr std::array<Scheme, 3> kAllSchemes = {Scheme::DDMM, Scheme::PRE_FDMM,
                                                      Scheme::RE_FDMM};

std::string_view SchemeName (Scheme s);
/// Accepts "DDMM", "PRE_FDMM"/"pre", "RE_FDMM"/"re" (case-insensitive).
Scheme ParseScheme (std::string_view name);

/// A closed form evaluated outside its domain (e.g. non-positive E(C)).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

struct MobilityStats
{
  double epoch_length;       // E(L), m
  double epoch_time;         // E(T), s
  double pause_time;         // E(P), s
  double expected_crossings; // E(C)
  double residence_time;     // T_SN, s (+inf for an immobile user)
  double crossing_rate;      // mu_SN = 1 / T_SN
};

struct PrefixStats
{
  double mean_active_prefixes;   // N_PR
  double mean_anchored_prefixes; // N_pLNP
  double handover_survival_prob; // P_PR
  double mean_prefix_lifetime;   // T_PR, s
};

struct LinkSpec
{
  double packet_size; // bytes
  double bandwidth;   // bit/s
  double prop_delay;  // s
  int hops;
  double loss_prob = 0.0; // 0 for wired links
};

struct SchemeMetrics
{
  Scheme scheme;
  double handover_latency; // s
  double failure_prob;
  double session_recovery; // s
  double packet_loss;      // bytes per handover
  double signaling_cost;   // bytes/s
};

/// Per-message delays that the closed forms are assembled from.
struct DelayTerms
{
  double mu_mz_control; // d_MU-MZ(c)
  double mu_mz_data;    // d_MU-MZ(d)
  double lbs_mz_control;
  double mz_mz_control;
  double mz_mz_data;
  double handover_initiate; // T_HI = 2 d_MZ-MZ(c) + T_PC^MZ
  double predictive_window; // 2 d_MU-MZ(c) + T_HI
};

MobilityStats ComputeMobilityStats (const SystemParameters &p);
PrefixStats ComputePrefixStats (const SystemParameters &p, double muSn);

/// P^h (1 - P): probability of exactly h further handovers during a
/// foreign prefix lifetime.
double GeometricHandoverPmf (double survivalProb, unsigned h);

/// (8 L / BW + l) / (1 - p) * h.
double LinkDelay (const LinkSpec &ls);

/// Delay terms at the given MZ-MZ hop count (defaults to h_{MZ-MZ}).
DelayTerms ComputeDelayTerms (const SystemParameters &p);
DelayTerms ComputeDelayTerms (const SystemParameters &p, int mzMzHops);

double HandoverLatency (Scheme s, const SystemParameters &p);
double HandoverLatency (Scheme s, const SystemParameters &p, int mzMzHops);

/// 1 - exp(-mu * HL).
double HandoverFailureProb (double muSn, double latency);

double SessionRecovery (Scheme s, const SystemParameters &p);
double SessionRecovery (Scheme s, const SystemParameters &p, int mzMzHops);

/// Data buffered at the target during a predictive handover is held for
/// this long: (d_MU-MZ(c) + (T_L2 + T_Auth - x)) - d_MZ-MZ(d).
double BufferingInterval (const SystemParameters &p);
double BufferingInterval (const SystemParameters &p, int mzMzHops);

/// Time for the target buffer to overflow at aggregate rate lambda_p * N_PR.
double BufferOverflowTime (const SystemParameters &p, double nPr);

double PacketLoss (Scheme s, const SystemParameters &p, double nPr);
double PacketLoss (Scheme s, const SystemParameters &p, double nPr, int mzMzHops);

/// Continuous extension of sum_{n=1}^{N} n, exact at integers.
double TriangularSum (double n);

double SignalingCost (Scheme s, const SystemParameters &p, double muSn, double nPr);

/// Full pipeline: mobility -> prefixes -> all five metrics.
SchemeMetrics Evaluate (Scheme s, const SystemParameters &p);

} // namespace ddmm

#endif // DDMM_ANALYTIC_H
