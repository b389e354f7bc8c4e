/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_SIM_H
#define DDMM_SIM_H

#include "ddmm/analytic.h"
#include "ddmm/message.h"
#include "ddmm/parameters.h"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ddmm {

/// Procedure a handover actually followed.
enum class HandoverMode
{
  PREDICTIVE,
  REACTIVE,
  DDMM
};

std::string_view ModeName (HandoverMode m);

/// Closed form that describes a handover of the given mode.
Scheme ModeScheme (HandoverMode m);

struct HandoverRecord
{
  std::size_t mu_index = 0;
  Scheme scheme = Scheme::DDMM;
  HandoverMode mode = HandoverMode::DDMM;
  NodeId from_zone = 0;
  NodeId to_zone = 0;
  int mz_hops = 0;

  double trigger_time = 0.0; // serving RSS crossed S_th
  double link_down = 0.0;    // last moment on the old link
  double link_up = 0.0;      // L2 attach at the target finished
  double hack_time = -1.0;   // HACK seen at the serving zone; < 0 if none
  double complete = 0.0;     // first moment the new path serves the MU

  double latency = 0.0;          // s
  double session_recovery = 0.0; // s
  double bytes_lost = 0.0;
  double control_bytes = 0.0;
  double control_byte_hops = 0.0;
  std::size_t active_prefixes = 0;
  bool failed = false;
  bool wireless_in_gap = false; // wireless control traffic while detached

  double analytic_latency = 0.0;
  double analytic_session_recovery = 0.0;
  double analytic_loss = 0.0;
};

/// Packet census. generated == delivered + buffered + lost + in_flight.
struct SimCounters
{
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t buffered = 0;
  std::uint64_t lost = 0;
  std::uint64_t in_flight = 0;
  double max_buffered_bytes = 0.0;
  std::uint64_t control_messages = 0;
  double control_bytes = 0.0;
  double control_byte_hops = 0.0;
  std::uint64_t intra_zone_switches = 0;
  std::uint64_t prefix_expiries = 0;
};

struct SimReport
{
  SystemParameters params;
  Scheme scheme = Scheme::DDMM;
  std::uint64_t seed = 0;
  double duration = 0.0;
  std::size_t fleet = 1;
  std::size_t zone_count = 0;
  std::vector<HandoverRecord> records;
  SimCounters counters;

  std::size_t Count () const { return records.size (); }
  std::size_t CountMode (HandoverMode m) const;
  double MeanLatency () const;
  double MeanSessionRecovery () const;
  double MeanBytesLost () const;
  double MeanAnalyticLatency () const;
  double MeanAnalyticSessionRecovery () const;
  double MeanAnalyticLoss () const;
  /// Fraction of handovers whose zone residence ended first; 0 if none.
  double FailureFraction () const;
  /// Inter-zone handovers per MU-second.
  double CrossingRate () const;
  /// Hop-weighted control bytes per MU-second.
  double SignalingRate () const;
};

struct SimOptions
{
  std::size_t fleet = 1;
  double rss_interval = 0.1;
  /// Tab-separated event dump: time, node, event, message kind, flags, bytes.
  std::ostream *trace = nullptr;
};

/**
 * Runs the discrete-event simulation. Throws ValidationError for invalid
 * parameters and std::invalid_argument for a non-positive duration.
 */
SimReport Run (const SystemParameters &p, Scheme scheme, std::uint64_t seed, double duration,
               const SimOptions &opt = {});

struct ComparisonRow
{
  std::string metric;
  double empirical = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
  bool asserted = false;
  bool pass = true;
  std::string note;
};

/// |a - b| / max(|b|, 1e-12).
double RelativeError (double empirical, double analytic);

/**
 * Latency and session recovery rows are asserted against the tolerance;
 * crossing rate, failure fraction, loss and signaling rows are advisory.
 */
std::vector<ComparisonRow> EmpiricalVsAnalytic (const SimReport &report, double tolerance);

struct FailureValidation
{
  double empirical;
  double analytic;
  double sigma;
  bool within_3_sigma;
};

/// Samples residence times ~ Exp(mu) and counts those shorter than hl.
FailureValidation ValidateFailureProb (double mu, double hl, std::size_t trials,
                                       std::uint64_t seed);

} // namespace ddmm

#endif // DDMM_SIM_H
