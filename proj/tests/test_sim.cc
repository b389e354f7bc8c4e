/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/sim.h"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ddmm;

namespace {

SimReport
Quick (Scheme s, double pf, std::uint64_t seed = 3, double duration = 3000.0)
{
  SystemParameters p = Defaults ();
  p.wireless_fail_prob = pf;
  SimOptions o;
  o.fleet = 2;
  return Run (p, s, seed, duration, o);
}

void
CheckConservation (const SimCounters &c)
{
  CHECK (c.generated == c.delivered + c.buffered + c.lost + c.in_flight);
}

} // namespace

TEST_CASE ("deterministic delays reproduce the closed forms")
{
  for (Scheme s : kAllSchemes)
    {
      CAPTURE (SchemeName (s));
      const SimReport r = Quick (s, 0.0);
      REQUIRE (r.Count () >= 30);
      for (const auto &h : r.records)
        {
          CHECK (std::abs (h.latency - h.analytic_latency) <= 1e-6);
          CHECK (std::abs (h.session_recovery - h.analytic_session_recovery) <= 1e-6);
          CHECK (!h.wireless_in_gap);
          CHECK (h.mz_hops >= Defaults ().EffectiveHopsMzMz ());
        }
      for (const auto &row : EmpiricalVsAnalytic (r, 1e-9))
        {
          if (row.asserted)
            {
              CAPTURE (row.metric);
              CHECK (row.pass);
            }
        }
      CheckConservation (r.counters);
    }
  const SimReport pre = Quick (Scheme::PRE_FDMM, 0.0);
  CHECK (pre.CountMode (HandoverMode::PREDICTIVE) == pre.Count ());
  for (const auto &h : pre.records)
    {
      CHECK (h.latency == doctest::Approx (0.130).epsilon (1e-9));
      CHECK (h.bytes_lost == 0.0);
    }
}

TEST_CASE ("mode selection follows the event timeline")
{
  for (double pf : {0.0, 0.5, 0.8})
    {
      const SimReport r = Quick (Scheme::PRE_FDMM, pf, 9);
      for (const auto &h : r.records)
        {
          if (h.mode == HandoverMode::PREDICTIVE)
            {
              CHECK (h.hack_time >= 0.0);
              CHECK (h.hack_time < h.trigger_time + Defaults ().phi);
              CHECK (h.hack_time <= h.link_down);
            }
          else
            {
              CHECK (h.mode == HandoverMode::REACTIVE);
              CHECK (h.hack_time < 0.0);
            }
          CHECK (h.link_down <= h.link_up);
          CHECK (h.link_up <= h.complete);
        }
      CheckConservation (r.counters);
    }
  // With a lossy radio the predictive window can outlast the link.
  const SimReport lossy = Quick (Scheme::PRE_FDMM, 0.8, 9);
  CHECK (lossy.CountMode (HandoverMode::REACTIVE) > 0);
}

TEST_CASE ("runs are reproducible per seed")
{
  std::ostringstream ta, tb;
  SystemParameters p = Defaults ();
  SimOptions o;
  o.trace = &ta;
  const SimReport a = Run (p, Scheme::RE_FDMM, 17, 1500.0, o);
  o.trace = &tb;
  const SimReport b = Run (p, Scheme::RE_FDMM, 17, 1500.0, o);
  CHECK (ta.str () == tb.str ());
  REQUIRE (a.Count () == b.Count ());
  for (std::size_t i = 0; i < a.Count (); ++i)
    {
      CHECK (a.records[i].latency == b.records[i].latency);
      CHECK (a.records[i].session_recovery == b.records[i].session_recovery);
    }
  CHECK (a.counters.generated == b.counters.generated);
  const SimReport c = Run (p, Scheme::RE_FDMM, 18, 1500.0);
  CHECK (c.counters.generated != a.counters.generated);

  std::istringstream lines (ta.str ());
  std::string line;
  std::size_t n = 0;
  while (std::getline (lines, line) && n < 200)
    {
      CHECK (std::count (line.begin (), line.end (), '\t') == 5);
      ++n;
    }
  CHECK (n > 0);
}

TEST_CASE ("stochastic radio keeps the census exact")
{
  for (Scheme s : kAllSchemes)
    {
      const SimReport r = Quick (s, 0.5, 21);
      CheckConservation (r.counters);
      CHECK (r.counters.max_buffered_bytes <= r.params.buffer_size);
      CHECK (r.FailureFraction () >= 0.0);
      CHECK (r.FailureFraction () <= 1.0);
    }
}

TEST_CASE ("zero buffer loses the buffering interval")
{
  SystemParameters p = Defaults ();
  p.wireless_fail_prob = 0.0;
  p.buffer_size = 0.0;
  SimOptions o;
  o.fleet = 2;
  const SimReport r = Run (p, Scheme::PRE_FDMM, 4, 3000.0, o);
  REQUIRE (r.Count () > 10);
  for (const auto &h : r.records)
    {
      REQUIRE (h.mode == HandoverMode::PREDICTIVE);
      const double expected = p.session_packet_rate * h.active_prefixes * p.data_packet_size
                              * BufferingInterval (p, h.mz_hops);
      // One packet of counting error per active flow.
      CHECK (std::abs (h.bytes_lost - expected) <= h.active_prefixes * p.data_packet_size);
      CHECK (h.analytic_loss == doctest::Approx (expected));
    }
  CHECK (r.counters.buffered == 0);
  CHECK (r.counters.max_buffered_bytes == 0.0);
  CheckConservation (r.counters);
}

TEST_CASE ("short or static runs have no handovers")
{
  const SimReport r = Quick (Scheme::DDMM, 0.5, 1, 1.0);
  CHECK (r.Count () == 0);
  const auto rows = EmpiricalVsAnalytic (r, 0.03);
  REQUIRE (rows.size () == 1);
  CHECK (rows[0].metric == "no handovers");
  CHECK (r.MeanLatency () == 0.0);
  CHECK (r.FailureFraction () == 0.0);

  SystemParameters p = Defaults ();
  p.mean_speed = 0.0;
  const SimReport still = Run (p, Scheme::PRE_FDMM, 1, 2000.0);
  CHECK (still.Count () == 0);
  CheckConservation (still.counters);

  CHECK_THROWS_AS (Run (Defaults (), Scheme::DDMM, 1, 0.0), std::invalid_argument);
  p = Defaults ();
  p.data_packet_size = -4.0;
  CHECK_THROWS_AS (Run (p, Scheme::DDMM, 1, 10.0), ValidationError);
}

TEST_CASE ("single zone has no inter-zone handovers")
{
  SystemParameters p = Defaults ();
  p.mix_zone_radius = 40000.0;
  const SimReport r = Run (p, Scheme::DDMM, 2, 3000.0);
  CHECK (r.zone_count == 1);
  CHECK (r.Count () == 0);
  CHECK (r.counters.intra_zone_switches > 0);
}

TEST_CASE ("exponential residence validates the failure probability")
{
  const double pairs[][2] = {{0.0134, 0.130}, {0.0134, 0.445}, {0.1, 0.488}, {1.0, 0.3}, {2.5, 0.9}};
  for (const auto &pr : pairs)
    {
      const FailureValidation v = ValidateFailureProb (pr[0], pr[1], 10000, 99);
      CHECK (v.analytic == doctest::Approx (1.0 - std::exp (-pr[0] * pr[1])));
      CHECK (v.within_3_sigma);
    }
  CHECK_THROWS (ValidateFailureProb (1.0, 1.0, 0, 1));
}
