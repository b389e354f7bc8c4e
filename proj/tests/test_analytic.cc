/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/analytic.h"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ddmm;

namespace {

constexpr double kUs = 1e-6;

} // namespace

TEST_CASE ("mobility statistics at defaults")
{
  const MobilityStats s = ComputeMobilityStats (Defaults ());
  CHECK (s.pause_time == 12.5);
  CHECK (s.epoch_length == doctest::Approx (20132.414045).epsilon (1e-9));
  CHECK (s.epoch_time == doctest::Approx (805.2966).epsilon (1e-6));
  // Hand evaluation with m = 19, n = 13, K = 10, N_x = 181, N_y = 121.
  CHECK (s.expected_crossings == doctest::Approx (11.0907824).epsilon (1e-7));
  CHECK (s.crossing_rate == doctest::Approx (1.0 / s.residence_time));
  CHECK (s.crossing_rate == doctest::Approx (0.0133576).epsilon (1e-5));
}

TEST_CASE ("crossings fall as zones grow")
{
  SystemParameters p = Defaults ();
  double last = 1e300;
  for (double r = 1000.0; r <= 6000.0; r += 1000.0)
    {
      p.mix_zone_radius = r;
      const double c = ComputeMobilityStats (p).expected_crossings;
      CHECK (c > 0.0);
      CHECK (c < last);
      last = c;
    }
}

TEST_CASE ("immobile user never crosses")
{
  SystemParameters p = Defaults ();
  p.mean_speed = 0.0;
  const MobilityStats s = ComputeMobilityStats (p);
  CHECK (std::isinf (s.residence_time));
  CHECK (s.crossing_rate == 0.0);
  for (Scheme sc : kAllSchemes)
    {
      const SchemeMetrics m = Evaluate (sc, p);
      CHECK (m.failure_prob == 0.0);
      CHECK (m.signaling_cost == 0.0);
    }
}

TEST_CASE ("pathological crossing count is a domain error")
{
  SystemParameters p = Defaults ();
  p.zones_per_row = 200;
  p.zones_per_col = 200;
  CHECK_THROWS_AS (ComputeMobilityStats (p), DomainError);
}

TEST_CASE ("prefix population")
{
  SystemParameters p = Defaults ();
  PrefixStats s = ComputePrefixStats (p, 1.0 / 240.0);
  CHECK (s.mean_active_prefixes == doctest::Approx (2.0));
  CHECK (s.handover_survival_prob == doctest::Approx (0.5));
  CHECK (s.mean_prefix_lifetime == doctest::Approx (480.0));

  s = ComputePrefixStats (p, 0.01204);
  CHECK (s.mean_active_prefixes == doctest::Approx (3.8896));
  CHECK (s.mean_active_prefixes == doctest::Approx (1.0 + s.mean_anchored_prefixes));

  s = ComputePrefixStats (p, 0.0);
  CHECK (s.mean_active_prefixes == 1.0);
  CHECK (s.handover_survival_prob == 0.0);
}

TEST_CASE ("geometric handover pmf")
{
  CHECK (GeometricHandoverPmf (0.5, 0) == 0.5);
  CHECK (GeometricHandoverPmf (0.0, 3) == 0.0);
  CHECK (GeometricHandoverPmf (0.5, 2) == 0.125);

  // Brute-force mean against mu / lambda for the survival prob of the model.
  const double mu = 0.01204;
  const double lambda = 1.0 / 240.0;
  const double pr = ComputePrefixStats (Defaults (), mu).handover_survival_prob;
  double total = 0.0;
  double mean = 0.0;
  for (unsigned h = 0; 1.0 - total > 1e-13; ++h)
    {
      const double a = GeometricHandoverPmf (pr, h);
      total += a;
      mean += h * a;
    }
  CHECK (total == doctest::Approx (1.0).epsilon (1e-12));
  CHECK (mean == doctest::Approx (mu / lambda).epsilon (1e-6));
}

TEST_CASE ("link delays")
{
  CHECK (LinkDelay ({80, 10e6, 2e-3, 1, 0.5}) == doctest::Approx (4.128e-3).epsilon (1e-12));
  CHECK (LinkDelay ({80, 100e6, 0.5e-3, 10, 0.0}) == doctest::Approx (5.064e-3).epsilon (1e-12));
  CHECK (LinkDelay ({80, 100e6, 0.5e-3, 0, 0.0}) == 0.0);

  const DelayTerms d = ComputeDelayTerms (Defaults ());
  CHECK (std::abs (d.mu_mz_control - 4.128e-3) < 1e-3 * kUs);
  CHECK (std::abs (d.mu_mz_data - 4.64e-3) < 1e-3 * kUs);
  CHECK (std::abs (d.lbs_mz_control - 5.064e-3) < 1e-3 * kUs);
  CHECK (std::abs (d.mz_mz_control - 2.532e-3) < 1e-3 * kUs);
  CHECK (std::abs (d.mz_mz_data - 2.66e-3) < 1e-3 * kUs);
  CHECK (std::abs (d.handover_initiate - 15.064e-3) < 1e-3 * kUs);
  CHECK (std::abs (d.predictive_window - 23.32e-3) < 1e-3 * kUs);
}

TEST_CASE ("handover latency per scheme")
{
  const SystemParameters p = Defaults ();
  CHECK (HandoverLatency (Scheme::PRE_FDMM, p) == doctest::Approx (0.130).epsilon (1e-12));
  CHECK (HandoverLatency (Scheme::RE_FDMM, p) == doctest::Approx (0.445064).epsilon (1e-12));
  CHECK (HandoverLatency (Scheme::DDMM, p) == doctest::Approx (0.488384).epsilon (1e-12));

  SystemParameters late = p;
  late.phi = 0.005; // window 23.32 ms exceeds phi
  CHECK (HandoverLatency (Scheme::PRE_FDMM, late)
         == doctest::Approx (0.130 + 0.02332 - 0.005).epsilon (1e-12));

  SystemParameters bad = p;
  bad.scan_time = 0.300;
  bad.auth_latency = 0.010;
  bad.l2_latency = 0.290; // attach + auth no longer outlasts the scan
  CHECK_THROWS_AS (HandoverLatency (Scheme::PRE_FDMM, bad), DomainError);
}

TEST_CASE ("failure probability")
{
  CHECK (HandoverFailureProb (0.3, 0.0) == 0.0);
  CHECK (HandoverFailureProb (std::log (2.0), 1.0) == doctest::Approx (0.5));
  CHECK (HandoverFailureProb (0.01204, 0.4884) == doctest::Approx (0.005863).epsilon (1e-3));
  double last = 0.0;
  for (double hl = 0.1; hl < 5.0; hl += 0.1)
    {
      const double pf = HandoverFailureProb (0.2, hl);
      CHECK (pf > last);
      CHECK (pf <= 1.0);
      last = pf;
    }
}

TEST_CASE ("session recovery")
{
  const SystemParameters p = Defaults ();
  CHECK (SessionRecovery (Scheme::PRE_FDMM, p) == doctest::Approx (0.13464).epsilon (1e-12));
  CHECK (SessionRecovery (Scheme::RE_FDMM, p) == doctest::Approx (0.452364).epsilon (1e-12));
  CHECK (SessionRecovery (Scheme::DDMM, p) == doctest::Approx (0.491556).epsilon (1e-12));
  for (Scheme s : kAllSchemes)
    {
      CHECK (SessionRecovery (s, p) >= HandoverLatency (s, p) - ComputeDelayTerms (p).mu_mz_control);
    }
}

TEST_CASE ("packet loss")
{
  SystemParameters p = Defaults ();
  CHECK (PacketLoss (Scheme::PRE_FDMM, p, 3.89) == 0.0);
  CHECK (BufferOverflowTime (p, 3.89) == doctest::Approx (500e3 / (50.0 * 3.89 * 400.0)));
  CHECK (PacketLoss (Scheme::DDMM, p, 3.89)
         == doctest::Approx (194.5 * 400.0 * 0.491556).epsilon (1e-9));
  CHECK (PacketLoss (Scheme::RE_FDMM, p, 1.0) == doctest::Approx (50.0 * 400.0 * 0.452364));

  p.buffer_size = 0.0;
  const double tb = 4.128e-3 + 0.130 - 2.66e-3;
  CHECK (BufferingInterval (p) == doctest::Approx (tb).epsilon (1e-12));
  CHECK (PacketLoss (Scheme::PRE_FDMM, p, 2.0) == doctest::Approx (100.0 * 400.0 * tb));
  CHECK_THROWS_AS (PacketLoss (Scheme::DDMM, p, 0.5), DomainError);
}

TEST_CASE ("signaling cost")
{
  const SystemParameters p = Defaults ();
  CHECK (SignalingCost (Scheme::DDMM, p, 0.01204, 4.0) == doctest::Approx (98.2464));
  CHECK (SignalingCost (Scheme::PRE_FDMM, p, 0.01204, 4.0) == doctest::Approx (117.5104));
  CHECK (SignalingCost (Scheme::RE_FDMM, p, 0.01204, 4.0) == doctest::Approx (2 * 0.01204 * 80 * 55));
  CHECK (SignalingCost (Scheme::PRE_FDMM, p, 0.01204, 1.0)
         == doctest::Approx (2 * 0.01204 * 80 * (10 + 1 + 5)));
  for (Scheme s : kAllSchemes)
    {
      CHECK (SignalingCost (s, p, 0.0, 3.0) == 0.0);
    }
  CHECK (TriangularSum (4.0) == 10.0);
  CHECK (TriangularSum (1.0) == 1.0);
}

TEST_CASE ("evaluation is pure")
{
  std::mt19937 rng (11);
  std::uniform_real_distribution<double> u (1000.0, 6000.0);
  for (int i = 0; i < 20; ++i)
    {
      SystemParameters p = Defaults ();
      p.mix_zone_radius = u (rng);
      for (Scheme s : kAllSchemes)
        {
          const SchemeMetrics a = Evaluate (s, p);
          const SchemeMetrics b = Evaluate (s, p);
          CHECK (a.handover_latency == b.handover_latency);
          CHECK (a.packet_loss == b.packet_loss);
          CHECK (a.signaling_cost == b.signaling_cost);
          CHECK (a.failure_prob >= 0.0);
          CHECK (a.failure_prob <= 1.0);
        }
    }
  CHECK (ParseScheme ("pre") == Scheme::PRE_FDMM);
  CHECK (ParseScheme ("RE_FDMM") == Scheme::RE_FDMM);
  CHECK_THROWS (ParseScheme ("mip"));
}
