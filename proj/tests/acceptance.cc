/*
 * SPDX-License-Identifier: GPL-2.0-only
 *
 * Acceptance report: one PASS/FAIL line per criterion.
 */

#include "ddmm/analytic.h"
#include "ddmm/experiment.h"
#include "ddmm/message.h"
#include "ddmm/mobility.h"
#include "ddmm/network.h"
#include "ddmm/sim.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace ddmm;

namespace {

struct Outcome
{
  bool pass = true;
  std::ostringstream detail;
  std::string failed;

  void
  Require (bool ok, const std::string &what)
  {
    if (!ok)
      {
        pass = false;
        failed += failed.empty () ? what : ", " + what;
      }
  }
};

std::string
Num (double v)
{
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.9g", v);
  return buf;
}

// Mean gap between two independent uniform picks on n points spaced s apart.
double
GridMeanGap (int n, double s)
{
  return s * (static_cast<double> (n) * n - 1.0) / (3.0 * n);
}

Outcome
GoldenValues ()
{
  Outcome o;
  const SystemParameters p = Defaults ();
  const MobilityStats m = ComputeMobilityStats (p);
  const DelayTerms d = ComputeDelayTerms (p);
  const double pre = HandoverLatency (Scheme::PRE_FDMM, p);
  const double re = HandoverLatency (Scheme::RE_FDMM, p);
  // Hand evaluation: (8 * 80 / 10e6 + 2e-3) / (1 - 0.5).
  const double dOracle = (8.0 * 80.0 / 10e6 + 2e-3) / 0.5;
  o.Require (m.pause_time == 12.5, "E(P) " + Num (m.pause_time));
  o.Require (std::abs (m.epoch_length - 20132.42) <= 0.01, "E(L) " + Num (m.epoch_length));
  o.Require (std::abs (d.mu_mz_control - 4.128e-3) <= 1e-6, "d_MU " + Num (d.mu_mz_control));
  o.Require (std::abs (d.mu_mz_control - dOracle) <= 1e-15, "d_MU oracle");
  o.Require (std::abs (pre - 0.130) <= 1e-15, "PRE " + Num (pre));
  o.Require (std::abs (re - 0.44506) <= 1e-4, "RE " + Num (re));
  o.detail << "E(P)=" << Num (m.pause_time) << " E(L)=" << Num (m.epoch_length)
           << " d_MU=" << Num (d.mu_mz_control) << " PRE=" << Num (pre) << " RE=" << Num (re);
  return o;
}

Outcome
GeometricPmf ()
{
  Outcome o;
  std::mt19937_64 rng (515);
  std::uniform_real_distribution<double> muDist (0.002, 0.05);
  std::uniform_real_distribution<double> lifeDist (225.0, 1500.0);
  double worstTotal = 0.0;
  double worstMean = 0.0;
  for (int i = 0; i < 50; ++i)
    {
      const double mu = muDist (rng);
      const double lambda = 1.0 / lifeDist (rng);
      SystemParameters p = Defaults ();
      p.foreign_prefix_decay_rate = lambda;
      const double survival = ComputePrefixStats (p, mu).handover_survival_prob;
      double total = 0.0;
      double mean = 0.0;
      for (unsigned h = 0; 1.0 - total > 1e-12; ++h)
        {
          const double a = GeometricHandoverPmf (survival, h);
          total += a;
          mean += h * a;
        }
      const double target = mu / lambda;
      worstTotal = std::max (worstTotal, std::abs (total - 1.0));
      worstMean = std::max (worstMean, std::abs (mean - target) / std::max (1.0, target));
    }
  o.Require (worstTotal <= 1e-9, "total");
  o.Require (worstMean <= 1e-9, "mean");
  o.detail << "50 pairs, max |total-1|=" << Num (worstTotal)
           << " max mean error=" << Num (worstMean);
  return o;
}

Outcome
SchemeOrdering ()
{
  Outcome o;
  double lo = 1e300;
  double hi = -1e300;
  double gap = 1e300;
  for (double r = 1000.0; r <= 6000.0 + 1e-9; r += 250.0)
    {
      SystemParameters p = Defaults ();
      p.mix_zone_radius = r;
      const double pre = Evaluate (Scheme::PRE_FDMM, p).handover_latency;
      const double re = Evaluate (Scheme::RE_FDMM, p).handover_latency;
      const double dd = Evaluate (Scheme::DDMM, p).handover_latency;
      lo = std::min (lo, pre);
      hi = std::max (hi, pre);
      gap = std::min ({gap, re - pre, dd - re});
    }
  o.Require (gap > 0.0, "ordering");
  o.Require (hi - lo < 1e-12, "PRE flat");
  o.detail << "r in [1000,6000]: min gap=" << Num (gap) << " s, PRE variation=" << Num (hi - lo);
  return o;
}

Outcome
ZeroPreLoss ()
{
  Outcome o;
  double worst = 0.0;
  for (double r = 1000.0; r <= 6000.0 + 1e-9; r += 250.0)
    {
      SystemParameters p = Defaults ();
      p.mix_zone_radius = r;
      worst = std::max (worst, Evaluate (Scheme::PRE_FDMM, p).packet_loss);
    }
  o.Require (worst == 0.0, "PRE loss");

  SystemParameters p = Defaults ();
  p.buffer_size = 0.0;
  const double tb = BufferingInterval (p);
  const double one = PacketLoss (Scheme::PRE_FDMM, p, 1.0);
  const double oracle = p.session_packet_rate * p.data_packet_size * tb;
  o.Require (std::abs (one - oracle) <= p.data_packet_size, "B=0 per prefix");
  const SchemeMetrics full = Evaluate (Scheme::PRE_FDMM, p);
  const double nPr
      = ComputePrefixStats (p, ComputeMobilityStats (p).crossing_rate).mean_active_prefixes;
  o.Require (std::abs (full.packet_loss - nPr * oracle) <= p.data_packet_size, "B=0 all prefixes");
  o.detail << "max PRE loss over r=" << Num (worst) << ", B=0: " << Num (one)
           << " B, lambda*L_d*T_buf=" << Num (oracle);
  return o;
}

Outcome
DeterministicSim ()
{
  Outcome o;
  SystemParameters p = Defaults ();
  p.wireless_fail_prob = 0.0;
  SimOptions opt;
  opt.fleet = 4;
  for (Scheme s : kAllSchemes)
    {
      const SimReport r = Run (p, s, 11, 8000.0, opt);
      double worst = 0.0;
      for (const auto &h : r.records)
        {
          worst = std::max (worst, std::abs (h.latency - h.analytic_latency));
        }
      o.Require (r.Count () >= 100, std::string (SchemeName (s)) + " count");
      o.Require (worst <= 1e-6, std::string (SchemeName (s)) + " error");
      o.detail << SchemeName (s) << ": n=" << r.Count () << " max err=" << Num (worst) << "  ";
    }
  return o;
}

Outcome
StochasticSim ()
{
  Outcome o;
  const SystemParameters p = Defaults ();
  SimOptions opt;
  opt.fleet = 4;
  const SimReport r = Run (p, Scheme::DDMM, 21, 25000.0, opt);
  const double closed = HandoverLatency (Scheme::DDMM, p);
  const double err = RelativeError (r.MeanLatency (), closed);
  o.Require (r.Count () >= 1000, "count");
  o.Require (err <= 0.03, "mean");
  o.detail << "n=" << r.Count () << " mean=" << Num (r.MeanLatency ())
           << " closed form=" << Num (closed) << " rel err=" << Num (err);
  return o;
}

Outcome
FailureProb ()
{
  Outcome o;
  const std::pair<double, double> cases[] = {
      {0.0133576, 0.488384}, {0.05, 0.130}, {0.2, 0.445064}, {1.0, 0.5}, {2.5, 1.0}};
  std::uint64_t seed = 70;
  for (const auto &[mu, hl] : cases)
    {
      const FailureValidation v = ValidateFailureProb (mu, hl, 10000, seed++);
      o.Require (v.within_3_sigma, "mu=" + Num (mu));
      o.detail << "(" << Num (mu) << "," << Num (hl) << "): " << Num (v.empirical) << " vs "
               << Num (v.analytic) << "  ";
    }
  return o;
}

Outcome
SignalingShape ()
{
  Outcome o;
  std::vector<double> n;
  std::vector<std::vector<double>> cost (3);
  bool preAboveRe = true;
  for (double life = 225.0; life <= 1500.0 + 1e-9; life += 25.0)
    {
      SystemParameters p = Defaults ();
      p.foreign_prefix_decay_rate = 1.0 / life;
      const double mu = ComputeMobilityStats (p).crossing_rate;
      n.push_back (ComputePrefixStats (p, mu).mean_active_prefixes);
      for (std::size_t k = 0; k < 3; ++k)
        {
          cost[k].push_back (Evaluate (kAllSchemes[k], p).signaling_cost);
        }
    }
  std::size_t dd = 0, pre = 0, re = 0;
  for (std::size_t k = 0; k < 3; ++k)
    {
      if (kAllSchemes[k] == Scheme::DDMM) dd = k;
      if (kAllSchemes[k] == Scheme::PRE_FDMM) pre = k;
      if (kAllSchemes[k] == Scheme::RE_FDMM) re = k;
    }
  // Second divided differences with respect to the active prefix count.
  auto second = [&] (const std::vector<double> &c, std::size_t i) {
    const double s1 = (c[i] - c[i - 1]) / (n[i] - n[i - 1]);
    const double s2 = (c[i + 1] - c[i]) / (n[i + 1] - n[i]);
    return (s2 - s1) / (n[i + 1] - n[i - 1]);
  };
  double ddWorst = 0.0;
  double fdMin = 1e300;
  for (std::size_t i = 1; i + 1 < n.size (); ++i)
    {
      ddWorst = std::max (ddWorst, std::abs (second (cost[dd], i)));
      fdMin = std::min ({fdMin, second (cost[pre], i), second (cost[re], i)});
    }
  for (std::size_t i = 0; i < n.size (); ++i)
    {
      preAboveRe = preAboveRe && cost[pre][i] > cost[re][i];
    }
  o.Require (ddWorst <= 1e-9, "DDMM affine");
  o.Require (fdMin > 0.0, "FDMM convex");
  o.Require (preAboveRe, "PRE above RE");
  o.detail << "N_PR " << Num (n.front ()) << ".." << Num (n.back ())
           << ", DDMM |2nd diff|<=" << Num (ddWorst) << ", FDMM min 2nd diff=" << Num (fdMin);
  return o;
}

using Lines = std::vector<std::string>;

Lines
Render (const Trace &t)
{
  Lines out;
  for (const auto &e : t)
    {
      out.push_back (Describe (e));
    }
  return out;
}

MobilityMessage
RandomMessage (std::mt19937_64 &rng)
{
  std::uniform_int_distribution<int> kind (1, 9);
  std::uniform_int_distribution<int> bit (0, 1);
  std::uniform_int_distribution<int> len (0, 40);
  MobilityMessage m;
  m.kind = static_cast<MessageKind> (kind (rng));
  m.mu_id = rng ();
  m.d_flag = bit (rng);
  m.nack = bit (rng);
  if (m.kind == MessageKind::HI || m.kind == MessageKind::HACK)
    {
      m.t_flag = static_cast<TargetType> (std::uniform_int_distribution<int> (0, 2) (rng));
    }
  for (int k = 1; k <= 6; ++k)
    {
      if (bit (rng))
        {
          MobilityOption opt{static_cast<OptionKind> (k), {}};
          const int nb = len (rng);
          for (int i = 0; i < nb; ++i)
            {
              opt.payload.push_back (static_cast<std::uint8_t> (rng ()));
            }
          m.options.push_back (opt);
        }
    }
  std::shuffle (m.options.begin (), m.options.end (), rng);
  return m;
}

Outcome
TraceConformance ()
{
  Outcome o;
  {
    Network net;
    net.AddMu (11, 0xabc);
    o.Require (Render (net.InitialAttach (11, 1))
                   == Lines{"RS(1000->1)", "PBU(1->0)", "PBA(0->1)", "RA(1->1000)"},
               "registration");
    o.Require (Render (net.PredictiveHandover (11, 2))
                   == Lines{"L2_REPORT(1000->1)", "HI(1->2,T=0,D=1)", "HACK(2->1,T=0,D=1)",
                            "HANDOVER_COMMAND(1->1000)", "PBU(2->0)", "PBA(0->2)"},
               "predictive first");
    o.Require (Render (net.PredictiveHandover (11, 3))
                   == Lines{"L2_REPORT(1000->2)", "HI(2->3,T=0,D=1)", "HACK(3->2,T=0,D=1)",
                            "HANDOVER_COMMAND(2->1000)", "PBU(3->0)", "PBU(0->1)", "PBA(0->3)",
                            "PBA(1->0)"},
               "predictive second");
  }
  {
    Network net;
    net.AddMu (11, 0xabc);
    net.InitialAttach (11, 1);
    o.Require (Render (net.ReactiveHandover (11, 2))
                   == Lines{"HI(2->1,T=2,D=1)", "HACK(1->2,T=2,D=1)", "PBU(2->0)", "PBA(0->2)"},
               "reactive first");
    o.Require (Render (net.ReactiveHandover (11, 3))
                   == Lines{"HI(3->2,T=2,D=1)", "HACK(2->3,T=2,D=1)", "HI(3->1,T=1,D=1)",
                            "PBU(3->0)", "HACK(1->3,T=1,D=1)", "PBA(0->3)"},
               "reactive second");
  }
  std::mt19937_64 rng (2024);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i)
    {
      const MobilityMessage m = RandomMessage (rng);
      if (!(Decode (Encode (m)) == m))
        {
          ++mismatches;
        }
    }
  o.Require (mismatches == 0, "codec");
  o.detail << "5 golden traces, 10000 round trips, " << mismatches << " mismatches";
  return o;
}

Outcome
TrajectoryStats ()
{
  Outcome o;
  const SystemParameters p = Defaults ();
  const auto epochs = GenTrajectory (p, 2024, 100000);
  double len = 0.0;
  double pause = 0.0;
  for (const auto &e : epochs)
    {
      len += e.length;
      pause += e.pause;
    }
  len /= static_cast<double> (epochs.size ());
  pause /= static_cast<double> (epochs.size ());
  const double el = ComputeMobilityStats (p).epoch_length;
  const double grid = GridMeanGap (181, 200.0) + GridMeanGap (121, 200.0);
  o.Require (std::abs (el - grid) <= 1e-6, "closed form vs grid");
  o.Require (std::abs (len - el) / el <= 0.02, "E(L)");
  o.Require (std::abs (pause - p.max_pause / 2.0) / (p.max_pause / 2.0) <= 0.01, "pause");
  o.detail << "E(L) " << Num (len) << " vs " << Num (el) << ", pause " << Num (pause) << " vs "
           << Num (p.max_pause / 2.0);
  return o;
}

Outcome
PfFlatness ()
{
  Outcome o;
  double preLo = 1e300, preHi = -1e300, reLo = 1e300, reHi = -1e300;
  bool ddRising = true;
  double prevDd = -1.0;
  for (int i = 1; i <= 8; ++i)
    {
      SystemParameters p = Defaults ();
      p.wireless_fail_prob = 0.1 * i;
      const double pre = HandoverLatency (Scheme::PRE_FDMM, p);
      const double re = HandoverLatency (Scheme::RE_FDMM, p);
      const double dd = HandoverLatency (Scheme::DDMM, p);
      preLo = std::min (preLo, pre);
      preHi = std::max (preHi, pre);
      reLo = std::min (reLo, re);
      reHi = std::max (reHi, re);
      ddRising = ddRising && dd > prevDd;
      prevDd = dd;
    }
  o.Require (preHi - preLo < 1e-12, "PRE flat");
  o.Require (reHi - reLo < 1e-12, "RE flat");
  o.Require (ddRising, "DDMM monotone");
  o.detail << "PRE variation=" << Num (preHi - preLo) << " RE variation=" << Num (reHi - reLo);
  return o;
}

struct Criterion
{
  int id;
  const char *title;
  std::function<Outcome ()> run;
};

} // namespace

int
main (int argc, char **argv)
{
  CLI::App app{"Acceptance criteria report"};
  std::vector<int> only;
  app.add_option ("--criterion", only, "run only these criteria (1-11)")->check (CLI::Range (1, 11));
  CLI11_PARSE (app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "closed-form golden values", GoldenValues},
      {2, "geometric handover pmf", GeometricPmf},
      {3, "scheme ordering over r", SchemeOrdering},
      {4, "zero predictive loss", ZeroPreLoss},
      {5, "simulation equals closed form at p_f=0", DeterministicSim},
      {6, "simulated DDMM latency at p_f=0.5", StochasticSim},
      {7, "failure probability validation", FailureProb},
      {8, "signaling growth shape", SignalingShape},
      {9, "protocol trace conformance", TraceConformance},
      {10, "trajectory generator statistics", TrajectoryStats},
      {11, "latency flat in p_f", PfFlatness},
  };

  bool ok = true;
  for (const auto &c : all)
    {
      if (!only.empty () && std::find (only.begin (), only.end (), c.id) == only.end ())
        {
          continue;
        }
      Outcome r;
      try
        {
          r = c.run ();
        }
      catch (const std::exception &e)
        {
          r.pass = false;
          r.detail << "exception: " << e.what ();
        }
      ok = ok && r.pass;
      std::string detail = r.detail.str ();
      if (!r.failed.empty ())
        {
          detail += " [failed: " + r.failed + "]";
        }
      std::printf ("criterion %2d: %s  %s: %s\n", c.id, r.pass ? "PASS" : "FAIL", c.title,
                   detail.c_str ());
    }
  return ok ? 0 : 1;
}
