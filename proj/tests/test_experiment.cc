/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/experiment.h"

#include <doctest.h>

#include <cmath>

using namespace ddmm;

namespace {

SweepSpec
Analytic (const std::string &sweep, std::vector<Metric> metrics = {kAllMetrics.begin (),
                                                                  kAllMetrics.end ()})
{
  SweepSpec s;
  s.base = Defaults ();
  auto [param, values] = ParseSweep (sweep);
  s.param = param;
  s.values = values;
  s.metrics = metrics;
  return s;
}

bool
Contains (const std::string &text, const std::string &needle)
{
  return text.find (needle) != std::string::npos;
}

} // namespace

TEST_CASE ("sweep syntax")
{
  CHECK (ParseSweepValues ("1000:6000:1000").size () == 6);
  CHECK (ParseSweepValues ("0.1:1:0.1").size () == 10);
  CHECK (ParseSweepValues ("3,1,2") == std::vector<double>{3, 1, 2});
  CHECK (ParseSweepValues ("5:5:1") == std::vector<double>{5});
  CHECK_THROWS_AS (ParseSweepValues ("6000:1000:1000"), UsageError);
  CHECK_THROWS_AS (ParseSweepValues ("1:2:0"), UsageError);
  CHECK_THROWS_AS (ParseSweepValues ("1:2"), UsageError);
  CHECK_THROWS_AS (ParseSweepValues (""), UsageError);
  CHECK_THROWS_AS (ParseSweepValues ("a,b"), UsageError);

  const auto [param, values] = ParseSweep ("r=1000,2000");
  CHECK (param == "mix_zone_radius");
  CHECK (values.size () == 2);
  CHECK_THROWS_AS (ParseSweep ("r"), UsageError);

  CHECK (ParseSeeds ("1:4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK (ParseSeeds ("7,9") == std::vector<std::uint64_t>{7, 9});
  CHECK_THROWS_AS (ParseSeeds ("4:1"), UsageError);
  CHECK_THROWS_AS (ParseSeeds ("x"), UsageError);

  CHECK (ParseMetric ("latency") == Metric::LATENCY);
  CHECK_THROWS_AS (ParseMetric ("throughput"), UsageError);
  CHECK (ParseRunMode ("both") == RunMode::BOTH);
}

TEST_CASE ("out-of-range sweep values are rejected before running")
{
  SweepSpec s = Analytic ("xi=0:1:0.5");
  CHECK_THROWS_AS (RunSweep (s), ValidationError);
  s = Analytic ("r=-1,1000");
  CHECK_THROWS_AS (RunSweep (s), ValidationError);
}

TEST_CASE ("radius sweep at defaults")
{
  const ResultTable t = RunSweep (Analytic ("r=1000:6000:1000", {Metric::LATENCY}));
  REQUIRE (t.rows.size () == 18);
  for (const auto *row : t.Series (Scheme::PRE_FDMM, Metric::LATENCY))
    {
      CHECK (*row->analytic == doctest::Approx (0.130).epsilon (1e-9));
    }
  for (const auto *row : t.Series (Scheme::DDMM, Metric::LATENCY))
    {
      CHECK (*row->analytic == doctest::Approx (0.488384).epsilon (1e-9));
    }
  const auto checks = TrendChecks (t);
  const std::string text = FormatChecks (checks);
  CHECK (Contains (text, "ordering PRE<RE<DDMM: PASS"));
  for (const auto &c : checks)
    {
      CAPTURE (c.name);
      CHECK (c.pass);
    }
}

TEST_CASE ("a static fleet never fails a handover")
{
  const ResultTable t = RunSweep (Analytic ("v=0", {Metric::FAILURE_PROB, Metric::SIGNALING_COST}));
  REQUIRE (t.rows.size () == 6);
  for (const auto &row : t.rows)
    {
      CHECK (*row.analytic == 0.0);
    }
}

TEST_CASE ("longer prefix lifetimes raise FDMM signaling faster")
{
  const ResultTable t =
      RunSweep (Analytic ("foreign_prefix_lifetime=225:1500:255", {Metric::SIGNALING_COST}));
  const auto ddmm = t.Series (Scheme::DDMM, Metric::SIGNALING_COST);
  const auto pre = t.Series (Scheme::PRE_FDMM, Metric::SIGNALING_COST);
  const auto re = t.Series (Scheme::RE_FDMM, Metric::SIGNALING_COST);
  REQUIRE (ddmm.size () == 6);
  const double dDdmm = *ddmm.back ()->analytic - *ddmm.front ()->analytic;
  CHECK (*pre.back ()->analytic - *pre.front ()->analytic > dDdmm);
  CHECK (*re.back ()->analytic - *re.front ()->analytic > dDdmm);
  for (const auto &c : TrendChecks (t))
    {
      CAPTURE (c.name);
      CHECK (c.pass);
    }
}

TEST_CASE ("csv round trip")
{
  const ResultTable t = RunSweep (Analytic ("p_f=0.1,0.5"));
  const std::string csv = ToCsv (t);
  CHECK (csv.rfind ("param,value,scheme,metric,analytic\n", 0) == 0);
  const ResultTable back = FromCsv (csv);
  CHECK (back.param == t.param);
  REQUIRE (back.rows.size () == t.rows.size ());
  for (std::size_t i = 0; i < t.rows.size (); ++i)
    {
      CHECK (back.rows[i].scheme == t.rows[i].scheme);
      CHECK (back.rows[i].metric == t.rows[i].metric);
      CHECK (*back.rows[i].analytic == doctest::Approx (*t.rows[i].analytic).epsilon (1e-11));
    }
  CHECK (ToCsv (back) == csv);
  CHECK_THROWS_AS (FromCsv ("nonsense\n1,2\n"), UsageError);
  CHECK_THROWS_AS (FromCsv (""), UsageError);
}

TEST_CASE ("simulated cells agree with the closed forms on a lossless radio")
{
  SweepSpec s = Analytic ("p_f=0", {Metric::LATENCY, Metric::SESSION_RECOVERY});
  s.mode = RunMode::BOTH;
  s.seeds = {1, 2, 3};
  s.duration = 1500.0;
  const ResultTable t = RunSweep (s);
  REQUIRE (t.rows.size () == 6);
  for (const auto &row : t.rows)
    {
      CAPTURE (SchemeName (row.scheme));
      REQUIRE (row.sim_mean.has_value ());
      CHECK (row.n > 0);
      CHECK (*row.rel_error < 1e-9);
    }
  CHECK (ToCsv (t) == ToCsv (RunSweep (s)));
  CHECK (Contains (ToCsv (t), "simulated_mean"));
  const ResultTable back = FromCsv (ToCsv (t));
  CHECK (back.mode == RunMode::BOTH);
  CHECK (back.rows[0].n == t.rows[0].n);
}

TEST_CASE ("plots")
{
  ResultTable empty;
  empty.param = "mix_zone_radius";
  CHECK_THROWS_AS (RenderSvg (empty, Metric::LATENCY), UsageError);

  const ResultTable one = RunSweep (Analytic ("r=2000", {Metric::LATENCY}));
  const std::string svg = RenderSvg (one, Metric::LATENCY);
  CHECK (svg.rfind ("<svg", 0) == 0);
  CHECK (Contains (svg, "</svg>"));
  CHECK (Contains (svg, "DDMM"));
  CHECK_THROWS_AS (RenderSvg (one, Metric::PACKET_LOSS), UsageError);
}

TEST_CASE ("report wording")
{
  CHECK (FormatChecks ({}) == "no checks applicable\n");

  const ResultTable pf = RunSweep (Analytic ("p_f=0.1:0.8:0.1", {Metric::LATENCY}));
  CheckTolerances loose;
  loose.flat = 1e-3;
  bool preFlat = false;
  for (const auto &c : TrendChecks (pf, loose))
    {
      if (c.name == "PRE_FDMM latency constant in p_f")
        {
          preFlat = c.pass;
        }
    }
  CHECK (preFlat);
  CheckTolerances tight;
  bool anyFail = false;
  for (const auto &c : TrendChecks (pf, tight))
    {
      anyFail = anyFail || !c.pass;
    }
  CHECK (anyFail);
  CHECK (Contains (FormatChecks (TrendChecks (pf, tight)), ": FAIL"));
}

TEST_CASE ("figure suite covers the trend studies")
{
  const auto suite = FigureSuite ();
  REQUIRE (suite.size () == 9);
  CHECK (suite.front ().id == "fig11");
  CHECK (suite.back ().id == "fig19");
  CHECK (suite.back ().values.size () == 6);
}
