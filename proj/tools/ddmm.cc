/*
 * SPDX-License-Identifier: GPL-2.0-only
 *
 * ddmm: analytic sweeps, simulations, plots and trend reports.
 */

#include "ddmm/experiment.h"
#include "ddmm/parameters.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ddmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheck = 3;

struct Options
{
  std::string scenario;
  std::vector<std::string> sets;
  std::string sweep;
  std::vector<std::string> schemes;
  std::vector<std::string> metrics;
  std::string seeds = "1";
  std::string mode;
  std::string out;
  std::string trace;
  double duration = 5000.0;
  std::size_t fleet = 2;
  std::vector<std::string> inputs;
  double flat_tol = 1e-12;
  double sim_tol = 0.03;
};

std::string
ReadFile (const std::string &path)
{
  std::ifstream in (path);
  if (!in)
    {
      throw UsageError ("cannot read " + path);
    }
  std::ostringstream ss;
  ss << in.rdbuf ();
  return ss.str ();
}

void
WriteFile (const std::filesystem::path &path, const std::string &text)
{
  std::ofstream out (path);
  if (!out)
    {
      throw UsageError ("cannot write " + path.string ());
    }
  out << text;
}

std::vector<std::string>
SplitList (const std::vector<std::string> &items)
{
  std::vector<std::string> out;
  for (const auto &item : items)
    {
      std::stringstream ss (item);
      std::string part;
      while (std::getline (ss, part, ','))
        {
          if (!part.empty ())
            {
              out.push_back (part);
            }
        }
    }
  return out;
}

SystemParameters
BaseParameters (const Options &o)
{
  SystemParameters p = o.scenario.empty () ? Defaults () : ParseScenario (ReadFile (o.scenario));
  for (const auto &kv : o.sets)
    {
      const auto eq = kv.find ('=');
      if (eq == std::string::npos)
        {
          throw UsageError ("--set expects key=value");
        }
      double v = 0.0;
      try
        {
          v = std::stod (kv.substr (eq + 1));
        }
      catch (const std::exception &)
        {
          throw UsageError ("--set value is not a number: " + kv);
        }
      SetParameter (p, kv.substr (0, eq), v);
    }
  Validate (p);
  return p;
}

SweepSpec
BuildSpec (const Options &o, RunMode defaultMode)
{
  SweepSpec s;
  s.base = BaseParameters (o);
  if (!o.sweep.empty ())
    {
      auto [param, values] = ParseSweep (o.sweep);
      s.param = param;
      s.values = values;
    }
  const auto schemes = SplitList (o.schemes);
  if (!schemes.empty ())
    {
      s.schemes.clear ();
      for (const auto &n : schemes)
        {
          try
            {
              s.schemes.push_back (ParseScheme (n));
            }
          catch (const std::invalid_argument &)
            {
              throw UsageError ("unknown scheme '" + n + "'");
            }
        }
    }
  const auto metrics = SplitList (o.metrics);
  if (!metrics.empty ())
    {
      s.metrics.clear ();
      for (const auto &n : metrics)
        {
          s.metrics.push_back (ParseMetric (n));
        }
    }
  s.mode = o.mode.empty () ? defaultMode : ParseRunMode (o.mode);
  s.seeds = ParseSeeds (o.seeds);
  s.duration = o.duration;
  s.fleet = o.fleet;
  s.trace_dir = o.trace;
  if (!s.trace_dir.empty ())
    {
      std::filesystem::create_directories (s.trace_dir);
    }
  return s;
}

void
Emit (const Options &o, const std::string &name, const std::string &text)
{
  if (o.out.empty ())
    {
      std::cout << text;
      return;
    }
  std::filesystem::create_directories (o.out);
  WriteFile (std::filesystem::path (o.out) / name, text);
}

CheckTolerances
Tolerances (const Options &o)
{
  CheckTolerances t;
  t.flat = o.flat_tol;
  t.sim_rel = o.sim_tol;
  return t;
}

int
CmdAnalytic (const Options &o)
{
  SweepSpec s = BuildSpec (o, RunMode::ANALYTIC);
  if (s.mode != RunMode::ANALYTIC)
    {
      throw UsageError ("the analytic command only runs the closed forms");
    }
  Emit (o, "analytic.csv", ToCsv (RunSweep (s)));
  return kExitOk;
}

int
CmdSimulate (const Options &o)
{
  SweepSpec s = BuildSpec (o, RunMode::SIMULATE);
  if (s.mode == RunMode::ANALYTIC)
    {
      throw UsageError ("simulate needs --mode simulate or both");
    }
  Emit (o, "simulate.csv", ToCsv (RunSweep (s)));
  return kExitOk;
}

std::vector<ResultTable>
LoadTables (const Options &o)
{
  if (o.inputs.empty ())
    {
      throw UsageError ("no input tables");
    }
  std::vector<ResultTable> tables;
  for (const auto &path : o.inputs)
    {
      tables.push_back (FromCsv (ReadFile (path)));
    }
  return tables;
}

int
CmdPlot (const Options &o)
{
  const std::string dir = o.out.empty () ? "." : o.out;
  std::filesystem::create_directories (dir);
  for (const auto &t : LoadTables (o))
    {
      if (t.rows.empty ())
        {
          throw UsageError ("cannot plot an empty table");
        }
      for (Metric m : kAllMetrics)
        {
          if (t.HasMetric (m))
            {
              const auto path = std::filesystem::path (dir)
                                / (t.param + "_" + std::string (MetricName (m)) + ".svg");
              WriteFile (path, RenderSvg (t, m));
              std::cout << path.string () << '\n';
            }
        }
    }
  return kExitOk;
}

int
CmdReport (const Options &o)
{
  bool ok = true;
  for (std::size_t i = 0; i < o.inputs.size (); ++i)
    {
      const ResultTable t = FromCsv (ReadFile (o.inputs[i]));
      const auto checks = TrendChecks (t, Tolerances (o));
      std::cout << "== " << o.inputs[i] << " (" << t.param << ")\n" << FormatChecks (checks);
      for (const auto &c : checks)
        {
          ok = ok && c.pass;
        }
    }
  if (o.inputs.empty ())
    {
      throw UsageError ("report needs at least one table");
    }
  return ok ? kExitOk : kExitCheck;
}

int
CmdFigures (const Options &o)
{
  const std::string dir = o.out.empty () ? "figures" : o.out;
  std::filesystem::create_directories (dir);
  Options base = o;
  base.sweep.clear ();
  const SweepSpec common = BuildSpec (base, RunMode::ANALYTIC);
  bool ok = true;
  std::ostringstream summary;
  for (const auto &fig : FigureSuite ())
    {
      SweepSpec s = common;
      s.param = fig.param;
      s.values = fig.values;
      s.metrics = fig.metrics;
      const ResultTable t = RunSweep (s);
      WriteFile (std::filesystem::path (dir) / (fig.id + ".csv"), ToCsv (t));
      for (Metric m : fig.metrics)
        {
          WriteFile (std::filesystem::path (dir)
                         / (fig.id + "_" + std::string (MetricName (m)) + ".svg"),
                     RenderSvg (t, m));
        }
      const auto checks = TrendChecks (t, Tolerances (o));
      bool figOk = true;
      for (const auto &c : checks)
        {
          figOk = figOk && c.pass;
        }
      ok = ok && figOk;
      summary << "== " << fig.id << " " << fig.title << ": " << (figOk ? "PASS" : "FAIL") << '\n'
              << FormatChecks (checks);
    }
  WriteFile (std::filesystem::path (dir) / "report.txt", summary.str ());
  std::cout << summary.str ();
  return ok ? kExitOk : kExitCheck;
}

void
AddSweepOptions (CLI::App *cmd, Options &o)
{
  cmd->add_option ("--sweep", o.sweep, "param=min:max:step or param=v1,v2,...");
  cmd->add_option ("--scheme", o.schemes, "DDMM, PRE_FDMM, RE_FDMM (comma separated)");
  cmd->add_option ("--metric", o.metrics,
                   "latency, failure_prob, session_recovery, packet_loss, signaling_cost");
  cmd->add_option ("--out", o.out, "output directory (default: stdout)");
}

void
AddSimOptions (CLI::App *cmd, Options &o)
{
  cmd->add_option ("--seeds", o.seeds, "seed list a,b,c or range first:last");
  cmd->add_option ("--mode", o.mode, "analytic, simulate or both");
  cmd->add_option ("--duration", o.duration, "simulated seconds per run");
  cmd->add_option ("--fleet", o.fleet, "mobile units per run");
  cmd->add_option ("--trace", o.trace, "directory for per-run event traces");
}

} // namespace

int
main (int argc, char **argv)
{
  CLI::App app{"Distributed and fast distributed mobility management experiments"};
  app.require_subcommand (1);
  app.fallthrough ();
  Options o;
  app.add_option ("--scenario", o.scenario, "scenario file (key = value [unit])");
  app.add_option ("--set", o.sets, "override one parameter, key=value in base units");

  auto *analytic = app.add_subcommand ("analytic", "evaluate the closed forms over a sweep");
  AddSweepOptions (analytic, o);
  analytic->add_option ("--mode", o.mode, "analytic");

  auto *simulate = app.add_subcommand ("simulate", "run the discrete-event simulator");
  AddSweepOptions (simulate, o);
  AddSimOptions (simulate, o);

  auto *plot = app.add_subcommand ("plot", "render SVG plots from result tables");
  plot->add_option ("tables", o.inputs, "CSV tables")->required ();
  plot->add_option ("--out", o.out, "output directory");

  auto *report = app.add_subcommand ("report", "trend checks on result tables");
  report->add_option ("tables", o.inputs, "CSV tables")->required ();
  report->add_option ("--flat-tolerance", o.flat_tol, "allowed variation for constant curves");
  report->add_option ("--sim-tolerance", o.sim_tol, "allowed relative simulation error");

  auto *figures = app.add_subcommand ("figures", "reproduce the figure trend studies");
  figures->add_option ("--out", o.out, "output directory (default: figures)");
  figures->add_option ("--scheme", o.schemes, "schemes to include");
  figures->add_option ("--flat-tolerance", o.flat_tol, "allowed variation for constant curves");
  AddSimOptions (figures, o);

  try
    {
      app.parse (argc, argv);
    }
  catch (const CLI::ParseError &e)
    {
      const int rc = app.exit (e);
      return rc == 0 ? kExitOk : kExitUsage;
    }

  try
    {
      if (*analytic)
        {
          return CmdAnalytic (o);
        }
      if (*simulate)
        {
          return CmdSimulate (o);
        }
      if (*plot)
        {
          return CmdPlot (o);
        }
      if (*report)
        {
          return CmdReport (o);
        }
      if (*figures)
        {
          return CmdFigures (o);
        }
    }
  catch (const UsageError &e)
    {
      std::cerr << "usage error: " << e.what () << '\n';
      return kExitUsage;
    }
  catch (const ValidationError &e)
    {
      std::cerr << "validation error: " << e.what () << '\n';
      return kExitValidation;
    }
  catch (const ParseError &e)
    {
      std::cerr << "scenario error: " << e.what () << '\n';
      return kExitValidation;
    }
  catch (const std::exception &e)
    {
      std::cerr << "error: " << e.what () << '\n';
      return kExitValidation;
    }
  return kExitUsage;
}
