/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/experiment.h"

#include "ddmm/sim.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace ddmm {

namespace {

std::string
Lower (std::string_view s)
{
  std::string out (s);
  std::transform (out.begin (), out.end (), out.begin (),
                  [] (unsigned char c) { return static_cast<char> (std::tolower (c)); });
  return out;
}

std::string
Trim (std::string_view s)
{
  const auto b = s.find_first_not_of (" \t\r\n");
  if (b == std::string_view::npos)
    {
      return "";
    }
  const auto e = s.find_last_not_of (" \t\r\n");
  return std::string (s.substr (b, e - b + 1));
}

std::vector<std::string>
Split (std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;)
    {
      const auto pos = s.find (sep, start);
      out.emplace_back (s.substr (start, pos == std::string_view::npos ? pos : pos - start));
      if (pos == std::string_view::npos)
        {
          return out;
        }
      start = pos + 1;
    }
}

double
ToDouble (const std::string &s)
{
  std::size_t used = 0;
  double v = 0.0;
  try
    {
      v = std::stod (s, &used);
    }
  catch (const std::exception &)
    {
      throw UsageError ("not a number: '" + s + "'");
    }
  if (used != s.size ())
    {
      throw UsageError ("not a number: '" + s + "'");
    }
  return v;
}

std::string
Num (double v)
{
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string
Opt (const std::optional<double> &v)
{
  return v ? Num (*v) : "";
}

std::string_view
ParamUnit (const std::string &param)
{
  static const std::map<std::string, std::string_view> units = {
      {"mix_zone_radius", "m"}, {"mean_speed", "m/s"},       {"phi", "s"},
      {"foreign_prefix_lifetime", "s"}, {"buffer_size", "bytes"}, {"max_pause", "s"},
      {"area_x", "m"},          {"area_y", "m"},              {"l2_latency", "s"},
      {"auth_latency", "s"},    {"scan_time", "s"},           {"data_packet_size", "bytes"},
      {"control_packet_size", "bytes"}, {"session_packet_rate", "1/s"}};
  auto it = units.find (param);
  return it == units.end () ? "-" : it->second;
}

/// The y values a check looks at: analytic when present, simulated otherwise.
std::vector<std::pair<double, double>>
Curve (const ResultTable &t, Scheme s, Metric m)
{
  std::vector<std::pair<double, double>> out;
  for (const ResultRow *r : t.Series (s, m))
    {
      if (r->analytic)
        {
          out.emplace_back (r->value, *r->analytic);
        }
      else if (r->sim_mean)
        {
          out.emplace_back (r->value, *r->sim_mean);
        }
    }
  return out;
}

bool
HasAllSchemes (const ResultTable &t, Metric m)
{
  return std::all_of (kAllSchemes.begin (), kAllSchemes.end (),
                      [&] (Scheme s) { return !Curve (t, s, m).empty (); });
}

std::string
SchemeLabel (Scheme s)
{
  return std::string (SchemeName (s));
}

} // namespace

std::string_view
MetricName (Metric m)
{
  switch (m)
    {
    case Metric::LATENCY:
      return "latency";
    case Metric::FAILURE_PROB:
      return "failure_prob";
    case Metric::SESSION_RECOVERY:
      return "session_recovery";
    case Metric::PACKET_LOSS:
      return "packet_loss";
    case Metric::SIGNALING_COST:
      return "signaling_cost";
    }
  return "?";
}

std::string_view
MetricUnit (Metric m)
{
  switch (m)
    {
    case Metric::LATENCY:
    case Metric::SESSION_RECOVERY:
      return "s";
    case Metric::FAILURE_PROB:
      return "-";
    case Metric::PACKET_LOSS:
      return "bytes";
    case Metric::SIGNALING_COST:
      return "bytes/s";
    }
  return "-";
}

Metric
ParseMetric (std::string_view name)
{
  const std::string n = Lower (Trim (name));
  for (Metric m : kAllMetrics)
    {
      if (n == MetricName (m))
        {
          return m;
        }
    }
  throw UsageError ("unknown metric '" + std::string (name) + "'");
}

std::string_view
RunModeName (RunMode m)
{
  switch (m)
    {
    case RunMode::ANALYTIC:
      return "analytic";
    case RunMode::SIMULATE:
      return "simulate";
    case RunMode::BOTH:
      return "both";
    }
  return "?";
}

RunMode
ParseRunMode (std::string_view name)
{
  const std::string n = Lower (Trim (name));
  for (RunMode m : {RunMode::ANALYTIC, RunMode::SIMULATE, RunMode::BOTH})
    {
      if (n == RunModeName (m))
        {
          return m;
        }
    }
  throw UsageError ("unknown mode '" + std::string (name) + "'");
}

std::vector<double>
ParseSweepValues (std::string_view text)
{
  const std::string s = Trim (text);
  if (s.empty ())
    {
      throw UsageError ("empty sweep");
    }
  std::vector<double> out;
  if (s.find (':') != std::string::npos)
    {
      const auto parts = Split (s, ':');
      if (parts.size () != 3)
        {
          throw UsageError ("range sweeps are min:max:step");
        }
      const double lo = ToDouble (Trim (parts[0]));
      const double hi = ToDouble (Trim (parts[1]));
      const double step = ToDouble (Trim (parts[2]));
      if (!(step > 0.0) || !(lo <= hi) || !std::isfinite (lo) || !std::isfinite (hi))
        {
          throw UsageError ("sweep needs min <= max and step > 0");
        }
      const auto count = static_cast<std::size_t> (std::floor ((hi - lo) / step + 1e-9)) + 1;
      if (count > 100000)
        {
          throw UsageError ("sweep has too many points");
        }
      for (std::size_t i = 0; i < count; ++i)
        {
          double v = lo + static_cast<double> (i) * step;
          // Strip the drift of repeated decimal steps (0.1 + 0.2 ...).
          v = std::stod (Num (v));
          out.push_back (v);
        }
      return out;
    }
  for (const auto &part : Split (s, ','))
    {
      out.push_back (ToDouble (Trim (part)));
    }
  return out;
}

std::pair<std::string, std::vector<double>>
ParseSweep (std::string_view text)
{
  const auto eq = text.find ('=');
  if (eq == std::string_view::npos)
    {
      throw UsageError ("sweep is param=min:max:step or param=v1,v2,...");
    }
  return {CanonicalKey (Trim (text.substr (0, eq))), ParseSweepValues (text.substr (eq + 1))};
}

std::vector<std::uint64_t>
ParseSeeds (std::string_view text)
{
  const std::string s = Trim (text);
  std::vector<std::uint64_t> out;
  const auto toSeed = [] (const std::string &x) {
    try
      {
        std::size_t used = 0;
        const auto v = std::stoull (x, &used);
        if (used != x.size ())
          {
            throw UsageError ("bad seed '" + x + "'");
          }
        return static_cast<std::uint64_t> (v);
      }
    catch (const std::logic_error &)
      {
        throw UsageError ("bad seed '" + x + "'");
      }
  };
  if (s.find (':') != std::string::npos)
    {
      const auto parts = Split (s, ':');
      if (parts.size () != 2)
        {
          throw UsageError ("seed ranges are first:last");
        }
      const auto a = toSeed (Trim (parts[0]));
      const auto b = toSeed (Trim (parts[1]));
      if (a > b || b - a > 100000)
        {
          throw UsageError ("bad seed range");
        }
      for (auto v = a; v <= b; ++v)
        {
          out.push_back (v);
        }
      return out;
    }
  for (const auto &part : Split (s, ','))
    {
      out.push_back (toSeed (Trim (part)));
    }
  return out;
}

void
ValidateSweep (const SweepSpec &spec)
{
  if (spec.values.empty () || spec.schemes.empty ())
    {
      throw UsageError ("sweep needs at least one value and one scheme");
    }
  if (spec.mode != RunMode::ANALYTIC)
    {
      if (spec.seeds.empty () || !(spec.duration > 0.0) || spec.fleet == 0)
        {
          throw UsageError ("simulation needs seeds, a positive duration and a fleet");
        }
    }
  Validate (spec.base);
  if (spec.param == "none")
    {
      return;
    }
  for (double v : spec.values)
    {
      SystemParameters p = spec.base;
      SetParameter (p, spec.param, v);
      Validate (p);
    }
}

std::vector<const ResultRow *>
ResultTable::Series (Scheme s, Metric m) const
{
  std::vector<const ResultRow *> out;
  for (const auto &r : rows)
    {
      if (r.scheme == s && r.metric == m)
        {
          out.push_back (&r);
        }
    }
  return out;
}

bool
ResultTable::HasMetric (Metric m) const
{
  return std::any_of (rows.begin (), rows.end (), [m] (const ResultRow &r) { return r.metric == m; });
}

double
AnalyticMetric (const SystemParameters &p, Scheme s, Metric m)
{
  const SchemeMetrics e = Evaluate (s, p);
  switch (m)
    {
    case Metric::LATENCY:
      return e.handover_latency;
    case Metric::FAILURE_PROB:
      return e.failure_prob;
    case Metric::SESSION_RECOVERY:
      return e.session_recovery;
    case Metric::PACKET_LOSS:
      return e.packet_loss;
    case Metric::SIGNALING_COST:
      return e.signaling_cost;
    }
  return 0.0;
}

namespace {

struct SimCell
{
  std::vector<HandoverRecord> records;
  std::vector<double> signaling; // per seed
  std::size_t reactive_fallbacks = 0;
};

SimCell
Simulate (const SweepSpec &spec, const SystemParameters &p, double value, Scheme s)
{
  SimCell cell;
  for (std::uint64_t seed : spec.seeds)
    {
      SimOptions o;
      o.fleet = spec.fleet;
      std::ofstream trace;
      if (!spec.trace_dir.empty ())
        {
          const std::string path = spec.trace_dir + "/trace_" + spec.param + "_" + Num (value)
                                   + "_" + SchemeLabel (s) + "_" + std::to_string (seed)
                                   + ".tsv";
          trace.open (path);
          if (!trace)
            {
              throw UsageError ("cannot write " + path);
            }
          o.trace = &trace;
        }
      const SimReport r = Run (p, s, seed, spec.duration, o);
      cell.records.insert (cell.records.end (), r.records.begin (), r.records.end ());
      cell.signaling.push_back (r.SignalingRate ());
      if (s == Scheme::PRE_FDMM)
        {
          cell.reactive_fallbacks += r.CountMode (HandoverMode::REACTIVE);
        }
    }
  return cell;
}

std::pair<double, double>
MeanStderr (const std::vector<double> &xs)
{
  const double n = static_cast<double> (xs.size ());
  double mean = 0.0;
  for (double x : xs)
    {
      mean += x;
    }
  mean /= n;
  if (xs.size () < 2)
    {
      return {mean, 0.0};
    }
  double ss = 0.0;
  for (double x : xs)
    {
      ss += (x - mean) * (x - mean);
    }
  return {mean, std::sqrt (ss / (n - 1.0) / n)};
}

void
FillSimulated (ResultRow &row, const SimCell &cell)
{
  if (cell.records.empty ())
    {
      row.note = "insufficient events";
      return;
    }
  std::vector<double> xs;
  for (const auto &h : cell.records)
    {
      switch (row.metric)
        {
        case Metric::LATENCY:
          xs.push_back (h.latency);
          break;
        case Metric::FAILURE_PROB:
          xs.push_back (h.failed ? 1.0 : 0.0);
          break;
        case Metric::SESSION_RECOVERY:
          xs.push_back (h.session_recovery);
          break;
        case Metric::PACKET_LOSS:
          xs.push_back (h.bytes_lost);
          break;
        case Metric::SIGNALING_COST:
          break;
        }
    }
  if (row.metric == Metric::SIGNALING_COST)
    {
      xs = cell.signaling;
    }
  const auto [mean, se] = MeanStderr (xs);
  row.sim_mean = mean;
  row.sim_stderr = se;
  row.n = cell.records.size ();
  if (cell.reactive_fallbacks)
    {
      row.note = std::to_string (cell.reactive_fallbacks) + " reactive fallbacks";
    }
}

} // namespace

ResultTable
RunSweep (const SweepSpec &spec)
{
  ValidateSweep (spec);
  ResultTable t;
  t.param = spec.param;
  t.mode = spec.mode;

  std::vector<Scheme> schemes = spec.schemes;
  std::sort (schemes.begin (), schemes.end ());
  schemes.erase (std::unique (schemes.begin (), schemes.end ()), schemes.end ());
  std::vector<Metric> metrics = spec.metrics;
  std::sort (metrics.begin (), metrics.end ());
  metrics.erase (std::unique (metrics.begin (), metrics.end ()), metrics.end ());

  for (double v : spec.values)
    {
      SystemParameters p = spec.base;
      if (spec.param != "none")
        {
          SetParameter (p, spec.param, v);
        }
      for (Scheme s : schemes)
        {
          SimCell cell;
          if (spec.mode != RunMode::ANALYTIC)
            {
              cell = Simulate (spec, p, v, s);
            }
          for (Metric m : metrics)
            {
              ResultRow row;
              row.param = spec.param;
              row.value = v;
              row.scheme = s;
              row.metric = m;
              if (spec.mode != RunMode::SIMULATE)
                {
                  try
                    {
                      row.analytic = AnalyticMetric (p, s, m);
                    }
                  catch (const DomainError &e)
                    {
                      row.note = std::string ("analytic domain error: ") + e.what ();
                    }
                }
              if (spec.mode != RunMode::ANALYTIC)
                {
                  FillSimulated (row, cell);
                }
              if (row.analytic && row.sim_mean)
                {
                  row.rel_error = std::abs (*row.sim_mean - *row.analytic)
                                  / std::max (*row.analytic, 1e-12);
                }
              t.rows.push_back (std::move (row));
            }
        }
    }
  return t;
}

std::string
ToCsv (const ResultTable &t)
{
  std::ostringstream os;
  const bool sim = t.mode != RunMode::ANALYTIC;
  os << "param,value,scheme,metric,analytic";
  if (sim)
    {
      os << ",simulated_mean,simulated_stderr,n,rel_error,note";
    }
  os << '\n';
  for (const auto &r : t.rows)
    {
      os << r.param << ',' << Num (r.value) << ',' << SchemeName (r.scheme) << ','
         << MetricName (r.metric) << ',' << Opt (r.analytic);
      if (sim)
        {
          std::string note = r.note;
          std::replace (note.begin (), note.end (), ',', ';');
          os << ',' << Opt (r.sim_mean) << ',' << Opt (r.sim_stderr) << ','
             << (r.sim_mean ? std::to_string (r.n) : "") << ',' << Opt (r.rel_error) << ','
             << note;
        }
      os << '\n';
    }
  return os.str ();
}

ResultTable
FromCsv (const std::string &text)
{
  std::istringstream is (text);
  std::string line;
  if (!std::getline (is, line))
    {
      throw UsageError ("empty table");
    }
  line = Trim (line);
  ResultTable t;
  const std::string analyticHeader = "param,value,scheme,metric,analytic";
  const std::string simHeader
      = analyticHeader + ",simulated_mean,simulated_stderr,n,rel_error,note";
  bool sim = false;
  if (line == simHeader)
    {
      sim = true;
      t.mode = RunMode::BOTH;
    }
  else if (line != analyticHeader)
    {
      throw UsageError ("unrecognised table header");
    }
  bool anyAnalytic = false;
  int lineNo = 1;
  while (std::getline (is, line))
    {
      ++lineNo;
      if (Trim (line).empty ())
        {
          continue;
        }
      auto f = Split (Trim (line), ',');
      if (f.size () != (sim ? 10u : 5u))
        {
          throw UsageError ("line " + std::to_string (lineNo) + ": wrong field count");
        }
      const auto opt = [] (const std::string &s) -> std::optional<double> {
        if (s.empty ())
          {
            return std::nullopt;
          }
        return ToDouble (s);
      };
      ResultRow r;
      r.param = f[0];
      r.value = ToDouble (f[1]);
      try
        {
          r.scheme = ParseScheme (f[2]);
        }
      catch (const std::exception &)
        {
          throw UsageError ("line " + std::to_string (lineNo) + ": unknown scheme");
        }
      r.metric = ParseMetric (f[3]);
      r.analytic = opt (f[4]);
      anyAnalytic = anyAnalytic || r.analytic.has_value ();
      if (sim)
        {
          r.sim_mean = opt (f[5]);
          r.sim_stderr = opt (f[6]);
          r.n = f[7].empty () ? 0 : static_cast<std::size_t> (ToDouble (f[7]));
          r.rel_error = opt (f[8]);
          r.note = f[9];
        }
      if (t.param.empty ())
        {
          t.param = r.param;
        }
      t.rows.push_back (std::move (r));
    }
  if (sim && !anyAnalytic)
    {
      t.mode = RunMode::SIMULATE;
    }
  return t;
}

std::string
RenderSvg (const ResultTable &t, Metric m)
{
  if (t.rows.empty ())
    {
      throw UsageError ("cannot plot an empty table");
    }
  const double W = 640.0, H = 420.0, L = 80.0, R = 150.0, T = 40.0, B = 60.0;
  double xmin = std::numeric_limits<double>::infinity (), xmax = -xmin;
  double ymin = 0.0, ymax = -std::numeric_limits<double>::infinity ();
  for (const auto &r : t.rows)
    {
      if (r.metric != m)
        {
          continue;
        }
      xmin = std::min (xmin, r.value);
      xmax = std::max (xmax, r.value);
      for (const auto &y : {r.analytic, r.sim_mean})
        {
          if (y)
            {
              ymin = std::min (ymin, *y);
              ymax = std::max (ymax, *y);
            }
        }
    }
  if (!std::isfinite (xmin))
    {
      throw UsageError ("table has no rows for " + std::string (MetricName (m)));
    }
  if (!std::isfinite (ymax))
    {
      ymax = 1.0;
    }
  if (xmax == xmin)
    {
      const double pad = xmin == 0.0 ? 1.0 : std::abs (xmin) * 0.5;
      xmin -= pad;
      xmax += pad;
    }
  if (ymax <= ymin)
    {
      ymax = ymin + (ymin == 0.0 ? 1.0 : std::abs (ymin));
    }
  ymax += 0.05 * (ymax - ymin);
  const auto px = [&] (double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  const auto py = [&] (double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << MetricName (m) << " vs " << t.param << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i)
    {
      const double xv = xmin + (xmax - xmin) * i / 5.0;
      const double yv = ymin + (ymax - ymin) * i / 5.0;
      os << "<text x=\"" << px (xv) << "\" y=\"" << H - B + 16
         << "\" text-anchor=\"middle\">" << Num (std::stod (Num (xv))) << "</text>\n";
      char buf[32];
      std::snprintf (buf, sizeof buf, "%.4g", yv);
      os << "<text x=\"" << L - 6 << "\" y=\"" << py (yv) + 4 << "\" text-anchor=\"end\">" << buf
         << "</text>\n";
      os << "<line x1=\"" << L - 3 << "\" y1=\"" << py (yv) << "\" x2=\"" << L << "\" y2=\""
         << py (yv) << "\" stroke=\"black\"/>\n";
    }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
     << t.param << " (" << ParamUnit (t.param) << ")</text>\n";
  os << "<text transform=\"translate(18," << (T + H - B) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << MetricName (m) << " (" << MetricUnit (m)
     << ")</text>\n";

  static const std::map<Scheme, const char *> colours = {
      {Scheme::DDMM, "#d62728"}, {Scheme::PRE_FDMM, "#1f77b4"}, {Scheme::RE_FDMM, "#2ca02c"}};
  int legend = 0;
  for (Scheme s : kAllSchemes)
    {
      const auto series = t.Series (s, m);
      if (series.empty ())
        {
          continue;
        }
      const char *c = colours.at (s);
      const bool hasSim = std::any_of (series.begin (), series.end (),
                                       [] (const ResultRow *r) { return r->sim_mean.has_value (); });
      const auto draw = [&] (bool simulated, bool dashed) {
        std::string pts;
        for (const ResultRow *r : series)
          {
            const auto &y = simulated ? r->sim_mean : r->analytic;
            if (!y)
              {
                continue;
              }
            pts += Num (px (r->value)) + "," + Num (py (*y)) + " ";
            os << "<circle cx=\"" << px (r->value) << "\" cy=\"" << py (*y) << "\" r=\""
               << (dashed ? 2 : 3) << "\" fill=\"" << c << "\"/>\n";
          }
        if (!pts.empty ())
          {
            os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\""
               << (dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts
               << "\"/>\n";
          }
      };
      if (hasSim)
        {
          draw (true, false);
          draw (false, true);
        }
      else
        {
          draw (false, false);
        }
      const double ly = T + 10 + 18 * legend++;
      os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36
         << "\" y2=\"" << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">" << SchemeName (s)
         << (hasSim ? " (sim)" : "") << "</text>\n";
    }
  if (t.mode == RunMode::BOTH)
    {
      const double ly = T + 10 + 18 * legend;
      os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36
         << "\" y2=\"" << ly << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
      os << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">analytic</text>\n";
    }
  os << "</svg>\n";
  return os.str ();
}

namespace {

struct Checker
{
  const ResultTable &t;
  const CheckTolerances &tol;
  std::vector<CheckResult> out;

  void
  Add (std::string name, bool pass, std::string detail)
  {
    out.push_back ({std::move (name), pass, std::move (detail)});
  }

  void
  Flat (Scheme s, Metric m, const std::string &what)
  {
    const auto c = Curve (t, s, m);
    if (c.empty ())
      {
        return;
      }
    double lo = c.front ().second, hi = lo;
    for (const auto &[x, y] : c)
      {
        lo = std::min (lo, y);
        hi = std::max (hi, y);
      }
    Add (SchemeLabel (s) + " " + std::string (MetricName (m)) + " constant in " + what,
         hi - lo <= tol.flat, "variation " + Num (hi - lo));
  }

  /// dir > 0: rising, dir < 0: falling. strict demands a change at every step.
  void
  Monotone (Scheme s, Metric m, int dir, bool strict, const std::string &what)
  {
    const auto c = Curve (t, s, m);
    if (c.size () < 2)
      {
        return;
      }
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity ();
    for (std::size_t i = 1; i < c.size (); ++i)
      {
        const double step = dir * (c[i].second - c[i - 1].second);
        worst = std::min (worst, step);
        ok = ok && (strict ? step > 0.0 : step >= -tol.flat);
      }
    Add (SchemeLabel (s) + " " + std::string (MetricName (m)) + (dir > 0 ? " rises" : " falls")
             + " with " + what,
         ok, "smallest step " + Num (dir * worst));
  }

  void
  Zero (Scheme s, Metric m)
  {
    const auto c = Curve (t, s, m);
    if (c.empty ())
      {
        return;
      }
    double worst = 0.0;
    for (const auto &[x, y] : c)
      {
        worst = std::max (worst, std::abs (y));
      }
    Add (SchemeLabel (s) + " " + std::string (MetricName (m)) + " zero", worst <= tol.flat,
         "max " + Num (worst));
  }

  /// a < b at every shared sweep value (optionally only where x > xMin).
  void
  Below (Scheme a, Scheme b, Metric m, double xMin = -std::numeric_limits<double>::infinity ())
  {
    const auto ca = Curve (t, a, m);
    const auto cb = Curve (t, b, m);
    if (ca.empty () || ca.size () != cb.size ())
      {
        return;
      }
    bool ok = true;
    double margin = std::numeric_limits<double>::infinity ();
    for (std::size_t i = 0; i < ca.size (); ++i)
      {
        if (ca[i].first <= xMin)
          {
            continue;
          }
        margin = std::min (margin, cb[i].second - ca[i].second);
        ok = ok && ca[i].second < cb[i].second;
      }
    if (!std::isfinite (margin))
      {
        return;
      }
    Add (SchemeLabel (a) + " " + std::string (MetricName (m)) + " below " + SchemeLabel (b), ok,
         "smallest margin " + Num (margin));
  }

  void
  Ordering (Metric m, double xMin = -std::numeric_limits<double>::infinity ())
  {
    if (!HasAllSchemes (t, m))
      {
        return;
      }
    const auto pre = Curve (t, Scheme::PRE_FDMM, m);
    const auto re = Curve (t, Scheme::RE_FDMM, m);
    const auto dd = Curve (t, Scheme::DDMM, m);
    bool ok = pre.size () == re.size () && re.size () == dd.size ();
    double margin = std::numeric_limits<double>::infinity ();
    for (std::size_t i = 0; ok && i < pre.size (); ++i)
      {
        if (pre[i].first <= xMin)
          {
            continue;
          }
        margin = std::min ({margin, re[i].second - pre[i].second, dd[i].second - re[i].second});
        ok = pre[i].second < re[i].second && re[i].second < dd[i].second;
      }
    if (!std::isfinite (margin) && ok)
      {
        return;
      }
    const std::string suffix
        = m == Metric::LATENCY ? "" : " (" + std::string (MetricName (m)) + ")";
    Add ("ordering PRE<RE<DDMM" + suffix, ok,
         "smallest gap " + Num (margin));
  }

  std::vector<double>
  SecondDifferences (Scheme s, Metric m)
  {
    const auto c = Curve (t, s, m);
    std::vector<double> d;
    for (std::size_t i = 1; i + 1 < c.size (); ++i)
      {
        d.push_back (c[i + 1].second - 2.0 * c[i].second + c[i - 1].second);
      }
    return d;
  }

  void
  Affine (Scheme s, Metric m, const std::string &what)
  {
    const auto d = SecondDifferences (s, m);
    if (d.empty ())
      {
        return;
      }
    double worst = 0.0;
    for (double x : d)
      {
        worst = std::max (worst, std::abs (x));
      }
    Add (SchemeLabel (s) + " " + std::string (MetricName (m)) + " affine in " + what,
         worst <= tol.affine, "max |second difference| " + Num (worst));
  }

  void
  Convex (Scheme s, Metric m, const std::string &what)
  {
    const auto d = SecondDifferences (s, m);
    if (d.empty ())
      {
        return;
      }
    const double worst = *std::min_element (d.begin (), d.end ());
    Add (SchemeLabel (s) + " " + std::string (MetricName (m)) + " convex in " + what,
         worst > 0.0, "smallest second difference " + Num (worst));
  }

  void
  SimAgreement ()
  {
    for (Scheme s : kAllSchemes)
      {
        double worst = 0.0;
        bool any = false;
        for (const ResultRow *r : t.Series (s, Metric::LATENCY))
          {
            if (r->rel_error)
              {
                any = true;
                worst = std::max (worst, *r->rel_error);
              }
          }
        if (any)
          {
            Add (SchemeLabel (s) + " simulated latency matches closed form", worst <= tol.sim_rel,
                 "max relative error " + Num (worst));
          }
      }
  }
};

} // namespace

std::vector<CheckResult>
TrendChecks (const ResultTable &t, const CheckTolerances &tol)
{
  Checker c{t, tol, {}};
  const std::string &p = t.param;
  const bool lat = t.HasMetric (Metric::LATENCY);
  const bool loss = t.HasMetric (Metric::PACKET_LOSS);
  const bool fail = t.HasMetric (Metric::FAILURE_PROB);
  const bool sig = t.HasMetric (Metric::SIGNALING_COST);
  const bool sr = t.HasMetric (Metric::SESSION_RECOVERY);

  if (lat)
    {
      c.Ordering (Metric::LATENCY);
    }
  if (p == "mix_zone_radius")
    {
      if (lat)
        {
          c.Flat (Scheme::PRE_FDMM, Metric::LATENCY, "r");
        }
      if (lat && sr)
        {
          for (Scheme s : kAllSchemes)
            {
              const auto l = Curve (t, s, Metric::LATENCY);
              const auto r = Curve (t, s, Metric::SESSION_RECOVERY);
              if (l.empty () || l.size () != r.size ())
                {
                  continue;
                }
              double margin = std::numeric_limits<double>::infinity ();
              for (std::size_t i = 0; i < l.size (); ++i)
                {
                  margin = std::min (margin, r[i].second - l[i].second);
                }
              c.Add (SchemeLabel (s) + " session recovery above latency", margin > 0.0,
                     "smallest margin " + Num (margin));
            }
        }
      if (loss)
        {
          c.Zero (Scheme::PRE_FDMM, Metric::PACKET_LOSS);
        }
      for (Scheme s : kAllSchemes)
        {
          if (fail)
            {
              c.Monotone (s, Metric::FAILURE_PROB, -1, false, "r");
            }
          if (sig)
            {
              c.Monotone (s, Metric::SIGNALING_COST, -1, false, "r");
            }
        }
    }
  else if (p == "network_scale")
    {
      if (lat)
        {
          c.Flat (Scheme::DDMM, Metric::LATENCY, "xi");
          c.Flat (Scheme::PRE_FDMM, Metric::LATENCY, "xi");
          c.Monotone (Scheme::RE_FDMM, Metric::LATENCY, +1, false, "xi");
        }
      if (loss)
        {
          c.Zero (Scheme::PRE_FDMM, Metric::PACKET_LOSS);
          c.Monotone (Scheme::DDMM, Metric::PACKET_LOSS, +1, false, "xi");
          c.Monotone (Scheme::RE_FDMM, Metric::PACKET_LOSS, +1, false, "xi");
        }
      if (sig)
        {
          c.Flat (Scheme::DDMM, Metric::SIGNALING_COST, "xi");
          c.Monotone (Scheme::PRE_FDMM, Metric::SIGNALING_COST, +1, false, "xi");
          c.Monotone (Scheme::RE_FDMM, Metric::SIGNALING_COST, +1, false, "xi");
        }
    }
  else if (p == "wireless_fail_prob")
    {
      if (lat)
        {
          c.Flat (Scheme::PRE_FDMM, Metric::LATENCY, "p_f");
          c.Flat (Scheme::RE_FDMM, Metric::LATENCY, "p_f");
          c.Monotone (Scheme::DDMM, Metric::LATENCY, +1, true, "p_f");
        }
      if (loss)
        {
          c.Monotone (Scheme::DDMM, Metric::PACKET_LOSS, +1, false, "p_f");
          c.Monotone (Scheme::RE_FDMM, Metric::PACKET_LOSS, +1, false, "p_f");
        }
    }
  else if (p == "mean_speed")
    {
      if (fail)
        {
          for (Scheme s : kAllSchemes)
            {
              c.Monotone (s, Metric::FAILURE_PROB, +1, false, "speed");
            }
          c.Ordering (Metric::FAILURE_PROB, 0.0);
        }
      if (sig)
        {
          for (Scheme s : kAllSchemes)
            {
              c.Monotone (s, Metric::SIGNALING_COST, +1, false, "speed");
            }
          c.Below (Scheme::DDMM, Scheme::RE_FDMM, Metric::SIGNALING_COST, 0.0);
          c.Below (Scheme::DDMM, Scheme::PRE_FDMM, Metric::SIGNALING_COST, 0.0);
        }
    }
  else if (p == "phi")
    {
      if (lat)
        {
          c.Flat (Scheme::DDMM, Metric::LATENCY, "phi");
          c.Flat (Scheme::RE_FDMM, Metric::LATENCY, "phi");
          c.Monotone (Scheme::PRE_FDMM, Metric::LATENCY, -1, false, "phi");
        }
      if (loss)
        {
          c.Monotone (Scheme::PRE_FDMM, Metric::PACKET_LOSS, -1, false, "phi");
        }
    }
  else if (p == "foreign_prefix_lifetime")
    {
      if (sig)
        {
          c.Affine (Scheme::DDMM, Metric::SIGNALING_COST, "N_PR");
          c.Convex (Scheme::PRE_FDMM, Metric::SIGNALING_COST, "N_PR");
          c.Convex (Scheme::RE_FDMM, Metric::SIGNALING_COST, "N_PR");
          for (Scheme s : kAllSchemes)
            {
              c.Monotone (s, Metric::SIGNALING_COST, +1, true, "prefix lifetime");
            }
          c.Below (Scheme::RE_FDMM, Scheme::PRE_FDMM, Metric::SIGNALING_COST);
        }
    }
  if (t.mode == RunMode::BOTH)
    {
      c.SimAgreement ();
    }
  return c.out;
}

std::string
FormatChecks (const std::vector<CheckResult> &checks)
{
  if (checks.empty ())
    {
      return "no checks applicable\n";
    }
  std::string s;
  for (const auto &c : checks)
    {
      s += c.name + ": " + (c.pass ? "PASS" : "FAIL") + " (" + c.detail + ")\n";
    }
  return s;
}

std::vector<FigureSpec>
FigureSuite ()
{
  const std::vector<double> radius = ParseSweepValues ("1000:6000:1000");
  const std::vector<double> scale = ParseSweepValues ("0.1:1:0.1");
  return {
      {"fig11", "radius vs latency and session recovery", "mix_zone_radius", radius,
       {Metric::LATENCY, Metric::SESSION_RECOVERY}},
      {"fig12", "radius vs packet loss", "mix_zone_radius", radius, {Metric::PACKET_LOSS}},
      {"fig13", "radius vs failure probability and signaling", "mix_zone_radius", radius,
       {Metric::FAILURE_PROB, Metric::SIGNALING_COST}},
      {"fig14", "network scale vs latency and packet loss", "network_scale", scale,
       {Metric::LATENCY, Metric::PACKET_LOSS}},
      {"fig15", "network scale vs signaling", "network_scale", scale, {Metric::SIGNALING_COST}},
      {"fig16", "wireless failure vs latency and packet loss", "wireless_fail_prob",
       ParseSweepValues ("0.1:0.8:0.1"), {Metric::LATENCY, Metric::PACKET_LOSS}},
      {"fig17", "speed vs failure probability and signaling", "mean_speed",
       ParseSweepValues ("0:100:10"), {Metric::FAILURE_PROB, Metric::SIGNALING_COST}},
      {"fig18", "link-down delay vs latency and packet loss", "phi",
       ParseSweepValues ("0.005:0.035:0.005"), {Metric::LATENCY, Metric::PACKET_LOSS}},
      {"fig19", "prefix lifetime vs signaling", "foreign_prefix_lifetime",
       ParseSweepValues ("225:1500:255"), {Metric::SIGNALING_COST}},
  };
}

} // namespace ddmm
