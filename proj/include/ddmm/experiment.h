/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_EXPERIMENT_H
#define DDMM_EXPERIMENT_H

#include "ddmm/analytic.h"
#include "ddmm/parameters.h"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddmm {

/// Malformed command-line input (bad sweep syntax or bounds).
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class Metric
{
  LATENCY,
  FAILURE_PROB,
  SESSION_RECOVERY,
  PACKET_LOSS,
  SIGNALING_COST
};

inline constexpr std::array<Metric, 5> kAllMetrics = {
    Metric::LATENCY, Metric::FAILURE_PROB, Metric::SESSION_RECOVERY, Metric::PACKET_LOSS,
    Metric::SIGNALING_COST};

std::string_view MetricName (Metric m);
std::string_view MetricUnit (Metric m);
Metric ParseMetric (std::string_view name);

enum class RunMode
{
  ANALYTIC,
  SIMULATE,
  BOTH
};

std::string_view RunModeName (RunMode m);
RunMode ParseRunMode (std::string_view name);

/// "min:max:step" or "v1,v2,...". Throws UsageError.
std::vector<double> ParseSweepValues (std::string_view text);
/// "param=values". The parameter is returned in canonical form.
std::pair<std::string, std::vector<double>> ParseSweep (std::string_view text);
/// "1,2,3" or "first:last". Throws UsageError.
std::vector<std::uint64_t> ParseSeeds (std::string_view text);

struct SweepSpec
{
  SystemParameters base;
  std::string param = "none"; // "none": a single evaluation at base
  std::vector<double> values{0.0};
  std::vector<Scheme> schemes{kAllSchemes.begin (), kAllSchemes.end ()};
  std::vector<Metric> metrics{kAllMetrics.begin (), kAllMetrics.end ()};
  RunMode mode = RunMode::ANALYTIC;
  std::vector<std::uint64_t> seeds{1};
  double duration = 5000.0; // simulated seconds per run
  std::size_t fleet = 2;
  std::string trace_dir; // empty: no traces
};

/// Applies every sweep value to the base and validates it. Throws
/// ValidationError or UsageError.
void ValidateSweep (const SweepSpec &spec);

struct ResultRow
{
  std::string param;
  double value = 0.0;
  Scheme scheme = Scheme::DDMM;
  Metric metric = Metric::LATENCY;
  std::optional<double> analytic;
  std::optional<double> sim_mean;
  std::optional<double> sim_stderr;
  std::size_t n = 0;
  std::optional<double> rel_error;
  std::string note;
};

struct ResultTable
{
  std::string param;
  RunMode mode = RunMode::ANALYTIC;
  std::vector<ResultRow> rows;

  /// Rows for one (scheme, metric) in sweep order.
  std::vector<const ResultRow *> Series (Scheme s, Metric m) const;
  bool HasMetric (Metric m) const;
};

double AnalyticMetric (const SystemParameters &p, Scheme s, Metric m);

/// Evaluates the sweep. Simulation cells are run when the mode asks for them.
ResultTable RunSweep (const SweepSpec &spec);

std::string ToCsv (const ResultTable &t);
/// Throws UsageError on malformed input.
ResultTable FromCsv (const std::string &text);

/// One SVG document for the metric: swept value on x, one series per scheme.
std::string RenderSvg (const ResultTable &t, Metric m);

struct CheckResult
{
  std::string name;
  bool pass;
  std::string detail;
};

struct CheckTolerances
{
  double flat = 1e-12;   // s, absolute variation allowed for "constant"
  double affine = 1e-9;  // relative second difference for "affine"
  double sim_rel = 0.03; // relative error for simulated latency rows
};

/// Trend checks applicable to the table's swept parameter and metrics.
std::vector<CheckResult> TrendChecks (const ResultTable &t, const CheckTolerances &tol = {});

/// "name: PASS (detail)" lines; "no checks applicable" when the list is empty.
std::string FormatChecks (const std::vector<CheckResult> &checks);

struct FigureSpec
{
  std::string id; // "fig11" ...
  std::string title;
  std::string param;
  std::vector<double> values;
  std::vector<Metric> metrics;
};

/// Built-in trend studies, fig11 to fig19.
std::vector<FigureSpec> FigureSuite ();

} // namespace ddmm

#endif // DDMM_EXPERIMENT_H
