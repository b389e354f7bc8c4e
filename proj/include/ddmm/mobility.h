/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_MOBILITY_H
#define DDMM_MOBILITY_H

#include "ddmm/parameters.h"

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

namespace ddmm {

struct Point
{
  double x = 0.0;
  double y = 0.0;
  bool operator== (const Point &) const = default;
};

double Distance (Point a, Point b);

/// One source-to-destination cycle of the City Section model.
struct TrajectoryEpoch
{
  Point src;
  Point dst;
  std::vector<Point> path; // src, optional corner, dst
  double length = 0.0;     // m
  double pause = 0.0;      // s, spent at dst
};

/**
 * Epochs on the road grid: destinations uniform over intersections, one
 * horizontal and one vertical leg in seeded order, pause Uniform[0, U_max].
 */
std::vector<TrajectoryEpoch> GenTrajectory (const SystemParameters &p, std::uint64_t seed,
                                            std::size_t nEpochs);

/// Received power in dBm at distance d (> 0) under the log-distance model.
double Rss (const SystemParameters &p, double distance);

/// Distance at which the received power falls to the given level.
double RangeForRss (const SystemParameters &p, double dbm);

/**
 * \brief Position of one MU along an endless CSM trajectory.
 *
 * Epochs are generated lazily. Queries may go back in time as far as the
 * last Forget() watermark.
 */
class CsmWalker
{
public:
  CsmWalker (const SystemParameters &p, std::uint64_t seed);

  Point PositionAt (double t);
  /// Drops epochs that end before t.
  void Forget (double t);
  std::size_t EpochsStarted () const { return m_generated; }

private:
  struct Timed
  {
    TrajectoryEpoch epoch;
    double start;
    double moveEnd;
    double end;
  };

  TrajectoryEpoch Next ();
  double MoveTime (double length) const;
  const Timed &Find (double t);

  double m_speed;
  double m_maxPause;
  double m_spacingX;
  double m_spacingY;
  int m_roadsX;
  int m_roadsY;
  std::mt19937_64 m_rng;
  Point m_cursor;
  std::deque<Timed> m_epochs;
  std::size_t m_generated = 0;
};

} // namespace ddmm

#endif // DDMM_MOBILITY_H
