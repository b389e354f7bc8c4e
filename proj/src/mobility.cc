/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/mobility.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddmm {

namespace {

struct Grid
{
  double sx;
  double sy;
  int nx; // intersections along x
  int ny;
};

Grid
MakeGrid (const SystemParameters &p)
{
  return {p.road_spacing_x, p.road_spacing_y,
          static_cast<int> (std::floor (p.area_x / p.road_spacing_x + 1e-9)) + 1,
          static_cast<int> (std::floor (p.area_y / p.road_spacing_y + 1e-9)) + 1};
}

Point
RandomIntersection (const Grid &g, std::mt19937_64 &rng)
{
  std::uniform_int_distribution<int> ix (0, g.nx - 1);
  std::uniform_int_distribution<int> iy (0, g.ny - 1);
  const int i = ix (rng);
  const int j = iy (rng);
  return {i * g.sx, j * g.sy};
}

TrajectoryEpoch
MakeEpoch (const Grid &g, double maxPause, Point src, std::mt19937_64 &rng)
{
  TrajectoryEpoch e;
  e.src = src;
  e.dst = RandomIntersection (g, rng);
  const bool horizontalFirst = std::bernoulli_distribution (0.5) (rng);
  e.pause = std::uniform_real_distribution<double> (0.0, maxPause) (rng);
  e.path.push_back (src);
  const Point corner = horizontalFirst ? Point{e.dst.x, src.y} : Point{src.x, e.dst.y};
  if (!(corner == src) && !(corner == e.dst))
    {
      e.path.push_back (corner);
    }
  if (!(e.dst == src))
    {
      e.path.push_back (e.dst);
    }
  e.length = std::abs (e.dst.x - src.x) + std::abs (e.dst.y - src.y);
  return e;
}

} // namespace

double
Distance (Point a, Point b)
{
  return std::hypot (a.x - b.x, a.y - b.y);
}

std::vector<TrajectoryEpoch>
GenTrajectory (const SystemParameters &p, std::uint64_t seed, std::size_t nEpochs)
{
  if (nEpochs == 0)
    {
      throw std::invalid_argument ("at least one epoch is required");
    }
  const Grid g = MakeGrid (p);
  std::mt19937_64 rng (seed);
  Point cursor = RandomIntersection (g, rng);
  std::vector<TrajectoryEpoch> out;
  out.reserve (nEpochs);
  for (std::size_t i = 0; i < nEpochs; ++i)
    {
      out.push_back (MakeEpoch (g, p.max_pause, cursor, rng));
      cursor = out.back ().dst;
    }
  return out;
}

double
Rss (const SystemParameters &p, double distance)
{
  if (!(distance > 0.0))
    {
      throw std::invalid_argument ("distance must be positive");
    }
  return p.rss_ref_power - 10.0 * p.path_loss_exponent * std::log10 (distance / p.rss_ref_distance);
}

double
RangeForRss (const SystemParameters &p, double dbm)
{
  return p.rss_ref_distance
         * std::pow (10.0, (p.rss_ref_power - dbm) / (10.0 * p.path_loss_exponent));
}

CsmWalker::CsmWalker (const SystemParameters &p, std::uint64_t seed)
  : m_speed (p.mean_speed),
    m_maxPause (p.max_pause),
    m_rng (seed)
{
  const Grid g = MakeGrid (p);
  m_spacingX = g.sx;
  m_spacingY = g.sy;
  m_roadsX = g.nx;
  m_roadsY = g.ny;
  m_cursor = RandomIntersection (g, m_rng);
}

TrajectoryEpoch
CsmWalker::Next ()
{
  const Grid g{m_spacingX, m_spacingY, m_roadsX, m_roadsY};
  TrajectoryEpoch e = MakeEpoch (g, m_maxPause, m_cursor, m_rng);
  m_cursor = e.dst;
  ++m_generated;
  return e;
}

double
CsmWalker::MoveTime (double length) const
{
  if (length == 0.0)
    {
      return 0.0;
    }
  return m_speed > 0.0 ? length / m_speed : std::numeric_limits<double>::infinity ();
}

const CsmWalker::Timed &
CsmWalker::Find (double t)
{
  if (m_epochs.empty ())
    {
      TrajectoryEpoch e = Next ();
      const double move = MoveTime (e.length);
      m_epochs.push_back ({e, 0.0, move, move + e.pause});
    }
  if (t < m_epochs.front ().start)
    {
      throw std::logic_error ("position queried before the forget watermark");
    }
  for (std::size_t i = 0;; ++i)
    {
      if (i == m_epochs.size ())
        {
          const double start = m_epochs.back ().end;
          TrajectoryEpoch e = Next ();
          const double move = MoveTime (e.length);
          m_epochs.push_back ({e, start, start + move, start + move + e.pause});
        }
      if (t < m_epochs[i].end)
        {
          return m_epochs[i];
        }
    }
}

Point
CsmWalker::PositionAt (double t)
{
  const Timed &e = Find (t);
  if (t >= e.moveEnd)
    {
      return e.epoch.dst;
    }
  double s = m_speed * (t - e.start);
  const auto &path = e.epoch.path;
  for (std::size_t i = 1; i < path.size (); ++i)
    {
      const double leg = Distance (path[i - 1], path[i]);
      if (s <= leg)
        {
          const double f = leg > 0.0 ? s / leg : 0.0;
          return {path[i - 1].x + f * (path[i].x - path[i - 1].x),
                  path[i - 1].y + f * (path[i].y - path[i - 1].y)};
        }
      s -= leg;
    }
  return e.epoch.dst;
}

void
CsmWalker::Forget (double t)
{
  while (m_epochs.size () > 1 && m_epochs.front ().end < t)
    {
      m_epochs.pop_front ();
    }
}

} // namespace ddmm
