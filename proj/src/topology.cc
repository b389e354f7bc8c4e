/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/topology.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace ddmm {

namespace {

/// Cube coordinates of an odd-r offset cell.
void
ToCube (int col, int row, int &x, int &z)
{
  x = col - (row - (row & 1)) / 2;
  z = row;
}

} // namespace

MixZoneTopology
BuildTopology (const SystemParameters &p)
{
  Validate (p);
  const TopologyCounts c = DeriveTopologyCounts (p);
  MixZoneTopology t;
  t.m_cols = c.zones_per_row;
  t.m_rows = c.zones_per_col;
  t.m_dx = p.area_x / t.m_cols;
  t.m_dy = p.area_y / t.m_rows;
  t.m_hopsMzMz = p.EffectiveHopsMzMz ();
  t.m_hopsLbs = p.hops_lbs_mz;

  for (int row = 0; row < t.m_rows; ++row)
    {
      for (int col = 0; col < t.m_cols; ++col)
        {
          const NodeId id = static_cast<NodeId> (t.m_zones.size () + 1);
          const double shift = (t.m_cols > 1) ? ((row & 1) ? 0.75 : 0.25) : 0.5;
          t.m_zones.push_back ({id, col, row, {(col + shift) * t.m_dx, (row + 0.5) * t.m_dy},
                                p.mix_zone_radius, static_cast<std::uint64_t> (id) << 32,
                                MixZoneTopology::kPoolSize});
        }
    }
  if (t.m_zones.empty ())
    {
      throw ValidationError ("mix_zone_radius", "topology has no zones");
    }

  t.m_adjacency.resize (t.m_zones.size ());
  for (const auto &a : t.m_zones)
    {
      for (const auto &b : t.m_zones)
        {
          if (a.id != b.id && t.LatticeDistance (a.id, b.id) == 1)
            {
              t.m_adjacency[a.id - 1].push_back (b.id);
            }
        }
    }

  t.m_sx = p.road_spacing_x;
  t.m_sy = p.road_spacing_y;
  t.m_anCols = static_cast<int> (std::floor (p.area_x / p.road_spacing_x + 1e-9)) + 1;
  t.m_anRows = static_cast<int> (std::floor (p.area_y / p.road_spacing_y + 1e-9)) + 1;
  t.m_directory = std::make_shared<AnDirectory> ();
  t.m_anZone.reserve (static_cast<std::size_t> (t.m_anCols) * t.m_anRows);
  for (int j = 0; j < t.m_anRows; ++j)
    {
      for (int i = 0; i < t.m_anCols; ++i)
        {
          const auto an = static_cast<std::uint32_t> (t.m_anZone.size () + 1);
          const NodeId z = t.ZoneAt ({i * t.m_sx, j * t.m_sy});
          t.m_anZone.push_back (z);
          (*t.m_directory)[an] = z;
        }
    }
  return t;
}

NodeId
MixZoneTopology::ZoneAt (Point pt) const
{
  const int row0 = static_cast<int> (std::floor (pt.y / m_dy));
  NodeId best = 0;
  double bestD = std::numeric_limits<double>::infinity ();
  for (int row = row0 - 1; row <= row0 + 1; ++row)
    {
      if (row < 0 || row >= m_rows)
        {
          continue;
        }
      const int col0 = static_cast<int> (std::floor (pt.x / m_dx));
      for (int col = col0 - 1; col <= col0 + 1; ++col)
        {
          if (col < 0 || col >= m_cols)
            {
              continue;
            }
          const ZoneInfo &z = m_zones[static_cast<std::size_t> (row) * m_cols + col];
          const double d = Distance (pt, z.center);
          if (d < bestD)
            {
              bestD = d;
              best = z.id;
            }
        }
    }
  if (best == 0)
    {
      // Outside the area: clamp onto the nearest edge cell.
      const int row = std::clamp (row0, 0, m_rows - 1);
      const int col = std::clamp (static_cast<int> (std::floor (pt.x / m_dx)), 0, m_cols - 1);
      best = m_zones[static_cast<std::size_t> (row) * m_cols + col].id;
    }
  return best;
}

int
MixZoneTopology::LatticeDistance (NodeId a, NodeId b) const
{
  const ZoneInfo &za = Zone (a);
  const ZoneInfo &zb = Zone (b);
  int ax, az, bx, bz;
  ToCube (za.col, za.row, ax, az);
  ToCube (zb.col, zb.row, bx, bz);
  const int dx = ax - bx;
  const int dz = az - bz;
  const int dy = -dx - dz;
  return std::max ({std::abs (dx), std::abs (dy), std::abs (dz)});
}

std::uint32_t
MixZoneTopology::NearestAn (Point pt) const
{
  const int i = std::clamp (static_cast<int> (std::lround (pt.x / m_sx)), 0, m_anCols - 1);
  const int j = std::clamp (static_cast<int> (std::lround (pt.y / m_sy)), 0, m_anRows - 1);
  return static_cast<std::uint32_t> (j * m_anCols + i + 1);
}

Point
MixZoneTopology::AnPosition (std::uint32_t an) const
{
  const int idx = static_cast<int> (an) - 1;
  return {(idx % m_anCols) * m_sx, (idx / m_anCols) * m_sy};
}

bool
MixZoneTopology::CoversRoads (const SystemParameters &p) const
{
  // The farthest road point from every intersection is the midpoint of a
  // block edge.
  const double worst = std::max (m_sx, m_sy) / 2.0;
  if (worst > 0.0 && Rss (p, worst) < p.rss_min)
    {
      return false;
    }
  return std::all_of (m_anZone.begin (), m_anZone.end (), [this] (NodeId z) {
    return z >= 1 && z <= m_zones.size ();
  });
}

} // namespace ddmm
