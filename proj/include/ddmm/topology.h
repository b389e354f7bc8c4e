/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_TOPOLOGY_H
#define DDMM_TOPOLOGY_H

#include "ddmm/binding.h"
#include "ddmm/mobility.h"
#include "ddmm/nodes.h"
#include "ddmm/parameters.h"

#include <vector>

namespace ddmm {

struct ZoneInfo
{
  NodeId id;
  int col;
  int row;
  Point center;
  double radius;
  std::uint64_t pool_base;
  std::uint64_t pool_size;
};

/**
 * \brief Mix zones laid out on an offset-row (brick) hexagonal lattice over
 * the analysis area, with one access node at every road intersection.
 *
 * Zone ids run from 1; access-node ids run from 1 in row-major order over
 * the intersections. Odd rows are shifted half a pitch to the right.
 */
class MixZoneTopology
{
public:
  static constexpr std::uint64_t kPoolSize = 1ULL << 24;

  std::size_t ZoneCount () const { return m_zones.size (); }
  const ZoneInfo &Zone (NodeId id) const { return m_zones.at (id - 1); }
  const std::vector<ZoneInfo> &Zones () const { return m_zones; }
  const std::vector<NodeId> &Neighbours (NodeId id) const { return m_adjacency.at (id - 1); }

  /// Zone whose centre is closest to the point.
  NodeId ZoneAt (Point pt) const;
  int LatticeDistance (NodeId a, NodeId b) const;
  /// h(z1, z2) = hops_mz_mz x lattice distance; 0 on the diagonal.
  int Hops (NodeId a, NodeId b) const { return m_hopsMzMz * LatticeDistance (a, b); }
  int HopsToLbs (NodeId) const { return m_hopsLbs; }

  std::size_t AnCount () const { return m_anZone.size (); }
  std::uint32_t NearestAn (Point pt) const;
  Point AnPosition (std::uint32_t an) const;
  NodeId AnZone (std::uint32_t an) const { return m_anZone.at (an - 1); }
  std::shared_ptr<const AnDirectory> Directory () const { return m_directory; }

  /// Every road point hears some access node at or above S_min.
  bool CoversRoads (const SystemParameters &p) const;

  friend MixZoneTopology BuildTopology (const SystemParameters &p);

private:
  double m_dx = 0.0;
  double m_dy = 0.0;
  int m_cols = 0;
  int m_rows = 0;
  double m_sx = 0.0;
  double m_sy = 0.0;
  int m_anCols = 0;
  int m_anRows = 0;
  int m_hopsMzMz = 0;
  int m_hopsLbs = 0;
  std::vector<ZoneInfo> m_zones;
  std::vector<std::vector<NodeId>> m_adjacency;
  std::vector<NodeId> m_anZone;
  std::shared_ptr<AnDirectory> m_directory;
};

/// Throws ValidationError on invalid parameters.
MixZoneTopology BuildTopology (const SystemParameters &p);

} // namespace ddmm

#endif // DDMM_TOPOLOGY_H
