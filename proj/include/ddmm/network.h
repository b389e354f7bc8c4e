/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_NETWORK_H
#define DDMM_NETWORK_H

#include "ddmm/nodes.h"

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ddmm {

struct TraceEntry
{
  NodeId from;
  NodeId to;
  MobilityMessage msg;
  bool dropped = false;
};

using Trace = std::vector<TraceEntry>;

/// "HI(3->4,T=0,D=1)" style rendering used by tests and the trace dump.
std::string Describe (const TraceEntry &e);

struct NetworkConfig
{
  std::size_t zones = 4;
  std::uint64_t pool_size = 64;
  std::size_t context_blob_size = 32;
};

/**
 * \brief Zero-delay harness wiring MU, zone and LBS state machines together.
 *
 * Messages are delivered in FIFO order until the network is idle. Every
 * send is recorded. Node ids: LBS = 0, zones = 1..n, MUs from 1000.
 */
class Network
{
public:
  static constexpr NodeId kLbs = 0;

  explicit Network (NetworkConfig cfg = {});

  NodeId ZoneNode (std::size_t index) const { return static_cast<NodeId> (index + 1); }
  /// Access node that maps to a zone in the directory.
  static std::uint32_t AnOf (NodeId zone) { return 100000 + zone; }

  MobileUnit &AddMu (MuId id, std::uint64_t llId);
  MobileUnit &Mu (MuId id);
  MixZone &Zone (NodeId node);
  const MixZone &Zone (NodeId node) const;
  LbsServer &Lbs () { return m_lbs; }
  const LbsServer &Lbs () const { return m_lbs; }
  std::size_t ZoneCount () const { return m_zones.size (); }

  /// Messages matching the filter are recorded but never delivered.
  void SetDropFilter (std::function<bool (const TraceEntry &)> f) { m_drop = std::move (f); }

  Trace InitialAttach (MuId mu, NodeId mz);
  /// Report of the target's AN through the serving zone, with HI retry and
  /// reactive fallback when the target never answers.
  Trace PredictiveHandover (MuId mu, NodeId target);
  Trace ReactiveHandover (MuId mu, NodeId newMz);
  Trace DdmmHandover (MuId mu, NodeId newMz);
  void ExpirePrefix (MuId mu, Prefix p);

  /// Throws std::logic_error naming the first broken invariant.
  void CheckInvariants () const;

private:
  void Post (Outbox out);
  void Post (Envelope e);
  Trace Drain ();

  NetworkConfig m_cfg;
  std::shared_ptr<AnDirectory> m_directory;
  LbsServer m_lbs;
  std::vector<MixZone> m_zones;
  std::vector<std::unique_ptr<MobileUnit>> m_mus;
  std::deque<Envelope> m_queue;
  Trace m_trace;
  std::function<bool (const TraceEntry &)> m_drop;
  double m_clock = 0.0;
};

} // namespace ddmm

#endif // DDMM_NETWORK_H
