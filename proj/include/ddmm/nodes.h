/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_NODES_H
#define DDMM_NODES_H

#include "ddmm/binding.h"
#include "ddmm/message.h"

#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace ddmm {

struct Envelope
{
  NodeId from;
  NodeId to;
  MobilityMessage msg;
};

using Outbox = std::vector<Envelope>;

/// Access-node id to mix-zone lookup, shared read-only by all zones.
using AnDirectory = std::unordered_map<std::uint32_t, NodeId>;

/**
 * \brief Mobile unit: tracks its prefixes and the zone it is attached to.
 *
 * The MU holds one current LNP plus the pLNPs still routed through earlier
 * zones. A deprecated LNP moves to the pLNP set when the MU learns a new one.
 */
class MobileUnit
{
public:
  MobileUnit (NodeId node, MuId id, std::uint64_t llId);

  NodeId Node () const { return m_node; }
  MuId Id () const { return m_id; }
  std::uint64_t LinkLayerId () const { return m_llId; }

  Envelope RouterSolicitation (NodeId mz) const;
  Envelope L2Report (std::uint32_t anId) const;
  void Handle (const Envelope &in);

  void LinkDown ();
  void LinkUp (NodeId mz, std::optional<Prefix> granted);

  std::optional<NodeId> ServingMz () const { return m_serving; }
  /// Zone the MU was last attached to; survives link-down.
  std::optional<NodeId> LastMz () const { return m_last; }
  std::optional<Prefix> Lnp () const { return m_lnp; }
  const std::vector<Prefix> &Plnps () const { return m_plnps; }
  std::vector<Prefix> Addresses () const;
  bool CommandPending () const { return m_commandTarget.has_value (); }
  std::optional<NodeId> CommandTarget () const { return m_commandTarget; }
  /// Every LNP ever assigned, in order.
  const std::vector<Prefix> &Lineage () const { return m_lineage; }
  void DropPrefix (Prefix p);

private:
  void Adopt (Prefix p);

  NodeId m_node;
  MuId m_id;
  std::uint64_t m_llId;
  std::optional<NodeId> m_serving;
  std::optional<NodeId> m_last;
  std::optional<Prefix> m_lnp;
  std::vector<Prefix> m_plnps;
  std::optional<Prefix> m_commandLnp;
  std::optional<NodeId> m_commandTarget;
  std::vector<Prefix> m_lineage;
};

struct MixZoneConfig
{
  NodeId lbs = 0;
  std::size_t context_blob_size = 32;
  int hi_max_attempts = 2;
};

/**
 * \brief Mix-zone router acting as serving zone, handover target, reported
 * server or RSU anchor for the MUs that pass through it.
 */
class MixZone
{
public:
  MixZone (NodeId id, PrefixPool pool, MixZoneConfig cfg,
           std::shared_ptr<const AnDirectory> directory);

  NodeId Id () const { return m_id; }

  Outbox Handle (const Envelope &in, double now);

  struct Attach
  {
    MuId mu;
    NodeId mu_node;
    std::uint64_t ll_id;
    std::optional<NodeId> reported; // set for a reactive FDMM attach
  };
  struct AttachResult
  {
    std::optional<Prefix> granted;
    Outbox out;
  };
  /// L2 attach completed at this zone. Throws PoolExhausted.
  AttachResult LinkUp (const Attach &a, double now);
  /// Serving link lost; drops any outstanding predictive HI.
  void LinkDown (MuId mu);

  bool HiPending (MuId mu) const { return m_pendingHi.count (mu) != 0; }
  /// Retransmits the pending HI, or gives up (empty outbox) when out of attempts.
  Outbox HiTimeout (MuId mu);

  void ExpirePrefix (MuId mu, Prefix p);

  const BindingCacheEntry *Binding (MuId mu) const;
  bool IsServing (MuId mu) const;
  const TunnelTable &Tunnels () const { return m_tunnels; }
  std::optional<NodeId> NextHop (Prefix p) const;
  const PrefixPool &Pool () const { return m_pool; }
  /// Peer currently reached for a prefix this zone anchors.
  std::optional<NodeId> AnchorPeer (Prefix p) const;
  std::vector<Prefix> AnchoredPrefixes () const;

private:
  struct Session
  {
    BindingCacheEntry bce;
    NodeId mu_node = 0;
    std::uint64_t ll_id = 0;
    bool answer_rs = false;
    bool awaiting_attach = false; // predictive target before re-attach
  };
  struct Anchor
  {
    MuId mu;
    NodeId peer;
  };
  struct Context
  {
    Prefix lnp;
    std::vector<AnchorRef> anchored;
    std::uint64_t ll_id;
  };
  struct PendingHi
  {
    NodeId target;
    MobilityMessage msg;
    int attempts;
  };

  Outbox OnRs (const Envelope &in, double now);
  Outbox OnPbu (const Envelope &in);
  Outbox OnPba (const Envelope &in);
  Outbox OnL2Report (const Envelope &in);
  Outbox OnHi (const Envelope &in, double now);
  Outbox OnHack (const Envelope &in);

  Prefix AllocateFor (MuId mu);
  void Demote (MuId mu, NodeId peer);
  void PointAnchor (Prefix p, NodeId peer);
  void InstallServingPaths (Session &s);
  MobilityMessage Pbu (const Session &s, std::optional<std::vector<Prefix>> handled) const;

  NodeId m_id;
  PrefixPool m_pool;
  MixZoneConfig m_cfg;
  std::shared_ptr<const AnDirectory> m_directory;
  std::map<MuId, Session> m_sessions;
  std::map<Prefix, Anchor> m_anchors;
  std::map<MuId, Context> m_departed;
  std::map<MuId, PendingHi> m_pendingHi;
  std::map<Prefix, NodeId> m_routes;
  TunnelTable m_tunnels;
};

/**
 * \brief Location-based server: the control-plane registry of bindings.
 */
class LbsServer
{
public:
  explicit LbsServer (NodeId id);

  NodeId Id () const { return m_id; }
  Outbox Handle (const Envelope &in, double now);

  struct UpdateResult
  {
    std::optional<BindingCacheEntry> entry; // empty on a binding miss
    MobilityMessage pba;
    Outbox anchor_updates;
  };
  /**
   * A PBU without a PLNP_LIST is a registration or DDMM move; an unknown MU
   * is registered. A PBU with a PLNP_LIST comes from an FDMM target that
   * already re-routed the listed prefixes; an unknown MU is a binding miss.
   */
  UpdateResult Update (NodeId fromMz, const MobilityMessage &pbu, double now);

  void ExpirePrefix (MuId mu, Prefix p);
  const BindingCacheEntry *Find (MuId mu) const;
  std::size_t Size () const { return m_cache.size (); }

private:
  NodeId m_id;
  std::map<MuId, BindingCacheEntry> m_cache;
};

} // namespace ddmm

#endif // DDMM_NODES_H
