/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/nodes.h"

#include <algorithm>

namespace ddmm {

namespace {

MobilityMessage
Make (MessageKind kind, MuId mu)
{
  MobilityMessage m;
  m.kind = kind;
  m.mu_id = mu;
  return m;
}

MobilityMessage
MakeHandover (MessageKind kind, MuId mu, TargetType t)
{
  MobilityMessage m = Make (kind, mu);
  m.d_flag = true;
  m.t_flag = t;
  return m;
}

bool
Contains (const std::vector<AnchorRef> &list, Prefix p)
{
  return std::any_of (list.begin (), list.end (),
                      [p] (const AnchorRef &a) { return a.prefix == p; });
}

} // namespace

// ---------------------------------------------------------------------------

MobileUnit::MobileUnit (NodeId node, MuId id, std::uint64_t llId)
  : m_node (node),
    m_id (id),
    m_llId (llId)
{
}

Envelope
MobileUnit::RouterSolicitation (NodeId mz) const
{
  MobilityMessage m = Make (MessageKind::RS, m_id);
  if (m_llId != 0)
    {
      m.Set (LinkLayerIdOption (m_llId));
    }
  return {m_node, mz, m};
}

Envelope
MobileUnit::L2Report (std::uint32_t anId) const
{
  MobilityMessage m = Make (MessageKind::L2_REPORT, m_id);
  m.Set (NodeOption (OptionKind::MZ_ADDR, anId));
  return {m_node, m_serving.value_or (0), m};
}

void
MobileUnit::Adopt (Prefix p)
{
  if (m_lnp && *m_lnp != p)
    {
      if (std::find (m_plnps.begin (), m_plnps.end (), *m_lnp) == m_plnps.end ())
        {
          m_plnps.push_back (*m_lnp);
        }
    }
  if (!m_lnp || *m_lnp != p)
    {
      m_lineage.push_back (p);
    }
  m_lnp = p;
  std::erase (m_plnps, p);
}

void
MobileUnit::Handle (const Envelope &in)
{
  switch (in.msg.kind)
    {
    case MessageKind::RA:
      if (const auto *o = in.msg.Find (OptionKind::LNP))
        {
          Adopt (ReadPrefix (*o));
          m_serving = in.from;
          m_last = in.from;
        }
      break;
    case MessageKind::HANDOVER_COMMAND:
      if (const auto *o = in.msg.Find (OptionKind::LNP))
        {
          m_commandLnp = ReadPrefix (*o);
        }
      if (const auto *o = in.msg.Find (OptionKind::MZ_ADDR))
        {
          m_commandTarget = ReadNode (*o);
        }
      break;
    default:
      break;
    }
}

void
MobileUnit::LinkDown ()
{
  m_serving.reset ();
}

void
MobileUnit::LinkUp (NodeId mz, std::optional<Prefix> granted)
{
  m_serving = mz;
  m_last = mz;
  if (!granted && m_commandTarget == mz)
    {
      granted = m_commandLnp;
    }
  if (granted)
    {
      Adopt (*granted);
    }
  m_commandLnp.reset ();
  m_commandTarget.reset ();
}

std::vector<Prefix>
MobileUnit::Addresses () const
{
  std::vector<Prefix> out;
  if (m_lnp)
    {
      out.push_back (*m_lnp);
    }
  out.insert (out.end (), m_plnps.begin (), m_plnps.end ());
  return out;
}

void
MobileUnit::DropPrefix (Prefix p)
{
  std::erase (m_plnps, p);
}

// ---------------------------------------------------------------------------

MixZone::MixZone (NodeId id, PrefixPool pool, MixZoneConfig cfg,
                  std::shared_ptr<const AnDirectory> directory)
  : m_id (id),
    m_pool (pool),
    m_cfg (cfg),
    m_directory (std::move (directory))
{
}

Outbox
MixZone::Handle (const Envelope &in, double now)
{
  switch (in.msg.kind)
    {
    case MessageKind::RS:
      return OnRs (in, now);
    case MessageKind::PBU:
      return OnPbu (in);
    case MessageKind::PBA:
      return OnPba (in);
    case MessageKind::L2_REPORT:
      return OnL2Report (in);
    case MessageKind::HI:
      return OnHi (in, now);
    case MessageKind::HACK:
      return OnHack (in);
    default:
      return {};
    }
}

Prefix
MixZone::AllocateFor (MuId mu)
{
  auto it = m_sessions.find (mu);
  if (it != m_sessions.end ())
    {
      return it->second.bce.lnp;
    }
  return m_pool.Allocate ();
}

MobilityMessage
MixZone::Pbu (const Session &s, std::optional<std::vector<Prefix>> handled) const
{
  MobilityMessage m = Make (MessageKind::PBU, s.bce.mu_id);
  m.Set (PrefixOption (OptionKind::LNP, s.bce.lnp));
  if (handled)
    {
      m.Set (PrefixListOption (*handled));
    }
  return m;
}

Outbox
MixZone::OnRs (const Envelope &in, double now)
{
  const MuId mu = in.msg.mu_id;
  const bool fresh = m_sessions.count (mu) == 0;
  const Prefix lnp = AllocateFor (mu);
  Session &s = m_sessions[mu];
  if (fresh)
    {
      s.bce = {mu, lnp, m_id, {}, now, BceState::TEMPORAL};
    }
  s.mu_node = in.from;
  if (const auto *o = in.msg.Find (OptionKind::MU_LLA_IID))
    {
      s.ll_id = ReadLinkLayerId (*o);
    }
  s.answer_rs = true;
  s.awaiting_attach = false;
  return {{m_id, m_cfg.lbs, Pbu (s, std::nullopt)}};
}

void
MixZone::PointAnchor (Prefix p, NodeId peer)
{
  auto it = m_anchors.find (p);
  if (it == m_anchors.end ())
    {
      return;
    }
  it->second.peer = peer;
  m_tunnels.Remove (p);
  if (peer != m_id)
    {
      m_tunnels.Add ({m_id, peer, p, it->second.mu});
      m_routes[p] = peer;
    }
  else if (auto s = m_sessions.find (it->second.mu); s != m_sessions.end ())
    {
      m_routes[p] = s->second.mu_node;
    }
}

void
MixZone::InstallServingPaths (Session &s)
{
  m_routes[s.bce.lnp] = s.mu_node;
  for (const auto &a : s.bce.anchored)
    {
      if (a.mz == m_id)
        {
          PointAnchor (a.prefix, m_id);
          continue;
        }
      m_tunnels.Add ({m_id, a.mz, a.prefix, s.bce.mu_id});
      m_routes[a.prefix] = s.mu_node;
    }
}

void
MixZone::Demote (MuId mu, NodeId peer)
{
  auto it = m_sessions.find (mu);
  if (it == m_sessions.end ())
    {
      return;
    }
  const Session s = it->second;
  m_sessions.erase (it);
  for (const auto &a : s.bce.anchored)
    {
      if (a.mz == m_id)
        {
          PointAnchor (a.prefix, peer);
        }
      else
        {
          m_tunnels.Remove (a.prefix);
          m_routes.erase (a.prefix);
        }
    }
  m_anchors[s.bce.lnp] = {mu, peer};
  PointAnchor (s.bce.lnp, peer);
  m_departed[mu] = {s.bce.lnp, s.bce.anchored, s.ll_id};
}

Outbox
MixZone::OnPbu (const Envelope &in)
{
  const MuId mu = in.msg.mu_id;
  MobilityMessage ack = Make (MessageKind::PBA, mu);
  const auto *lnpOpt = in.msg.Find (OptionKind::LNP);
  const auto *mzOpt = in.msg.Find (OptionKind::MZ_ADDR);
  if (!lnpOpt || !mzOpt)
    {
      ack.nack = true;
      return {{m_id, in.from, ack}};
    }
  const Prefix p = ReadPrefix (*lnpOpt);
  const NodeId serving = ReadNode (*mzOpt);
  ack.Set (PrefixOption (OptionKind::LNP, p));

  auto s = m_sessions.find (mu);
  if (s != m_sessions.end () && s->second.bce.lnp == p && serving != m_id)
    {
      Demote (mu, serving);
    }
  else if (m_anchors.count (p))
    {
      PointAnchor (p, serving);
    }
  else
    {
      ack.nack = true;
    }
  return {{m_id, in.from, ack}};
}

Outbox
MixZone::OnPba (const Envelope &in)
{
  auto it = m_sessions.find (in.msg.mu_id);
  if (it == m_sessions.end ())
    {
      return {};
    }
  Session &s = it->second;
  if (in.msg.nack)
    {
      if (s.bce.state == BceState::TEMPORAL)
        {
          m_pool.Release (s.bce.lnp);
          m_sessions.erase (it);
        }
      return {};
    }
  s.bce.state = BceState::CONFIRMED;
  s.bce.serving_mz = m_id;
  if (const auto *o = in.msg.Find (OptionKind::MZ_ADDR))
    {
      s.bce.anchored = ReadAnchorList (*o);
    }
  InstallServingPaths (s);
  if (!s.answer_rs)
    {
      return {};
    }
  s.answer_rs = false;
  MobilityMessage ra = Make (MessageKind::RA, s.bce.mu_id);
  ra.Set (PrefixOption (OptionKind::LNP, s.bce.lnp));
  return {{m_id, s.mu_node, ra}};
}

Outbox
MixZone::OnL2Report (const Envelope &in)
{
  const MuId mu = in.msg.mu_id;
  auto it = m_sessions.find (mu);
  const auto *o = in.msg.Find (OptionKind::MZ_ADDR);
  if (it == m_sessions.end () || !o || !m_directory)
    {
      return {};
    }
  auto d = m_directory->find (ReadNode (*o));
  if (d == m_directory->end () || d->second == m_id)
    {
      return {}; // unknown AN, or an AN of this zone: L2-only switch
    }
  const Session &s = it->second;
  std::vector<Prefix> plnps{s.bce.lnp};
  for (const auto &a : s.bce.anchored)
    {
      plnps.push_back (a.prefix);
    }
  MobilityMessage hi = MakeHandover (MessageKind::HI, mu, TargetType::ServingMz);
  hi.Set (PrefixListOption (plnps));
  hi.Set (NodeOption (OptionKind::LBS_ADDR, m_cfg.lbs));
  hi.Set (LinkLayerIdOption (s.ll_id));
  m_pendingHi[mu] = {d->second, hi, 1};
  return {{m_id, d->second, hi}};
}

Outbox
MixZone::HiTimeout (MuId mu)
{
  auto it = m_pendingHi.find (mu);
  if (it == m_pendingHi.end ())
    {
      return {};
    }
  if (it->second.attempts >= m_cfg.hi_max_attempts)
    {
      m_pendingHi.erase (it);
      return {};
    }
  ++it->second.attempts;
  return {{m_id, it->second.target, it->second.msg}};
}

void
MixZone::LinkDown (MuId mu)
{
  m_pendingHi.erase (mu);
}

Outbox
MixZone::OnHi (const Envelope &in, double now)
{
  const MuId mu = in.msg.mu_id;
  const TargetType t = in.msg.t_flag.value_or (TargetType::ServingMz);
  MobilityMessage ack = MakeHandover (MessageKind::HACK, mu, t);

  switch (t)
    {
      case TargetType::ServingMz: {
        const auto *o = in.msg.Find (OptionKind::PLNP_LIST);
        const std::vector<Prefix> plnps = o ? ReadPrefixList (*o) : std::vector<Prefix>{};
        const bool fresh = m_sessions.count (mu) == 0;
        Prefix lnp;
        try
          {
            lnp = AllocateFor (mu);
          }
        catch (const PoolExhausted &)
          {
            ack.nack = true;
            return {{m_id, in.from, ack}};
          }
        Session &s = m_sessions[mu];
        if (fresh)
          {
            s.bce = {mu, lnp, m_id, {}, now, BceState::TEMPORAL};
          }
        if (const auto *ll = in.msg.Find (OptionKind::MU_LLA_IID))
          {
            s.ll_id = ReadLinkLayerId (*ll);
          }
        s.awaiting_attach = true;
        if (!plnps.empty () && !Contains (s.bce.anchored, plnps.front ()))
          {
            s.bce.anchored.push_back ({in.from, plnps.front ()});
            m_tunnels.Add ({m_id, in.from, plnps.front (), mu});
          }
        ack.Set (PrefixOption (OptionKind::LNP, lnp));
        return {{m_id, in.from, ack}};
      }

      case TargetType::ReportedServer: {
        Context ctx;
        if (auto s = m_sessions.find (mu); s != m_sessions.end ())
          {
            ctx = {s->second.bce.lnp, s->second.bce.anchored, s->second.ll_id};
            Demote (mu, in.from);
          }
        else if (auto d = m_departed.find (mu); d != m_departed.end ())
          {
            ctx = d->second;
            PointAnchor (ctx.lnp, in.from);
            for (const auto &a : ctx.anchored)
              {
                if (a.mz == m_id)
                  {
                    PointAnchor (a.prefix, in.from);
                  }
              }
          }
        else
          {
            ack.nack = true;
            return {{m_id, in.from, ack}};
          }
        ack.Set (PrefixOption (OptionKind::LNP, ctx.lnp));
        if (ctx.ll_id != 0)
          {
            ack.Set (LinkLayerIdOption (ctx.ll_id));
          }
        ack.Set (NodeOption (OptionKind::LBS_ADDR, m_cfg.lbs));
        ack.Set ({OptionKind::CONTEXT_REQUEST,
                  std::vector<std::uint8_t> (m_cfg.context_blob_size, 0)});
        if (!ctx.anchored.empty ())
          {
            ack.Set (AnchorListOption (ctx.anchored));
          }
        return {{m_id, in.from, ack}};
      }

      case TargetType::AnchoredRsu: {
        const auto *o = in.msg.Find (OptionKind::PLNP_LIST);
        const std::vector<Prefix> plnps = o ? ReadPrefixList (*o) : std::vector<Prefix>{};
        std::vector<Prefix> refreshed;
        for (auto p : plnps)
          {
            if (m_anchors.count (p))
              {
                PointAnchor (p, in.from);
                refreshed.push_back (p);
              }
          }
        ack.nack = refreshed.empty ();
        ack.Set (PrefixListOption (refreshed));
        return {{m_id, in.from, ack}};
      }
    }
  return {};
}

Outbox
MixZone::OnHack (const Envelope &in)
{
  const MuId mu = in.msg.mu_id;
  const TargetType t = in.msg.t_flag.value_or (TargetType::ServingMz);

  if (t == TargetType::ServingMz)
    {
      auto pend = m_pendingHi.find (mu);
      if (pend == m_pendingHi.end () || pend->second.target != in.from)
        {
          return {}; // stale: link already down or HI abandoned
        }
      m_pendingHi.erase (pend);
      auto s = m_sessions.find (mu);
      if (in.msg.nack || s == m_sessions.end ())
        {
          return {};
        }
      const NodeId muNode = s->second.mu_node;
      Demote (mu, in.from);
      MobilityMessage cmd = Make (MessageKind::HANDOVER_COMMAND, mu);
      if (const auto *o = in.msg.Find (OptionKind::LNP))
        {
          cmd.Set (*o);
        }
      cmd.Set (NodeOption (OptionKind::MZ_ADDR, in.from));
      return {{m_id, muNode, cmd}};
    }

  if (t == TargetType::AnchoredRsu)
    {
      return {};
    }

  // Context from the reported server after a reactive attach.
  auto it = m_sessions.find (mu);
  if (it == m_sessions.end ())
    {
      return {};
    }
  Session &s = it->second;
  if (in.msg.nack)
    {
      s.answer_rs = false;
      return {{m_id, m_cfg.lbs, Pbu (s, std::nullopt)}};
    }
  Outbox out;
  std::vector<Prefix> handled;
  if (const auto *o = in.msg.Find (OptionKind::MU_LLA_IID))
    {
      s.ll_id = ReadLinkLayerId (*o);
    }
  if (const auto *o = in.msg.Find (OptionKind::LNP))
    {
      const Prefix reported = ReadPrefix (*o);
      if (!Contains (s.bce.anchored, reported))
        {
          s.bce.anchored.push_back ({in.from, reported});
        }
      m_tunnels.Add ({m_id, in.from, reported, mu});
      m_routes[reported] = s.mu_node;
      handled.push_back (reported);
    }
  if (const auto *o = in.msg.Find (OptionKind::MZ_ADDR))
    {
      for (const auto &a : ReadAnchorList (*o))
        {
          if (Contains (s.bce.anchored, a.prefix))
            {
              continue;
            }
          s.bce.anchored.push_back (a);
          handled.push_back (a.prefix);
          if (a.mz == m_id)
            {
              PointAnchor (a.prefix, m_id);
              continue;
            }
          m_tunnels.Add ({m_id, a.mz, a.prefix, mu});
          m_routes[a.prefix] = s.mu_node;
          MobilityMessage hi = MakeHandover (MessageKind::HI, mu, TargetType::AnchoredRsu);
          hi.Set (PrefixListOption ({a.prefix}));
          hi.Set (NodeOption (OptionKind::MZ_ADDR, m_id));
          out.push_back ({m_id, a.mz, hi});
        }
    }
  out.push_back ({m_id, m_cfg.lbs, Pbu (s, handled)});
  return out;
}

MixZone::AttachResult
MixZone::LinkUp (const Attach &a, double now)
{
  AttachResult r;
  auto it = m_sessions.find (a.mu);
  if (it != m_sessions.end () && it->second.awaiting_attach && !a.reported)
    {
      Session &s = it->second;
      s.mu_node = a.mu_node;
      s.ll_id = a.ll_id;
      s.awaiting_attach = false;
      InstallServingPaths (s);
      std::vector<Prefix> handled;
      for (const auto &x : s.bce.anchored)
        {
          handled.push_back (x.prefix);
        }
      r.granted = s.bce.lnp;
      r.out.push_back ({m_id, m_cfg.lbs, Pbu (s, handled)});
      return r;
    }
  if (!a.reported || *a.reported == m_id)
    {
      return r; // DDMM: wait for the router solicitation
    }

  const bool fresh = m_sessions.count (a.mu) == 0;
  const Prefix lnp = AllocateFor (a.mu);
  Session &s = m_sessions[a.mu];
  if (fresh)
    {
      s.bce = {a.mu, lnp, m_id, {}, now, BceState::TEMPORAL};
    }
  s.mu_node = a.mu_node;
  s.ll_id = a.ll_id;
  s.awaiting_attach = false;
  s.answer_rs = false;
  m_routes[lnp] = a.mu_node;

  MobilityMessage hi = MakeHandover (MessageKind::HI, a.mu, TargetType::ReportedServer);
  hi.Set ({OptionKind::CONTEXT_REQUEST, std::vector<std::uint8_t> (m_cfg.context_blob_size, 0)});
  r.granted = lnp;
  r.out.push_back ({m_id, *a.reported, hi});
  return r;
}

void
MixZone::ExpirePrefix (MuId mu, Prefix p)
{
  if (auto a = m_anchors.find (p); a != m_anchors.end () && a->second.mu == mu)
    {
      m_anchors.erase (a);
      m_pool.Release (p);
    }
  m_tunnels.Remove (p);
  m_routes.erase (p);
  if (auto s = m_sessions.find (mu); s != m_sessions.end ())
    {
      std::erase_if (s->second.bce.anchored, [p] (const AnchorRef &a) { return a.prefix == p; });
    }
  if (auto d = m_departed.find (mu); d != m_departed.end ())
    {
      std::erase_if (d->second.anchored, [p] (const AnchorRef &a) { return a.prefix == p; });
    }
}

const BindingCacheEntry *
MixZone::Binding (MuId mu) const
{
  auto it = m_sessions.find (mu);
  return it == m_sessions.end () ? nullptr : &it->second.bce;
}

bool
MixZone::IsServing (MuId mu) const
{
  const auto *b = Binding (mu);
  return b && b->state == BceState::CONFIRMED;
}

std::optional<NodeId>
MixZone::NextHop (Prefix p) const
{
  auto it = m_routes.find (p);
  if (it == m_routes.end ())
    {
      return std::nullopt;
    }
  return it->second;
}

std::optional<NodeId>
MixZone::AnchorPeer (Prefix p) const
{
  auto it = m_anchors.find (p);
  if (it == m_anchors.end ())
    {
      return std::nullopt;
    }
  return it->second.peer;
}

std::vector<Prefix>
MixZone::AnchoredPrefixes () const
{
  std::vector<Prefix> out;
  for (const auto &[p, a] : m_anchors)
    {
      out.push_back (p);
    }
  return out;
}

// ---------------------------------------------------------------------------

LbsServer::LbsServer (NodeId id)
  : m_id (id)
{
}

LbsServer::UpdateResult
LbsServer::Update (NodeId fromMz, const MobilityMessage &pbu, double now)
{
  UpdateResult r;
  r.pba = Make (MessageKind::PBA, pbu.mu_id);
  const auto *lnpOpt = pbu.Find (OptionKind::LNP);
  const auto *listOpt = pbu.Find (OptionKind::PLNP_LIST);
  auto it = m_cache.find (pbu.mu_id);
  if (!lnpOpt || (it == m_cache.end () && listOpt))
    {
      r.pba.nack = true;
      return r;
    }
  const Prefix lnp = ReadPrefix (*lnpOpt);
  std::vector<Prefix> handled;
  if (listOpt)
    {
      handled = ReadPrefixList (*listOpt);
    }

  if (it == m_cache.end ())
    {
      it = m_cache.emplace (pbu.mu_id,
                            BindingCacheEntry{pbu.mu_id, lnp, fromMz, {}, now, BceState::CONFIRMED})
               .first;
    }
  BindingCacheEntry &e = it->second;
  if (e.serving_mz != fromMz)
    {
      if (!Contains (e.anchored, e.lnp) && e.lnp != lnp)
        {
          e.anchored.push_back ({e.serving_mz, e.lnp});
        }
      e.serving_mz = fromMz;
      for (const auto &a : e.anchored)
        {
          if (std::find (handled.begin (), handled.end (), a.prefix) != handled.end ())
            {
              continue;
            }
          MobilityMessage up = Make (MessageKind::PBU, pbu.mu_id);
          up.Set (PrefixOption (OptionKind::LNP, a.prefix));
          up.Set (NodeOption (OptionKind::MZ_ADDR, fromMz));
          r.anchor_updates.push_back ({m_id, a.mz, up});
        }
    }
  e.lnp = lnp;
  std::erase_if (e.anchored, [lnp] (const AnchorRef &a) { return a.prefix == lnp; });

  r.pba.Set (PrefixOption (OptionKind::LNP, lnp));
  if (!e.anchored.empty ())
    {
      r.pba.Set (AnchorListOption (e.anchored));
    }
  r.entry = e;
  return r;
}

Outbox
LbsServer::Handle (const Envelope &in, double now)
{
  if (in.msg.kind != MessageKind::PBU)
    {
      return {}; // PBA from an anchor zone closes the refresh
    }
  UpdateResult r = Update (in.from, in.msg, now);
  Outbox out = std::move (r.anchor_updates);
  out.push_back ({m_id, in.from, r.pba});
  return out;
}

void
LbsServer::ExpirePrefix (MuId mu, Prefix p)
{
  auto it = m_cache.find (mu);
  if (it != m_cache.end ())
    {
      std::erase_if (it->second.anchored, [p] (const AnchorRef &a) { return a.prefix == p; });
    }
}

const BindingCacheEntry *
LbsServer::Find (MuId mu) const
{
  auto it = m_cache.find (mu);
  return it == m_cache.end () ? nullptr : &it->second;
}

} // namespace ddmm
