/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/network.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ddmm {

namespace {

void
Require (bool ok, const std::string &what)
{
  if (!ok)
    {
      throw std::logic_error ("invariant violated: " + what);
    }
}

void
Append (Trace &into, const Trace &more)
{
  into.insert (into.end (), more.begin (), more.end ());
}

} // namespace

std::string
Describe (const TraceEntry &e)
{
  std::string s (KindName (e.msg.kind));
  s += "(" + std::to_string (e.from) + "->" + std::to_string (e.to);
  if (e.msg.t_flag)
    {
      s += ",T=" + std::to_string (static_cast<int> (*e.msg.t_flag));
      s += ",D=" + std::to_string (e.msg.d_flag ? 1 : 0);
    }
  if (e.msg.nack)
    {
      s += ",NACK";
    }
  s += ")";
  if (e.dropped)
    {
      s += "!";
    }
  return s;
}

Network::Network (NetworkConfig cfg)
  : m_cfg (cfg),
    m_directory (std::make_shared<AnDirectory> ()),
    m_lbs (kLbs)
{
  if (cfg.zones == 0)
    {
      throw std::invalid_argument ("network needs at least one zone");
    }
  MixZoneConfig zc;
  zc.lbs = kLbs;
  zc.context_blob_size = cfg.context_blob_size;
  for (std::size_t i = 0; i < cfg.zones; ++i)
    {
      const NodeId id = ZoneNode (i);
      (*m_directory)[AnOf (id)] = id;
      m_zones.emplace_back (id, PrefixPool (static_cast<std::uint64_t> (id) << 32, cfg.pool_size),
                            zc, m_directory);
    }
}

MobileUnit &
Network::AddMu (MuId id, std::uint64_t llId)
{
  const NodeId node = static_cast<NodeId> (1000 + m_mus.size ());
  m_mus.push_back (std::make_unique<MobileUnit> (node, id, llId));
  return *m_mus.back ();
}

MobileUnit &
Network::Mu (MuId id)
{
  for (auto &m : m_mus)
    {
      if (m->Id () == id)
        {
          return *m;
        }
    }
  throw std::out_of_range ("unknown MU");
}

MixZone &
Network::Zone (NodeId node)
{
  if (node == 0 || node > m_zones.size ())
    {
      throw std::out_of_range ("unknown zone");
    }
  return m_zones[node - 1];
}

const MixZone &
Network::Zone (NodeId node) const
{
  if (node == 0 || node > m_zones.size ())
    {
      throw std::out_of_range ("unknown zone");
    }
  return m_zones[node - 1];
}

void
Network::Post (Envelope e)
{
  m_queue.push_back (std::move (e));
}

void
Network::Post (Outbox out)
{
  for (auto &e : out)
    {
      Post (std::move (e));
    }
}

Trace
Network::Drain ()
{
  Trace trace;
  while (!m_queue.empty ())
    {
      Envelope e = std::move (m_queue.front ());
      m_queue.pop_front ();
      TraceEntry t{e.from, e.to, e.msg, false};
      if (m_drop && m_drop (t))
        {
          t.dropped = true;
          trace.push_back (t);
          continue;
        }
      trace.push_back (t);
      m_clock += 1.0;
      if (e.to == kLbs)
        {
          Post (m_lbs.Handle (e, m_clock));
        }
      else if (e.to <= m_zones.size ())
        {
          Post (Zone (e.to).Handle (e, m_clock));
        }
      else
        {
          for (auto &m : m_mus)
            {
              if (m->Node () == e.to)
                {
                  m->Handle (e);
                }
            }
        }
    }
  m_trace.insert (m_trace.end (), trace.begin (), trace.end ());
  return trace;
}

Trace
Network::InitialAttach (MuId id, NodeId mz)
{
  MobileUnit &mu = Mu (id);
  auto r = Zone (mz).LinkUp ({id, mu.Node (), mu.LinkLayerId (), std::nullopt}, m_clock);
  mu.LinkUp (mz, r.granted);
  Post (mu.RouterSolicitation (mz));
  return Drain ();
}

Trace
Network::PredictiveHandover (MuId id, NodeId target)
{
  MobileUnit &mu = Mu (id);
  const auto serving = mu.ServingMz ();
  if (!serving)
    {
      throw std::logic_error ("predictive handover needs an attached MU");
    }
  Post (mu.L2Report (AnOf (target)));
  Trace trace = Drain ();
  MixZone &s = Zone (*serving);
  while (s.HiPending (id))
    {
      Outbox retry = s.HiTimeout (id);
      if (retry.empty ())
        {
          break;
        }
      Post (std::move (retry));
      Append (trace, Drain ());
    }

  if (mu.CommandPending ())
    {
      const NodeId t = *mu.CommandTarget ();
      mu.LinkDown ();
      s.LinkDown (id);
      auto r = Zone (t).LinkUp ({id, mu.Node (), mu.LinkLayerId (), std::nullopt}, m_clock);
      mu.LinkUp (t, r.granted);
      Post (std::move (r.out));
      Append (trace, Drain ());
    }
  else if (target != *serving)
    {
      Append (trace, ReactiveHandover (id, target));
    }
  return trace;
}

Trace
Network::ReactiveHandover (MuId id, NodeId newMz)
{
  MobileUnit &mu = Mu (id);
  const auto reported = mu.LastMz ();
  if (reported)
    {
      Zone (*reported).LinkDown (id);
    }
  mu.LinkDown ();
  auto r = Zone (newMz).LinkUp ({id, mu.Node (), mu.LinkLayerId (), reported}, m_clock);
  mu.LinkUp (newMz, r.granted);
  Post (std::move (r.out));
  return Drain ();
}

Trace
Network::DdmmHandover (MuId id, NodeId newMz)
{
  MobileUnit &mu = Mu (id);
  if (const auto old = mu.LastMz ())
    {
      Zone (*old).LinkDown (id);
    }
  mu.LinkDown ();
  auto r = Zone (newMz).LinkUp ({id, mu.Node (), mu.LinkLayerId (), std::nullopt}, m_clock);
  mu.LinkUp (newMz, r.granted);
  Post (mu.RouterSolicitation (newMz));
  return Drain ();
}

void
Network::ExpirePrefix (MuId id, Prefix p)
{
  m_lbs.ExpirePrefix (id, p);
  for (auto &z : m_zones)
    {
      z.ExpirePrefix (id, p);
    }
  Mu (id).DropPrefix (p);
}

void
Network::CheckInvariants () const
{
  for (std::size_t i = 0; i < m_zones.size (); ++i)
    {
      for (std::size_t j = i + 1; j < m_zones.size (); ++j)
        {
          const auto &a = m_zones[i].Pool ();
          const auto &b = m_zones[j].Pool ();
          Require (a.Base () + a.Size () <= b.Base () || b.Base () + b.Size () <= a.Base (),
                   "prefix pools overlap");
        }
    }

  for (const auto &mup : m_mus)
    {
      const MobileUnit &mu = *mup;
      const MuId id = mu.Id ();
      std::size_t serving = 0;
      for (const auto &z : m_zones)
        {
          serving += z.IsServing (id) ? 1 : 0;
        }
      const BindingCacheEntry *e = m_lbs.Find (id);
      if (!e)
        {
          Require (serving == 0, "serving zone without an LBS binding");
          continue;
        }
      Require (serving == 1, "exactly one serving zone per MU");
      Require (Zone (e->serving_mz).IsServing (id), "LBS serving zone disagrees with zones");

      std::set<Prefix> expected{e->lnp};
      for (const auto &a : e->anchored)
        {
          Require (expected.insert (a.prefix).second, "duplicate prefix in anchored list");
          const auto &lineage = mu.Lineage ();
          Require (std::find (lineage.begin (), lineage.end (), a.prefix) != lineage.end (),
                   "anchored prefix was never the MU's LNP");
          const MixZone &anchor = Zone (a.mz);
          Require (anchor.AnchorPeer (a.prefix) == e->serving_mz,
                   "anchor zone does not point at the serving zone");
          if (a.mz == e->serving_mz)
            {
              Require (!anchor.Tunnels ().Find (a.prefix), "tunnel for a locally anchored prefix");
              continue;
            }
          const auto far = anchor.Tunnels ().Find (a.prefix);
          const auto near = Zone (e->serving_mz).Tunnels ().Find (a.prefix);
          Require (far && far->peer == e->serving_mz, "missing tunnel at anchor zone");
          Require (near && near->peer == a.mz, "missing tunnel at serving zone");
        }
      const auto addrs = mu.Addresses ();
      Require (std::set<Prefix> (addrs.begin (), addrs.end ()) == expected,
               "MU addresses differ from LNP plus anchored pLNPs");
    }

  for (const auto &z : m_zones)
    {
      for (const auto &t : z.Tunnels ().Entries ())
        {
          const BindingCacheEntry *e = m_lbs.Find (t.mu);
          Require (e != nullptr, "tunnel for an unknown MU");
          const bool matched
              = std::any_of (e->anchored.begin (), e->anchored.end (), [&] (const AnchorRef &a) {
                  return a.prefix == t.prefix
                         && ((t.local == a.mz && t.peer == e->serving_mz)
                             || (t.local == e->serving_mz && t.peer == a.mz));
                });
          Require (matched, "tunnel without a matching anchored prefix");
        }
    }
}

} // namespace ddmm
