/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/network.h"

#include <doctest.h>

#include <random>

using namespace ddmm;

namespace {

std::vector<std::string>
Render (const Trace &t)
{
  std::vector<std::string> out;
  for (const auto &e : t)
    {
      out.push_back (Describe (e));
    }
  return out;
}

using Lines = std::vector<std::string>;

} // namespace

TEST_CASE ("initial registration")
{
  Network net;
  MobileUnit &mu = net.AddMu (11, 0xabc);
  const Trace t = net.InitialAttach (11, 1);
  CHECK (Render (t) == Lines{"RS(1000->1)", "PBU(1->0)", "PBA(0->1)", "RA(1->1000)"});
  const BindingCacheEntry *e = net.Lbs ().Find (11);
  REQUIRE (e);
  CHECK (e->state == BceState::CONFIRMED);
  CHECK (e->serving_mz == 1);
  CHECK (e->anchored.empty ());
  CHECK (net.Zone (1).IsServing (11));
  REQUIRE (mu.Lnp ());
  CHECK (*mu.Lnp () == e->lnp);
  CHECK (mu.Addresses ().size () == 1);
  CHECK (net.Zone (1).Pool ().Owns (e->lnp));
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("re-registration is idempotent")
{
  Network net;
  MobileUnit &mu = net.AddMu (11, 5);
  net.InitialAttach (11, 1);
  const BindingCacheEntry first = *net.Lbs ().Find (11);
  const auto addrs = mu.Addresses ();
  net.InitialAttach (11, 1);
  CHECK (*net.Lbs ().Find (11) == BindingCacheEntry{first});
  CHECK (mu.Addresses () == addrs);
  CHECK (net.Zone (1).Pool ().Available () == 63);
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("prefixes handed out by one zone are distinct")
{
  NetworkConfig cfg;
  cfg.pool_size = 4;
  Network net (cfg);
  std::set<Prefix> seen;
  for (MuId id = 1; id <= 4; ++id)
    {
      net.AddMu (id, id);
      net.InitialAttach (id, 1);
      seen.insert (*net.Mu (id).Lnp ());
    }
  CHECK (seen.size () == 4);
  net.AddMu (5, 5);
  CHECK_THROWS_AS (net.InitialAttach (5, 1), PoolExhausted);
}

TEST_CASE ("predictive handover, first and second roaming")
{
  Network net;
  MobileUnit &mu = net.AddMu (11, 0xabc);
  net.InitialAttach (11, 1);
  const Prefix p1 = *mu.Lnp ();

  Trace t = net.PredictiveHandover (11, 2);
  CHECK (Render (t)
         == Lines{"L2_REPORT(1000->1)", "HI(1->2,T=0,D=1)", "HACK(2->1,T=0,D=1)",
                  "HANDOVER_COMMAND(1->1000)", "PBU(2->0)", "PBA(0->2)"});
  const MobilityMessage &hi = t[1].msg;
  CHECK (hi.mu_id == 11);
  CHECK (hi.Has (OptionKind::PLNP_LIST));
  CHECK (hi.Has (OptionKind::LBS_ADDR));
  CHECK (hi.Has (OptionKind::MU_LLA_IID));
  CHECK (net.Lbs ().Find (11)->serving_mz == 2);
  CHECK (net.Lbs ().Find (11)->anchored == std::vector<AnchorRef>{{1, p1}});
  CHECK (net.Zone (1).Tunnels ().Find (p1)->peer == 2);
  CHECK (net.Zone (2).Tunnels ().Find (p1)->peer == 1);
  CHECK (mu.ServingMz () == 2u);
  CHECK (mu.Plnps () == std::vector<Prefix>{p1});
  CHECK_NOTHROW (net.CheckInvariants ());

  const Prefix p2 = *mu.Lnp ();
  t = net.PredictiveHandover (11, 3);
  CHECK (Render (t)
         == Lines{"L2_REPORT(1000->2)", "HI(2->3,T=0,D=1)", "HACK(3->2,T=0,D=1)",
                  "HANDOVER_COMMAND(2->1000)", "PBU(3->0)", "PBU(0->1)", "PBA(0->3)",
                  "PBA(1->0)"});
  // L2 report + command, HI/HACK, one anchor PBU/PBA, serving PBU/PBA.
  CHECK (t.size () == 2 + 2 + 2 * 1 + 2);
  const auto &anchored = net.Lbs ().Find (11)->anchored;
  CHECK (anchored == std::vector<AnchorRef>{{1, p1}, {2, p2}});
  CHECK (net.Zone (1).AnchorPeer (p1) == 3u);
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("reactive handover, first and second roaming")
{
  Network net;
  MobileUnit &mu = net.AddMu (11, 0xabc);
  net.InitialAttach (11, 1);
  const Prefix p1 = *mu.Lnp ();

  Trace t = net.ReactiveHandover (11, 2);
  CHECK (Render (t) == Lines{"HI(2->1,T=2,D=1)", "HACK(1->2,T=2,D=1)", "PBU(2->0)", "PBA(0->2)"});
  CHECK (t[0].msg.Has (OptionKind::CONTEXT_REQUEST));
  const MobilityMessage &hack = t[1].msg;
  CHECK (ReadPrefix (*hack.Find (OptionKind::LNP)) == p1);
  CHECK (ReadLinkLayerId (*hack.Find (OptionKind::MU_LLA_IID)) == 0xabc);
  CHECK (hack.Has (OptionKind::LBS_ADDR));
  CHECK (hack.Has (OptionKind::CONTEXT_REQUEST));
  CHECK_FALSE (hack.Has (OptionKind::MZ_ADDR));
  CHECK_NOTHROW (net.CheckInvariants ());

  t = net.ReactiveHandover (11, 3);
  CHECK (Render (t)
         == Lines{"HI(3->2,T=2,D=1)", "HACK(2->3,T=2,D=1)", "HI(3->1,T=1,D=1)", "PBU(3->0)",
                  "HACK(1->3,T=1,D=1)", "PBA(0->3)"});
  CHECK (ReadAnchorList (*t[1].msg.Find (OptionKind::MZ_ADDR))
         == std::vector<AnchorRef>{{1, p1}});
  CHECK (net.Zone (1).AnchorPeer (p1) == 3u);
  CHECK (net.Lbs ().Find (11)->anchored.size () == 2);
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("link-layer id zero is not reported")
{
  Network net;
  net.AddMu (11, 0);
  net.InitialAttach (11, 1);
  const Trace t = net.ReactiveHandover (11, 2);
  CHECK_FALSE (t[1].msg.Has (OptionKind::MU_LLA_IID));
}

TEST_CASE ("handover to the serving zone stays at layer 2")
{
  Network net;
  net.AddMu (11, 1);
  net.InitialAttach (11, 1);
  const auto before = *net.Lbs ().Find (11);
  const Trace t = net.PredictiveHandover (11, 1);
  CHECK (Render (t) == Lines{"L2_REPORT(1000->1)"});
  CHECK (*net.Lbs ().Find (11) == before);
}

TEST_CASE ("unanswered handover initiate falls back to reactive")
{
  Network net;
  net.AddMu (11, 1);
  net.InitialAttach (11, 1);
  net.SetDropFilter ([] (const TraceEntry &e) {
    return e.msg.kind == MessageKind::HI && e.msg.t_flag == TargetType::ServingMz;
  });
  const Trace t = net.PredictiveHandover (11, 2);
  CHECK (Render (t)
         == Lines{"L2_REPORT(1000->1)", "HI(1->2,T=0,D=1)!", "HI(1->2,T=0,D=1)!",
                  "HI(2->1,T=2,D=1)", "HACK(1->2,T=2,D=1)", "PBU(2->0)", "PBA(0->2)"});
  CHECK (net.Lbs ().Find (11)->serving_mz == 2);
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("lost context degrades to a fresh registration")
{
  auto dir = std::make_shared<AnDirectory> ();
  MixZoneConfig cfg;
  MixZone reported (1, PrefixPool (1ULL << 32, 8), cfg, dir);
  MixZone fresh (2, PrefixPool (2ULL << 32, 8), cfg, dir);
  auto up = fresh.LinkUp ({77, 1000, 0, NodeId{1}}, 0.0);
  REQUIRE (up.out.size () == 1);
  Outbox reply = reported.Handle (up.out[0], 0.0);
  REQUIRE (reply.size () == 1);
  CHECK (reply[0].msg.kind == MessageKind::HACK);
  CHECK (reply[0].msg.nack);
  Outbox next = fresh.Handle (reply[0], 0.0);
  REQUIRE (next.size () == 1);
  CHECK (next[0].msg.kind == MessageKind::PBU);
  CHECK_FALSE (next[0].msg.Has (OptionKind::PLNP_LIST));

  LbsServer lbs (0);
  Outbox acks = lbs.Handle (next[0], 0.0);
  REQUIRE (acks.size () == 1);
  CHECK_FALSE (acks[0].msg.nack);
  CHECK (lbs.Find (77)->serving_mz == 2);
}

TEST_CASE ("binding update at the LBS")
{
  LbsServer lbs (0);
  MobilityMessage pbu;
  pbu.kind = MessageKind::PBU;
  pbu.mu_id = 5;
  pbu.Set (PrefixOption (OptionKind::LNP, Prefix{100}));
  pbu.Set (PrefixListOption ({Prefix{1}}));
  auto r = lbs.Update (3, pbu, 0.0);
  CHECK (r.pba.nack);
  CHECK_FALSE (r.entry);
  CHECK (lbs.Size () == 0);

  MobilityMessage reg = pbu;
  reg.options.clear ();
  reg.Set (PrefixOption (OptionKind::LNP, Prefix{10}));
  r = lbs.Update (1, reg, 1.0);
  REQUIRE (r.entry);
  CHECK (r.entry->anchored.empty ());

  for (NodeId z = 2; z <= 4; ++z)
    {
      MobilityMessage mv;
      mv.kind = MessageKind::PBU;
      mv.mu_id = 5;
      mv.Set (PrefixOption (OptionKind::LNP, Prefix{10 * z}));
      r = lbs.Update (z, mv, z);
      CHECK (r.anchor_updates.size () == z - 1);
    }
  CHECK (r.entry->anchored
         == std::vector<AnchorRef>{{1, Prefix{10}}, {2, Prefix{20}}, {3, Prefix{30}}});
  CHECK (r.entry->serving_mz == 4);
  CHECK (ReadAnchorList (*r.pba.Find (OptionKind::MZ_ADDR)).size () == 3);
}

TEST_CASE ("DDMM handover refreshes anchors through the LBS")
{
  Network net;
  net.AddMu (11, 1);
  net.InitialAttach (11, 1);
  const Trace t = net.DdmmHandover (11, 2);
  CHECK (Render (t)
         == Lines{"RS(1000->2)", "PBU(2->0)", "PBU(0->1)", "PBA(0->2)", "PBA(1->0)",
                  "RA(2->1000)"});
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("prefix expiry tears down the tunnel")
{
  Network net;
  MobileUnit &mu = net.AddMu (11, 1);
  net.InitialAttach (11, 1);
  const Prefix p1 = *mu.Lnp ();
  net.PredictiveHandover (11, 2);
  REQUIRE (net.Zone (2).Tunnels ().Size () == 1);
  net.ExpirePrefix (11, p1);
  CHECK (net.Zone (1).Tunnels ().Size () == 0);
  CHECK (net.Zone (2).Tunnels ().Size () == 0);
  CHECK (mu.Plnps ().empty ());
  CHECK_FALSE (net.Zone (1).Pool ().InUse (p1));
  CHECK_NOTHROW (net.CheckInvariants ());
}

TEST_CASE ("random handover sequences keep the invariants")
{
  for (unsigned seed = 1; seed <= 20; ++seed)
    {
      std::mt19937 rng (seed);
      NetworkConfig cfg;
      cfg.zones = 5;
      Network net (cfg);
      net.AddMu (1, 0);
      net.AddMu (2, 9);
      net.InitialAttach (1, 1);
      net.InitialAttach (2, 3);
      for (int step = 0; step < 150; ++step)
        {
          const MuId id = 1 + rng () % 2;
          MobileUnit &mu = net.Mu (id);
          const NodeId target = 1 + rng () % 5;
          switch (rng () % 4)
            {
            case 0:
              net.PredictiveHandover (id, target);
              break;
            case 1:
              if (target != *mu.ServingMz ())
                {
                  net.ReactiveHandover (id, target);
                }
              break;
            case 2:
              if (target != *mu.ServingMz ())
                {
                  net.DdmmHandover (id, target);
                }
              break;
            default:
              if (!mu.Plnps ().empty ())
                {
                  net.ExpirePrefix (id, mu.Plnps ()[rng () % mu.Plnps ().size ()]);
                }
              break;
            }
          REQUIRE_NOTHROW (net.CheckInvariants ());
        }
    }
}

TEST_CASE ("identical inputs give identical traces")
{
  auto run = [] {
    Network net;
    net.AddMu (11, 3);
    Trace all = net.InitialAttach (11, 1);
    for (NodeId z : {2, 3, 1, 4, 2})
      {
        const Trace t = net.PredictiveHandover (11, z);
        all.insert (all.end (), t.begin (), t.end ());
      }
    return Render (all);
  };
  CHECK (run () == run ());
}
