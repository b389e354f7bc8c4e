/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/sim.h"

#include "ddmm/event_queue.h"
#include "ddmm/mobility.h"
#include "ddmm/nodes.h"
#include "ddmm/topology.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>

namespace ddmm {

std::string_view
ModeName (HandoverMode m)
{
  switch (m)
    {
    case HandoverMode::PREDICTIVE:
      return "predictive";
    case HandoverMode::REACTIVE:
      return "reactive";
    case HandoverMode::DDMM:
      return "ddmm";
    }
  return "?";
}

Scheme
ModeScheme (HandoverMode m)
{
  switch (m)
    {
    case HandoverMode::PREDICTIVE:
      return Scheme::PRE_FDMM;
    case HandoverMode::REACTIVE:
      return Scheme::RE_FDMM;
    case HandoverMode::DDMM:
      return Scheme::DDMM;
    }
  return Scheme::DDMM;
}

namespace {

constexpr NodeId kLbsNode = 0;
constexpr NodeId kMuBase = 0x10000000;

enum class Phase
{
  INIT,      // first attach, waiting for the RA
  ATTACHED,  // idle on a serving zone
  PREPARING, // handover triggered, old link still up
  DETACHED,  // old link down, L2 attach running
  ATTACHING  // attached at the target, waiting for the path
};

enum class Regime
{
  DIRECT,
  DROP,
  BUFFER
};

struct Flow
{
  Prefix prefix;
  double origin;         // first packet time
  std::uint64_t counted; // packets generated before the last census
};

struct Handover
{
  std::size_t record;
  std::uint64_t serial;
  std::uint32_t target_an;
  bool link_is_down = false;
  bool hack_seen = false;
  bool command = false;
  double ready = -1.0;
};

struct MuState
{
  std::unique_ptr<MobileUnit> node;
  std::unique_ptr<CsmWalker> walker;
  std::uint32_t an = 0;
  NodeId zone = 0;
  Phase phase = Phase::INIT;
  int outstanding = 0;
  bool trigger_pending = false;
  std::optional<Handover> ho;
  std::optional<std::size_t> last_record;
  std::uint64_t serial = 0;

  std::vector<Flow> flows;
  Regime regime = Regime::DIRECT;
  double census_time = 0.0;
  std::uint64_t buffer = 0;
  std::set<Prefix> expiring;
};

std::string
FlagString (const MobilityMessage &m)
{
  std::string s;
  if (m.t_flag)
    {
      s = "D=" + std::to_string (m.d_flag ? 1 : 0)
          + ",T=" + std::to_string (static_cast<int> (*m.t_flag));
    }
  if (m.nack)
    {
      s += s.empty () ? "NACK" : ",NACK";
    }
  return s.empty () ? "-" : s;
}

class Simulator
{
public:
  Simulator (const SystemParameters &p, Scheme scheme, std::uint64_t seed, double duration,
             const SimOptions &opt);
  SimReport Execute ();

private:
  using Action = std::function<void ()>;

  void At (double t, Action a);
  double Now () const { return m_q.Now (); }

  std::size_t IndexOf (MuId id) const { return static_cast<std::size_t> (id - 1); }
  MuId IdOf (std::size_t idx) const { return static_cast<MuId> (idx + 1); }
  MixZone &Zone (NodeId id) { return m_zones.at (id - 1); }

  double WiredDelay (double bytes, int hops) const;
  double WirelessDelay (double bytes);
  int LinkHops (NodeId a, NodeId b) const;
  double PacketCount (const Flow &f, double t) const;

  void Send (Envelope e, double t);
  void Deliver (const Envelope &e);
  void DeliverToMu (const Envelope &e);
  HandoverRecord *Attributed (MuState &m);

  void Sample (std::size_t idx, std::uint64_t k);
  double RssAt (std::size_t idx, double t);
  void Trigger (std::size_t idx);
  void StartHandover (std::size_t idx, std::uint32_t an, NodeId tz);
  void LinkDownEvent (std::size_t idx, std::uint64_t serial);
  void Detach (std::size_t idx);
  void OnHackSeen (std::size_t idx);
  void OnCommand (std::size_t idx);
  void AttachEvent (std::size_t idx, std::uint64_t serial);
  void Complete (std::size_t idx);
  void Expire (std::size_t idx, Prefix p);

  void Census (std::size_t idx, double t);
  void SetRegime (std::size_t idx, Regime r);
  void SyncFlows (std::size_t idx);
  void Finalize ();

  void TraceEvent (NodeId node, const char *event, const MobilityMessage *m);

  SystemParameters m_p;
  Scheme m_scheme;
  std::uint64_t m_seed;
  double m_duration;
  SimOptions m_opt;
  MixZoneTopology m_topo;
  std::mt19937_64 m_rng;
  EventQueue<Action> m_q;
  LbsServer m_lbs;
  std::vector<MixZone> m_zones;
  std::vector<MuState> m_mus;
  std::vector<HandoverRecord> m_records;
  std::vector<bool> m_complete;
  SimCounters m_counters;
  std::uint64_t m_bufferCap;
  double m_attach;
};

Simulator::Simulator (const SystemParameters &p, Scheme scheme, std::uint64_t seed,
                      double duration, const SimOptions &opt)
  : m_p (p),
    m_scheme (scheme),
    m_seed (seed),
    m_duration (duration),
    m_opt (opt),
    m_topo (BuildTopology (p)),
    m_lbs (kLbsNode),
    m_attach (p.l2_latency + p.auth_latency)
{
  if (!(duration > 0.0))
    {
      throw std::invalid_argument ("duration must be positive");
    }
  if (opt.fleet == 0 || !(opt.rss_interval > 0.0))
    {
      throw std::invalid_argument ("fleet and RSS interval must be positive");
    }
  std::seed_seq ss{seed, std::uint64_t{0x6e6574}};
  m_rng.seed (ss);
  m_bufferCap = static_cast<std::uint64_t> (std::floor (p.buffer_size / p.data_packet_size));

  MixZoneConfig zc;
  zc.lbs = kLbsNode;
  m_zones.reserve (m_topo.ZoneCount ());
  for (const auto &z : m_topo.Zones ())
    {
      m_zones.emplace_back (z.id, PrefixPool (z.pool_base, z.pool_size), zc, m_topo.Directory ());
    }
  m_mus.resize (opt.fleet);
  for (std::size_t i = 0; i < opt.fleet; ++i)
    {
      MuState &m = m_mus[i];
      m.node = std::make_unique<MobileUnit> (kMuBase + static_cast<NodeId> (i), IdOf (i),
                                             IdOf (i));
      std::seed_seq ws{seed, static_cast<std::uint64_t> (i), std::uint64_t{0x77616c6b}};
      std::mt19937_64 g (ws);
      m.walker = std::make_unique<CsmWalker> (p, g ());
    }
}

void
Simulator::At (double t, Action a)
{
  if (t <= m_duration)
    {
      m_q.Schedule (t, std::move (a));
    }
}

double
Simulator::WiredDelay (double bytes, int hops) const
{
  return (8.0 * bytes / m_p.wired_bandwidth + m_p.wired_prop_delay) * hops;
}

double
Simulator::WirelessDelay (double bytes)
{
  // Each wireless hop is retried until it succeeds.
  std::geometric_distribution<int> failures (1.0 - m_p.wireless_fail_prob);
  const double attempt = 8.0 * bytes / m_p.wireless_bandwidth + m_p.wireless_prop_delay;
  double d = 0.0;
  for (int h = 0; h < m_p.hops_mu_mz; ++h)
    {
      d += attempt * (1 + failures (m_rng));
    }
  return d;
}

int
Simulator::LinkHops (NodeId a, NodeId b) const
{
  if (a >= kMuBase || b >= kMuBase)
    {
      return m_p.hops_mu_mz;
    }
  if (a == kLbsNode || b == kLbsNode)
    {
      return m_p.hops_lbs_mz;
    }
  return m_topo.Hops (a, b);
}

double
Simulator::PacketCount (const Flow &f, double t) const
{
  return t <= f.origin ? 0.0 : std::ceil ((t - f.origin) * m_p.session_packet_rate);
}

HandoverRecord *
Simulator::Attributed (MuState &m)
{
  if (m.ho)
    {
      return &m_records[m.ho->record];
    }
  if (m.last_record)
    {
      return &m_records[*m.last_record];
    }
  return nullptr;
}

void
Simulator::TraceEvent (NodeId node, const char *event, const MobilityMessage *m)
{
  if (!m_opt.trace)
    {
      return;
    }
  std::ostream &os = *m_opt.trace;
  os << std::fixed << std::setprecision (9) << Now () << '\t' << node << '\t' << event << '\t';
  if (m)
    {
      os << KindName (m->kind) << '\t' << FlagString (*m) << '\t'
         << ModelSize (*m, m_p.control_packet_size, m_p.data_packet_size);
    }
  else
    {
      os << "-\t-\t0";
    }
  os << '\n';
}

void
Simulator::Send (Envelope e, double t)
{
  const int hops = LinkHops (e.from, e.to);
  const double bytes = ModelSize (e.msg, m_p.control_packet_size, m_p.data_packet_size);
  const bool wireless = e.from >= kMuBase || e.to >= kMuBase;
  const double delay = wireless ? WirelessDelay (bytes) : WiredDelay (bytes, hops);

  MuState &m = m_mus.at (IndexOf (e.msg.mu_id));
  ++m.outstanding;
  ++m_counters.control_messages;
  m_counters.control_bytes += bytes;
  m_counters.control_byte_hops += bytes * hops;
  if (HandoverRecord *r = Attributed (m))
    {
      r->control_bytes += bytes;
      r->control_byte_hops += bytes * hops;
    }
  if (wireless && m.ho && m.ho->link_is_down && m.phase == Phase::DETACHED)
    {
      m_records[m.ho->record].wireless_in_gap = true;
    }
  if (m_opt.trace)
    {
      std::ostream &os = *m_opt.trace;
      os << std::fixed << std::setprecision (9) << t << '\t' << e.from << "\tsend\t"
         << KindName (e.msg.kind) << '\t' << FlagString (e.msg) << '\t' << bytes << '\n';
    }
  At (t + delay, [this, e] () { Deliver (e); });
}

void
Simulator::Deliver (const Envelope &e)
{
  const double now = Now ();
  const std::size_t idx = IndexOf (e.msg.mu_id);
  MuState &m = m_mus[idx];
  --m.outstanding;
  TraceEvent (e.to, "recv", &e.msg);

  if (e.to >= kMuBase)
    {
      DeliverToMu (e);
      return;
    }
  if (e.to == kLbsNode)
    {
      const double pc = e.msg.kind == MessageKind::PBU ? m_p.proc_time_lbs : 0.0;
      for (auto &out : m_lbs.Handle (e, now))
        {
          Send (std::move (out), now + pc);
        }
      return;
    }

  const MessageKind k = e.msg.kind;
  const double pc = (k == MessageKind::RS || k == MessageKind::PBA || k == MessageKind::HI)
                        ? m_p.proc_time_mz
                        : 0.0;
  Outbox out = Zone (e.to).Handle (e, now);

  if (k == MessageKind::HACK && e.msg.t_flag == TargetType::ServingMz)
    {
      const bool command = std::any_of (out.begin (), out.end (), [] (const Envelope &o) {
        return o.msg.kind == MessageKind::HANDOVER_COMMAND;
      });
      if (command)
        {
          OnHackSeen (idx);
        }
    }
  for (const auto &o : out)
    {
      if (o.msg.kind == MessageKind::RA && m.ho && m.phase == Phase::ATTACHING)
        {
          m.ho->ready = now + pc;
        }
    }
  const bool reactiveDone = k == MessageKind::HACK
                            && e.msg.t_flag == TargetType::ReportedServer && m.ho
                            && m.phase == Phase::ATTACHING
                            && m_records[m.ho->record].mode == HandoverMode::REACTIVE
                            && e.to == m_records[m.ho->record].to_zone;
  for (auto &o : out)
    {
      Send (std::move (o), now + pc);
    }
  if (reactiveDone)
    {
      m.ho->ready = now;
      Complete (idx);
    }
}

void
Simulator::DeliverToMu (const Envelope &e)
{
  const std::size_t idx = IndexOf (e.msg.mu_id);
  MuState &m = m_mus[idx];
  m.node->Handle (e);
  if (e.msg.kind == MessageKind::RA)
    {
      if (m.phase == Phase::INIT)
        {
          m.phase = Phase::ATTACHED;
          SyncFlows (idx);
        }
      else if (m.ho && m.phase == Phase::ATTACHING
               && m_records[m.ho->record].mode == HandoverMode::DDMM)
        {
          Complete (idx);
        }
    }
  else if (e.msg.kind == MessageKind::HANDOVER_COMMAND)
    {
      OnCommand (idx);
    }
}

double
Simulator::RssAt (std::size_t idx, double t)
{
  MuState &m = m_mus[idx];
  const double d = Distance (m.walker->PositionAt (t), m_topo.AnPosition (m.an));
  return Rss (m_p, std::max (d, 1e-3));
}

void
Simulator::Sample (std::size_t idx, std::uint64_t k)
{
  MuState &m = m_mus[idx];
  const double dt = m_opt.rss_interval;
  const double t = static_cast<double> (k) * dt;
  m.walker->Forget (t);
  if (m.phase == Phase::ATTACHED && m.outstanding == 0 && !m.trigger_pending)
    {
      const double now = RssAt (idx, t);
      const double th = m_p.rss_handover_threshold;
      if (now < th)
        {
          Trigger (idx);
        }
      else
        {
          const double next = RssAt (idx, t + dt);
          if (next < th)
            {
              // Linear interpolation of the crossing between the samples.
              const double tr = t + dt * (now - th) / (now - next);
              m.trigger_pending = true;
              At (tr, [this, idx] () { Trigger (idx); });
            }
        }
    }
  At (static_cast<double> (k + 1) * dt, [this, idx, k] () { Sample (idx, k + 1); });
}

void
Simulator::Trigger (std::size_t idx)
{
  MuState &m = m_mus[idx];
  m.trigger_pending = false;
  if (m.phase != Phase::ATTACHED || m.outstanding != 0)
    {
      return;
    }
  const std::uint32_t an = m_topo.NearestAn (m.walker->PositionAt (Now ()));
  const NodeId tz = m_topo.AnZone (an);
  if (tz == m.zone)
    {
      if (an != m.an)
        {
          m.an = an;
          ++m_counters.intra_zone_switches;
          TraceEvent (m.node->Node (), "l2_switch", nullptr);
        }
      return;
    }
  StartHandover (idx, an, tz);
}

void
Simulator::StartHandover (std::size_t idx, std::uint32_t an, NodeId tz)
{
  MuState &m = m_mus[idx];
  const double now = Now ();
  HandoverRecord r;
  r.mu_index = idx;
  r.scheme = m_scheme;
  r.from_zone = m.zone;
  r.to_zone = tz;
  r.mz_hops = m_topo.Hops (m.zone, tz);
  r.trigger_time = now;
  r.active_prefixes = m.flows.size ();
  switch (m_scheme)
    {
    case Scheme::DDMM:
      r.mode = HandoverMode::DDMM;
      break;
    case Scheme::RE_FDMM:
      r.mode = HandoverMode::REACTIVE;
      break;
    case Scheme::PRE_FDMM: {
      // The reported server must stay audible through the predictive window.
      const double d = Distance (m.walker->PositionAt (now + m_p.phi), m_topo.AnPosition (m.an));
      const bool audible = Rss (m_p, std::max (d, 1e-3)) > m_p.rss_min;
      r.mode = audible ? HandoverMode::PREDICTIVE : HandoverMode::REACTIVE;
      break;
    }
    }
  m_records.push_back (r);
  m_complete.push_back (false);
  m.ho = Handover{m_records.size () - 1, ++m.serial, an};
  m.phase = Phase::PREPARING;
  TraceEvent (m.node->Node (), "trigger", nullptr);

  if (r.mode == HandoverMode::PREDICTIVE)
    {
      Send (m.node->L2Report (an), now);
    }
  const std::uint64_t serial = m.serial;
  At (now + m_p.phi, [this, idx, serial] () { LinkDownEvent (idx, serial); });
}

void
Simulator::Detach (std::size_t idx)
{
  MuState &m = m_mus[idx];
  HandoverRecord &r = m_records[m.ho->record];
  m.ho->link_is_down = true;
  r.link_down = Now ();
  m.node->LinkDown ();
  Zone (r.from_zone).LinkDown (IdOf (idx));
  m.phase = Phase::DETACHED;
  TraceEvent (m.node->Node (), "link_down", nullptr);
}

void
Simulator::LinkDownEvent (std::size_t idx, std::uint64_t serial)
{
  MuState &m = m_mus[idx];
  if (!m.ho || m.ho->serial != serial || m.ho->link_is_down)
    {
      return;
    }
  HandoverRecord &r = m_records[m.ho->record];
  if (r.mode == HandoverMode::PREDICTIVE && m.ho->hack_seen)
    {
      // Forwarding is already set up; the command is still on its way.
      Detach (idx);
      return;
    }
  r.mode = r.mode == HandoverMode::DDMM ? HandoverMode::DDMM : HandoverMode::REACTIVE;
  Detach (idx);
  SetRegime (idx, Regime::DROP);
  At (Now () + m_attach, [this, idx, serial] () { AttachEvent (idx, serial); });
}

void
Simulator::OnHackSeen (std::size_t idx)
{
  MuState &m = m_mus[idx];
  if (!m.ho || m.ho->hack_seen || m_records[m.ho->record].mode != HandoverMode::PREDICTIVE)
    {
      return;
    }
  m.ho->hack_seen = true;
  m_records[m.ho->record].hack_time = Now ();
  SetRegime (idx, Regime::BUFFER);
}

void
Simulator::OnCommand (std::size_t idx)
{
  MuState &m = m_mus[idx];
  if (!m.ho || m.ho->command || m_records[m.ho->record].mode != HandoverMode::PREDICTIVE)
    {
      return;
    }
  m.ho->command = true;
  HandoverRecord &r = m_records[m.ho->record];
  if (!m.ho->link_is_down)
    {
      Detach (idx);
    }
  else
    {
      r.wireless_in_gap = true;
    }
  // Scanning already happened while the old link was up.
  const double attachDone = Now () + m_attach - m_p.scan_time;
  const double bufferEnd
      = std::max (Now (), attachDone - WiredDelay (m_p.data_packet_size, r.mz_hops));
  const std::uint64_t serial = m.serial;
  At (bufferEnd, [this, idx, serial] () {
    MuState &mm = m_mus[idx];
    if (mm.ho && mm.ho->serial == serial && mm.regime == Regime::BUFFER)
      {
        SetRegime (idx, Regime::DIRECT);
      }
  });
  At (attachDone, [this, idx, serial] () { AttachEvent (idx, serial); });
}

void
Simulator::AttachEvent (std::size_t idx, std::uint64_t serial)
{
  MuState &m = m_mus[idx];
  if (!m.ho || m.ho->serial != serial)
    {
      return;
    }
  HandoverRecord &r = m_records[m.ho->record];
  const double now = Now ();
  r.link_up = now;
  std::optional<NodeId> reported;
  if (r.mode == HandoverMode::REACTIVE)
    {
      reported = r.from_zone;
    }
  auto res = Zone (r.to_zone).LinkUp ({IdOf (idx), m.node->Node (), m.node->LinkLayerId (),
                                       reported},
                                      now);
  m.node->LinkUp (r.to_zone, res.granted);
  TraceEvent (m.node->Node (), "link_up", nullptr);
  for (auto &o : res.out)
    {
      Send (std::move (o), now);
    }

  switch (r.mode)
    {
    case HandoverMode::PREDICTIVE:
      Census (idx, now);
      m_counters.delivered += m.buffer;
      m.buffer = 0;
      m.ho->ready = now;
      Complete (idx);
      break;
    case HandoverMode::DDMM:
      m.phase = Phase::ATTACHING;
      Send (m.node->RouterSolicitation (r.to_zone), now);
      break;
    case HandoverMode::REACTIVE:
      m.phase = Phase::ATTACHING;
      break;
    }
}

void
Simulator::Complete (std::size_t idx)
{
  MuState &m = m_mus[idx];
  HandoverRecord &r = m_records[m.ho->record];
  const double now = Now ();
  r.complete = now;
  r.latency = now - r.link_down;
  const double dataTail = WirelessDelay (m_p.data_packet_size);
  if (r.mode == HandoverMode::PREDICTIVE)
    {
      r.session_recovery = r.latency + dataTail;
    }
  else
    {
      r.session_recovery = (m.ho->ready - r.link_down)
                           + WiredDelay (m_p.data_packet_size, r.mz_hops) + dataTail;
    }
  const NodeId residentZone = m_topo.AnZone (m_topo.NearestAn (m.walker->PositionAt (now)));
  r.failed = residentZone != r.to_zone;

  const Scheme s = ModeScheme (r.mode);
  const double nan = std::numeric_limits<double>::quiet_NaN ();
  try
    {
      r.analytic_latency = HandoverLatency (s, m_p, r.mz_hops);
      r.analytic_session_recovery = SessionRecovery (s, m_p, r.mz_hops);
      r.analytic_loss = PacketLoss (s, m_p, std::max<double> (1.0, r.active_prefixes), r.mz_hops);
    }
  catch (const DomainError &)
    {
      r.analytic_latency = r.analytic_session_recovery = r.analytic_loss = nan;
    }

  m_complete[m.ho->record] = true;
  m.last_record = m.ho->record;
  m.an = m.ho->target_an;
  m.zone = r.to_zone;
  m.phase = Phase::ATTACHED;
  const std::uint64_t serial = m.serial;
  const double recovered = std::max (now, r.link_down + r.session_recovery);
  m.ho.reset ();
  TraceEvent (m.node->Node (), "handover_done", nullptr);

  if (m.regime == Regime::DROP)
    {
      At (recovered, [this, idx, serial] () {
        MuState &mm = m_mus[idx];
        if (!mm.ho && mm.serial == serial && mm.regime == Regime::DROP)
          {
            SetRegime (idx, Regime::DIRECT);
          }
      });
    }
  SyncFlows (idx);
}

void
Simulator::Expire (std::size_t idx, Prefix p)
{
  MuState &m = m_mus[idx];
  if (m.phase != Phase::ATTACHED)
    {
      At (Now () + 1.0, [this, idx, p] () { Expire (idx, p); });
      return;
    }
  m.expiring.erase (p);
  if (m.node->Lnp () == p)
    {
      return;
    }
  Census (idx, Now ());
  std::erase_if (m.flows, [p] (const Flow &f) { return f.prefix == p; });
  const MuId id = IdOf (idx);
  m_lbs.ExpirePrefix (id, p);
  for (auto &z : m_zones)
    {
      z.ExpirePrefix (id, p);
    }
  m.node->DropPrefix (p);
  ++m_counters.prefix_expiries;
  TraceEvent (m.node->Node (), "expire", nullptr);
}

void
Simulator::Census (std::size_t idx, double t)
{
  MuState &m = m_mus[idx];
  std::uint64_t n = 0;
  for (auto &f : m.flows)
    {
      const auto total = static_cast<std::uint64_t> (PacketCount (f, t));
      if (total > f.counted)
        {
          n += total - f.counted;
          f.counted = total;
        }
    }
  m.census_time = t;
  m_counters.generated += n;
  std::uint64_t lost = 0;
  switch (m.regime)
    {
    case Regime::DIRECT:
      m_counters.delivered += n;
      break;
    case Regime::DROP:
      lost = n;
      break;
    case Regime::BUFFER: {
      const std::uint64_t room = m_bufferCap > m.buffer ? m_bufferCap - m.buffer : 0;
      const std::uint64_t taken = std::min (n, room);
      m.buffer += taken;
      lost = n - taken;
      m_counters.max_buffered_bytes
          = std::max (m_counters.max_buffered_bytes, m.buffer * m_p.data_packet_size);
      break;
    }
    }
  if (lost)
    {
      m_counters.lost += lost;
      if (HandoverRecord *r = Attributed (m))
        {
          r->bytes_lost += lost * m_p.data_packet_size;
        }
    }
}

void
Simulator::SetRegime (std::size_t idx, Regime r)
{
  Census (idx, Now ());
  m_mus[idx].regime = r;
}

void
Simulator::SyncFlows (std::size_t idx)
{
  MuState &m = m_mus[idx];
  const double now = Now ();
  Census (idx, now);
  std::uniform_real_distribution<double> phase (0.0, 1.0 / m_p.session_packet_rate);
  std::exponential_distribution<double> lifetime (m_p.foreign_prefix_decay_rate);
  for (Prefix p : m.node->Addresses ())
    {
      const bool known = std::any_of (m.flows.begin (), m.flows.end (),
                                      [p] (const Flow &f) { return f.prefix == p; });
      if (!known)
        {
          m.flows.push_back ({p, now + phase (m_rng), 0});
        }
      if (m.node->Lnp () != p && !m.expiring.count (p))
        {
          m.expiring.insert (p);
          At (now + lifetime (m_rng), [this, idx, p] () { Expire (idx, p); });
        }
    }
}

void
Simulator::Finalize ()
{
  const double end = m_duration;
  for (std::size_t i = 0; i < m_mus.size (); ++i)
    {
      MuState &m = m_mus[i];
      if (m.regime == Regime::DIRECT)
        {
          // Packets sent within one wireless hop of the end are still on air.
          const double hop = (8.0 * m_p.data_packet_size / m_p.wireless_bandwidth
                              + m_p.wireless_prop_delay)
                             * m_p.hops_mu_mz / (1.0 - m_p.wireless_fail_prob);
          const double split = std::max (m.census_time, end - hop);
          Census (i, split);
          const std::uint64_t before = m_counters.delivered;
          Census (i, end);
          const std::uint64_t air = m_counters.delivered - before;
          m_counters.delivered -= air;
          m_counters.in_flight += air;
        }
      else
        {
          Census (i, end);
        }
      m_counters.buffered += m.buffer;
    }
}

SimReport
Simulator::Execute ()
{
  for (std::size_t i = 0; i < m_mus.size (); ++i)
    {
      MuState &m = m_mus[i];
      m.an = m_topo.NearestAn (m.walker->PositionAt (0.0));
      m.zone = m_topo.AnZone (m.an);
      auto res = Zone (m.zone).LinkUp ({IdOf (i), m.node->Node (), m.node->LinkLayerId (),
                                        std::nullopt},
                                       0.0);
      m.node->LinkUp (m.zone, res.granted);
      Send (m.node->RouterSolicitation (m.zone), 0.0);
      At (0.0, [this, i] () { Sample (i, 0); });
    }
  while (!m_q.Empty ())
    {
      auto [t, action] = m_q.Pop ();
      action ();
    }
  Finalize ();

  SimReport rep;
  rep.params = m_p;
  rep.scheme = m_scheme;
  rep.seed = m_seed;
  rep.duration = m_duration;
  rep.fleet = m_mus.size ();
  rep.zone_count = m_topo.ZoneCount ();
  for (std::size_t i = 0; i < m_records.size (); ++i)
    {
      if (m_complete[i])
        {
          rep.records.push_back (m_records[i]);
        }
    }
  rep.counters = m_counters;
  return rep;
}

template <typename F>
double
MeanOf (const std::vector<HandoverRecord> &rs, F f)
{
  if (rs.empty ())
    {
      return 0.0;
    }
  double s = 0.0;
  for (const auto &r : rs)
    {
      s += f (r);
    }
  return s / static_cast<double> (rs.size ());
}

} // namespace

std::size_t
SimReport::CountMode (HandoverMode m) const
{
  return static_cast<std::size_t> (std::count_if (
      records.begin (), records.end (), [m] (const HandoverRecord &r) { return r.mode == m; }));
}

double
SimReport::MeanLatency () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.latency; });
}

double
SimReport::MeanSessionRecovery () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.session_recovery; });
}

double
SimReport::MeanBytesLost () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.bytes_lost; });
}

double
SimReport::MeanAnalyticLatency () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.analytic_latency; });
}

double
SimReport::MeanAnalyticSessionRecovery () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.analytic_session_recovery; });
}

double
SimReport::MeanAnalyticLoss () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.analytic_loss; });
}

double
SimReport::FailureFraction () const
{
  return MeanOf (records, [] (const HandoverRecord &r) { return r.failed ? 1.0 : 0.0; });
}

double
SimReport::CrossingRate () const
{
  return static_cast<double> (records.size ()) / (duration * static_cast<double> (fleet));
}

double
SimReport::SignalingRate () const
{
  return counters.control_byte_hops / (duration * static_cast<double> (fleet));
}

SimReport
Run (const SystemParameters &p, Scheme scheme, std::uint64_t seed, double duration,
     const SimOptions &opt)
{
  Simulator sim (p, scheme, seed, duration, opt);
  return sim.Execute ();
}

double
RelativeError (double empirical, double analytic)
{
  return std::abs (empirical - analytic) / std::max (std::abs (analytic), 1e-12);
}

std::vector<ComparisonRow>
EmpiricalVsAnalytic (const SimReport &report, double tolerance)
{
  std::vector<ComparisonRow> rows;
  if (report.records.empty ())
    {
      ComparisonRow r;
      r.metric = "no handovers";
      r.note = "no completed handovers in the run";
      rows.push_back (r);
      return rows;
    }
  const auto add = [&] (std::string metric, double emp, double ana, bool asserted,
                        std::string note) {
    ComparisonRow r;
    r.metric = std::move (metric);
    r.empirical = emp;
    r.analytic = ana;
    r.rel_error = RelativeError (emp, ana);
    r.asserted = asserted;
    r.pass = !asserted || r.rel_error <= tolerance;
    r.note = std::move (note);
    rows.push_back (r);
  };

  add ("latency", report.MeanLatency (), report.MeanAnalyticLatency (), true, "");
  for (HandoverMode m : {HandoverMode::PREDICTIVE, HandoverMode::REACTIVE, HandoverMode::DDMM})
    {
      std::vector<HandoverRecord> sub;
      std::copy_if (report.records.begin (), report.records.end (), std::back_inserter (sub),
                    [m] (const HandoverRecord &r) { return r.mode == m; });
      if (!sub.empty () && sub.size () != report.records.size ())
        {
          add ("latency[" + std::string (ModeName (m)) + "]",
               MeanOf (sub, [] (const HandoverRecord &r) { return r.latency; }),
               MeanOf (sub, [] (const HandoverRecord &r) { return r.analytic_latency; }), true,
               "");
        }
    }
  add ("session_recovery", report.MeanSessionRecovery (), report.MeanAnalyticSessionRecovery (),
       true, "");

  const SystemParameters &p = report.params;
  const MobilityStats mob = ComputeMobilityStats (p);
  add ("crossing_rate", report.CrossingRate (), mob.crossing_rate, false,
       "advisory: zone packing differs from the closed form");
  const double pf = MeanOf (report.records, [&] (const HandoverRecord &r) {
    return HandoverFailureProb (mob.crossing_rate, r.analytic_latency);
  });
  add ("failure_fraction", report.FailureFraction (), pf, false,
       "advisory: residence times are not exponential");
  add ("packet_loss", report.MeanBytesLost (), report.MeanAnalyticLoss (), false,
       "advisory: uses the active prefix count at each handover");
  try
    {
      const PrefixStats ps = ComputePrefixStats (p, mob.crossing_rate);
      add ("signaling_cost", report.SignalingRate (),
           SignalingCost (report.scheme, p, mob.crossing_rate,
                          std::max (1.0, ps.mean_active_prefixes)),
           false, "advisory: includes registrations and prefix refreshes");
    }
  catch (const DomainError &e)
    {
      ComparisonRow r;
      r.metric = "signaling_cost";
      r.empirical = report.SignalingRate ();
      r.note = e.what ();
      rows.push_back (r);
    }
  return rows;
}

FailureValidation
ValidateFailureProb (double mu, double hl, std::size_t trials, std::uint64_t seed)
{
  if (trials == 0 || !(mu > 0.0) || !(hl >= 0.0))
    {
      throw std::invalid_argument ("need trials > 0, mu > 0 and hl >= 0");
    }
  std::mt19937_64 rng (seed);
  std::exponential_distribution<double> residence (mu);
  std::size_t fails = 0;
  for (std::size_t i = 0; i < trials; ++i)
    {
      if (residence (rng) < hl)
        {
          ++fails;
        }
    }
  FailureValidation v{};
  v.empirical = static_cast<double> (fails) / static_cast<double> (trials);
  v.analytic = HandoverFailureProb (mu, hl);
  v.sigma = std::sqrt (v.analytic * (1.0 - v.analytic) / static_cast<double> (trials));
  v.within_3_sigma = std::abs (v.empirical - v.analytic) <= 3.0 * v.sigma + 1e-15;
  return v;
}

} // namespace ddmm
