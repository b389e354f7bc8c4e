/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/message.h"

#include <algorithm>

namespace ddmm {

namespace {

constexpr std::uint8_t kFlagD = 0x01;
constexpr std::uint8_t kFlagTMask = 0x06;
constexpr int kFlagTShift = 1;
constexpr std::uint8_t kFlagNack = 0x08;
constexpr std::size_t kHeaderSize = 12;

bool
CarriesTarget (MessageKind k)
{
  return k == MessageKind::HI || k == MessageKind::HACK;
}

void
PutU64 (std::vector<std::uint8_t> &out, std::uint64_t v)
{
  for (int shift = 56; shift >= 0; shift -= 8)
    {
      out.push_back (static_cast<std::uint8_t> (v >> shift));
    }
}

void
PutU32 (std::vector<std::uint8_t> &out, std::uint32_t v)
{
  for (int shift = 24; shift >= 0; shift -= 8)
    {
      out.push_back (static_cast<std::uint8_t> (v >> shift));
    }
}

std::uint64_t
GetU64 (std::span<const std::uint8_t> in)
{
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i)
    {
      v = (v << 8) | in[i];
    }
  return v;
}

std::uint32_t
GetU32 (std::span<const std::uint8_t> in)
{
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i)
    {
      v = (v << 8) | in[i];
    }
  return v;
}

void
RequireSize (const MobilityOption &o, std::size_t size)
{
  if (o.payload.size () != size)
    {
      throw DecodeError ("option payload has unexpected size");
    }
}

} // namespace

const MobilityOption *
MobilityMessage::Find (OptionKind k) const
{
  auto it = std::find_if (options.begin (), options.end (),
                          [k] (const MobilityOption &o) { return o.kind == k; });
  return it == options.end () ? nullptr : &*it;
}

void
MobilityMessage::Set (MobilityOption opt)
{
  for (auto &o : options)
    {
      if (o.kind == opt.kind)
        {
          o = std::move (opt);
          return;
        }
    }
  options.push_back (std::move (opt));
}

std::string_view
KindName (MessageKind k)
{
  switch (k)
    {
    case MessageKind::RS:
      return "RS";
    case MessageKind::RA:
      return "RA";
    case MessageKind::PBU:
      return "PBU";
    case MessageKind::PBA:
      return "PBA";
    case MessageKind::HI:
      return "HI";
    case MessageKind::HACK:
      return "HACK";
    case MessageKind::L2_REPORT:
      return "L2_REPORT";
    case MessageKind::HANDOVER_COMMAND:
      return "HANDOVER_COMMAND";
    case MessageKind::DATA:
      return "DATA";
    }
  return "?";
}

void
CheckWellFormed (const MobilityMessage &m)
{
  if (CarriesTarget (m.kind) != m.t_flag.has_value ())
    {
      throw std::invalid_argument ("t_flag must be present exactly on HI/HACK");
    }
  if (m.t_flag && static_cast<std::uint8_t> (*m.t_flag) > 2)
    {
      throw std::invalid_argument ("t_flag out of range");
    }
  if (m.options.size () > 255)
    {
      throw std::invalid_argument ("too many options");
    }
  for (std::size_t i = 0; i < m.options.size (); ++i)
    {
      if (m.options[i].payload.size () > 0xFFFF)
        {
          throw std::invalid_argument ("option payload too large");
        }
      for (std::size_t j = i + 1; j < m.options.size (); ++j)
        {
          if (m.options[i].kind == m.options[j].kind)
            {
              throw std::invalid_argument ("duplicate option kind");
            }
        }
    }
}

std::vector<std::uint8_t>
Encode (const MobilityMessage &m)
{
  CheckWellFormed (m);
  std::vector<std::uint8_t> out;
  out.reserve (kHeaderSize + 8 * m.options.size ());
  out.push_back (kFrameVersion);
  out.push_back (static_cast<std::uint8_t> (m.kind));
  std::uint8_t flags = 0;
  if (m.d_flag)
    {
      flags |= kFlagD;
    }
  if (m.t_flag)
    {
      flags |= static_cast<std::uint8_t> (static_cast<std::uint8_t> (*m.t_flag) << kFlagTShift);
    }
  if (m.nack)
    {
      flags |= kFlagNack;
    }
  out.push_back (flags);
  PutU64 (out, m.mu_id);
  out.push_back (static_cast<std::uint8_t> (m.options.size ()));
  for (const auto &o : m.options)
    {
      out.push_back (static_cast<std::uint8_t> (o.kind));
      out.push_back (static_cast<std::uint8_t> (o.payload.size () >> 8));
      out.push_back (static_cast<std::uint8_t> (o.payload.size ()));
      out.insert (out.end (), o.payload.begin (), o.payload.end ());
    }
  return out;
}

MobilityMessage
Decode (std::span<const std::uint8_t> frame)
{
  if (frame.size () < kHeaderSize)
    {
      throw DecodeError ("truncated header");
    }
  if (frame[0] != kFrameVersion)
    {
      throw DecodeError ("bad version");
    }
  const std::uint8_t kind = frame[1];
  if (kind < 1 || kind > 9)
    {
      throw DecodeError ("unknown message kind");
    }
  MobilityMessage m;
  m.kind = static_cast<MessageKind> (kind);

  const std::uint8_t flags = frame[2];
  if (flags & ~(kFlagD | kFlagTMask | kFlagNack))
    {
      throw DecodeError ("reserved flag bits set");
    }
  m.d_flag = (flags & kFlagD) != 0;
  m.nack = (flags & kFlagNack) != 0;
  const std::uint8_t t = (flags & kFlagTMask) >> kFlagTShift;
  if (CarriesTarget (m.kind))
    {
      if (t > 2)
        {
          throw DecodeError ("t_flag out of range");
        }
      m.t_flag = static_cast<TargetType> (t);
    }
  else if (t != 0)
    {
      throw DecodeError ("t_flag on a message that does not carry one");
    }

  m.mu_id = GetU64 (frame.subspan (3, 8));
  const std::size_t count = frame[11];
  std::size_t pos = kHeaderSize;
  for (std::size_t i = 0; i < count; ++i)
    {
      if (pos + 3 > frame.size ())
        {
          throw DecodeError ("truncated option header");
        }
      const std::uint8_t okind = frame[pos];
      if (okind < 1 || okind > 6)
        {
          throw DecodeError ("unknown option kind");
        }
      const std::size_t len = (static_cast<std::size_t> (frame[pos + 1]) << 8) | frame[pos + 2];
      pos += 3;
      if (pos + len > frame.size ())
        {
          throw DecodeError ("truncated option payload");
        }
      if (m.Has (static_cast<OptionKind> (okind)))
        {
          throw DecodeError ("duplicate option kind");
        }
      m.options.push_back ({static_cast<OptionKind> (okind),
                            {frame.begin () + pos, frame.begin () + pos + len}});
      pos += len;
    }
  if (pos != frame.size ())
    {
      throw DecodeError ("trailing bytes after last option");
    }
  return m;
}

double
ModelSize (const MobilityMessage &m, double controlSize, double dataSize)
{
  return m.kind == MessageKind::DATA ? dataSize : controlSize;
}

MobilityOption
PrefixOption (OptionKind kind, Prefix p)
{
  MobilityOption o{kind, {}};
  PutU64 (o.payload, p.value);
  return o;
}

MobilityOption
PrefixListOption (const std::vector<Prefix> &list)
{
  MobilityOption o{OptionKind::PLNP_LIST, {}};
  for (auto p : list)
    {
      PutU64 (o.payload, p.value);
    }
  return o;
}

MobilityOption
NodeOption (OptionKind kind, NodeId id)
{
  MobilityOption o{kind, {}};
  PutU32 (o.payload, id);
  return o;
}

MobilityOption
LinkLayerIdOption (std::uint64_t iid)
{
  MobilityOption o{OptionKind::MU_LLA_IID, {}};
  PutU64 (o.payload, iid);
  return o;
}

MobilityOption
AnchorListOption (const std::vector<AnchorRef> &anchors)
{
  MobilityOption o{OptionKind::MZ_ADDR, {}};
  for (const auto &a : anchors)
    {
      PutU32 (o.payload, a.mz);
      PutU64 (o.payload, a.prefix.value);
    }
  return o;
}

Prefix
ReadPrefix (const MobilityOption &o)
{
  RequireSize (o, 8);
  return Prefix{GetU64 (o.payload)};
}

std::vector<Prefix>
ReadPrefixList (const MobilityOption &o)
{
  if (o.payload.size () % 8 != 0)
    {
      throw DecodeError ("prefix list payload not a multiple of 8");
    }
  std::vector<Prefix> out;
  std::span<const std::uint8_t> bytes (o.payload);
  for (std::size_t i = 0; i < bytes.size (); i += 8)
    {
      out.push_back (Prefix{GetU64 (bytes.subspan (i, 8))});
    }
  return out;
}

NodeId
ReadNode (const MobilityOption &o)
{
  RequireSize (o, 4);
  return GetU32 (o.payload);
}

std::uint64_t
ReadLinkLayerId (const MobilityOption &o)
{
  RequireSize (o, 8);
  return GetU64 (o.payload);
}

std::vector<AnchorRef>
ReadAnchorList (const MobilityOption &o)
{
  if (o.payload.size () % 12 != 0)
    {
      throw DecodeError ("anchor list payload not a multiple of 12");
    }
  std::vector<AnchorRef> out;
  std::span<const std::uint8_t> bytes (o.payload);
  for (std::size_t i = 0; i < bytes.size (); i += 12)
    {
      out.push_back ({GetU32 (bytes.subspan (i, 4)), Prefix{GetU64 (bytes.subspan (i + 4, 8))}});
    }
  return out;
}

} // namespace ddmm
