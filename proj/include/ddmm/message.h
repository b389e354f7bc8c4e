/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_MESSAGE_H
#define DDMM_MESSAGE_H

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddmm {

using NodeId = std::uint32_t;
using MuId = std::uint64_t;

/// A /64 network prefix, identified by its upper 64 bits.
struct Prefix
{
  std::uint64_t value = 0;
  auto operator<=> (const Prefix &) const = default;
};

enum class MessageKind : std::uint8_t
{
  RS = 1,
  RA = 2,
  PBU = 3,
  PBA = 4,
  HI = 5,
  HACK = 6,
  L2_REPORT = 7,
  HANDOVER_COMMAND = 8,
  DATA = 9
};

/// Target type carried by HI/HACK.
enum class TargetType : std::uint8_t
{
  ServingMz = 0,      // HI from the serving zone to the target (predictive)
  AnchoredRsu = 1,    // HI from the new serving zone to an anchoring RSU
  ReportedServer = 2, // HI from the new zone to the reported server (reactive)
};

enum class OptionKind : std::uint8_t
{
  LNP = 1,
  PLNP_LIST = 2,
  LBS_ADDR = 3,
  MU_LLA_IID = 4,
  CONTEXT_REQUEST = 5,
  MZ_ADDR = 6
};

struct MobilityOption
{
  OptionKind kind;
  std::vector<std::uint8_t> payload;
  bool operator== (const MobilityOption &) const = default;
};

struct MobilityMessage
{
  MessageKind kind = MessageKind::RS;
  MuId mu_id = 0;
  bool d_flag = false;
  std::optional<TargetType> t_flag; // HI/HACK only
  bool nack = false;                // negative acknowledgement (binding miss, no context)
  std::vector<MobilityOption> options;

  const MobilityOption *Find (OptionKind k) const;
  bool Has (OptionKind k) const { return Find (k) != nullptr; }
  /// Replaces an existing option of the same kind.
  void Set (MobilityOption opt);

  bool operator== (const MobilityMessage &) const = default;
};

std::string_view KindName (MessageKind k);

/// Throws std::invalid_argument when the message breaks a structural rule
/// (t_flag on a non-HI/HACK, missing t_flag on HI/HACK, duplicate option).
void CheckWellFormed (const MobilityMessage &m);

class DecodeError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint8_t kFrameVersion = 1;

/**
 * Abstract frame: version(1) kind(1) flags(1) mu-id(8) option-count(1)
 * then per option kind(1) length(2) payload. Multi-byte fields are
 * big-endian. Flags: bit0 = D, bits1-2 = T, bit3 = NACK; T bits are only
 * meaningful on HI/HACK.
 */
std::vector<std::uint8_t> Encode (const MobilityMessage &m);
MobilityMessage Decode (std::span<const std::uint8_t> frame);

/// Modelled size on the wire: L_d for DATA, L_c for any control message.
double ModelSize (const MobilityMessage &m, double controlSize, double dataSize);

// Typed option payloads.
MobilityOption PrefixOption (OptionKind kind, Prefix p);
MobilityOption PrefixListOption (const std::vector<Prefix> &list);
MobilityOption NodeOption (OptionKind kind, NodeId id);
MobilityOption LinkLayerIdOption (std::uint64_t iid);

/// (zone, prefix) pairs, as carried in the RSU mobility option.
struct AnchorRef
{
  NodeId mz;
  Prefix prefix;
  bool operator== (const AnchorRef &) const = default;
};
MobilityOption AnchorListOption (const std::vector<AnchorRef> &anchors);

Prefix ReadPrefix (const MobilityOption &o);
std::vector<Prefix> ReadPrefixList (const MobilityOption &o);
NodeId ReadNode (const MobilityOption &o);
std::uint64_t ReadLinkLayerId (const MobilityOption &o);
std::vector<AnchorRef> ReadAnchorList (const MobilityOption &o);

} // namespace ddmm

#endif // DDMM_MESSAGE_H
